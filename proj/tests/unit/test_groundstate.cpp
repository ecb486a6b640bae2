#include <catch_amalgamated.hpp>

#include <cmath>

#include "cqnls/groundstate.hpp"
#include "oracles.hpp"

using namespace cqnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io_error;
}

}  // namespace

TEST_CASE("cubic-quintic ground state at omega 0.1", "[groundstate]") {
  const auto gs = solve_ground_state(Model::cubic_quintic, 0.1);
  CHECK(gs.residual_norm <= 1e-12);
  CHECK_THAT(gs.mass, WithinAbs(23.74, 0.05));
  CHECK_THAT(gs.amplitude, WithinAbs(0.75, 0.02));
  CHECK(gs.energy < 0.0);
  for (std::size_t i = 1; i < gs.Q.size(); ++i) CHECK(gs.Q[i] <= gs.Q[i - 1] + 1e-14);
}

TEST_CASE("cubic ground-state mass does not depend on the frequency", "[groundstate]") {
  const auto a = solve_ground_state(Model::cubic, 0.25);
  const auto b = solve_ground_state(Model::cubic, 1.0);
  const auto c = solve_ground_state(Model::cubic, 0.5);
  CHECK_THAT(b.mass, WithinAbs(11.70, 0.1));
  CHECK_THAT(a.mass, WithinRel(b.mass, 1e-6));
  CHECK_THAT(c.mass, WithinRel(b.mass, 1e-6));
  // Q_ω(r) = √ω Q_1(√ω r)
  CHECK_THAT(a.amplitude, WithinRel(0.5 * b.amplitude, 1e-9));
}

TEST_CASE("every converged ground state satisfies both integral identities", "[groundstate][property][oracle]") {
  for (double w : {0.02, 0.05, 0.1, 0.15, 0.18}) {
    const auto gs = solve_ground_state_robust(Model::cubic_quintic, w);
    const auto p = oracle::pohozaev_residuals(gs);
    INFO("omega = " << w);
    CHECK(std::abs(p.nehari) <= 1e-8);
    CHECK(std::abs(p.pohozaev) <= 1e-8);
  }
  for (double w : {0.25, 1.0}) {
    const auto p = oracle::pohozaev_residuals(solve_ground_state(Model::cubic, w));
    INFO("cubic omega = " << w);
    CHECK(std::abs(p.nehari) <= 1e-8);
    CHECK(std::abs(p.pohozaev) <= 1e-8);
  }
}

TEST_CASE("ground-state mass grows with frequency", "[groundstate][property]") {
  const auto rows = ground_state_curves(Model::cubic_quintic, {0.05, 0.1, 0.15});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) REQUIRE(r.state.has_value());
  CHECK(rows[0].state->mass < rows[1].state->mass);
  CHECK(rows[1].state->mass < rows[2].state->mass);
  CHECK_THAT(rows[1].state->mass, WithinAbs(23.74, 0.05));
  CHECK(rows[1].state->energy < 0.0);
  CHECK_THAT(rows[1].state->amplitude, WithinAbs(0.75, 0.02));

  const auto cubic = ground_state_curves(Model::cubic, {0.5, 1.0});
  CHECK_THAT(cubic[0].state->mass, WithinRel(cubic[1].state->mass, 1e-6));
}

TEST_CASE("a small frequency step converges quickly from the previous state", "[groundstate][property]") {
  const auto start = solve_ground_state(Model::cubic_quintic, 0.1);
  const auto next = solve_ground_state(Model::cubic_quintic, 0.1 + 1e-4, {}, &start);
  CHECK(next.iterations <= 10);
  CHECK(next.residual_norm <= 1e-12);
  CHECK(next.mass > start.mass);
}

TEST_CASE("a failed row does not stop the sweep", "[groundstate]") {
  const auto rows = ground_state_curves(Model::cubic_quintic, {0.1, 0.2, 0.12});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].state.has_value());
  CHECK_FALSE(rows[1].state.has_value());
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[2].state.has_value());
}

TEST_CASE("solver rejects inadmissible frequencies", "[groundstate]") {
  CHECK(code_of([] { solve_ground_state(Model::cubic_quintic, 0.19); }) == ErrorCode::invalid_frequency);
  CHECK(code_of([] { solve_ground_state(Model::cubic, 0.0); }) == ErrorCode::invalid_frequency);
}

TEST_CASE("embedding onto the validation grid", "[groundstate]") {
  const auto gs = solve_ground_state(Model::cubic_quintic, 0.1);
  const auto g = make_grid(10, 10, 256, 256);
  auto u = embed_radial(gs, g);
  CHECK_THAT(std::abs(u(128, 128)), WithinRel(gs.amplitude, 1e-14));
  CHECK_THAT(quadrature_mass(u), WithinRel(gs.mass, 1e-5));

  const auto report = refine_on_grid(u, Model::cubic_quintic, 0.1);
  CHECK(report.residual <= 1e-12);
  CHECK(report.newton_iterations <= 3);
  CHECK_THAT(quadrature_mass(u), WithinRel(gs.mass, 1e-6));
}

TEST_CASE("embedding needs a radial extent that covers the grid", "[groundstate]") {
  GroundState truncated;
  truncated.h = 0.1;
  truncated.Q.assign(100, 0.5);
  CHECK(code_of([&] { embed_radial(truncated, make_grid(10, 10, 64, 64)); }) == ErrorCode::domain_mismatch);
  GroundState zero;
  zero.h = 0.1;
  zero.Q.assign(100, 0.0);
  const auto u = embed_radial(zero, make_grid(10, 10, 16, 16));
  CHECK(max_abs(u.values()) == 0.0);
}

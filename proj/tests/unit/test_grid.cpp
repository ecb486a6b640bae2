#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqnls/grid.hpp"
#include "oracles.hpp"

using namespace cqnls;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double spectral_mass(const Spectrum& s) {
  double sum = 0.0;
  for (const auto& z : s.values()) sum += std::norm(z);
  return sum * s.grid().cell_area() / static_cast<double>(s.grid().size());
}

}  // namespace

TEST_CASE("grid spacing and wavenumber extent on the line-soliton validation grid", "[grid]") {
  const auto g = make_grid(40, 3, 1024, 32);
  CHECK_THAT(g.dx(), WithinRel(80.0 * std::numbers::pi / 1024.0, 1e-15));
  CHECK_THAT(g.dy(), WithinRel(6.0 * std::numbers::pi / 32.0, 1e-15));
  double kmax = 0.0;
  for (double k : g.kx()) kmax = std::max(kmax, std::abs(k));
  CHECK_THAT(kmax, WithinRel(512.0 / 40.0, 1e-15));
  CHECK_THAT(g.x(0), WithinRel(-40.0 * std::numbers::pi, 1e-15));
}

TEST_CASE("unit torus wavenumbers come in FFT order", "[grid]") {
  const auto g = make_grid(1, 1, 8, 8);
  const double expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(g.kx()[i] == expected[i]);
    CHECK(g.ky()[i] == expected[i]);
  }
}

TEST_CASE("transverse spacing of the wide unstable grid", "[grid]") {
  CHECK_THAT(make_grid(150, 3, 4096, 128).dy(), WithinRel(6.0 * std::numbers::pi / 128.0, 1e-15));
}

TEST_CASE("invalid grid parameters are rejected", "[grid]") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  CHECK(code_of([] { make_grid(40, 3, 1000, 32); }) == ErrorCode::invalid_configuration);
  CHECK(code_of([] { make_grid(40, 3, 4, 32); }) == ErrorCode::invalid_configuration);
  CHECK(code_of([] { make_grid(0, 3, 64, 32); }) == ErrorCode::invalid_configuration);
  CHECK(code_of([] { make_grid(40, -1, 64, 32); }) == ErrorCode::invalid_configuration);
}

TEST_CASE("forward transform matches the direct DFT sum", "[grid][oracle]") {
  const auto g = make_grid(2, 1.5, 16, 8);
  const auto u = oracle::random_field(g, 7);
  const auto fast = transform(u);
  const auto slow = oracle::direct_dft(u);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < slow.size(); ++i) {
    scale = std::max(scale, std::abs(slow[i]));
    err = std::max(err, std::abs(fast[i] - slow[i]));
  }
  CHECK(err <= 1e-13 * scale);
}

TEST_CASE("round trip reproduces a random field", "[grid]") {
  const auto g = make_grid(5, 2, 128, 64);
  const auto u = oracle::random_field(g, 11);
  const auto back = inverse_transform(transform(u));
  CHECK(max_abs_difference(u.values(), back.values()) <= 1e-13 * max_abs(u.values()));
}

TEST_CASE("constant field has only the zero mode", "[grid]") {
  const auto g = make_grid(3, 2, 32, 16);
  const auto s = transform(sample(g, [](double, double) { return complex(0.7, -0.2); }));
  CHECK_THAT(std::abs(s[0] - complex(0.7, -0.2) * static_cast<double>(g.size())), WithinAbs(0.0, 1e-12));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s[i]) < 1e-12);
}

TEST_CASE("a pure plane wave occupies the single mode kx = 1/Lx", "[grid]") {
  const double Lx = 3.0;
  const auto g = make_grid(Lx, 1, 64, 8);
  const auto s = transform(sample(g, [&](double x, double) { return std::polar(1.0, x / Lx); }));
  std::size_t hits = 0;
  for (std::size_t m = 0; m < g.Ny(); ++m) {
    for (std::size_t j = 0; j < g.Nx(); ++j) {
      if (std::abs(s(j, m)) > 1e-10) {
        ++hits;
        CHECK(m == 0);
        CHECK_THAT(g.kx()[j], WithinRel(1.0 / Lx, 1e-15));
        CHECK_THAT(std::abs(s(j, m)), WithinRel(static_cast<double>(g.size()), 1e-13));
      }
    }
  }
  CHECK(hits == 1);
}

TEST_CASE("transform is linear", "[grid]") {
  const auto g = make_grid(2, 2, 32, 32);
  const auto f = oracle::random_field(g, 1), h = oracle::random_field(g, 2);
  const complex a(0.3, -1.1), b(-2.0, 0.5);
  Field combo(g);
  for (std::size_t i = 0; i < g.size(); ++i) combo[i] = a * f[i] + b * h[i];
  const auto lhs = transform(combo);
  const auto tf = transform(f), th = transform(h);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(lhs[i] - (a * tf[i] + b * th[i])));
  CHECK(err <= 1e-12 * max_abs(lhs.values()));
}

TEST_CASE("Parseval holds for random fields", "[grid][property]") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto g = make_grid(4, 1, 64, 32);
    const auto u = oracle::random_field(g, seed);
    CHECK_THAT(spectral_mass(transform(u)), WithinRel(quadrature_mass(u), 1e-12));
  }
}

TEST_CASE("mass of a y-independent field is 2πLy times the line quadrature", "[grid][property]") {
  const double Ly = 1.7;
  const auto g = make_grid(6, Ly, 128, 16);
  auto f = [](double x) { return complex(std::exp(-x * x), 0.3 * std::sin(x)); };
  const auto u = sample(g, [&](double x, double) { return f(x); });
  double line = 0.0;
  for (std::size_t j = 0; j < g.Nx(); ++j) line += std::norm(f(g.x(j)));
  line *= g.dx();
  CHECK_THAT(quadrature_mass(u), WithinRel(2.0 * std::numbers::pi * Ly * line, 1e-12));
}

TEST_CASE("zero field has vanishing integrals", "[grid]") {
  const auto I = quadrature_integrals(Field(make_grid(1, 1, 8, 8)));
  CHECK(I.mass == 0.0);
  CHECK(I.gradient == 0.0);
  CHECK(I.quartic == 0.0);
  CHECK(I.sextic == 0.0);
}

TEST_CASE("gradient integral of a plane wave", "[grid]") {
  const auto g = make_grid(2, 1, 32, 16);
  const auto u = sample(g, [](double x, double y) { return std::polar(1.0, 1.5 * x + 2.0 * y); });
  const auto I = quadrature_integrals(u);
  const double area = 4.0 * std::numbers::pi * std::numbers::pi * 2.0;
  CHECK_THAT(I.mass, WithinRel(area, 1e-13));
  CHECK_THAT(I.gradient, WithinRel((1.5 * 1.5 + 4.0) * area, 1e-12));
  CHECK_THAT(I.quartic, WithinRel(area, 1e-13));
  CHECK_THAT(I.sextic, WithinRel(area, 1e-13));
}

TEST_CASE("transforms are bit-deterministic", "[grid]") {
  const auto g = make_grid(3, 3, 64, 64);
  const auto u = oracle::random_field(g, 99);
  const auto a = transform(u), b = transform(u);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

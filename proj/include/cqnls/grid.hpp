#pragma once

// Periodic computational domain [-Lx π, Lx π) × [-Ly π, Ly π), FFT plumbing
// and spectrally accurate quadrature.
//
// Memory layout is row-major with x fastest: sample (x_j, y_m) lives at
// index m * Nx + j.
//
// Transform normalization: the forward transform is unnormalized,
//   û(k) = Σ_j u_j e^{-i k·x_j},
// and the inverse carries the factor 1/(Nx Ny). Parseval therefore reads
//   Σ |u|² = (1/(Nx Ny)) Σ |û|².

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <new>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cqnls/error.hpp"
#include "cqnls/model.hpp"

namespace cqnls {

using complex = std::complex<double>;

/// Allocator returning SIMD-aligned storage from fftw_malloc so any buffer
/// can be handed to a plan created on a different buffer.
template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<complex, FftwAllocator<complex>>;

class Grid2D {
 public:
  Grid2D(double Lx, double Ly, std::size_t Nx, std::size_t Ny) : Lx_(Lx), Ly_(Ly), Nx_(Nx), Ny_(Ny) {
    if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly)) {
      throw Error(ErrorCode::invalid_configuration, "Lx and Ly must be positive and finite");
    }
    if (Nx < 8 || Ny < 8 || !std::has_single_bit(Nx) || !std::has_single_bit(Ny)) {
      throw Error(ErrorCode::invalid_configuration,
                  "Nx and Ny must be powers of two >= 8 (got " + std::to_string(Nx) + ", " +
                      std::to_string(Ny) + ")");
    }
    dx_ = 2.0 * std::numbers::pi * Lx_ / static_cast<double>(Nx_);
    dy_ = 2.0 * std::numbers::pi * Ly_ / static_cast<double>(Ny_);
    kx_ = wavenumbers(Nx_, Lx_);
    ky_ = wavenumbers(Ny_, Ly_);
  }

  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  std::size_t Nx() const { return Nx_; }
  std::size_t Ny() const { return Ny_; }
  std::size_t size() const { return Nx_ * Ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }

  double x(std::size_t j) const { return -std::numbers::pi * Lx_ + static_cast<double>(j) * dx_; }
  double y(std::size_t m) const { return -std::numbers::pi * Ly_ + static_cast<double>(m) * dy_; }

  std::span<const double> kx() const { return kx_; }
  std::span<const double> ky() const { return ky_; }

  std::size_t index(std::size_t j, std::size_t m) const { return m * Nx_ + j; }

  /// |k|² for every Fourier node, in storage order.
  std::vector<double> k_squared() const {
    std::vector<double> k2(size());
    for (std::size_t m = 0; m < Ny_; ++m) {
      for (std::size_t j = 0; j < Nx_; ++j) k2[index(j, m)] = kx_[j] * kx_[j] + ky_[m] * ky_[m];
    }
    return k2;
  }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.Lx_ == b.Lx_ && a.Ly_ == b.Ly_ && a.Nx_ == b.Nx_ && a.Ny_ == b.Ny_;
  }

 private:
  static std::vector<double> wavenumbers(std::size_t n, double L) {
    std::vector<double> k(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
      auto s = static_cast<std::ptrdiff_t>(j);
      if (s >= half) s -= static_cast<std::ptrdiff_t>(n);
      k[j] = static_cast<double>(s) / L;
    }
    return k;
  }

  double Lx_, Ly_;
  std::size_t Nx_, Ny_;
  double dx_ = 0.0, dy_ = 0.0;
  std::vector<double> kx_, ky_;
};

inline Grid2D make_grid(double Lx, double Ly, std::size_t Nx, std::size_t Ny) {
  return Grid2D(Lx, Ly, Nx, Ny);
}

struct PhysicalSpace {};
struct FourierSpace {};

/// Complex samples on a grid, tagged by the space they live in so physical
/// fields and spectra cannot be mixed up.
template <class Space>
class GridFunction {
 public:
  explicit GridFunction(Grid2D grid) : grid_(std::move(grid)), values_(grid_.size(), complex{}) {}

  const Grid2D& grid() const { return grid_; }
  std::span<complex> values() { return values_; }
  std::span<const complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  complex& operator()(std::size_t j, std::size_t m) { return values_[grid_.index(j, m)]; }
  const complex& operator()(std::size_t j, std::size_t m) const { return values_[grid_.index(j, m)]; }
  complex& operator[](std::size_t i) { return values_[i]; }
  const complex& operator[](std::size_t i) const { return values_[i]; }

  complex* data() { return values_.data(); }
  const complex* data() const { return values_.data(); }

  GridFunction& operator*=(complex s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

 private:
  Grid2D grid_;
  ComplexBuffer values_;
};

using Field = GridFunction<PhysicalSpace>;
using Spectrum = GridFunction<FourierSpace>;

/// Sample f(x, y) at every node.
template <class F>
Field sample(const Grid2D& g, F&& f) {
  Field u(g);
  for (std::size_t m = 0; m < g.Ny(); ++m) {
    const double y = g.y(m);
    for (std::size_t j = 0; j < g.Nx(); ++j) u(j, m) = f(g.x(j), y);
  }
  return u;
}

/// Complex product without the C99 Annex G NaN/Inf recovery path, which
/// otherwise dominates the pointwise kernels.
inline complex mul(complex a, complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline bool all_finite(std::span<const complex> v) {
  return std::all_of(v.begin(), v.end(),
                     [](const complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Both reductions compare squared moduli and take one square root, which
// keeps hypot out of the hot loop. A NaN entry propagates to the result.
inline double max_abs(std::span<const complex> v) {
  double m = 0.0;
  for (const auto& z : v) {
    const double n = std::norm(z);
    if (!(n <= m)) m = n;
  }
  return std::sqrt(m);
}

inline double max_abs_difference(std::span<const complex> a, std::span<const complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double n = std::norm(a[i] - b[i]);
    if (!(n <= m)) m = n;
  }
  return std::sqrt(m);
}

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Thread count for FFTW, taken once from CQNLS_THREADS (default 1).
inline int configured_fft_threads() {
  static const int n = [] {
    const char* env = std::getenv("CQNLS_THREADS");
    int threads = env ? std::atoi(env) : 1;
    threads = std::max(threads, 1);
    if (threads > 1) fftw_init_threads();
    return threads;
  }();
  return n;
}

}  // namespace detail

/// Owns a forward/backward pair of FFTW plans for one grid shape.
///
/// Plans use FFTW_ESTIMATE so the chosen algorithm, and therefore the
/// rounding, is the same on every run. Execution is reentrant; planning is
/// serialized through a global mutex.
class FftEngine {
 public:
  explicit FftEngine(const Grid2D& g) : nx_(g.Nx()), ny_(g.Ny()) {
    const int threads = detail::configured_fft_threads();
    ComplexBuffer a(g.size()), b(g.size());
    std::lock_guard lock(detail::planner_mutex());
    if (threads > 1) fftw_plan_with_nthreads(threads);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const int n0 = static_cast<int>(ny_), n1 = static_cast<int>(nx_);
    forward_.reset(fftw_plan_dft_2d(n0, n1, in, out, FFTW_FORWARD, FFTW_ESTIMATE));
    backward_.reset(fftw_plan_dft_2d(n0, n1, in, out, FFTW_BACKWARD, FFTW_ESTIMATE));
    if (!forward_ || !backward_) throw Error(ErrorCode::invalid_configuration, "FFTW planning failed");
  }

  /// Unnormalized forward transform; in and out may alias.
  void forward(std::span<const complex> in, std::span<complex> out) const {
    execute(forward_.get(), in, out);
  }

  /// Inverse transform including the 1/(Nx Ny) factor; in and out may alias.
  void inverse(std::span<const complex> in, std::span<complex> out) const {
    execute(backward_.get(), in, out);
    const double scale = 1.0 / static_cast<double>(nx_ * ny_);
    for (auto& z : out) z *= scale;
  }

  Spectrum forward(const Field& u) const {
    Spectrum s(u.grid());
    forward(u.values(), s.values());
    return s;
  }

  Field inverse(const Spectrum& s) const {
    Field u(s.grid());
    inverse(s.values(), u.values());
    return u;
  }

 private:
  struct PlanDeleter {
    void operator()(fftw_plan p) const {
      std::lock_guard lock(detail::planner_mutex());
      fftw_destroy_plan(p);
    }
  };
  using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

  void execute(fftw_plan plan, std::span<const complex> in, std::span<complex> out) const {
    // FFTW's new-array interface wants a non-const input pointer; it does
    // not write to it for out-of-place plans.
    auto* i = reinterpret_cast<fftw_complex*>(const_cast<complex*>(in.data()));
    auto* o = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, i, o);
  }

  std::size_t nx_, ny_;
  Plan forward_, backward_;
};

inline Spectrum transform(const Field& u) { return FftEngine(u.grid()).forward(u); }
inline Field inverse_transform(const Spectrum& s) { return FftEngine(s.grid()).inverse(s); }

/// Zero every mode outside the central 2/3 of each axis (Orszag's rule).
inline void dealias_two_thirds(Spectrum& s) {
  const auto& g = s.grid();
  const double kx_cut = static_cast<double>(g.Nx()) / (3.0 * g.Lx());
  const double ky_cut = static_cast<double>(g.Ny()) / (3.0 * g.Ly());
  for (std::size_t m = 0; m < g.Ny(); ++m) {
    for (std::size_t j = 0; j < g.Nx(); ++j) {
      if (std::abs(g.kx()[j]) > kx_cut || std::abs(g.ky()[m]) > ky_cut) s(j, m) = 0.0;
    }
  }
}

/// The four integrals entering mass and energy.
struct Integrals {
  double mass = 0.0;      ///< ∫|u|²
  double gradient = 0.0;  ///< ∫|∇u|²
  double quartic = 0.0;   ///< ∫|u|⁴
  double sextic = 0.0;    ///< ∫|u|⁶
};

/// E = ½∫|∇u|² − ¼∫|u|⁴ + (σ/6)∫|u|⁶, the Hamiltonian conserved by
/// i u_t + Δu = −|u|²u + σ|u|⁴u.
inline double energy(const Integrals& I, Model model) {
  return 0.5 * I.gradient - 0.25 * I.quartic + quintic_coefficient(model) * I.sextic / 6.0;
}

inline double quadrature_mass(const Field& u) {
  double s = 0.0;
  for (const auto& z : u.values()) s += std::norm(z);
  return s * u.grid().cell_area();
}

/// Same as quadrature_integrals(u) but reuses an existing spectrum of u.
inline Integrals quadrature_integrals(const Field& u, const Spectrum& uhat) {
  const auto& g = u.grid();
  Integrals I;
  for (const auto& z : u.values()) {
    const double a2 = std::norm(z);
    I.mass += a2;
    I.quartic += a2 * a2;
    I.sextic += a2 * a2 * a2;
  }
  double grad = 0.0;
  for (std::size_t m = 0; m < g.Ny(); ++m) {
    const double ky2 = g.ky()[m] * g.ky()[m];
    for (std::size_t j = 0; j < g.Nx(); ++j) {
      grad += (g.kx()[j] * g.kx()[j] + ky2) * std::norm(uhat(j, m));
    }
  }
  const double area = g.cell_area();
  I.mass *= area;
  I.quartic *= area;
  I.sextic *= area;
  I.gradient = grad * area / static_cast<double>(g.size());
  return I;
}

inline Integrals quadrature_integrals(const Field& u) { return quadrature_integrals(u, transform(u)); }

}  // namespace cqnls

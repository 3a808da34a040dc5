#pragma once

// Discrete time/frequency grid, complex envelope fields and the Fourier
// transform convention shared by every other module.
//
// Convention: E(W) = integral E(t) exp(-i W t) dt and
//             E(t) = 1/(2 pi) integral E(W) exp(+i W t) dW,
// discretised as E(W_k) = dt * sum_j E(t_j) exp(-i W_k t_j). A spectral
// phase exp(-i W tau) therefore delays the pulse by +tau, and
// sum |E(t)|^2 dt == sum |E(W)|^2 dW / (2 pi).

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace i2pie {

using cplx = std::complex<double>;

class Grid {
 public:
  // n_samples must be a power of two >= 8, time_window in seconds > 0.
  static Grid make(std::size_t n_samples, double time_window);

  std::size_t size() const noexcept { return n_; }
  double time_window() const noexcept { return window_; }
  double dt() const noexcept { return window_ / static_cast<double>(n_); }
  double domega() const noexcept;

  // Zero-centred axes: index size()/2 maps to t = 0 and W = 0.
  double time(std::size_t j) const noexcept { return offset(j) * dt(); }
  double omega(std::size_t j) const noexcept { return offset(j) * domega(); }
  std::vector<double> time_axis() const;
  std::vector<double> omega_axis() const;

  // Optional carrier annotation (rad/s); arithmetic never uses it.
  std::optional<double> carrier() const noexcept { return carrier_; }
  Grid with_carrier(double omega0) const;

  // Two grids are interchangeable when samples and window agree; the
  // carrier is metadata and does not take part.
  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && window_ == other.window_;
  }

 private:
  Grid(std::size_t n, double window) : n_(n), window_(window) {}
  double offset(std::size_t j) const noexcept {
    return static_cast<double>(j) - static_cast<double>(n_ / 2);
  }

  std::size_t n_;
  double window_;
  std::optional<double> carrier_;
};

enum class Domain { Time, Freq };

class Field {
 public:
  Field(Grid grid, std::vector<cplx> samples, Domain domain);

  static Field zeros(const Grid& grid, Domain domain) {
    return Field(grid, std::vector<cplx>(grid.size()), domain);
  }

  const Grid& grid() const noexcept { return grid_; }
  Domain domain() const noexcept { return domain_; }
  std::span<const cplx> samples() const noexcept { return samples_; }
  const cplx& operator[](std::size_t j) const { return samples_[j]; }
  std::size_t size() const noexcept { return samples_.size(); }

  // Energy under the quadrature weight of the current domain:
  // sum |E|^2 dt (time) or sum |E|^2 dW / 2pi (frequency).
  double energy() const noexcept;
  Field scaled(double factor) const;
  std::vector<double> intensity() const;

 private:
  Grid grid_;
  std::vector<cplx> samples_;
  Domain domain_;
};

Field to_freq(const Field& field);
Field to_time(const Field& field);

// First moment of the temporal intensity. Accepts either domain.
double first_moment_time(const Field& field);

// Raw transform kernels on zero-centred sample arrays. These are the only
// entry points into the FFT backend; in and out may alias.
void time_to_freq(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);
void freq_to_time(const Grid& grid, std::span<const cplx> in, std::span<cplx> out);

}  // namespace i2pie

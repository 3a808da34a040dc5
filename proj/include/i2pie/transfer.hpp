#pragma once

// Phase-only transfer functions, their parametric families, and the
// duration-based bounds used to size a family scan from the fundamental
// spectrum alone.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "i2pie/signal.hpp"

namespace i2pie {

// psi(W) = q * W^order
struct PolynomialPhase {
  int order = 2;
  double coefficient = 0.0;  // s^order

  bool operator==(const PolynomialPhase&) const = default;
};

// psi(W) = amplitude * cos(W * tau + phi)
struct SinusoidalPhase {
  double amplitude = 0.0;  // rad
  double tau = 0.0;        // s
  double phi = 0.0;        // rad

  bool operator==(const SinusoidalPhase&) const = default;
};

class PhaseSpec {
 public:
  static PhaseSpec polynomial(int order, double coefficient);
  static PhaseSpec sinusoidal(double amplitude, double tau, double phi);

  bool is_polynomial() const noexcept { return std::holds_alternative<PolynomialPhase>(params_); }
  const PolynomialPhase& as_polynomial() const { return std::get<PolynomialPhase>(params_); }
  const SinusoidalPhase& as_sinusoidal() const { return std::get<SinusoidalPhase>(params_); }

  double phase(double omega) const noexcept;
  // Analytic d(psi)/dW.
  double derivative(double omega) const noexcept;

  bool operator==(const PhaseSpec&) const = default;

 private:
  explicit PhaseSpec(std::variant<PolynomialPhase, SinusoidalPhase> p) : params_(p) {}
  std::variant<PolynomialPhase, SinusoidalPhase> params_;
};

std::vector<double> eval_phase(const PhaseSpec& spec, const Grid& grid);
// exp(i psi(W_j)) on the grid.
std::vector<cplx> transfer_function(const PhaseSpec& spec, const Grid& grid);

// Explicit: members listed one by one (e.g. ingested measurement files).
enum class ScanRule { QuadraticQ, SinusPhi, SinusA, SinusTau, Explicit };

// How the signed enumeration (n - N/2 - 1) of the q- and a-scans is scaled.
//   Span: members cover [-bound, bound) so the extreme member sits at the
//         computed bound.
//   Step: the bound is used as the step between neighbouring members.
enum class ScanScaling { Span, Step };

std::string to_string(ScanRule rule);
ScanRule scan_rule_from_string(const std::string& name);
std::string to_string(ScanScaling scaling);
ScanScaling scan_scaling_from_string(const std::string& name);

// Fully resolved description of a family scan: given this, the member list
// is reproducible without the spectrum that produced the bound.
struct ScanDescriptor {
  ScanRule rule = ScanRule::QuadraticQ;
  int n_members = 0;
  ScanScaling scaling = ScanScaling::Span;
  int order = 2;           // QuadraticQ only
  double amplitude = 0.0;  // fixed a (SinusPhi, SinusTau)
  double tau = 0.0;        // fixed tau (SinusPhi, SinusA)
  double phi = 0.0;        // fixed phi (SinusA, SinusTau)
  double bound = 0.0;      // q_max, a_max or tau_max depending on rule

  bool operator==(const ScanDescriptor&) const = default;
};

struct PhaseFamily {
  std::vector<PhaseSpec> members;
  ScanDescriptor scan;

  std::size_t size() const noexcept { return members.size(); }
};

// Enumerate the members of a resolved scan.
PhaseFamily enumerate_family(const ScanDescriptor& scan);
// Checks N >= 2 and that all members share kind and non-scanned parameters.
void validate_family(const PhaseFamily& family);

// ---------------------------------------------------------------------------
// Bounds

struct BoundInputs {
  Grid grid;
  std::vector<double> spectrum;  // I(W) on grid, nonnegative
  double gamma = 0.125;

  double time_window() const noexcept { return grid.time_window(); }
};

// Rescale I so that (1/2pi) sum I dW = 1.
std::vector<double> unit_energy_spectrum(std::span<const double> spectrum, const Grid& grid);

// Bandwidth-limited duration from A = sqrt(I) as given (no normalisation).
double sigma0(std::span<const double> spectrum, const Grid& grid);
// sqrt(gamma_t^2 - sigma0^2); NoAdmissibleBound unless gamma_t > sigma0.
double sigma_psi(double gamma_t, double sigma0);
// sqrt(gamma^2 T^2 - sigma0^2), with sigma0 of the unit-energy spectrum.
double sigma_psi(const BoundInputs& inputs);
// Duration of the unit-energy pulse with spectrum I after applying `phase`,
// assuming the first temporal moment vanishes.
double modulated_duration(std::span<const double> spectrum, const PhaseSpec& phase, const Grid& grid);
double q_max(const BoundInputs& inputs, int order);
// G(t) = (1/2pi) sum I(W_j) exp(i W_j t) dW, spectrum taken as given.
cplx spectral_autocorr(std::span<const double> spectrum, const Grid& grid, double t);

enum class FixedParam { Tau, Amplitude };
struct FixedValue {
  FixedParam which;
  double value;
};

// P = a_max * tau_max = sqrt(2 sigma_psi^2 / G(0)), phase independent.
double a_tau_product(double sigma_psi, double g0);
double a_tau_product(const BoundInputs& inputs);
// Keeps the Re{G(2 tau) exp(2 i phi)} term in the denominator.
double a_tau_product_exact(const BoundInputs& inputs, double tau, double phi);
// Returns a_max for a fixed tau or tau_max for a fixed amplitude.
double a_tau_bound(const BoundInputs& inputs, FixedValue fixed);

// Scan request before the bound has been computed for a given spectrum.
struct ScanRequest {
  ScanRule rule = ScanRule::QuadraticQ;
  int n_members = 0;
  ScanScaling scaling = ScanScaling::Span;
  int order = 2;
  std::optional<double> amplitude;  // SinusPhi: if empty, a_max from tau
  std::optional<double> tau;
  double phi = 0.0;
};

ScanDescriptor resolve_scan(const ScanRequest& request, const BoundInputs& inputs);
PhaseFamily build_family(const ScanRequest& request, const BoundInputs& inputs);

}  // namespace i2pie

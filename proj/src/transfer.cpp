#include "i2pie/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "i2pie/errors.hpp"

namespace i2pie {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_spectrum(std::span<const double> spectrum, const Grid& grid) {
  if (spectrum.size() != grid.size())
    throw ShapeMismatch("spectrum length " + std::to_string(spectrum.size()) + " does not match grid size " +
                        std::to_string(grid.size()));
  double total = 0.0;
  for (double v : spectrum) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("spectrum must be finite and nonnegative");
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateInput("spectrum has zero total intensity");
}

// (1/2pi) sum f(W_j) I_j dW
template <typename F>
double spectral_mean(std::span<const double> spectrum, const Grid& grid, F&& f) {
  double sum = 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) sum += f(grid.omega(j)) * spectrum[j];
  return sum * grid.domega() / kTwoPi;
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhaseSpec

PhaseSpec PhaseSpec::polynomial(int order, double coefficient) {
  if (order < 2) throw InvalidArgument("polynomial phase order must be >= 2");
  if (!std::isfinite(coefficient)) throw InvalidArgument("polynomial coefficient must be finite");
  return PhaseSpec(PolynomialPhase{order, coefficient});
}

PhaseSpec PhaseSpec::sinusoidal(double amplitude, double tau, double phi) {
  if (!std::isfinite(amplitude) || !std::isfinite(tau) || !std::isfinite(phi))
    throw InvalidArgument("sinusoidal phase parameters must be finite");
  return PhaseSpec(SinusoidalPhase{amplitude, tau, phi});
}

double PhaseSpec::phase(double omega) const noexcept {
  if (const auto* p = std::get_if<PolynomialPhase>(&params_)) return p->coefficient * ipow(omega, p->order);
  const auto& s = std::get<SinusoidalPhase>(params_);
  return s.amplitude * std::cos(omega * s.tau + s.phi);
}

double PhaseSpec::derivative(double omega) const noexcept {
  if (const auto* p = std::get_if<PolynomialPhase>(&params_))
    return p->order * p->coefficient * ipow(omega, p->order - 1);
  const auto& s = std::get<SinusoidalPhase>(params_);
  return -s.amplitude * s.tau * std::sin(omega * s.tau + s.phi);
}

std::vector<double> eval_phase(const PhaseSpec& spec, const Grid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = spec.phase(grid.omega(j));
  return out;
}

std::vector<cplx> transfer_function(const PhaseSpec& spec, const Grid& grid) {
  std::vector<cplx> out(grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::polar(1.0, spec.phase(grid.omega(j)));
  return out;
}

// ---------------------------------------------------------------------------
// Families

std::string to_string(ScanRule rule) {
  switch (rule) {
    case ScanRule::QuadraticQ: return "quadratic_q";
    case ScanRule::SinusPhi: return "sinus_phi";
    case ScanRule::SinusA: return "sinus_a";
    case ScanRule::SinusTau: return "sinus_tau";
    case ScanRule::Explicit: return "explicit";
  }
  return "unknown";
}

ScanRule scan_rule_from_string(const std::string& name) {
  if (name == "quadratic_q") return ScanRule::QuadraticQ;
  if (name == "sinus_phi") return ScanRule::SinusPhi;
  if (name == "sinus_a") return ScanRule::SinusA;
  if (name == "sinus_tau") return ScanRule::SinusTau;
  if (name == "explicit") return ScanRule::Explicit;
  throw InvalidArgument("unknown scan rule '" + name + "'");
}

std::string to_string(ScanScaling scaling) { return scaling == ScanScaling::Span ? "span" : "step"; }

ScanScaling scan_scaling_from_string(const std::string& name) {
  if (name == "span") return ScanScaling::Span;
  if (name == "step") return ScanScaling::Step;
  throw InvalidArgument("unknown scan scaling '" + name + "'");
}

PhaseFamily enumerate_family(const ScanDescriptor& scan) {
  if (scan.n_members < 2) throw InvalidArgument("a family needs at least two members");
  if (scan.rule == ScanRule::Explicit) throw InvalidArgument("an explicit family cannot be enumerated from its scan");
  const int n_total = scan.n_members;
  // signed multiplier (n - N/2 - 1), optionally rescaled so the extreme is 1
  auto signed_multiplier = [&](int n) {
    const double m = static_cast<double>(n) - static_cast<double>(n_total / 2) - 1.0;
    return scan.scaling == ScanScaling::Span ? m / static_cast<double>(n_total / 2) : m;
  };

  PhaseFamily family;
  family.scan = scan;
  family.members.reserve(static_cast<std::size_t>(n_total));
  for (int n = 1; n <= n_total; ++n) {
    switch (scan.rule) {
      case ScanRule::QuadraticQ:
        family.members.push_back(PhaseSpec::polynomial(scan.order, signed_multiplier(n) * scan.bound));
        break;
      case ScanRule::SinusPhi:
        family.members.push_back(
            PhaseSpec::sinusoidal(scan.amplitude, scan.tau, kTwoPi * (n - 1) / static_cast<double>(n_total)));
        break;
      case ScanRule::SinusA:
        family.members.push_back(PhaseSpec::sinusoidal(signed_multiplier(n) * scan.bound, scan.tau, scan.phi));
        break;
      case ScanRule::SinusTau:
        family.members.push_back(
            PhaseSpec::sinusoidal(scan.amplitude, scan.bound * n / static_cast<double>(n_total), scan.phi));
        break;
      case ScanRule::Explicit:
        break;
    }
  }
  return family;
}

void validate_family(const PhaseFamily& family) {
  if (family.members.size() < 2) throw ValidationError("a family needs at least two members");
  const bool poly = family.members.front().is_polynomial();
  for (const auto& m : family.members)
    if (m.is_polynomial() != poly) throw ValidationError("family members must share their kind");

  if (poly) {
    const int order = family.members.front().as_polynomial().order;
    for (const auto& m : family.members)
      if (m.as_polynomial().order != order) throw ValidationError("polynomial family members must share order");
    return;
  }
  // Sinusoidal: exactly the scanned parameter may vary.
  const auto& first = family.members.front().as_sinusoidal();
  bool same_a = true, same_tau = true, same_phi = true;
  for (const auto& m : family.members) {
    const auto& s = m.as_sinusoidal();
    same_a &= s.amplitude == first.amplitude;
    same_tau &= s.tau == first.tau;
    same_phi &= s.phi == first.phi;
  }
  const int varying = !same_a + !same_tau + !same_phi;
  if (varying > 1) throw ValidationError("sinusoidal family members may differ in one parameter only");
}

// ---------------------------------------------------------------------------
// Bounds

std::vector<double> unit_energy_spectrum(std::span<const double> spectrum, const Grid& grid) {
  check_spectrum(spectrum, grid);
  const double energy = spectral_mean(spectrum, grid, [](double) { return 1.0; });
  std::vector<double> out(spectrum.begin(), spectrum.end());
  for (auto& v : out) v /= energy;
  return out;
}

double sigma0(std::span<const double> spectrum, const Grid& grid) {
  check_spectrum(spectrum, grid);
  const std::size_t n = spectrum.size();
  const double floor = 1e-12 * *std::max_element(spectrum.begin(), spectrum.end());
  std::vector<double> amp(n);
  std::transform(spectrum.begin(), spectrum.end(), amp.begin(), [](double v) { return std::sqrt(v); });

  const double dw = grid.domega();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (spectrum[j] < floor) continue;
    double d;
    if (j == 0)
      d = (amp[1] - amp[0]) / dw;
    else if (j == n - 1)
      d = (amp[n - 1] - amp[n - 2]) / dw;
    else
      d = (amp[j + 1] - amp[j - 1]) / (2.0 * dw);
    sum += d * d;
  }
  return std::sqrt(sum * dw / kTwoPi);
}

double sigma_psi(double gamma_t, double s0) {
  if (!(gamma_t > s0))
    throw NoAdmissibleBound("gamma*T = " + std::to_string(gamma_t) + " s does not exceed sigma0 = " +
                            std::to_string(s0) + " s");
  return std::sqrt(gamma_t * gamma_t - s0 * s0);
}

double sigma_psi(const BoundInputs& inputs) {
  if (!(inputs.gamma > 0.0 && inputs.gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  const auto unit = unit_energy_spectrum(inputs.spectrum, inputs.grid);
  return sigma_psi(inputs.gamma * inputs.time_window(), sigma0(unit, inputs.grid));
}

double modulated_duration(std::span<const double> spectrum, const PhaseSpec& phase, const Grid& grid) {
  const auto unit = unit_energy_spectrum(spectrum, grid);
  const double s0 = sigma0(unit, grid);
  const double broadening = spectral_mean(unit, grid, [&](double w) {
    const double d = phase.derivative(w);
    return d * d;
  });
  return std::sqrt(s0 * s0 + broadening);
}

double q_max(const BoundInputs& inputs, int order) {
  if (order < 2) throw InvalidArgument("polynomial order must be >= 2");
  const double s_psi = sigma_psi(inputs);
  const auto unit = unit_energy_spectrum(inputs.spectrum, inputs.grid);
  const double moment = spectral_mean(unit, inputs.grid, [&](double w) { return ipow(w, 2 * (order - 1)); });
  const double denom = order * order * moment;
  if (!(denom > 0.0)) throw NoAdmissibleBound("spectrum has no weight away from W = 0");
  return std::sqrt(s_psi * s_psi / denom);
}

cplx spectral_autocorr(std::span<const double> spectrum, const Grid& grid, double t) {
  if (spectrum.size() != grid.size()) throw ShapeMismatch("spectrum length does not match grid size");
  cplx sum = 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) sum += spectrum[j] * std::polar(1.0, grid.omega(j) * t);
  return sum * (grid.domega() / kTwoPi);
}

double a_tau_product(double s_psi, double g0) {
  if (!(g0 > 0.0)) throw DegenerateInput("G(0) must be positive");
  return std::sqrt(2.0 * s_psi * s_psi / g0);
}

double a_tau_product(const BoundInputs& inputs) {
  const double s_psi = sigma_psi(inputs);
  const auto unit = unit_energy_spectrum(inputs.spectrum, inputs.grid);
  return a_tau_product(s_psi, spectral_autocorr(unit, inputs.grid, 0.0).real());
}

double a_tau_product_exact(const BoundInputs& inputs, double tau, double phi) {
  const double s_psi = sigma_psi(inputs);
  const auto unit = unit_energy_spectrum(inputs.spectrum, inputs.grid);
  const double g0 = spectral_autocorr(unit, inputs.grid, 0.0).real();
  const double g2 = (spectral_autocorr(unit, inputs.grid, 2.0 * tau) * std::polar(1.0, 2.0 * phi)).real();
  if (!(g0 - g2 > 0.0)) throw NoAdmissibleBound("G(0) - Re{G(2 tau) exp(2 i phi)} is not positive");
  return std::sqrt(2.0 * s_psi * s_psi / (g0 - g2));
}

double a_tau_bound(const BoundInputs& inputs, FixedValue fixed) {
  if (!(fixed.value > 0.0) || !std::isfinite(fixed.value))
    throw InvalidArgument("fixed sinusoidal parameter must be positive");
  return a_tau_product(inputs) / fixed.value;
}

ScanDescriptor resolve_scan(const ScanRequest& request, const BoundInputs& inputs) {
  if (request.n_members < 2) throw InvalidArgument("a family needs at least two members");
  ScanDescriptor scan;
  scan.rule = request.rule;
  scan.n_members = request.n_members;
  scan.scaling = request.scaling;
  scan.phi = request.phi;

  auto require = [](const std::optional<double>& v, const char* what) {
    if (!v) throw InvalidArgument(std::string("scan needs a fixed ") + what);
    return *v;
  };

  switch (request.rule) {
    case ScanRule::QuadraticQ:
      scan.order = request.order;
      scan.bound = q_max(inputs, request.order);
      break;
    case ScanRule::SinusPhi:
      scan.tau = require(request.tau, "tau");
      scan.amplitude = request.amplitude ? *request.amplitude : a_tau_bound(inputs, {FixedParam::Tau, scan.tau});
      scan.bound = scan.amplitude;
      scan.phi = 0.0;
      break;
    case ScanRule::SinusA:
      scan.tau = require(request.tau, "tau");
      scan.bound = a_tau_bound(inputs, {FixedParam::Tau, scan.tau});
      break;
    case ScanRule::SinusTau:
      scan.amplitude = require(request.amplitude, "amplitude");
      scan.bound = a_tau_bound(inputs, {FixedParam::Amplitude, scan.amplitude});
      break;
    case ScanRule::Explicit:
      throw InvalidArgument("an explicit family has no scan to resolve");
  }
  return scan;
}

PhaseFamily build_family(const ScanRequest& request, const BoundInputs& inputs) {
  return enumerate_family(resolve_scan(request, inputs));
}

}  // namespace i2pie

#pragma once

// i2PIE reconstruction: iterative amplitude replacement on the SHG signal of
// each modulated guess, mapped back to the object through the known
// transfer function.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "i2pie/forward.hpp"
#include "i2pie/signal.hpp"
#include "i2pie/transfer.hpp"

namespace i2pie {

enum class MemberOrder { Sequential, Shuffled };

struct InitialGuess {
  enum class Kind { Gaussian, Provided, SpectrumFlatPhase };

  Kind kind = Kind::Gaussian;
  double fwhm = 200e-15;           // intensity FWHM, Gaussian only
  std::optional<Field> field;      // Provided only
  std::vector<double> spectrum;    // SpectrumFlatPhase only: I(W) on the grid

  static InitialGuess gaussian(double fwhm) { return {Kind::Gaussian, fwhm, std::nullopt, {}}; }
  static InitialGuess provided(Field f) { return {Kind::Provided, 0.0, std::move(f), {}}; }
  static InitialGuess flat_phase(std::vector<double> spectrum) {
    return {Kind::SpectrumFlatPhase, 0.0, std::nullopt, std::move(spectrum)};
  }
};

struct ReconConfig {
  double alpha = 1e-4;
  double beta = 0.3;
  int sweeps = 500;
  MemberOrder member_order = MemberOrder::Sequential;
  std::uint64_t shuffle_seed = 0;
  InitialGuess initial_guess;
  double success_log_rms = -3.5;
  // Optional early stop: halt once log10(rms) improved by less than
  // plateau_tolerance over the last plateau_window sweeps. 0 disables.
  int plateau_window = 0;
  double plateau_tolerance = 1e-3;

  void validate() const;
};

struct ReconResult {
  Field field;                   // reconstructed object, frequency domain
  std::vector<double> rms_trace; // rms after each sweep
  double final_log10_rms = 0.0;
  bool success = false;
  int sweeps_run = 0;
};

// U_j = (|o_j| / max|o|) * conj(o_j) / (|o_j|^2 + alpha)
std::vector<cplx> update_weight(const Field& modulated_time, double alpha);

// One i2PIE step for a single family member; returns the updated object.
Field i2pie_member_update(const Field& guess, const PhaseSpec& member, std::span<const double> measured_row,
                          const ReconConfig& config);

// rms over all pixels after normalising both spectrograms to unit peak.
double rms_error(const Spectrogram& model, const Spectrogram& measured);

// Unit-energy starting field in the frequency domain.
Field make_initial_guess(const Grid& grid, const InitialGuess& guess);

ReconResult reconstruct(const Spectrogram& measured, const ReconConfig& config);

}  // namespace i2pie

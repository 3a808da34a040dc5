#pragma once

// SHG spectrogram synthesis: each family member modulates the object
// spectrally, the modulated envelope is squared in time and its spectrum
// recorded.

#include <span>
#include <string>
#include <vector>

#include "i2pie/signal.hpp"
#include "i2pie/transfer.hpp"

namespace i2pie {

enum class Normalization { Raw, UnitPeak };

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& name);

// N rows of n_samples nonnegative values, stored row-major. The SHG axis
// reuses grid's W axis, read relative to twice the carrier.
struct Spectrogram {
  Grid grid;
  PhaseFamily family;
  std::vector<double> data;
  Normalization normalization = Normalization::Raw;

  std::size_t n_rows() const noexcept { return family.size(); }
  std::size_t n_cols() const noexcept { return grid.size(); }
  std::span<const double> row(std::size_t n) const {
    return std::span<const double>(data).subspan(n * n_cols(), n_cols());
  }
  std::span<double> row(std::size_t n) { return std::span<double>(data).subspan(n * n_cols(), n_cols()); }
  double peak() const noexcept;

  // Global rescale so the maximum over all rows is 1.
  Spectrogram unit_peak() const;
  // Throws ShapeMismatch/ValidationError on any violated invariant.
  void validate() const;
};

// Throws AliasingRisk if the spectral support of a frequency-domain field
// (bins with |E| > 1e-6 max|E|) spans more than half the grid bandwidth.
void check_aliasing(const Field& spectrum);

Field apply_transfer(const Field& object, const PhaseSpec& spec);

enum class AliasGuard { Enforce, Skip };

std::vector<double> shg_spectrum(const Field& modulated, AliasGuard guard = AliasGuard::Enforce);

struct SynthesisOptions {
  Normalization normalization = Normalization::UnitPeak;
  // Multiplicative spectral response R(W) applied to every row; empty means 1.
  std::vector<double> response;
  AliasGuard guard = AliasGuard::Enforce;
};

// Rows are computed in parallel over family members.
Spectrogram synthesize_spectrogram(const Field& object, const PhaseFamily& family,
                                   const SynthesisOptions& options = {});
// Single-threaded reference with identical output.
Spectrogram synthesize_spectrogram_serial(const Field& object, const PhaseFamily& family,
                                          const SynthesisOptions& options = {});

}  // namespace i2pie

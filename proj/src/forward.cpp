#include "i2pie/forward.hpp"

#include <algorithm>
#include <cmath>

#include "i2pie/errors.hpp"

namespace i2pie {

namespace {

Field as_freq(const Field& f) { return f.domain() == Domain::Freq ? f : to_freq(f); }

// One spectrogram row, written into `out`. `work` has grid.size() entries.
void compute_row(const Grid& grid, std::span<const cplx> object, const PhaseSpec& spec,
                 std::span<const double> response, std::span<cplx> work, std::span<double> out) {
  for (std::size_t j = 0; j < work.size(); ++j) work[j] = object[j] * std::polar(1.0, spec.phase(grid.omega(j)));
  freq_to_time(grid, work, work);
  for (auto& v : work) v *= v;
  time_to_freq(grid, work, work);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::norm(work[j]);
    if (!response.empty()) out[j] *= response[j];
  }
}

void apply_normalization(Spectrogram& s, Normalization normalization) {
  if (normalization == Normalization::UnitPeak) {
    const double peak = s.peak();
    if (!(peak > 0.0)) throw DegenerateInput("cannot normalise an all-zero spectrogram");
    for (auto& v : s.data) v /= peak;
  }
  s.normalization = normalization;
}

Spectrogram prepare(const Field& object, const PhaseFamily& family, const SynthesisOptions& options,
                    Field& spectrum) {
  validate_family(family);
  spectrum = as_freq(object);
  if (!options.response.empty() && options.response.size() != spectrum.size())
    throw ShapeMismatch("spectral response length does not match grid size");
  if (options.guard == AliasGuard::Enforce) check_aliasing(spectrum);
  Spectrogram s{spectrum.grid(), family, std::vector<double>(family.size() * spectrum.size()), Normalization::Raw};
  return s;
}

}  // namespace

std::string to_string(Normalization n) { return n == Normalization::Raw ? "raw" : "unit_peak"; }

Normalization normalization_from_string(const std::string& name) {
  if (name == "raw") return Normalization::Raw;
  if (name == "unit_peak") return Normalization::UnitPeak;
  throw InvalidArgument("unknown normalization '" + name + "'");
}

double Spectrogram::peak() const noexcept {
  return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
}

Spectrogram Spectrogram::unit_peak() const {
  Spectrogram out = *this;
  apply_normalization(out, Normalization::UnitPeak);
  return out;
}

void Spectrogram::validate() const {
  if (family.size() < 2) throw ValidationError("spectrogram family has fewer than two members");
  if (data.size() != n_rows() * n_cols())
    throw ShapeMismatch("spectrogram matrix has " + std::to_string(data.size()) + " values, expected " +
                        std::to_string(n_rows()) + " x " + std::to_string(n_cols()));
  for (double v : data)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("spectrogram entries must be finite and >= 0");
  if (normalization == Normalization::UnitPeak && std::abs(peak() - 1.0) > 1e-12)
    throw ValidationError("unit_peak spectrogram does not peak at 1");
}

void check_aliasing(const Field& spectrum) {
  if (spectrum.domain() != Domain::Freq) throw DomainMismatch("aliasing check expects a frequency-domain field");
  double max_abs = 0.0;
  for (const auto& s : spectrum.samples()) max_abs = std::max(max_abs, std::abs(s));
  if (max_abs == 0.0) return;
  const double threshold = 1e-6 * max_abs;
  std::size_t first = spectrum.size(), last = 0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (std::abs(spectrum[j]) > threshold) {
      first = std::min(first, j);
      last = j;
    }
  }
  const std::size_t width = last - first + 1;
  if (width > spectrum.size() / 2)
    throw AliasingRisk("object spectrum occupies " + std::to_string(width) + " of " +
                       std::to_string(spectrum.size()) + " bins; squaring would alias");
}

Field apply_transfer(const Field& object, const PhaseSpec& spec) {
  if (object.domain() != Domain::Freq) throw DomainMismatch("apply_transfer expects a frequency-domain field");
  const Grid& g = object.grid();
  std::vector<cplx> out(object.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = object[j] * std::polar(1.0, spec.phase(g.omega(j)));
  return Field(g, std::move(out), Domain::Freq);
}

std::vector<double> shg_spectrum(const Field& modulated, AliasGuard guard) {
  if (modulated.domain() != Domain::Freq) throw DomainMismatch("shg_spectrum expects a frequency-domain field");
  if (guard == AliasGuard::Enforce) check_aliasing(modulated);
  const Grid& g = modulated.grid();
  std::vector<cplx> work(modulated.samples().begin(), modulated.samples().end());
  freq_to_time(g, work, work);
  for (auto& v : work) v *= v;
  time_to_freq(g, work, work);
  std::vector<double> out(work.size());
  std::transform(work.begin(), work.end(), out.begin(), [](cplx v) { return std::norm(v); });
  return out;
}

Spectrogram synthesize_spectrogram(const Field& object, const PhaseFamily& family, const SynthesisOptions& options) {
  Field spectrum = Field::zeros(object.grid(), Domain::Freq);
  Spectrogram s = prepare(object, family, options, spectrum);
  const auto n_rows = static_cast<std::ptrdiff_t>(s.n_rows());
  const Grid& grid = s.grid;

#pragma omp parallel
  {
    std::vector<cplx> work(grid.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t n = 0; n < n_rows; ++n)
      compute_row(grid, spectrum.samples(), family.members[static_cast<std::size_t>(n)], options.response, work,
                  s.row(static_cast<std::size_t>(n)));
  }
  apply_normalization(s, options.normalization);
  return s;
}

Spectrogram synthesize_spectrogram_serial(const Field& object, const PhaseFamily& family,
                                          const SynthesisOptions& options) {
  Field spectrum = Field::zeros(object.grid(), Domain::Freq);
  Spectrogram s = prepare(object, family, options, spectrum);
  std::vector<cplx> work(s.grid.size());
  for (std::size_t n = 0; n < s.n_rows(); ++n)
    compute_row(s.grid, spectrum.samples(), family.members[n], options.response, work, s.row(n));
  apply_normalization(s, options.normalization);
  return s;
}

}  // namespace i2pie

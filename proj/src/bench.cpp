#include "i2pie/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "i2pie/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace i2pie {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPi = std::numbers::pi;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

// Uniform in [lo, hi); spelled out so the draw sequence does not depend on
// the standard library's distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct Lobe {
  double center;
  double fwhm;
  double height;
};

std::vector<double> lobe_spectrum(const Grid& grid, const std::vector<Lobe>& lobes, double shift) {
  std::vector<double> out(grid.size(), 0.0);
  const double c = 4.0 * std::numbers::ln2;
  for (const auto& l : lobes) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double x = (grid.omega(j) - l.center - shift) / l.fwhm;
      out[j] += l.height * std::exp(-c * x * x);
    }
  }
  return out;
}

}  // namespace

std::string to_string(PhaseKind kind) { return kind == PhaseKind::Poly4 ? "poly4" : "sinus"; }

PhaseKind phase_kind_from_string(const std::string& name) {
  if (name == "poly4") return PhaseKind::Poly4;
  if (name == "sinus") return PhaseKind::Sinus;
  throw InvalidArgument("unknown phase kind '" + name + "'");
}

void RandomPulseParams::validate() const {
  if (!(center_wavelength > 0.0)) throw InvalidArgument("center wavelength must be positive");
  if (!(bandwidth_min > 0.0 && bandwidth_min < bandwidth_max))
    throw InvalidArgument("bandwidth range must satisfy 0 < min < max");
}

double bandwidth_to_omega(double bandwidth_m, double center_wavelength_m) {
  return 2.0 * kPi * kSpeedOfLight * bandwidth_m / (center_wavelength_m * center_wavelength_m);
}

Field random_pulse(const RandomPulseParams& params, std::uint64_t index) {
  params.validate();
  const Grid& grid = params.grid;
  auto rng = stream(params.seed, index, 0x9e37);

  const double bw_m = uniform(rng, params.bandwidth_min, params.bandwidth_max);
  const double bw = bandwidth_to_omega(bw_m, params.center_wavelength);

  // 2-5 Gaussian lobes; widths and offsets relative to the drawn bandwidth
  const int n_lobes = 2 + static_cast<int>(rng() % 4);
  std::vector<Lobe> lobes(static_cast<std::size_t>(n_lobes));
  for (auto& l : lobes) {
    l.center = uniform(rng, -0.2, 0.2) * bw;
    l.fwhm = uniform(rng, 0.3, 0.55) * bw;
    l.height = uniform(rng, 0.4, 1.0);
  }
  // recentre on the intensity centroid
  auto intensity = lobe_spectrum(grid, lobes, 0.0);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < intensity.size(); ++j) {
    num += grid.omega(j) * intensity[j];
    den += intensity[j];
  }
  intensity = lobe_spectrum(grid, lobes, -num / den);

  std::vector<double> phase(grid.size(), 0.0);
  if (params.phase_kind == PhaseKind::Poly4) {
    // each order contributes at most 8 pi at the band edge and at most T/16
    // of group delay there
    const double edge = 0.5 * bw;
    const double max_delay = grid.time_window() / 16.0;
    double coef[3];
    for (int k = 2; k <= 4; ++k) {
      const double by_phase = 8.0 * kPi / std::pow(edge, k);
      const double by_delay = max_delay / (k * std::pow(edge, k - 1));
      coef[k - 2] = uniform(rng, -1.0, 1.0) * std::min(by_phase, by_delay);
    }
    for (std::size_t j = 0; j < phase.size(); ++j) {
      const double w = grid.omega(j);
      phase[j] = coef[0] * w * w + coef[1] * w * w * w + coef[2] * w * w * w * w;
    }
  } else {
    // group delay a * tau capped at T/16, as for the polynomial phases
    const double tau = uniform(rng, 0.0, 1e-12);
    const double a = uniform(rng, 0.0, std::min(3.0 * kPi, grid.time_window() / (16.0 * tau)));
    const double phi = uniform(rng, 0.0, 2.0 * kPi);
    for (std::size_t j = 0; j < phase.size(); ++j) phase[j] = a * std::cos(grid.omega(j) * tau + phi);
  }

  std::vector<cplx> samples(grid.size());
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = std::polar(std::sqrt(intensity[j]), phase[j]);
  const Field f(grid, std::move(samples), Domain::Freq);
  return f.scaled(1.0 / std::sqrt(f.energy()));
}

Spectrogram add_noise(const Spectrogram& spectrogram, double relative_sigma, std::uint64_t seed) {
  if (!(relative_sigma >= 0.0)) throw InvalidArgument("relative_sigma must be >= 0");
  Spectrogram out = spectrogram;
  if (relative_sigma == 0.0) return out;
  const double sigma = relative_sigma * spectrogram.peak();
  auto rng = stream(seed, 0, 0x7f4a);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& v : out.data) v = std::max(0.0, v + normal(rng));
  if (out.normalization == Normalization::UnitPeak) out = out.unit_peak();
  return out;
}

void BenchConfig::validate() const {
  pulses.validate();
  recon.validate();
  if (n_pulses < 1) throw InvalidArgument("n_pulses must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (!(bin_width > 0.0)) throw InvalidArgument("bin_width must be positive");
  if (!(noise_relative_sigma >= 0.0)) throw InvalidArgument("noise_relative_sigma must be >= 0");
  if (scan.n_members < 2) throw InvalidArgument("family needs at least two members");
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const auto first = static_cast<long>(std::floor(*lo_it / bin_width));
  auto last = static_cast<long>(std::floor(*hi_it / bin_width));
  const auto n_bins = static_cast<std::size_t>(last - first + 1);
  h.counts.assign(n_bins, 0);
  for (std::size_t b = 0; b <= n_bins; ++b) h.edges.push_back(static_cast<double>(first + static_cast<long>(b)) * bin_width);
  for (double v : values) {
    auto b = static_cast<long>(std::floor(v / bin_width)) - first;
    b = std::clamp(b, 0L, static_cast<long>(n_bins) - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  int running = 0;
  for (int c : h.counts) {
    running += c;
    h.cumulative_percent.push_back(100.0 * running / static_cast<double>(values.size()));
  }
  return h;
}

PulseRecord run_single(const BenchConfig& config, std::uint64_t index) {
  PulseRecord rec;
  rec.seed = config.pulses.seed;
  rec.index = index;
  try {
    const Field object = random_pulse(config.pulses, index);
    const BoundInputs inputs{object.grid(), object.intensity(), config.gamma};
    const PhaseFamily family = build_family(config.scan, inputs);
    rec.scan = family.scan;
    Spectrogram measured = synthesize_spectrogram_serial(object, family, {Normalization::UnitPeak, {}, AliasGuard::Enforce});
    if (config.noise_relative_sigma > 0.0)
      measured = add_noise(measured, config.noise_relative_sigma, config.pulses.seed ^ (index * 0x9e3779b97f4a7c15ULL));
    const ReconResult result = reconstruct(measured, config.recon);
    rec.final_log10_rms = result.final_log10_rms;
    rec.success = result.success;
    if (!std::isfinite(rec.final_log10_rms)) {
      rec.final_log10_rms = 0.0;
      rec.success = false;
      rec.failure = "reconstruction diverged";
    }
  } catch (const Error& e) {
    // counted as a failed reconstruction at rms = 1
    rec.final_log10_rms = 0.0;
    rec.success = false;
    rec.failure = e.what();
  }
  return rec;
}

BenchReport summarize(std::vector<PulseRecord> records, double bin_width) {
  BenchReport report;
  std::vector<double> values;
  values.reserve(records.size());
  int ok = 0;
  for (const auto& r : records) {
    values.push_back(r.final_log10_rms);
    ok += r.success ? 1 : 0;
  }
  report.histogram = make_histogram(values, bin_width);
  report.success_rate = records.empty() ? 0.0 : ok / static_cast<double>(records.size());
  report.records = std::move(records);
  return report;
}

BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();
  const auto n = static_cast<std::ptrdiff_t>(config.n_pulses);
  std::vector<PulseRecord> records(static_cast<std::size_t>(n));
#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i)
    records[static_cast<std::size_t>(i)] = run_single(config, static_cast<std::uint64_t>(i));
  return summarize(std::move(records), config.bin_width);
}

BenchReport run_benchmark_serial(const BenchConfig& config) {
  config.validate();
  std::vector<PulseRecord> records;
  records.reserve(static_cast<std::size_t>(config.n_pulses));
  for (int i = 0; i < config.n_pulses; ++i) records.push_back(run_single(config, static_cast<std::uint64_t>(i)));
  return summarize(std::move(records), config.bin_width);
}

}  // namespace i2pie

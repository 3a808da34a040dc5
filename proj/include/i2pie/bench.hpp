#pragma once

// Seeded random object pulses and the Monte-Carlo success-rate harness.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "i2pie/engine.hpp"
#include "i2pie/forward.hpp"
#include "i2pie/signal.hpp"
#include "i2pie/transfer.hpp"

namespace i2pie {

enum class PhaseKind { Poly4, Sinus };

std::string to_string(PhaseKind kind);
PhaseKind phase_kind_from_string(const std::string& name);

struct RandomPulseParams {
  double center_wavelength = 800e-9;  // m
  double bandwidth_min = 2e-9;        // m
  double bandwidth_max = 20e-9;       // m
  PhaseKind phase_kind = PhaseKind::Poly4;
  Grid grid = Grid::make(1024, 8e-12);
  std::uint64_t seed = 1;

  void validate() const;
};

// Wavelength bandwidth at the carrier converted to angular frequency.
double bandwidth_to_omega(double bandwidth_m, double center_wavelength_m);

// Unit-energy frequency-domain object, a pure function of (seed, index).
Field random_pulse(const RandomPulseParams& params, std::uint64_t index);

// Additive Gaussian noise, std = relative_sigma * global peak, clipped at 0.
Spectrogram add_noise(const Spectrogram& spectrogram, double relative_sigma, std::uint64_t seed);

struct BenchConfig {
  RandomPulseParams pulses;
  ScanRequest scan;
  double gamma = 0.125;
  int n_pulses = 100;
  ReconConfig recon;
  double noise_relative_sigma = 0.0;
  double bin_width = 0.25;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
};

struct PulseRecord {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  ScanDescriptor scan;
  double final_log10_rms = 0.0;
  bool success = false;
  std::string failure;  // empty unless the pulse could not be processed
};

struct Histogram {
  std::vector<double> edges;    // counts.size() + 1 edges
  std::vector<int> counts;
  std::vector<double> cumulative_percent;  // share with value < upper edge
};

struct BenchReport {
  std::vector<PulseRecord> records;
  Histogram histogram;
  double success_rate = 0.0;
};

// Fixed-width bins aligned to multiples of bin_width.
Histogram make_histogram(std::span<const double> values, double bin_width);

PulseRecord run_single(const BenchConfig& config, std::uint64_t index);
// Pulses processed in parallel; output identical to the serial reference.
BenchReport run_benchmark(const BenchConfig& config);
BenchReport run_benchmark_serial(const BenchConfig& config);
BenchReport summarize(std::vector<PulseRecord> records, double bin_width);

}  // namespace i2pie

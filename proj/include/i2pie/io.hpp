#pragma once

// File formats and run configuration.
//
// A spectrogram file is a JSON manifest plus a matrix file next to it
// (N rows x n_samples columns, row-major), either CSV text with 17
// significant digits or raw little-endian float64.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "i2pie/bench.hpp"
#include "i2pie/engine.hpp"
#include "i2pie/forward.hpp"
#include "i2pie/signal.hpp"
#include "i2pie/transfer.hpp"

namespace i2pie::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum class MatrixEncoding { Csv, Bin };

std::string to_string(MatrixEncoding e);
MatrixEncoding matrix_encoding_from_string(const std::string& name);

// Locale-independent shortest-exact decimal (at most 17 significant digits).
std::string format_double(double v);
double parse_double(std::string_view text);

json family_to_json(const PhaseFamily& family);
PhaseFamily family_from_json(const json& j);

struct SpectrogramMeta {
  std::optional<double> carrier_wavelength;  // m
  MatrixEncoding encoding = MatrixEncoding::Bin;
};

// Writes `manifest` and the matrix file `<manifest stem>.csv|.bin` beside it.
void write_spectrogram(const fs::path& manifest, const Spectrogram& spectrogram, const SpectrogramMeta& meta);

struct LoadedSpectrogram {
  Spectrogram spectrogram;
  SpectrogramMeta meta;
  std::vector<std::string> warnings;
};

// Rows are linearly resampled onto the manifest grid when the stored
// frequency axis differs from it.
LoadedSpectrogram read_spectrogram(const fs::path& manifest);

// Linear interpolation of (x, y) samples onto `target`, zero outside.
std::vector<double> resample_linear(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<double>& target);

// Complex spectrum file, columns omega_rad_s,re,im.
void write_field(const fs::path& path, const Field& field);
// Accepts three columns (omega, re, im) or two (re, im) on the grid axis.
Field read_field(const fs::path& path, const Grid& grid);
struct SpectrumSamples {
  std::vector<double> omega;
  std::vector<double> intensity;
};
// Two columns (omega, intensity) as stored.
SpectrumSamples read_spectrum_samples(const fs::path& path);
// Two columns (omega, intensity), resampled onto the grid.
std::vector<double> read_spectrum(const fs::path& path, const Grid& grid);
void write_spectrum(const fs::path& path, const Grid& grid, const std::vector<double>& spectrum);
// Columns sweep,log10_rms.
void write_trace(const fs::path& path, const std::vector<double>& rms_trace);

// Every field optional; unknown keys are rejected.
struct RunConfig {
  Grid grid = Grid::make(1024, 8e-12);
  std::optional<double> carrier_wavelength = 800e-9;
  double gamma = 0.125;
  ScanRequest scan;
  ReconConfig recon;
  RandomPulseParams pulses;
  int n_pulses = 100;
  double bench_noise = 0.0;
  double bin_width = 0.25;
  Normalization normalization = Normalization::UnitPeak;
  MatrixEncoding encoding = MatrixEncoding::Bin;
  double synth_noise = 0.0;

  BenchConfig bench_config() const;
};

RunConfig default_run_config();
// Relative paths inside the config resolve against base_dir.
RunConfig parse_run_config(const json& j, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);
// Human-readable key listing with defaults, used by --help.
std::string run_config_reference();

json report_to_json(const BenchReport& report, const BenchConfig& config);
void write_report(const fs::path& path, const BenchReport& report, const BenchConfig& config);
// Columns bin_center,count,cumulative_percent.
void write_plot_csv(const fs::path& path, const Histogram& histogram);

json read_json(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace i2pie::io

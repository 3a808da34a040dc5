// Command-line front end: synthesize, reconstruct, bench, bounds.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "i2pie/bench.hpp"
#include "i2pie/engine.hpp"
#include "i2pie/errors.hpp"
#include "i2pie/forward.hpp"
#include "i2pie/io.hpp"
#include "i2pie/transfer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace i2pie;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateInput:
    case ErrorKind::NoAdmissibleBound:
    case ErrorKind::AliasingRisk:
      return kNumerical;
    case ErrorKind::Io:
      return kIo;
    default:
      return kValidation;
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::optional<std::string> format;
  bool quiet = false;
};

// I2PIE_THREADS caps the OpenMP team size; unset leaves the runtime default.
int thread_cap() {
  const char* env = std::getenv("I2PIE_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw ValidationError("I2PIE_THREADS must be a positive integer");
  return static_cast<int>(v);
}

io::RunConfig load_config(const Common& c) {
  return c.config.empty() ? io::default_run_config() : io::load_run_config(c.config);
}

fs::path sibling(const fs::path& p, const std::string& suffix, const std::string& ext) {
  fs::path out = p;
  out.replace_filename(p.stem().string() + suffix + ext);
  return out;
}

void info(const Common& c, const std::string& msg) {
  if (!c.quiet) std::cerr << msg << '\n';
}

// --- synthesize -------------------------------------------------------------

struct SynthesizeArgs {
  std::string object_field;
  std::uint64_t pulse_index = 0;
};

int cmd_synthesize(const Common& c, const SynthesizeArgs& a) {
  io::RunConfig cfg = load_config(c);
  if (c.seed) cfg.pulses.seed = *c.seed;
  if (c.format) cfg.encoding = io::matrix_encoding_from_string(*c.format);
  if (c.output.empty()) throw ValidationError("--output is required");

  const Field object = a.object_field.empty() ? random_pulse(cfg.pulses, a.pulse_index)
                                              : io::read_field(a.object_field, cfg.grid);
  const BoundInputs inputs{cfg.grid, object.intensity(), cfg.gamma};
  const PhaseFamily family = build_family(cfg.scan, inputs);
  Spectrogram s = synthesize_spectrogram(object, family, {cfg.normalization, {}, AliasGuard::Enforce});
  if (cfg.synth_noise > 0.0) s = add_noise(s, cfg.synth_noise, cfg.pulses.seed);

  io::write_spectrogram(c.output, s, {cfg.carrier_wavelength, cfg.encoding});
  info(c, "wrote " + c.output + " (" + std::to_string(s.n_rows()) + " x " + std::to_string(s.n_cols()) + ", " +
              to_string(family.scan.rule) + ", bound " + io::format_double(family.scan.bound) + ")");
  return kOk;
}

// --- reconstruct ------------------------------------------------------------

int cmd_reconstruct(const Common& c, const std::string& input) {
  io::RunConfig cfg = load_config(c);
  if (c.seed) cfg.recon.shuffle_seed = *c.seed;
  if (c.output.empty()) throw ValidationError("--output is required");

  const io::LoadedSpectrogram loaded = io::read_spectrogram(input);
  for (const auto& w : loaded.warnings) info(c, "warning: " + w);
  if (!(loaded.spectrogram.grid == cfg.grid) && !c.config.empty())
    info(c, "note: reconstructing on the grid stored in the spectrogram file");
  // initial-guess files were read against the config grid
  if (!(loaded.spectrogram.grid == cfg.grid) && cfg.recon.initial_guess.kind != InitialGuess::Kind::Gaussian)
    throw ShapeMismatch("initial guess grid differs from the spectrogram grid");

  const ReconResult r = reconstruct(loaded.spectrogram, cfg.recon);
  if (!std::isfinite(r.final_log10_rms)) throw DegenerateInput("reconstruction diverged");

  const fs::path out = c.output;
  const fs::path trace = sibling(out, "_trace", ".csv");
  io::write_field(out, r.field);
  io::write_trace(trace, r.rms_trace);
  info(c, "wrote " + out.string() + " and " + trace.string());
  std::cout << "success=" << (r.success ? "true" : "false") << " log10_rms=" << io::format_double(r.final_log10_rms)
            << '\n';
  return kOk;
}

// --- bench ------------------------------------------------------------------

int cmd_bench(const Common& c, int threads) {
  io::RunConfig cfg = load_config(c);
  if (c.seed) cfg.pulses.seed = *c.seed;
  if (c.output.empty()) throw ValidationError("--output is required");
  BenchConfig b = cfg.bench_config();
  b.threads = threads;

  const BenchReport report = run_benchmark(b);
  const fs::path out = c.output;
  const fs::path plot = sibling(out, "_plot", ".csv");
  io::write_report(out, report, b);
  io::write_plot_csv(plot, report.histogram);
  info(c, "wrote " + out.string() + " and " + plot.string());
  if (!c.quiet) {
    int failed = 0;
    for (const auto& r : report.records) failed += r.failure.empty() ? 0 : 1;
    if (failed) std::cerr << failed << " pulse(s) could not be processed; see report\n";
  }
  std::cout << "success_rate=" << io::format_double(report.success_rate) << " n_pulses=" << report.records.size()
            << '\n';
  return kOk;
}

// --- bounds -----------------------------------------------------------------

struct BoundsArgs {
  std::string spectrum;
  std::optional<double> gamma;
  std::string family = "quadratic_q";
  int order = 2;
  std::optional<double> tau;
  std::optional<double> amplitude;
};

// A uniform, zero-centred, power-of-two axis defines the grid by itself.
std::optional<Grid> grid_from_axis(const std::vector<double>& w) {
  const std::size_t n = w.size();
  if (n < 8 || (n & (n - 1)) != 0) return std::nullopt;
  const double dw = w[1] - w[0];
  if (!(dw > 0.0)) return std::nullopt;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(w[j] - (static_cast<double>(j) - static_cast<double>(n / 2)) * dw) > 1e-9 * dw) return std::nullopt;
  return Grid::make(n, 2.0 * std::numbers::pi / dw);
}

int cmd_bounds(const Common& c, const BoundsArgs& a) {
  io::RunConfig cfg = load_config(c);
  const double gamma = a.gamma.value_or(cfg.gamma);
  if (!(gamma > 0.0)) throw ValidationError("--gamma must be positive");

  // a file on a uniform centred power-of-two axis carries its own grid
  const io::SpectrumSamples raw = io::read_spectrum_samples(a.spectrum);
  Grid grid = cfg.grid;
  if (c.config.empty())
    if (auto g = grid_from_axis(raw.omega)) grid = *g;
  const std::vector<double> spectrum = io::read_spectrum(a.spectrum, grid);
  const BoundInputs inputs{grid, spectrum, gamma};

  const double s0 = sigma0(unit_energy_spectrum(spectrum, grid), grid);
  std::cout << "gamma=" << io::format_double(gamma) << '\n';
  std::cout << "T_s=" << io::format_double(grid.time_window()) << '\n';
  std::cout << "sigma0_s=" << io::format_double(s0) << '\n';
  std::cout << "sigma_psi_s=" << io::format_double(sigma_psi(inputs)) << '\n';

  const ScanRule rule = scan_rule_from_string(a.family);
  switch (rule) {
    case ScanRule::QuadraticQ:
      std::cout << "q_max_s" << a.order << "=" << io::format_double(q_max(inputs, a.order)) << '\n';
      break;
    case ScanRule::SinusPhi:
    case ScanRule::SinusA:
    case ScanRule::SinusTau: {
      std::cout << "a_tau_product_rad_s=" << io::format_double(a_tau_product(inputs)) << '\n';
      if (a.tau)
        std::cout << "a_max_rad=" << io::format_double(a_tau_bound(inputs, {FixedParam::Tau, *a.tau})) << '\n';
      if (a.amplitude)
        std::cout << "tau_max_s=" << io::format_double(a_tau_bound(inputs, {FixedParam::Amplitude, *a.amplitude}))
                  << '\n';
      if (!a.tau && !a.amplitude) info(c, "pass --tau or --amplitude to resolve a_max or tau_max");
      break;
    }
    case ScanRule::Explicit:
      throw ValidationError("--family must name a scan rule with a bound");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"i2pie: SHG spectrogram synthesis and i2PIE pulse reconstruction"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.\n"
             "I2PIE_THREADS caps the number of worker threads.\n\n" +
             io::run_config_reference());

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override the random seed");
    sub->add_option("--output", common.output, "Output path");
    if (with_format)
      sub->add_option("--format", common.format, "Matrix encoding")->check(CLI::IsMember({"csv", "bin"}));
    sub->add_flag("--quiet", common.quiet, "Suppress informational messages");
  };

  SynthesizeArgs synth;
  auto* s = app.add_subcommand("synthesize", "Write the SHG spectrogram of an object pulse");
  add_common(s, true);
  auto* obj = s->add_option("--object", synth.object_field, "Complex spectrum file (omega,re,im or re,im)")
                  ->check(CLI::ExistingFile);
  s->add_option("--pulse-index", synth.pulse_index, "Random pulse index (with --seed)")->excludes(obj);

  std::string recon_input;
  auto* r = app.add_subcommand("reconstruct", "Reconstruct the object from a spectrogram file");
  add_common(r, false);
  r->add_option("spectrogram", recon_input, "Spectrogram manifest (JSON)")->required();

  auto* b = app.add_subcommand("bench", "Monte-Carlo success-rate benchmark");
  add_common(b, false);

  BoundsArgs bounds;
  auto* d = app.add_subcommand("bounds", "Print family parameter bounds for a spectrum");
  add_common(d, false);
  d->add_option("spectrum", bounds.spectrum, "Two-column file omega_rad_s,intensity")->required();
  d->add_option("--gamma", bounds.gamma, "Duration fraction of the time window");
  d->add_option("--family", bounds.family, "quadratic_q | sinus_phi | sinus_a | sinus_tau");
  d->add_option("--order", bounds.order, "Polynomial order for quadratic_q");
  d->add_option("--tau", bounds.tau, "Fixed sinusoid period parameter (s)");
  d->add_option("--amplitude", bounds.amplitude, "Fixed sinusoid amplitude (rad)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const int threads = thread_cap();
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    if (s->parsed()) return cmd_synthesize(common, synth);
    if (r->parsed()) return cmd_reconstruct(common, recon_input);
    if (b->parsed()) return cmd_bench(common, threads);
    if (d->parsed()) return cmd_bounds(common, bounds);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kValidation;
}

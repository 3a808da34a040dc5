#include "i2pie/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "i2pie/errors.hpp"

namespace i2pie::io {

namespace {

constexpr const char* kSpectrogramFormat = "i2pie-spectrogram";
constexpr const char* kReportFormat = "i2pie-bench-report";
constexpr int kVersion = 1;

// Strict view over a JSON object: every key read is recorded so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("'" + display() + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ValidationError("key '" + qualified(key) + "' must be a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ValidationError("key '" + qualified(key) + "' must be an integer");
    return v.get<long long>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ValidationError("key '" + qualified(key) + "' must be a string");
    return v.get<std::string>();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ValidationError("missing key '" + qualified(key) + "'");
    return j_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), qualified(key)); }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  // Parse failures from enum lookups get the key name attached.
  template <typename F>
  auto parsed(const std::string& key, const std::string& fallback, F&& parse) {
    const std::string s = string(key, fallback);
    try {
      return parse(s);
    } catch (const Error& e) {
      throw ValidationError("key '" + qualified(key) + "': " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ValidationError("unknown key '" + qualified(item.key()) + "'");
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

std::vector<std::vector<double>> read_numeric_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> values;
    std::string cell;
    std::istringstream ss(line);
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) {
        numeric = false;
        break;
      }
      double v = 0.0;
      const char* begin = cell.data() + b;
      const char* end = cell.data() + e + 1;
      if (*begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw ValidationError("'" + path.string() + "' line " + std::to_string(line_no) + " is not numeric");
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

void check_axis(const std::vector<double>& axis, const std::string& what) {
  if (axis.size() < 2) throw ValidationError(what + " needs at least two samples");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1])) throw ValidationError(what + " must be strictly increasing");
}

bool axis_matches(const std::vector<double>& axis, const Grid& grid) {
  if (axis.size() != grid.size()) return false;
  const double tol = 1e-9 * grid.domega();
  for (std::size_t j = 0; j < axis.size(); ++j)
    if (std::abs(axis[j] - grid.omega(j)) > tol) return false;
  return true;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

json phase_to_json(const PhaseSpec& p) {
  if (p.is_polynomial()) {
    const auto& q = p.as_polynomial();
    return json{{"kind", "polynomial"}, {"order", q.order}, {"coefficient", q.coefficient}};
  }
  const auto& s = p.as_sinusoidal();
  return json{{"kind", "sinusoidal"}, {"amplitude", s.amplitude}, {"tau_s", s.tau}, {"phi", s.phi}};
}

PhaseSpec phase_from_json(const json& j, const std::string& path) {
  Section s(j, path);
  const std::string kind = s.string("kind", "");
  PhaseSpec out = PhaseSpec::polynomial(2, 0.0);
  if (kind == "polynomial") {
    const auto order = s.integer("order", 2);
    if (!s.has("coefficient")) throw ValidationError("missing key '" + s.qualified("coefficient") + "'");
    out = PhaseSpec::polynomial(static_cast<int>(order), s.number("coefficient", 0.0));
  } else if (kind == "sinusoidal") {
    out = PhaseSpec::sinusoidal(s.number("amplitude", 0.0), s.number("tau_s", 0.0), s.number("phi", 0.0));
  } else {
    throw ValidationError("key '" + s.qualified("kind") + "' must be 'polynomial' or 'sinusoidal'");
  }
  s.finish();
  return out;
}

json scan_to_json(const ScanDescriptor& d) {
  return json{{"rule", to_string(d.rule)}, {"n_members", d.n_members}, {"scaling", to_string(d.scaling)},
              {"order", d.order},          {"amplitude", d.amplitude},  {"tau_s", d.tau},
              {"phi", d.phi},              {"bound", d.bound}};
}

ScanDescriptor scan_from_json(const json& j, const std::string& path) {
  Section s(j, path);
  ScanDescriptor d;
  d.rule = s.parsed("rule", "explicit", scan_rule_from_string);
  d.n_members = static_cast<int>(s.integer("n_members", 0));
  d.scaling = s.parsed("scaling", "span", scan_scaling_from_string);
  d.order = static_cast<int>(s.integer("order", 2));
  d.amplitude = s.number("amplitude", 0.0);
  d.tau = s.number("tau_s", 0.0);
  d.phi = s.number("phi", 0.0);
  d.bound = s.number("bound", 0.0);
  s.finish();
  return d;
}

std::string initial_guess_kind(InitialGuess::Kind k) {
  switch (k) {
    case InitialGuess::Kind::Gaussian: return "gaussian";
    case InitialGuess::Kind::Provided: return "provided";
    case InitialGuess::Kind::SpectrumFlatPhase: return "spectrum_flat_phase";
  }
  return "gaussian";
}

}  // namespace

std::string to_string(MatrixEncoding e) { return e == MatrixEncoding::Csv ? "csv" : "bin"; }

MatrixEncoding matrix_encoding_from_string(const std::string& name) {
  if (name == "csv") return MatrixEncoding::Csv;
  if (name == "bin") return MatrixEncoding::Bin;
  throw InvalidArgument("unknown matrix encoding '" + name + "' (expected csv or bin)");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ValidationError("'" + std::string(text) + "' is not a number");
  return v;
}

json family_to_json(const PhaseFamily& family) {
  json members = json::array();
  for (const auto& m : family.members) members.push_back(phase_to_json(m));
  return json{{"scan", scan_to_json(family.scan)}, {"members", members}};
}

PhaseFamily family_from_json(const json& j) {
  Section s(j, "family");
  PhaseFamily family;
  if (s.has("scan")) family.scan = scan_from_json(s.raw("scan"), "family.scan");
  else family.scan.rule = ScanRule::Explicit;
  const json& members = s.raw("members");
  if (!members.is_array()) throw ValidationError("key 'family.members' must be an array");
  for (std::size_t i = 0; i < members.size(); ++i)
    family.members.push_back(phase_from_json(members[i], "family.members[" + std::to_string(i) + "]"));
  s.finish();
  family.scan.n_members = static_cast<int>(family.members.size());
  validate_family(family);
  return family;
}

void write_spectrogram(const fs::path& manifest, const Spectrogram& spectrogram, const SpectrogramMeta& meta) {
  spectrogram.validate();
  fs::path matrix = manifest;
  matrix.replace_extension(meta.encoding == MatrixEncoding::Csv ? ".csv" : ".bin");

  json m;
  m["format"] = kSpectrogramFormat;
  m["version"] = kVersion;
  m["grid"] = json{{"n_samples", spectrogram.grid.size()}, {"time_window_s", spectrogram.grid.time_window()}};
  if (meta.carrier_wavelength) m["carrier_wavelength_m"] = *meta.carrier_wavelength;
  m["normalization"] = to_string(spectrogram.normalization);
  m["family"] = family_to_json(spectrogram.family);
  m["frequency_axis_rad_s"] = spectrogram.grid.omega_axis();
  m["matrix"] = json{{"path", matrix.filename().string()},
                     {"encoding", to_string(meta.encoding)},
                     {"rows", spectrogram.n_rows()},
                     {"cols", spectrogram.n_cols()}};

  if (meta.encoding == MatrixEncoding::Bin) {
    auto out = open_out(matrix, std::ios::out | std::ios::binary);
    for (double v : spectrogram.data) {
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    if (!out) throw IoError("failed writing '" + matrix.string() + "'");
  } else {
    auto out = open_out(matrix);
    for (std::size_t r = 0; r < spectrogram.n_rows(); ++r) {
      const auto row = spectrogram.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
      out << '\n';
    }
    if (!out) throw IoError("failed writing '" + matrix.string() + "'");
  }
  write_text(manifest, m.dump(2) + "\n");
}

LoadedSpectrogram read_spectrogram(const fs::path& manifest) {
  const json j = read_json(manifest);
  Section s(j, "");
  if (s.string("format", "") != kSpectrogramFormat)
    throw ValidationError("key 'format' must be '" + std::string(kSpectrogramFormat) + "'");
  if (s.integer("version", 0) != kVersion) throw ValidationError("unsupported key 'version'");

  Section g = s.child("grid");
  const auto n = g.integer("n_samples", 0);
  const double window = g.number("time_window_s", 0.0);
  g.finish();
  if (n <= 0) throw ValidationError("key 'grid.n_samples' must be positive");
  Grid grid = Grid::make(static_cast<std::size_t>(n), window);

  LoadedSpectrogram out{Spectrogram{grid, {}, {}, Normalization::Raw}, {}, {}};
  out.meta.carrier_wavelength = s.optional_number("carrier_wavelength_m");
  const auto normalization = s.parsed("normalization", "raw", normalization_from_string);

  if (!s.has("family"))
    throw ValidationError("missing key 'family': reconstruction needs the transfer functions used for the scan");
  PhaseFamily family = family_from_json(s.raw("family"));

  const json& axis_j = s.raw("frequency_axis_rad_s");
  if (!axis_j.is_array()) throw ValidationError("key 'frequency_axis_rad_s' must be an array");
  std::vector<double> axis;
  for (const auto& v : axis_j) {
    if (!v.is_number()) throw ValidationError("key 'frequency_axis_rad_s' must hold numbers");
    axis.push_back(v.get<double>());
  }
  check_axis(axis, "frequency_axis_rad_s");

  Section mx = s.child("matrix");
  const fs::path matrix_path = manifest.parent_path() / mx.string("path", "");
  const auto encoding = mx.parsed("encoding", "bin", matrix_encoding_from_string);
  const auto rows = static_cast<std::size_t>(mx.integer("rows", static_cast<long long>(family.size())));
  const auto cols = static_cast<std::size_t>(mx.integer("cols", static_cast<long long>(axis.size())));
  mx.finish();
  s.finish();
  out.meta.encoding = encoding;

  if (rows != family.size())
    throw ShapeMismatch("matrix declares " + std::to_string(rows) + " rows but the family has " +
                        std::to_string(family.size()) + " members");
  if (cols != axis.size())
    throw ShapeMismatch("matrix declares " + std::to_string(cols) + " columns but the frequency axis has " +
                        std::to_string(axis.size()) + " samples");

  std::vector<double> values;
  values.reserve(rows * cols);
  if (encoding == MatrixEncoding::Bin) {
    std::ifstream in(matrix_path, std::ios::binary);
    if (!in) throw IoError("cannot open matrix file '" + matrix_path.string() + "'");
    std::uint64_t bits = 0;
    while (in.read(reinterpret_cast<char*>(&bits), sizeof(bits)))
      values.push_back(std::bit_cast<double>(to_little_endian(bits)));
    if (in.gcount() != 0) throw ShapeMismatch("matrix file '" + matrix_path.string() + "' has a trailing partial value");
  } else {
    for (auto& row : read_numeric_table(matrix_path)) {
      if (row.size() != cols)
        throw ShapeMismatch("matrix row " + std::to_string(values.size() / cols) + " has " +
                            std::to_string(row.size()) + " columns, expected " + std::to_string(cols));
      values.insert(values.end(), row.begin(), row.end());
    }
  }
  if (values.size() != rows * cols)
    throw ShapeMismatch("matrix file '" + matrix_path.string() + "' holds " + std::to_string(values.size()) +
                        " values, manifest declares " + std::to_string(rows) + " x " + std::to_string(cols));
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("matrix values must be finite and >= 0");

  Spectrogram& sg = out.spectrogram;
  sg.family = std::move(family);
  if (axis_matches(axis, grid)) {
    sg.data = std::move(values);
  } else {
    out.warnings.push_back("frequency axis differs from the grid; rows resampled by linear interpolation");
    const auto target = grid.omega_axis();
    sg.data.reserve(rows * grid.size());
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> y(values.begin() + static_cast<std::ptrdiff_t>(r * cols),
                            values.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
      const auto resampled = resample_linear(axis, y, target);
      sg.data.insert(sg.data.end(), resampled.begin(), resampled.end());
    }
  }
  sg.normalization = Normalization::Raw;
  if (normalization == Normalization::UnitPeak) sg = sg.unit_peak();
  sg.validate();
  return out;
}

std::vector<double> resample_linear(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<double>& target) {
  if (x.size() != y.size()) throw ShapeMismatch("resample: axis and values differ in length");
  std::vector<double> out(target.size(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double t = target[i];
    if (t < x.front() || t > x.back()) continue;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) {
      out[i] = y.back();
      continue;
    }
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[k - 1]) / (x[k] - x[k - 1]);
    out[i] = (1.0 - w) * y[k - 1] + w * y[k];
  }
  return out;
}

void write_field(const fs::path& path, const Field& field) {
  const Field f = field.domain() == Domain::Freq ? field : to_freq(field);
  auto out = open_out(path);
  out << "omega_rad_s,re,im\n";
  for (std::size_t j = 0; j < f.size(); ++j)
    out << format_double(f.grid().omega(j)) << ',' << format_double(f[j].real()) << ','
        << format_double(f[j].imag()) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Field read_field(const fs::path& path, const Grid& grid) {
  const auto table = read_numeric_table(path);
  if (table.empty()) throw ValidationError("'" + path.string() + "' holds no data");
  const std::size_t ncol = table.front().size();
  if (ncol != 2 && ncol != 3) throw ValidationError("field file needs 2 (re,im) or 3 (omega,re,im) columns");
  std::vector<double> w, re, im;
  for (const auto& row : table) {
    if (row.size() != ncol) throw ShapeMismatch("field file rows differ in column count");
    if (ncol == 3) w.push_back(row[0]);
    re.push_back(row[ncol - 2]);
    im.push_back(row[ncol - 1]);
  }
  std::vector<cplx> samples(grid.size());
  if (ncol == 2 || axis_matches(w, grid)) {
    if (re.size() != grid.size())
      throw ShapeMismatch("field file has " + std::to_string(re.size()) + " samples, grid has " +
                          std::to_string(grid.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = cplx(re[j], im[j]);
  } else {
    check_axis(w, "field frequency axis");
    const auto target = grid.omega_axis();
    const auto r = resample_linear(w, re, target);
    const auto i = resample_linear(w, im, target);
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = cplx(r[j], i[j]);
  }
  return Field(grid, std::move(samples), Domain::Freq);
}

SpectrumSamples read_spectrum_samples(const fs::path& path) {
  SpectrumSamples out;
  for (const auto& row : read_numeric_table(path)) {
    if (row.size() != 2) throw ValidationError("spectrum file needs two columns (omega_rad_s, intensity)");
    out.omega.push_back(row[0]);
    out.intensity.push_back(row[1]);
  }
  check_axis(out.omega, "spectrum frequency axis");
  for (double v : out.intensity)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("spectrum intensities must be finite and >= 0");
  return out;
}

std::vector<double> read_spectrum(const fs::path& path, const Grid& grid) {
  auto s = read_spectrum_samples(path);
  if (axis_matches(s.omega, grid)) return s.intensity;
  return resample_linear(s.omega, s.intensity, grid.omega_axis());
}

void write_spectrum(const fs::path& path, const Grid& grid, const std::vector<double>& spectrum) {
  if (spectrum.size() != grid.size()) throw ShapeMismatch("spectrum length does not match grid size");
  auto out = open_out(path);
  out << "omega_rad_s,intensity\n";
  for (std::size_t j = 0; j < spectrum.size(); ++j)
    out << format_double(grid.omega(j)) << ',' << format_double(spectrum[j]) << '\n';
}

void write_trace(const fs::path& path, const std::vector<double>& rms_trace) {
  auto out = open_out(path);
  out << "sweep,log10_rms\n";
  for (std::size_t i = 0; i < rms_trace.size(); ++i)
    out << (i + 1) << ',' << format_double(std::log10(std::max(rms_trace[i], 1e-300))) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Run configuration

BenchConfig RunConfig::bench_config() const {
  BenchConfig b;
  b.pulses = pulses;
  b.pulses.grid = grid;
  b.scan = scan;
  b.gamma = gamma;
  b.n_pulses = n_pulses;
  b.recon = recon;
  b.noise_relative_sigma = bench_noise;
  b.bin_width = bin_width;
  return b;
}

RunConfig default_run_config() {
  RunConfig c;
  c.scan.rule = ScanRule::QuadraticQ;
  c.scan.n_members = 25;
  c.scan.tau = 300e-15;
  c.scan.amplitude = std::nullopt;
  return c;
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c = default_run_config();
  Section root(j, "");

  if (root.has("grid")) {
    Section g = root.child("grid");
    const auto n = g.integer("n_samples", static_cast<long long>(c.grid.size()));
    const double window = g.number("time_window_s", c.grid.time_window());
    g.finish();
    if (n <= 0) throw ValidationError("key 'grid.n_samples' must be positive");
    try {
      c.grid = Grid::make(static_cast<std::size_t>(n), window);
    } catch (const Error& e) {
      throw ValidationError(std::string("key 'grid': ") + e.what());
    }
  }
  if (root.has("carrier_wavelength_m")) c.carrier_wavelength = root.number("carrier_wavelength_m", 800e-9);
  c.gamma = root.number("gamma", c.gamma);

  if (root.has("family")) {
    Section f = root.child("family");
    c.scan.rule = f.parsed("scan", "quadratic_q", scan_rule_from_string);
    if (c.scan.rule == ScanRule::Explicit) throw ValidationError("key 'family.scan' cannot be 'explicit' in a config");
    c.scan.n_members = static_cast<int>(f.integer("n_members", c.scan.n_members));
    c.scan.scaling = f.parsed("scaling", "span", scan_scaling_from_string);
    c.scan.order = static_cast<int>(f.integer("order", c.scan.order));
    if (f.has("amplitude")) c.scan.amplitude = f.number("amplitude", 0.0);
    if (f.has("tau_s")) c.scan.tau = f.number("tau_s", 0.0);
    c.scan.phi = f.number("phi", c.scan.phi);
    f.finish();
  }
  if (c.scan.rule == ScanRule::SinusTau && !c.scan.amplitude) c.scan.amplitude = 2.7;

  if (root.has("reconstruction")) {
    Section r = root.child("reconstruction");
    c.recon.alpha = r.number("alpha", c.recon.alpha);
    c.recon.beta = r.number("beta", c.recon.beta);
    c.recon.sweeps = static_cast<int>(r.integer("sweeps", c.recon.sweeps));
    c.recon.member_order = r.parsed("member_order", "sequential", [](const std::string& s) {
      if (s == "sequential") return MemberOrder::Sequential;
      if (s == "shuffled") return MemberOrder::Shuffled;
      throw InvalidArgument("expected 'sequential' or 'shuffled'");
    });
    c.recon.shuffle_seed = static_cast<std::uint64_t>(r.integer("shuffle_seed", 0));
    c.recon.success_log_rms = r.number("success_log_rms", c.recon.success_log_rms);
    c.recon.plateau_window = static_cast<int>(r.integer("plateau_window", 0));
    c.recon.plateau_tolerance = r.number("plateau_tolerance", c.recon.plateau_tolerance);
    if (r.has("initial_guess")) {
      Section ig = r.child("initial_guess");
      const std::string kind = ig.string("kind", "gaussian");
      if (kind == "gaussian") {
        c.recon.initial_guess = InitialGuess::gaussian(ig.number("fwhm_s", 200e-15));
      } else if (kind == "provided") {
        c.recon.initial_guess = InitialGuess::provided(read_field(base_dir / ig.string("path", ""), c.grid));
      } else if (kind == "spectrum_flat_phase") {
        c.recon.initial_guess = InitialGuess::flat_phase(read_spectrum(base_dir / ig.string("path", ""), c.grid));
      } else {
        throw ValidationError("key 'reconstruction.initial_guess.kind' must be gaussian, provided or "
                              "spectrum_flat_phase");
      }
      ig.finish();
    }
    r.finish();
  }

  if (root.has("pulses")) {
    Section p = root.child("pulses");
    c.pulses.center_wavelength = p.number("center_wavelength_m", c.pulses.center_wavelength);
    if (p.has("bandwidth_range_m")) {
      const json& range = p.raw("bandwidth_range_m");
      if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
        throw ValidationError("key 'pulses.bandwidth_range_m' must be [min, max]");
      c.pulses.bandwidth_min = range[0].get<double>();
      c.pulses.bandwidth_max = range[1].get<double>();
    }
    c.pulses.phase_kind = p.parsed("phase_kind", "poly4", phase_kind_from_string);
    c.pulses.seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<long long>(c.pulses.seed)));
    p.finish();
  }
  c.pulses.grid = c.grid;

  if (root.has("bench")) {
    Section b = root.child("bench");
    c.n_pulses = static_cast<int>(b.integer("n_pulses", c.n_pulses));
    c.bench_noise = b.number("noise_relative_sigma", 0.0);
    c.bin_width = b.number("bin_width", c.bin_width);
    b.finish();
  }

  if (root.has("synthesis")) {
    Section s = root.child("synthesis");
    c.normalization = s.parsed("normalization", "unit_peak", normalization_from_string);
    c.encoding = s.parsed("format", "bin", matrix_encoding_from_string);
    c.synth_noise = s.number("noise_relative_sigma", 0.0);
    s.finish();
  }
  root.finish();

  // value checks, reported against the config keys
  auto check = [](auto&& fn, const char* section) {
    try {
      fn();
    } catch (const Error& e) {
      throw ValidationError(std::string("key '") + section + "': " + e.what());
    }
  };
  check([&] { c.recon.validate(); }, "reconstruction");
  check([&] { c.pulses.validate(); }, "pulses");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ValidationError("key 'gamma' must lie in (0, 1)");
  if (c.scan.n_members < 2) throw ValidationError("key 'family.n_members' must be >= 2");
  if (c.scan.order < 2) throw ValidationError("key 'family.order' must be >= 2");
  if (c.n_pulses < 1) throw ValidationError("key 'bench.n_pulses' must be >= 1");
  if (!(c.bin_width > 0.0)) throw ValidationError("key 'bench.bin_width' must be positive");
  if (c.bench_noise < 0.0) throw ValidationError("key 'bench.noise_relative_sigma' must be >= 0");
  if (c.synth_noise < 0.0) throw ValidationError("key 'synthesis.noise_relative_sigma' must be >= 0");
  return c;
}

RunConfig load_run_config(const fs::path& path) { return parse_run_config(read_json(path), path.parent_path()); }

std::string run_config_reference() {
  return R"(Config file (JSON). Every key is optional; unknown keys are rejected.
  grid.n_samples                    1024
  grid.time_window_s                8e-12
  carrier_wavelength_m              8e-7
  gamma                             0.125
  family.scan                       quadratic_q | sinus_phi | sinus_a | sinus_tau  (quadratic_q)
  family.n_members                  25
  family.scaling                    span | step  (span)
  family.order                      2            (quadratic_q polynomial order)
  family.amplitude                  sinus_tau: 2.7; sinus_phi: computed when absent
  family.tau_s                      3e-13        (sinus_phi, sinus_a)
  family.phi                        0            (sinus_a, sinus_tau)
  reconstruction.alpha              1e-4
  reconstruction.beta               0.3
  reconstruction.sweeps             500
  reconstruction.member_order       sequential | shuffled  (sequential)
  reconstruction.shuffle_seed       0
  reconstruction.success_log_rms    -3.5
  reconstruction.plateau_window     0 (early stop disabled)
  reconstruction.plateau_tolerance  1e-3
  reconstruction.initial_guess      {"kind": "gaussian", "fwhm_s": 2e-13}
                                    {"kind": "provided", "path": "field.csv"}
                                    {"kind": "spectrum_flat_phase", "path": "spectrum.csv"}
  pulses.center_wavelength_m        8e-7
  pulses.bandwidth_range_m          [2e-9, 2e-8]
  pulses.phase_kind                 poly4 | sinus  (poly4)
  pulses.seed                       1
  bench.n_pulses                    100
  bench.noise_relative_sigma        0
  bench.bin_width                   0.25
  synthesis.normalization           unit_peak | raw  (unit_peak)
  synthesis.format                  bin | csv  (bin)
  synthesis.noise_relative_sigma    0
)";
}

// ---------------------------------------------------------------------------
// Reports

json report_to_json(const BenchReport& report, const BenchConfig& config) {
  json records = json::array();
  for (const auto& r : report.records) {
    json rec{{"seed", r.seed},
             {"index", r.index},
             {"final_log10_rms", r.final_log10_rms},
             {"success", r.success},
             {"scan", scan_to_json(r.scan)}};
    if (!r.failure.empty()) rec["failure"] = r.failure;
    records.push_back(std::move(rec));
  }
  json setup{{"n_pulses", config.n_pulses},
             {"gamma", config.gamma},
             {"scan", to_string(config.scan.rule)},
             {"n_members", config.scan.n_members},
             {"scaling", to_string(config.scan.scaling)},
             {"phase_kind", to_string(config.pulses.phase_kind)},
             {"seed", config.pulses.seed},
             {"alpha", config.recon.alpha},
             {"beta", config.recon.beta},
             {"sweeps", config.recon.sweeps},
             {"initial_guess", initial_guess_kind(config.recon.initial_guess.kind)},
             {"success_log_rms", config.recon.success_log_rms},
             {"noise_relative_sigma", config.noise_relative_sigma}};
  return json{{"format", kReportFormat},
              {"version", kVersion},
              {"setup", setup},
              {"success_rate", report.success_rate},
              {"histogram",
               {{"bin_width", config.bin_width},
                {"edges", report.histogram.edges},
                {"counts", report.histogram.counts},
                {"cumulative_percent", report.histogram.cumulative_percent}}},
              {"records", records}};
}

void write_report(const fs::path& path, const BenchReport& report, const BenchConfig& config) {
  write_text(path, report_to_json(report, config).dump(2) + "\n");
}

void write_plot_csv(const fs::path& path, const Histogram& histogram) {
  auto out = open_out(path);
  out << "bin_center,count,cumulative_percent\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b)
    out << format_double(0.5 * (histogram.edges[b] + histogram.edges[b + 1])) << ',' << histogram.counts[b] << ','
        << format_double(histogram.cumulative_percent[b]) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace i2pie::io

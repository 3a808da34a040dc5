#include "i2pie/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "i2pie/errors.hpp"

namespace i2pie {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread safe, execution on fresh arrays is. Plans are
// created once per (size, sign) under a lock and then shared.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Per-thread aligned scratch so plans can run in place on it.
fftw_complex* scratch(std::size_t n) {
  thread_local std::unique_ptr<fftw_complex[], FftwDeleter> buf;
  thread_local std::size_t capacity = 0;
  if (capacity < n) {
    buf.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
    capacity = n;
  }
  return buf.get();
}

void centered_dft(std::span<const cplx> in, std::span<cplx> out, int sign, double scale) {
  const std::size_t n = in.size();
  const std::size_t half = n / 2;
  fftw_complex* work = scratch(n);
  auto* w = reinterpret_cast<cplx*>(work);
  for (std::size_t j = 0; j < n; ++j) w[(j + half) & (n - 1)] = in[j];
  fftw_execute_dft(plan_cache().get(n, sign), work, work);
  for (std::size_t k = 0; k < n; ++k) out[k] = w[(k + half) & (n - 1)] * scale;
}

void check_size(const Grid& grid, std::size_t in, std::size_t out) {
  if (in != grid.size() || out != grid.size())
    throw ShapeMismatch("transform buffer length does not match grid size");
}

}  // namespace

Grid Grid::make(std::size_t n_samples, double time_window) {
  if (n_samples < 8 || !is_power_of_two(n_samples))
    throw InvalidArgument("n_samples must be a power of two >= 8, got " + std::to_string(n_samples));
  if (!(time_window > 0.0) || !std::isfinite(time_window))
    throw InvalidArgument("time_window must be positive and finite");
  return Grid(n_samples, time_window);
}

double Grid::domega() const noexcept { return 2.0 * std::numbers::pi / window_; }

std::vector<double> Grid::time_axis() const {
  std::vector<double> axis(n_);
  for (std::size_t j = 0; j < n_; ++j) axis[j] = time(j);
  return axis;
}

std::vector<double> Grid::omega_axis() const {
  std::vector<double> axis(n_);
  for (std::size_t j = 0; j < n_; ++j) axis[j] = omega(j);
  return axis;
}

Grid Grid::with_carrier(double omega0) const {
  Grid g = *this;
  g.carrier_ = omega0;
  return g;
}

Field::Field(Grid grid, std::vector<cplx> samples, Domain domain)
    : grid_(std::move(grid)), samples_(std::move(samples)), domain_(domain) {
  if (samples_.size() != grid_.size())
    throw ShapeMismatch("field has " + std::to_string(samples_.size()) + " samples, grid has " +
                        std::to_string(grid_.size()));
}

double Field::energy() const noexcept {
  double sum = 0.0;
  for (const auto& s : samples_) sum += std::norm(s);
  const double weight =
      domain_ == Domain::Time ? grid_.dt() : grid_.domega() / (2.0 * std::numbers::pi);
  return sum * weight;
}

Field Field::scaled(double factor) const {
  std::vector<cplx> out(samples_);
  for (auto& s : out) s *= factor;
  return Field(grid_, std::move(out), domain_);
}

std::vector<double> Field::intensity() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](cplx s) { return std::norm(s); });
  return out;
}

void time_to_freq(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  check_size(grid, in.size(), out.size());
  centered_dft(in, out, FFTW_FORWARD, grid.dt());
}

void freq_to_time(const Grid& grid, std::span<const cplx> in, std::span<cplx> out) {
  check_size(grid, in.size(), out.size());
  centered_dft(in, out, FFTW_BACKWARD, grid.domega() / (2.0 * std::numbers::pi));
}

Field to_freq(const Field& field) {
  if (field.domain() != Domain::Time) throw DomainMismatch("to_freq expects a time-domain field");
  std::vector<cplx> out(field.size());
  time_to_freq(field.grid(), field.samples(), out);
  return Field(field.grid(), std::move(out), Domain::Freq);
}

Field to_time(const Field& field) {
  if (field.domain() != Domain::Freq) throw DomainMismatch("to_time expects a frequency-domain field");
  std::vector<cplx> out(field.size());
  freq_to_time(field.grid(), field.samples(), out);
  return Field(field.grid(), std::move(out), Domain::Time);
}

double first_moment_time(const Field& field) {
  const Field t = field.domain() == Domain::Time ? field : to_time(field);
  const Grid& g = t.grid();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double w = std::norm(t[j]);
    num += g.time(j) * w;
    den += w;
  }
  if (!(den > 0.0)) throw DegenerateInput("first moment of a zero-energy field is undefined");
  return num / den;
}

}  // namespace i2pie

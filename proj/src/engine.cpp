#include "i2pie/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "i2pie/errors.hpp"

namespace i2pie {

namespace {

// Precomputed transfer functions and measured amplitudes for one
// spectrogram, plus scratch buffers, so a sweep allocates nothing.
class Updater {
 public:
  Updater(const Spectrogram& measured, double alpha, double beta)
      : grid_(measured.grid), alpha_(alpha), beta_(beta), n_(measured.n_cols()) {
    const std::size_t rows = measured.n_rows();
    transfer_.resize(rows * n_);
    amplitude_.resize(rows * n_);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto h = transfer_function(measured.family.members[r], grid_);
      std::copy(h.begin(), h.end(), transfer_.begin() + static_cast<std::ptrdiff_t>(r * n_));
      const auto row = measured.row(r);
      for (std::size_t j = 0; j < n_; ++j) amplitude_[r * n_ + j] = std::sqrt(row[j]);
    }
    o_.resize(n_);
    g_.resize(n_);
  }

  // In-place update of the object spectrum `e` with member r.
  void update(std::span<cplx> e, std::size_t r) {
    if (beta_ == 0.0) return;
    const cplx* h = transfer_.data() + r * n_;
    const double* amp = amplitude_.data() + r * n_;

    for (std::size_t j = 0; j < n_; ++j) o_[j] = e[j] * h[j];
    freq_to_time(grid_, o_, o_);
    for (std::size_t j = 0; j < n_; ++j) g_[j] = o_[j] * o_[j];
    time_to_freq(grid_, g_, g_);
    // g' - g in the frequency domain; exactly-zero bins keep phase 0
    for (std::size_t j = 0; j < n_; ++j) {
      const double mag = std::abs(g_[j]);
      const cplx unit = mag > 0.0 ? g_[j] / mag : cplx(1.0, 0.0);
      g_[j] = amp[j] * unit - g_[j];
    }
    freq_to_time(grid_, g_, g_);

    double max_abs = 0.0;
    for (const auto& v : o_) max_abs = std::max(max_abs, std::abs(v));
    if (!(max_abs > 0.0)) throw DegenerateInput("modulated guess vanished; update weight undefined");
    for (std::size_t j = 0; j < n_; ++j) {
      const double mag = std::abs(o_[j]);
      const cplx weight = (mag / max_abs) * std::conj(o_[j]) / (mag * mag + alpha_);
      o_[j] += beta_ * weight * g_[j];
    }
    time_to_freq(grid_, o_, o_);
    for (std::size_t j = 0; j < n_; ++j) e[j] = o_[j] * std::conj(h[j]);
  }

  // Model spectrogram of `e` (raw scale) into `out`.
  void model(std::span<const cplx> e, std::span<double> out) {
    const std::size_t rows = transfer_.size() / n_;
    for (std::size_t r = 0; r < rows; ++r) {
      const cplx* h = transfer_.data() + r * n_;
      for (std::size_t j = 0; j < n_; ++j) o_[j] = e[j] * h[j];
      freq_to_time(grid_, o_, o_);
      for (auto& v : o_) v *= v;
      time_to_freq(grid_, o_, o_);
      for (std::size_t j = 0; j < n_; ++j) out[r * n_ + j] = std::norm(o_[j]);
    }
  }

 private:
  Grid grid_;
  double alpha_;
  double beta_;
  std::size_t n_;
  std::vector<cplx> transfer_;
  std::vector<double> amplitude_;
  std::vector<cplx> o_;
  std::vector<cplx> g_;
};

double rms_unit_peak(std::span<const double> model, std::span<const double> measured) {
  const double pm = *std::max_element(model.begin(), model.end());
  const double ps = *std::max_element(measured.begin(), measured.end());
  if (!(ps > 0.0)) throw DegenerateInput("measured spectrogram is all zero");
  if (!(pm > 0.0)) throw DegenerateInput("model spectrogram is all zero");
  double sum = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double d = model[i] / pm - measured[i] / ps;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(model.size()));
}

}  // namespace

void ReconConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
  if (sweeps < 1) throw InvalidArgument("sweeps must be positive");
  if (plateau_window < 0) throw InvalidArgument("plateau_window must be >= 0");
  if (initial_guess.kind == InitialGuess::Kind::Gaussian && !(initial_guess.fwhm > 0.0))
    throw InvalidArgument("initial guess FWHM must be positive");
  if (initial_guess.kind == InitialGuess::Kind::Provided && !initial_guess.field)
    throw InvalidArgument("provided initial guess has no field");
}

std::vector<cplx> update_weight(const Field& modulated_time, double alpha) {
  if (modulated_time.domain() != Domain::Time) throw DomainMismatch("update weight expects a time-domain field");
  double max_abs = 0.0;
  for (const auto& v : modulated_time.samples()) max_abs = std::max(max_abs, std::abs(v));
  if (!(max_abs > 0.0)) throw DegenerateInput("update weight of an all-zero field is undefined");
  std::vector<cplx> out(modulated_time.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const cplx o = modulated_time[j];
    const double mag = std::abs(o);
    out[j] = (mag / max_abs) * std::conj(o) / (mag * mag + alpha);
  }
  return out;
}

Field i2pie_member_update(const Field& guess, const PhaseSpec& member, std::span<const double> measured_row,
                          const ReconConfig& config) {
  if (guess.domain() != Domain::Freq) throw DomainMismatch("guess must be a frequency-domain field");
  const Grid& grid = guess.grid();
  if (measured_row.size() != grid.size()) throw ShapeMismatch("measured row length does not match grid size");
  if (config.beta == 0.0) return guess;

  const Field o = apply_transfer(guess, member);
  const Field o_t = to_time(o);
  std::vector<cplx> g(o_t.samples().begin(), o_t.samples().end());
  for (auto& v : g) v *= v;
  const Field g_t(grid, g, Domain::Time);
  const Field g_w = to_freq(g_t);

  std::vector<cplx> g_new(grid.size());
  for (std::size_t j = 0; j < g_new.size(); ++j) {
    const double mag = std::abs(g_w[j]);
    const cplx unit = mag > 0.0 ? g_w[j] / mag : cplx(1.0, 0.0);
    g_new[j] = std::sqrt(measured_row[j]) * unit;
  }
  const Field g_new_t = to_time(Field(grid, std::move(g_new), Domain::Freq));

  const auto weight = update_weight(o_t, config.alpha);
  std::vector<cplx> o_new(grid.size());
  for (std::size_t j = 0; j < o_new.size(); ++j)
    o_new[j] = o_t[j] + config.beta * weight[j] * (g_new_t[j] - g_t[j]);
  const Field o_new_w = to_freq(Field(grid, std::move(o_new), Domain::Time));

  std::vector<cplx> e(grid.size());
  const auto h = transfer_function(member, grid);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = o_new_w[j] * std::conj(h[j]);
  return Field(grid, std::move(e), Domain::Freq);
}

double rms_error(const Spectrogram& model, const Spectrogram& measured) {
  if (model.n_rows() != measured.n_rows() || model.n_cols() != measured.n_cols() ||
      model.data.size() != measured.data.size())
    throw ShapeMismatch("spectrograms differ in shape");
  return rms_unit_peak(model.data, measured.data);
}

Field make_initial_guess(const Grid& grid, const InitialGuess& guess) {
  switch (guess.kind) {
    case InitialGuess::Kind::Gaussian: {
      std::vector<cplx> t(grid.size());
      const double c = 2.0 * std::numbers::ln2 / (guess.fwhm * guess.fwhm);
      for (std::size_t j = 0; j < t.size(); ++j) t[j] = std::exp(-c * grid.time(j) * grid.time(j));
      const Field f(grid, std::move(t), Domain::Time);
      return to_freq(f.scaled(1.0 / std::sqrt(f.energy())));
    }
    case InitialGuess::Kind::Provided: {
      if (!guess.field) throw InvalidArgument("provided initial guess has no field");
      if (!(guess.field->grid() == grid)) throw ShapeMismatch("provided initial guess lives on a different grid");
      return guess.field->domain() == Domain::Freq ? *guess.field : to_freq(*guess.field);
    }
    case InitialGuess::Kind::SpectrumFlatPhase: {
      if (guess.spectrum.size() != grid.size()) throw ShapeMismatch("initial guess spectrum length mismatch");
      std::vector<cplx> w(grid.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (!(guess.spectrum[j] >= 0.0)) throw InvalidArgument("initial guess spectrum must be nonnegative");
        w[j] = std::sqrt(guess.spectrum[j]);
      }
      const Field f(grid, std::move(w), Domain::Freq);
      const double energy = f.energy();
      if (!(energy > 0.0)) throw DegenerateInput("initial guess spectrum is all zero");
      return f.scaled(1.0 / std::sqrt(energy));
    }
  }
  throw InvalidArgument("unknown initial guess kind");
}

ReconResult reconstruct(const Spectrogram& measured, const ReconConfig& config) {
  config.validate();
  measured.validate();
  const Grid& grid = measured.grid;
  const std::size_t rows = measured.n_rows();

  Field start = make_initial_guess(grid, config.initial_guess);
  std::vector<cplx> e(start.samples().begin(), start.samples().end());
  Updater updater(measured, config.alpha, config.beta);
  std::vector<double> model(measured.data.size());

  // Generated guesses are unit energy; bring their SHG level to the data's
  // so alpha acts at the same relative scale for raw and normalised input.
  if (config.initial_guess.kind != InitialGuess::Kind::Provided) {
    updater.model(e, model);
    const double pm = *std::max_element(model.begin(), model.end());
    const double ps = measured.peak();
    if (!(ps > 0.0)) throw DegenerateInput("measured spectrogram is all zero");
    if (pm > 0.0) {
      const double scale = std::pow(ps / pm, 0.25);
      for (auto& v : e) v *= scale;
    }
  }

  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.shuffle_seed);

  ReconResult result{Field::zeros(grid, Domain::Freq), {}, 0.0, false, 0};
  result.rms_trace.reserve(static_cast<std::size_t>(config.sweeps));
  for (int sweep = 0; sweep < config.sweeps; ++sweep) {
    if (config.member_order == MemberOrder::Shuffled) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t r : order) updater.update(e, r);
    updater.model(e, model);
    result.rms_trace.push_back(rms_unit_peak(model, measured.data));
    ++result.sweeps_run;

    const auto w = static_cast<std::size_t>(config.plateau_window);
    if (w > 0 && result.rms_trace.size() > w) {
      const double now = std::log10(std::max(result.rms_trace.back(), 1e-300));
      const double then = std::log10(std::max(result.rms_trace[result.rms_trace.size() - 1 - w], 1e-300));
      if (then - now < config.plateau_tolerance) break;
    }
  }

  result.field = Field(grid, std::move(e), Domain::Freq);
  result.final_log10_rms = std::log10(std::max(result.rms_trace.back(), 1e-300));
  result.success = result.final_log10_rms < config.success_log_rms;
  return result;
}

}  // namespace i2pie

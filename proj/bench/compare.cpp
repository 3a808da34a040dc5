// Wall-clock comparison of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "i2pie/bench.hpp"

using namespace i2pie;

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n_pulses = argc > 1 ? std::atoi(argv[1]) : 8;
  std::printf("threads available: %d\n", omp_get_max_threads());

  const Field obj = random_pulse(RandomPulseParams{}, 0);
  const PhaseFamily fam = build_family({ScanRule::QuadraticQ, 50, ScanScaling::Span, 2, {}, {}, 0.0},
                                       {obj.grid(), obj.intensity(), 0.125});
  const int reps = 50;
  const double serial_synth = seconds([&] {
    for (int i = 0; i < reps; ++i) synthesize_spectrogram_serial(obj, fam);
  });
  const double parallel_synth = seconds([&] {
    for (int i = 0; i < reps; ++i) synthesize_spectrogram(obj, fam);
  });
  std::printf("synthesis N=50 x%d    serial %.3f s  parallel %.3f s  speedup %.2f\n", reps, serial_synth,
              parallel_synth, serial_synth / parallel_synth);

  BenchConfig cfg;
  cfg.scan.n_members = 6;
  cfg.n_pulses = n_pulses;
  BenchReport a, b;
  const double serial_bench = seconds([&] { a = run_benchmark_serial(cfg); });
  const double parallel_bench = seconds([&] { b = run_benchmark(cfg); });
  std::printf("benchmark N=6 x%d pulses  serial %.3f s  parallel %.3f s  speedup %.2f  identical %s\n", n_pulses,
              serial_bench, parallel_bench, serial_bench / parallel_bench,
              a.success_rate == b.success_rate && a.histogram.counts == b.histogram.counts ? "yes" : "no");
}

#include <doctest.h>

#include "i2pie/bench.hpp"
#include "i2pie/errors.hpp"
#include "i2pie/transfer.hpp"
#include "oracles.hpp"

using namespace i2pie;

namespace {

const Grid kGrid = Grid::make(1024, 8e-12);

std::vector<double> coefficients(const PhaseFamily& f) {
  std::vector<double> out;
  for (const auto& m : f.members) out.push_back(m.as_polynomial().coefficient);
  return out;
}

// Intensity FWHM in wavelength converted to a Gaussian sigma of I(W).
double sigma_from_nm(double nm) { return bandwidth_to_omega(nm * 1e-9, 800e-9) / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

}  // namespace

TEST_CASE("phase evaluation special cases") {
  for (std::size_t j = 0; j < kGrid.size(); j += 37) {
    const double w = kGrid.omega(j);
    CHECK(PhaseSpec::polynomial(2, 0.0).phase(w) == 0.0);
    CHECK(PhaseSpec::sinusoidal(0.0, 3e-13, 1.2).phase(w) == 0.0);
    CHECK(PhaseSpec::sinusoidal(1.0, 0.0, 0.0).phase(w) == 1.0);
  }
}

TEST_CASE("analytic phase derivative agrees with finite differences") {
  const PhaseSpec specs[] = {PhaseSpec::polynomial(2, 3e-27), PhaseSpec::polynomial(3, -2e-40),
                             PhaseSpec::sinusoidal(2.1, 3e-13, 0.7)};
  for (const auto& s : specs) {
    for (double w : {-3e13, -1e12, 4e12, 2.2e13}) {
      const double h = 1e8;
      const double fd = (s.phase(w + h) - s.phase(w - h)) / (2.0 * h);
      CHECK(s.derivative(w) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("transfer functions have unit modulus") {
  const PhaseSpec specs[] = {PhaseSpec::polynomial(2, 7e-26), PhaseSpec::polynomial(4, 1e-52),
                             PhaseSpec::sinusoidal(9.0, 1e-12, 2.0)};
  for (const auto& s : specs)
    for (auto h : transfer_function(s, kGrid)) CHECK(std::abs(std::abs(h) - 1.0) <= 1e-14);
}

TEST_CASE("bandwidth-limited duration of a Gaussian spectrum") {
  for (double bins : {32.0, 48.0, 96.0}) {
    const double sw = bins * kGrid.domega();
    const auto I = oracle::gaussian_intensity(kGrid, sw);
    // amplitude exp(-W^2 / 4 sw^2), derivative taken analytically
    const double ref2 = oracle::quad(
                            [&](double w) {
                              const double a = std::exp(-w * w / (4.0 * sw * sw));
                              const double d = -w / (2.0 * sw * sw) * a;
                              return d * d;
                            },
                            -12.0 * sw, 12.0 * sw) /
                        (2.0 * oracle::kPi);
    CHECK(sigma0(I, kGrid) == doctest::Approx(std::sqrt(ref2)).epsilon(0.01));
  }
}

TEST_CASE("sigma0 scales with the square root of the spectrum level") {
  const auto I = oracle::gaussian_intensity(kGrid, 40.0 * kGrid.domega());
  for (double c : {0.25, 3.0, 1e6}) {
    std::vector<double> scaled = I;
    for (auto& v : scaled) v *= c;
    CHECK(sigma0(scaled, kGrid) == doctest::Approx(std::sqrt(c) * sigma0(I, kGrid)).epsilon(1e-12));
  }
}

TEST_CASE("narrower spectrum has a longer bandwidth-limited duration") {
  double prev = 0.0;
  for (double bins : {128.0, 64.0, 32.0, 16.0}) {
    const auto I = unit_energy_spectrum(oracle::gaussian_intensity(kGrid, bins * kGrid.domega()), kGrid);
    const double s = sigma0(I, kGrid);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("phase broadening allowance") {
  CHECK(sigma_psi(1e-12, 0.0) == doctest::Approx(1e-12).epsilon(1e-15));
  CHECK(sigma_psi(5.0, 3.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(sigma_psi(3.0, 3.0), NoAdmissibleBound);
  CHECK_THROWS_AS(sigma_psi(2.0, 3.0), NoAdmissibleBound);

  const BoundInputs in{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(10.0)), 0.125};
  const double s = sigma_psi(in);
  CHECK(s > 0.0);
  CHECK(s <= 1e-12);
  const double s0 = sigma0(unit_energy_spectrum(in.spectrum, kGrid), kGrid);
  CHECK(s * s + s0 * s0 == doctest::Approx(1e-24).epsilon(1e-12));
}

TEST_CASE("gamma too small leaves no admissible bound") {
  const BoundInputs in{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(2.0)), 0.001};
  CHECK_THROWS_AS(sigma_psi(in), NoAdmissibleBound);
  CHECK_THROWS_AS(q_max(in, 2), NoAdmissibleBound);
  CHECK_THROWS_AS(a_tau_product(in), NoAdmissibleBound);
}

TEST_CASE("modulated duration") {
  const auto I = oracle::gaussian_intensity(kGrid, sigma_from_nm(8.0));
  const auto unit = unit_energy_spectrum(I, kGrid);

  SUBCASE("zero phase gives the bandwidth limit") {
    CHECK(modulated_duration(I, PhaseSpec::polynomial(2, 0.0), kGrid) ==
          doctest::Approx(sigma0(unit, kGrid)).epsilon(1e-14));
  }

  SUBCASE("quadratic phase agrees with the brute-force temporal moment") {
    for (double q : {2e-27, 1e-26, 4e-26}) {
      std::vector<cplx> e(kGrid.size());
      for (std::size_t k = 0; k < e.size(); ++k)
        e[k] = std::polar(std::sqrt(I[k]), q * kGrid.omega(k) * kGrid.omega(k));
      const double brute = oracle::temporal_rms(kGrid, oracle::direct_idft(kGrid, e));
      CHECK(modulated_duration(I, PhaseSpec::polynomial(2, q), kGrid) == doctest::Approx(brute).epsilon(0.05));
    }
  }

  SUBCASE("doubling a dominant chirp doubles the duration") {
    const double a = modulated_duration(I, PhaseSpec::polynomial(2, 2e-25), kGrid);
    const double b = modulated_duration(I, PhaseSpec::polynomial(2, 4e-25), kGrid);
    CHECK(b / a == doctest::Approx(2.0).epsilon(0.02));
  }
}

TEST_CASE("maximum polynomial coefficient") {
  const auto I = oracle::gaussian_intensity(kGrid, sigma_from_nm(10.0));

  SUBCASE("proportional to the broadening allowance") {
    const BoundInputs a{kGrid, I, 0.125};
    const BoundInputs b{kGrid, I, 0.25};
    CHECK(q_max(b, 2) / q_max(a, 2) == doctest::Approx(sigma_psi(b) / sigma_psi(a)).epsilon(1e-12));
  }

  SUBCASE("maximum member closes the duration budget") {
    for (int k : {2, 3, 4}) {
      const BoundInputs in{kGrid, I, 0.125};
      const double q = q_max(in, k);
      const double t = modulated_duration(I, PhaseSpec::polynomial(k, q), kGrid);
      CHECK(t <= 1.1 * in.gamma * kGrid.time_window());
      CHECK(t == doctest::Approx(in.gamma * kGrid.time_window()).epsilon(1e-9));
    }
  }

  SUBCASE("off-centre spectrum allows less chirp") {
    const BoundInputs centred{kGrid, I, 0.125};
    const BoundInputs shifted{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(10.0), 6e13), 0.125};
    CHECK(q_max(shifted, 2) < q_max(centred, 2));
  }

  SUBCASE("order below two is rejected") { CHECK_THROWS_AS(q_max(BoundInputs{kGrid, I, 0.125}, 1), InvalidArgument); }
}

TEST_CASE("spectral autocorrelation") {
  const auto I = oracle::gaussian_intensity(kGrid, sigma_from_nm(12.0), 1e13);
  const cplx g0 = spectral_autocorr(I, kGrid, 0.0);
  double direct = 0.0;
  for (double v : I) direct += v;
  CHECK(g0.real() == doctest::Approx(direct * kGrid.domega() / (2.0 * oracle::kPi)).epsilon(1e-13));
  CHECK(g0.real() > 0.0);
  CHECK(g0.imag() == 0.0);
  for (double t : {1e-14, 1e-13, 3e-13, 2e-12}) CHECK(std::abs(spectral_autocorr(I, kGrid, t)) <= g0.real() * (1 + 1e-14));

  std::vector<double> band(kGrid.size(), 0.0);
  for (std::size_t j = 400; j < 600; ++j) band[j] = 1.0;
  CHECK(spectral_autocorr(band, kGrid, 0.0).real() ==
        doctest::Approx(200.0 * kGrid.domega() / (2.0 * oracle::kPi)).epsilon(1e-14));
}

TEST_CASE("sinusoidal amplitude and period bounds") {
  CHECK(a_tau_product(std::sqrt(2.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  // with P = 2 and tau = 2 the amplitude limit is 1
  CHECK(a_tau_product(std::sqrt(2.0), 1.0) / 2.0 == doctest::Approx(1.0).epsilon(1e-15));

  RandomPulseParams params;
  const Field pulse = random_pulse(params, 3);
  const BoundInputs in{pulse.grid(), pulse.intensity(), 0.125};
  const double p = a_tau_product(in);
  const double s = sigma_psi(in);
  CHECK(p == doctest::Approx(std::sqrt(2.0) * s).epsilon(1e-12));  // unit energy: G(0) = 1

  const double a_max = a_tau_bound(in, {FixedParam::Tau, 300e-15});
  CHECK(a_max == doctest::Approx(p / 300e-15).epsilon(1e-14));
  const auto phi_family = build_family({ScanRule::SinusPhi, 25, ScanScaling::Span, 2, std::nullopt, 300e-15, 0.0}, in);
  CHECK(phi_family.members.front().as_sinusoidal().amplitude == a_max);
  const auto a_family = build_family({ScanRule::SinusA, 24, ScanScaling::Span, 2, std::nullopt, 300e-15, 0.0}, in);
  CHECK(a_family.scan.bound == a_max);
  CHECK(a_family.members.front().as_sinusoidal().amplitude == doctest::Approx(-a_max).epsilon(1e-15));

  const double tau_max = a_tau_bound(in, {FixedParam::Amplitude, 2.7});
  CHECK(tau_max == doctest::Approx(p / 2.7).epsilon(1e-14));
  const auto tau_family = build_family({ScanRule::SinusTau, 25, ScanScaling::Span, 2, 2.7, std::nullopt, 0.0}, in);
  CHECK(tau_family.members.back().as_sinusoidal().tau == doctest::Approx(tau_max).epsilon(1e-15));

  CHECK_THROWS_AS(a_tau_bound(in, {FixedParam::Tau, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(a_tau_bound(in, {FixedParam::Amplitude, -1.0}), InvalidArgument);
}

TEST_CASE("exact product approaches the approximation when G(2 tau) vanishes") {
  const BoundInputs in{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(15.0)), 0.125};
  CHECK(a_tau_product_exact(in, 1e-12, 0.3) == doctest::Approx(a_tau_product(in)).epsilon(1e-6));
  // at tau = 0 and phi = 0 the denominator vanishes
  CHECK_THROWS_AS(a_tau_product_exact(in, 0.0, 0.0), NoAdmissibleBound);
  // phi = pi/2 doubles the denominator at tau = 0
  CHECK(a_tau_product_exact(in, 0.0, oracle::kPi / 2) ==
        doctest::Approx(a_tau_product(in) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("family enumeration") {
  ScanDescriptor d;
  d.rule = ScanRule::QuadraticQ;
  d.n_members = 6;
  d.bound = 3.0;

  SUBCASE("step scaling uses the bound as the step") {
    d.scaling = ScanScaling::Step;
    const auto c = coefficients(enumerate_family(d));
    const std::vector<double> want{-9.0, -6.0, -3.0, 0.0, 3.0, 6.0};
    CHECK(c == want);
  }
  SUBCASE("span scaling puts the extreme member on the bound") {
    d.scaling = ScanScaling::Span;
    const auto c = coefficients(enumerate_family(d));
    const std::vector<double> want{-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
    CHECK(c == want);
  }
  SUBCASE("odd member count spans symmetrically") {
    d.n_members = 25;
    const auto c = coefficients(enumerate_family(d));
    CHECK(c.front() == -3.0);
    CHECK(c.back() == 3.0);
    CHECK(c[12] == 0.0);
  }
  SUBCASE("period scan") {
    ScanDescriptor t;
    t.rule = ScanRule::SinusTau;
    t.n_members = 4;
    t.amplitude = 2.7;
    t.bound = 8.0;
    const auto f = enumerate_family(t);
    const double want[] = {2.0, 4.0, 6.0, 8.0};
    for (int n = 0; n < 4; ++n) {
      CHECK(f.members[n].as_sinusoidal().tau == want[n]);
      CHECK(f.members[n].as_sinusoidal().amplitude == 2.7);
    }
  }
  SUBCASE("offset scan covers one period") {
    ScanDescriptor p;
    p.rule = ScanRule::SinusPhi;
    p.n_members = 8;
    p.amplitude = 1.5;
    p.tau = 3e-13;
    const auto f = enumerate_family(p);
    for (int n = 0; n < 8; ++n) CHECK(f.members[n].as_sinusoidal().phi == doctest::Approx(2.0 * oracle::kPi * n / 8));
  }
  SUBCASE("bad scans") {
    d.n_members = 1;
    CHECK_THROWS_AS(enumerate_family(d), InvalidArgument);
    d.n_members = 4;
    d.rule = ScanRule::Explicit;
    CHECK_THROWS_AS(enumerate_family(d), InvalidArgument);
  }
}

TEST_CASE("every family member is phase-only") {
  const BoundInputs in{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(9.0)), 0.125};
  for (auto rule : {ScanRule::QuadraticQ, ScanRule::SinusPhi, ScanRule::SinusA, ScanRule::SinusTau}) {
    const auto f = build_family({rule, 12, ScanScaling::Span, 2, 2.7, 300e-15, 0.0}, in);
    CHECK(f.size() == 12);
    validate_family(f);
    for (const auto& m : f.members)
      for (auto h : transfer_function(m, kGrid)) CHECK(std::abs(std::abs(h) - 1.0) <= 1e-14);
  }
}

TEST_CASE("family validation") {
  PhaseFamily mixed;
  mixed.members = {PhaseSpec::polynomial(2, 1.0), PhaseSpec::sinusoidal(1.0, 1.0, 0.0)};
  CHECK_THROWS_AS(validate_family(mixed), ValidationError);

  PhaseFamily orders;
  orders.members = {PhaseSpec::polynomial(2, 1.0), PhaseSpec::polynomial(3, 1.0)};
  CHECK_THROWS_AS(validate_family(orders), ValidationError);

  PhaseFamily two_params;
  two_params.members = {PhaseSpec::sinusoidal(1.0, 1.0, 0.0), PhaseSpec::sinusoidal(2.0, 2.0, 0.0)};
  CHECK_THROWS_AS(validate_family(two_params), ValidationError);

  PhaseFamily single;
  single.members = {PhaseSpec::polynomial(2, 1.0)};
  CHECK_THROWS_AS(validate_family(single), ValidationError);
}

TEST_CASE("scan requests need their fixed parameters") {
  const BoundInputs in{kGrid, oracle::gaussian_intensity(kGrid, sigma_from_nm(9.0)), 0.125};
  CHECK_THROWS_AS(resolve_scan({ScanRule::SinusA, 6, ScanScaling::Span, 2, std::nullopt, std::nullopt, 0.0}, in),
                  InvalidArgument);
  CHECK_THROWS_AS(resolve_scan({ScanRule::SinusTau, 6, ScanScaling::Span, 2, std::nullopt, 3e-13, 0.0}, in),
                  InvalidArgument);
}

TEST_CASE("scan names round trip") {
  for (auto r : {ScanRule::QuadraticQ, ScanRule::SinusPhi, ScanRule::SinusA, ScanRule::SinusTau, ScanRule::Explicit})
    CHECK(scan_rule_from_string(to_string(r)) == r);
  for (auto s : {ScanScaling::Span, ScanScaling::Step}) CHECK(scan_scaling_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scan_rule_from_string("cubic"), InvalidArgument);
  CHECK_THROWS_AS(scan_scaling_from_string("linear"), InvalidArgument);
}

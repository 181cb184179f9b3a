#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/fitkit.hpp"
#include "support/params.hpp"

using namespace cqed;
using cqed_tests::uniform;

namespace {

double gauss(std::mt19937_64& rng) {
  const double u1 = (rng() >> 11) * (1.0 / 9007199254740992.0);
  const double u2 = (rng() >> 11) * (1.0 / 9007199254740992.0);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(two_pi * u2);
}

constexpr double kHc = 1.98644586e-25;

RealVector photoionization_lifetimes(const RealVector& intensity, double sigma_mb, double eta,
                                     double tau0, const PhotoionizationConstants& c,
                                     double noise, std::mt19937_64& rng) {
  const double beta = 1e-22 * c.pulse_window_s * c.wavelength_m / kHc;
  RealVector tau(intensity.size());
  for (Eigen::Index k = 0; k < intensity.size(); ++k) {
    const double p_pi = eta * (1.0 - std::exp(-sigma_mb * beta * intensity(k)));
    tau(k) = (1.0 + noise * gauss(rng)) / (1.0 / tau0 + p_pi / c.rep_period_s);
  }
  return tau;
}

}  // namespace

TEST_CASE("exponential fit recovers noiseless decay to machine precision") {
  const RealVector t = RealVector::LinSpaced(60, 0.0, 600.0);
  RealVector y(60);
  for (int k = 0; k < 60; ++k) y(k) = 2.5 * std::exp(-t(k) / 100.0);
  const FitResult fit = fit_exponential(t, y, 0.0, 600.0);
  CHECK(fit.converged);
  CHECK(fit.value("tau") == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(fit.value("amplitude") == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("exponential fit tolerates multiplicative noise") {
  std::mt19937_64 rng(101);
  const RealVector t = RealVector::LinSpaced(120, 0.0, 500.0);
  RealVector y(120);
  for (int k = 0; k < 120; ++k) {
    y(k) = std::exp(-t(k) / 100.0) * (1.0 + 0.01 * gauss(rng));
  }
  const FitResult fit = fit_exponential(t, y, 0.0, 500.0);
  CHECK(std::abs(fit.value("tau") - 100.0) < 3.0);
}

TEST_CASE("exponential fit input validation") {
  const RealVector t = RealVector::LinSpaced(20, 0.0, 20.0);
  RealVector y = RealVector::Ones(20);
  CHECK_THROWS_AS(fit_exponential(t, y, 0.0, 5.0), validation_error);  // < 8 points
  y(3) = -1.0;
  CHECK_THROWS_AS(fit_exponential(t, y, 0.0, 20.0), validation_error);
}

TEST_CASE("rise-fall fit recovers its own model") {
  const RealVector tau = RealVector::LinSpaced(161, -40.0, 40.0);
  RealVector c(161);
  for (int k = 0; k < 161; ++k) {
    const double d = tau(k) - 1.5;
    c(k) = 0.8 * (d < 0.0 ? std::exp(d / 2.5) : std::exp(-d / 7.1));
  }
  const FitResult fit = fit_rise_fall(tau, c);
  CHECK(fit.value("tau_rise") == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(fit.value("tau_fall") == doctest::Approx(7.1).epsilon(1e-6));
  CHECK(fit.value("center") == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(fit.value("amplitude") == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("rise-fall fit on a symmetric peak finds equal constants") {
  std::mt19937_64 rng(7);
  const RealVector tau = RealVector::LinSpaced(121, -30.0, 30.0);
  RealVector c(121);
  for (int k = 0; k < 121; ++k) {
    c(k) = std::exp(-std::abs(tau(k)) / 4.0) * (1.0 + 0.005 * gauss(rng));
  }
  const FitResult fit = fit_rise_fall(tau, c);
  const double joint = std::hypot(fit.sigma("tau_rise"), fit.sigma("tau_fall"));
  CHECK(std::abs(fit.value("tau_rise") - fit.value("tau_fall")) < 3.0 * joint + 0.1);
}

TEST_CASE("rise-fall fit rejects edge maxima and flat data") {
  const RealVector tau = RealVector::LinSpaced(32, 0.0, 31.0);
  RealVector rising(32);
  for (int k = 0; k < 32; ++k) rising(k) = k;
  CHECK_THROWS_AS(fit_rise_fall(tau, rising), validation_error);
}

TEST_CASE("photoionization fit recovers the cross-section") {
  PhotoionizationConstants constants;
  RealVector intensity(13);
  intensity << 0.0, 2e7, 5e7, 1e8, 1.7e8, 2.6e8, 4e8, 6e8, 9e8, 1.4e9, 2.1e9, 3.2e9, 5e9;

  SUBCASE("literature-value synthetic data with 5% noise") {
    std::mt19937_64 rng(42);
    const RealVector tau =
        photoionization_lifetimes(intensity, 12.0, 0.8, 5.0, constants, 0.05, rng);
    const FitResult fit = fit_photoionization(intensity, tau, constants, true);
    CHECK(std::abs(fit.value("sigma_Mb") - 12.0) < 3.0);
    CHECK(fit.value("eta") == doctest::Approx(0.8).epsilon(0.2));
  }

  SUBCASE("measured-value synthetic data stays inside the quoted band") {
    std::mt19937_64 rng(43);
    const RealVector tau =
        photoionization_lifetimes(intensity, 17.0, 0.8, 5.0, constants, 0.05, rng);
    const FitResult fit = fit_photoionization(intensity, tau, constants, true);
    CHECK(fit.value("sigma_Mb") > 11.0);
    CHECK(fit.value("sigma_Mb") < 23.0);
  }

  SUBCASE("zero intensity reproduces the baseline exactly") {
    std::mt19937_64 rng(44);
    const RealVector tau =
        photoionization_lifetimes(intensity, 17.0, 0.8, 5.0, constants, 0.0, rng);
    CHECK(tau(0) == doctest::Approx(5.0).epsilon(1e-12));
    const FitResult fit = fit_photoionization(intensity, tau, constants, true);
    CHECK(fit.value("tau0_s") == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(fit.value("sigma_Mb") == doctest::Approx(17.0).epsilon(1e-4));
    CHECK(fit.residual_rms < 1e-8);

    const FitResult fixed = fit_photoionization(intensity, tau, constants, false);
    CHECK(fixed.value("sigma_Mb") == doctest::Approx(17.0).epsilon(1e-4));
  }

  SUBCASE("all-zero fluence is rejected") {
    RealVector zeros = RealVector::Zero(6);
    RealVector tau = RealVector::Ones(6);
    CHECK_THROWS_AS(fit_photoionization(zeros, tau, constants, true), validation_error);
  }
}

TEST_CASE("fit determinism on identical input bytes") {
  std::mt19937_64 rng(55);
  const RealVector t = RealVector::LinSpaced(64, 0.0, 400.0);
  RealVector y(64);
  for (int k = 0; k < 64; ++k) y(k) = std::exp(-t(k) / 80.0) * (1.0 + 0.02 * gauss(rng));
  const FitResult a = fit_exponential(t, y, 0.0, 400.0);
  const FitResult b = fit_exponential(t, y, 0.0, 400.0);
  CHECK(a.value("tau") == b.value("tau"));
  CHECK(a.sigma("tau") == b.sigma("tau"));
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("reported uncertainties scale as 1/sqrt(N)") {
  auto mean_sigma = [](int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double acc = 0.0;
    const int repeats = 24;
    for (int r = 0; r < repeats; ++r) {
      const RealVector t = RealVector::LinSpaced(n, 0.0, 300.0);
      RealVector y(n);
      for (int k = 0; k < n; ++k) y(k) = std::exp(-t(k) / 100.0) + 0.005 * gauss(rng);
      acc += fit_exponential(t, y, 0.0, 300.0).sigma("tau");
    }
    return acc / repeats;
  };
  const double s50 = mean_sigma(50, 1);
  const double s200 = mean_sigma(200, 2);
  const double s800 = mean_sigma(800, 3);
  CHECK(s50 / s200 == doctest::Approx(2.0).epsilon(0.2));
  CHECK(s200 / s800 == doctest::Approx(2.0).epsilon(0.2));
}

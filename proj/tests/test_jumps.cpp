#include <doctest.h>

#include <cmath>
#include <random>

#include "schwinger/dynamics.hpp"
#include "schwinger/jumps.hpp"

using namespace schwinger;

namespace {

// tau drawn from tau^-(alpha+1) on [a, b] by inverse CDF
double draw_tau(double alpha, double a, double b, double u) {
  if (alpha == 0.0) return a * std::pow(b / a, u);
  const double fa = std::pow(a, -alpha);
  const double fb = std::pow(b, -alpha);
  return std::pow(fa - u * (fa - fb), -1.0 / alpha);
}

std::vector<JumpEvent> synthetic_events(double alpha, std::size_t count, std::uint64_t seed, double a = 1e1,
                                        double b = 1e12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<JumpEvent> out(count);
  for (auto& ev : out) {
    ev.tau_J = draw_tau(alpha, a, b, u(rng));
    ev.height = 0.1 + 0.4 * u(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("flat or monotone-slow series have no jumps") {
  const auto g = TimeGrid::log(1e-1, 1e12, 20);
  CHECK(detect_jumps(std::vector<double>(g.size(), 0.3), g.points).empty());
  std::vector<double> slow(g.size());
  for (std::size_t i = 0; i < slow.size(); ++i) slow[i] = 0.001 * static_cast<double>(i);
  CHECK(detect_jumps(slow, g.points).empty());
}

TEST_CASE("single synthetic step") {
  const auto g = TimeGrid::log(1e-1, 1e12, 20);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = g.points[i] >= 1e5 ? 0.7 : 0.0;
  const auto ev = detect_jumps(s, g.points, {}, 42);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].height == doctest::Approx(0.7));
  CHECK(ev[0].sector_seed == 42);
  CHECK(std::abs(std::log10(ev[0].tau_J) - 5.0) <= 0.125 + 1e-12);
  CHECK(ev[0].t_start < 1e5);
  CHECK(ev[0].t_end >= 1e5);
}

TEST_CASE("a ramp over several intervals is one jump") {
  const auto g = TimeGrid::log(1e-1, 1e12, 20);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = std::log10(g.points[i]);
    s[i] = std::clamp((x - 3.0) * 0.4, 0.0, 0.8);  // 0.1 per interval, 3 <= log t <= 5
  }
  // later dip does not count
  s[s.size() - 5] = 0.2;
  const auto ev = detect_jumps(s, g.points);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].height == doctest::Approx(0.8).epsilon(0.1));
  CHECK(std::log10(ev[0].tau_J) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("jump heights never exceed the final cumulative maximum") {
  const auto g = TimeGrid::log(1e-1, 1e12, 20);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(g.size());
    double x = 0.0;
    for (auto& v : s) v = x = std::max(0.0, x + nd(rng));
    const auto ev = detect_jumps(s, g.points);
    double total = 0.0;
    for (const auto& e : ev) {
      CHECK(e.height >= 0.05 - 1e-12);
      total += e.height;
    }
    CHECK(total <= *std::max_element(s.begin(), s.end()) - s.front() + 1e-12);
    // deterministic
    const auto again = detect_jumps(s, g.points);
    REQUIRE(again.size() == ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(again[k].tau_J == ev[k].tau_J);
  }
}

TEST_CASE("jump options are validated") {
  const std::vector<double> t{1.0, 2.0, 3.0};
  const std::vector<double> s{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(detect_jumps(s, t, {0.0, 0.05, 0.0}), ConfigError);
  CHECK_THROWS_AS(detect_jumps(s, t, {0.25, 0.05, 0.3}), ConfigError);
  CHECK_THROWS_AS(detect_jumps(s, {1.0, 1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(fit_jump_histogram({}, 1e12), ConfigError);
}

TEST_CASE("histogram fit recovers alpha = 0 from tau^-1 events") {
  const auto ev = synthetic_events(0.0, 4000, 17);
  HistogramFitOptions opt;
  opt.t_lo = 1e1;
  opt.t_hi = 1e12;
  const auto fit = fit_jump_histogram(ev, 1e12 * std::sqrt(10.0), opt);
  CHECK(fit.alpha_err > 0.0);
  CHECK(std::abs(fit.alpha) < 2.5 * fit.alpha_err);
  CHECK(fit.alpha_err < 0.02);
  opt.mle = true;
  const auto mle = fit_jump_histogram(ev, 1e12, opt);
  CHECK(mle.method == FitMethod::histogram_mle);
  CHECK(std::abs(mle.alpha) < 2.5 * mle.alpha_err);
}

TEST_CASE("histogram fit recovers a nonzero exponent") {
  const auto ev = synthetic_events(0.15, 6000, 23, 1e1, 1e10);
  HistogramFitOptions opt;
  opt.t_lo = 1e1;
  opt.t_hi = 1e10;
  const auto fit = fit_jump_histogram(ev, 1e10, opt);
  CHECK(std::abs(fit.alpha - 0.15) < 2.5 * fit.alpha_err);
  opt.mle = true;
  const auto mle = fit_jump_histogram(ev, 1e10, opt);
  CHECK(std::abs(mle.alpha - 0.15) < 2.5 * mle.alpha_err);
}

TEST_CASE("too few populated bins is an error") {
  std::vector<JumpEvent> ev(200);
  for (auto& e : ev) {
    e.tau_J = 1e3;
    e.height = 0.1;
  }
  CHECK_THROWS_AS(fit_jump_histogram(ev, 1e12), NumericalError);
}

TEST_CASE("exact power law is recovered by the entropy fit") {
  const auto g = TimeGrid::log(1e-1, 1e12, 20);
  for (double alpha : {0.02, 0.3, 1.1}) {
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.9 - 0.4 * std::pow(g.points[i], -alpha);
    const auto fit = fit_entropy_powerlaw(g.points, s);
    CHECK(fit.alpha == doctest::Approx(alpha).epsilon(1e-6));
    CHECK(fit.S_inf == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(fit.S_0 == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-9);
    CHECK(fit.t_lo == 1e2);
  }
  CHECK_THROWS_AS(fit_entropy_powerlaw({1.0, 2.0}, {0.0, 0.0}), ConfigError);
}

TEST_CASE("integrated jump density matches the entropy power law") {
  // each sector jumps once at tau ~ tau^-(alpha+1); the ensemble mean of the
  // step functions is S_inf - S_0 t^-alpha
  const double alpha = 0.4;
  const double a = 1.0;
  const double b = 1e14;
  const std::size_t sectors = 20000;
  auto ev = synthetic_events(alpha, sectors, 31, a, b);
  const auto g = TimeGrid::log(1e1, 1e12, 10);
  std::vector<double> taus;
  for (const auto& e : ev) taus.push_back(e.tau_J);
  std::sort(taus.begin(), taus.end());
  std::vector<double> mean(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto below = std::upper_bound(taus.begin(), taus.end(), g.points[i]) - taus.begin();
    mean[i] = static_cast<double>(below) / static_cast<double>(sectors);
  }
  const auto sfit = fit_entropy_powerlaw(g.points, mean, 1e2);
  for (auto& e : ev) e.height = 1.0;
  HistogramFitOptions opt;
  opt.t_lo = 1e2;
  opt.t_hi = 1e12;
  const auto hfit = fit_jump_histogram(ev, 1e12, opt);
  const double joint = std::hypot(sfit.alpha_err, hfit.alpha_err);
  INFO("entropy ", sfit.alpha, "+-", sfit.alpha_err, " histogram ", hfit.alpha, "+-", hfit.alpha_err);
  CHECK(std::abs(sfit.alpha - hfit.alpha) < 2.0 * joint);
  CHECK(sfit.alpha == doctest::Approx(alpha).epsilon(0.1));
  CHECK(hfit.alpha == doctest::Approx(alpha).epsilon(0.1));
}

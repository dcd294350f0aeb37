#include <doctest.h>

#include "multinorm/errors.hpp"
#include "multinorm/estimate.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace multinorm;

TEST_CASE("mean and standard error of a fixed sample") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const Estimate e = mean_estimate(v);
  CHECK(e.value == doctest::Approx(3.0));
  // sample variance 2.5, se = sqrt(2.5 / 5)
  CHECK(e.std_error == doctest::Approx(std::sqrt(0.5)));
  CHECK(e.n_samples == 5);
  CHECK(mean_estimate(std::vector<double>{7.0}).std_error == 0.0);
  CHECK_THROWS_AS((void)mean_estimate(std::vector<double>{}), ArgumentError);
}

TEST_CASE("Welford mean is stable with a large offset") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1e9 + (i % 2 ? 1.0 : -1.0));
  const Estimate e = mean_estimate(v);
  CHECK(e.value == doctest::Approx(1e9).epsilon(1e-15));
  CHECK(e.std_error == doctest::Approx(std::sqrt(1000.0 / 999.0 / 1000.0)).epsilon(1e-9));
}

TEST_CASE("power means") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(power_mean_estimate(v, 2).value == doctest::Approx(std::sqrt(30.0 / 4.0)));
  CHECK(power_mean_estimate(v, -1).value == doctest::Approx(4.0 / (1 + 0.5 + 1.0 / 3 + 0.25)));
  CHECK(power_mean_estimate(v, 1).value == mean_estimate(v).value);
  // Monotone in q.
  double last = 0.0;
  for (double q : {-2.0, -1.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double m = power_mean_estimate(v, q).value;
    CHECK(m >= last);
    last = m;
  }
  CHECK_THROWS_AS((void)power_mean_estimate(v, 0.0), ArgumentError);
  CHECK_THROWS_AS((void)power_mean_estimate(std::vector<double>{0.0, 1.0}, -1.0), ArgumentError);
}

TEST_CASE("delta-method error is calibrated") {
  // Repeat the estimator on independent exponential samples and compare the
  // spread of the q = 2 power mean with the reported error.
  std::mt19937_64 eng(1);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> estimates;
  double reported = 0.0;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> v(2000);
    for (auto& x : v) x = ex(eng);
    const Estimate e = power_mean_estimate(v, 2.0);
    estimates.push_back(e.value);
    reported += e.std_error / 400;
  }
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / 400;
  double ss = 0.0;
  for (double x : estimates) ss += (x - mean) * (x - mean);
  const double spread = std::sqrt(ss / 399);
  CHECK(reported == doctest::Approx(spread).epsilon(0.15));
  CHECK(mean == doctest::Approx(std::sqrt(2.0)).epsilon(0.005));
}

TEST_CASE("empirical quantile uses k = ceil(level N)") {
  std::vector<double> v(10);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(empirical_quantile(v, 0.9).value == 9.0);
  CHECK(empirical_quantile(v, 0.91).value == 10.0);
  CHECK(empirical_quantile(v, 0.5).value == 5.0);
  CHECK(empirical_quantile(v, 0.05).value == 1.0);
  CHECK(empirical_quantile(v, 1.0).value == 10.0);
  CHECK_THROWS_AS((void)empirical_quantile(v, 0.0), ArgumentError);
  CHECK_THROWS_AS((void)empirical_quantile(std::vector<double>{}, 0.5), ArgumentError);
}

TEST_CASE("order-statistic interval covers the true quantile") {
  std::mt19937_64 eng(2);
  std::normal_distribution<double> g;
  const double truth = boost::math::quantile(boost::math::normal(), 0.9);
  int covered = 0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> v(1000);
    for (auto& x : v) x = g(eng);
    std::sort(v.begin(), v.end());
    const auto q = empirical_quantile(v, 0.9);
    covered += q.ci95.lo <= truth && truth <= q.ci95.hi ? 1 : 0;
  }
  // Nominal 95%; binomial sd at 500 reps is about 1%.
  CHECK(covered >= 0.92 * reps);
  CHECK(covered <= reps);
}

TEST_CASE("combined error") {
  CHECK(combined_error({1, 3, 10}, {2, 4, 10}) == doctest::Approx(5.0));
  CHECK(Estimate::exact(2.0).ci95().lo == 2.0);
}

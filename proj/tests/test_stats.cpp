#include <doctest.h>

#include <cmath>
#include <vector>

#include "bart/rng.hpp"
#include "bart/stats.hpp"

using namespace bart;

TEST_CASE("normal cdf and quantile") {
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("chi-squared quantile inverts the cdf") {
  // frozen from an external implementation
  CHECK(stats::chi_squared_quantile(0.1, 3.0) ==
        doctest::Approx(0.5843743741551835).epsilon(1e-8));
  CHECK(stats::chi_squared_quantile(0.5, 3.0) ==
        doctest::Approx(2.3659738843753377).epsilon(1e-8));
  for (double df : {1.0, 3.0, 10.0, 99.0}) {
    for (double p : {0.01, 0.1, 0.5, 0.9, 0.99}) {
      const double x = stats::chi_squared_quantile(p, df);
      CHECK(stats::chi_squared_cdf(x, df) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("student t cdf") {
  CHECK(stats::student_t_cdf(1.3, 7.0) ==
        doctest::Approx(0.8826160823038114).epsilon(1e-10));
  CHECK(stats::student_t_cdf(0.0, 5.0) == doctest::Approx(0.5));
  CHECK(stats::student_t_cdf(-1.3, 7.0) ==
        doctest::Approx(1.0 - 0.8826160823038114).epsilon(1e-10));
}

TEST_CASE("quantile type-7 interpolation") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::quantile(v, 0.0) == 1.0);
  CHECK(stats::quantile(v, 1.0) == 4.0);
  CHECK(stats::quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(stats::quantile(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("fit stats hand arithmetic") {
  // y=(1,2,3), yhat=(1,2,4): L1=1, L2=1, rmse=sqrt(1/3), R2 = 1 - 1/2
  std::vector<double> y{1, 2, 3}, yhat{1, 2, 4};
  const auto fit = stats::fit_stats(y, yhat);
  CHECK(fit.l1 == doctest::Approx(1.0));
  CHECK(fit.l2 == doctest::Approx(1.0));
  CHECK(fit.rmse == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(fit.pseudo_r_sq == doctest::Approx(0.5));

  const auto perfect = stats::fit_stats(y, y);
  CHECK(perfect.l1 == 0.0);
  CHECK(perfect.l2 == 0.0);
  CHECK(perfect.pseudo_r_sq == doctest::Approx(1.0));

  std::vector<double> mean_pred{2, 2, 2};
  CHECK(stats::fit_stats(y, mean_pred).pseudo_r_sq == doctest::Approx(0.0));
}

TEST_CASE("permutation threshold order statistic") {
  std::vector<double> nulls;
  for (int i = 1; i <= 20; ++i) nulls.push_back(i);
  // k = ceil(0.95 * 21) = 20 -> the maximum
  CHECK(stats::permutation_threshold(nulls, 0.05) == 20.0);
  // k = ceil(0.5 * 21) = 11
  CHECK(stats::permutation_threshold(nulls, 0.5) == 11.0);
}

TEST_CASE("rng moments and determinism") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  Rng rng(7);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));

  double gsum = 0;
  const double shape = 2.5;
  for (int i = 0; i < n; ++i) gsum += rng.gamma(shape);
  CHECK(gsum / n == doctest::Approx(shape).epsilon(0.01));
}

TEST_CASE("truncated normal stays on its side") {
  Rng rng(3);
  double mean_pos = 0.0;
  bool all_nonneg = true;
  for (int i = 0; i < 50000; ++i) {
    const double z = rng.normal_right_of_zero(0.0);
    all_nonneg &= z >= 0.0;
    mean_pos += z;
  }
  CHECK(all_nonneg);
  // half-normal mean sqrt(2/pi)
  CHECK(mean_pos / 50000 ==
        doctest::Approx(std::sqrt(2.0 / 3.141592653589793)).epsilon(0.01));
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.normal_left_of_zero(2.0) <= 0.0);
    CHECK(rng.normal_right_of_zero(-7.0) >= 0.0);
  }
}

TEST_CASE("confusion matrix") {
  std::vector<int> y{0, 0, 1, 1, 1};
  std::vector<int> yhat{0, 1, 1, 1, 0};
  const auto cm = stats::confusion_matrix(y, yhat);
  CHECK(cm.counts[0][0] == 1);
  CHECK(cm.counts[0][1] == 1);
  CHECK(cm.counts[1][0] == 1);
  CHECK(cm.counts[1][1] == 2);
  CHECK(cm.error_rate() == doctest::Approx(0.4));
  CHECK(cm.actual_error_rate(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, SeedStream::Chain, 0) != derive_seed(1, SeedStream::Chain, 1));
  CHECK(derive_seed(1, SeedStream::Chain, 0) != derive_seed(2, SeedStream::Chain, 0));
  CHECK(derive_seed(1, SeedStream::Chain, 0) != derive_seed(1, SeedStream::Fold, 0));
  CHECK(derive_seed(1, SeedStream::Chain, 3) == derive_seed(1, SeedStream::Chain, 3));
}

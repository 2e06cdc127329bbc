#pragma once

#include <span>
#include <vector>

namespace bart::stats {

// ---- special functions -----------------------------------------------------

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse standard normal CDF (Wichura's PPND16), |error| < 1e-15 territory.
double normal_quantile(double p);

// Regularized incomplete gamma P(a, x) and its complement Q(a, x).
double reg_gamma_p(double a, double x);
double reg_gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double reg_beta(double a, double b, double x);

double chi_squared_cdf(double x, double df);
// Inverse chi-squared CDF by bisection on the regularized gamma CDF
// (|cdf(result) - p| tightened to ~1e-10 horizontally via bracket width).
double chi_squared_quantile(double p, double df);

// Student-t distribution, two-sided tail probability for |t| with df dof.
double student_t_cdf(double t, double df);
double two_sided_t_pvalue(double t, double df);

// ---- descriptive helpers ---------------------------------------------------

double mean(std::span<const double> v);
// Sample variance (n - 1 denominator).
double variance(std::span<const double> v);

// Linear-interpolation quantile of an unsorted sample (R type 7); q in [0, 1].
double quantile(std::vector<double> v, double q);
// Same on data already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double q);

// Order-statistic threshold for permutation nulls: the k-th smallest value
// with k = ceil((1 - alpha) * (n + 1)), clamped to [1, n]. A fresh draw from
// the same continuous distribution exceeds it with probability close to alpha.
double permutation_threshold(std::vector<double> nulls, double alpha);

// Error metrics on paired responses/predictions. sst_mean is the response
// mean used in the total sum of squares (full-sample mean for out-of-fold
// pooling, so pseudo_r_sq stays comparable across folds).
struct FitStats {
  double l1 = 0.0;
  double l2 = 0.0;
  double rmse = 0.0;
  double pseudo_r_sq = 0.0;
};
FitStats fit_stats(std::span<const double> y, std::span<const double> y_hat,
                   double sst_mean);
FitStats fit_stats(std::span<const double> y, std::span<const double> y_hat);

// 2x2 confusion counts for binary classification, in label order (0, 1).
struct ConfusionMatrix {
  long counts[2][2] = {{0, 0}, {0, 0}};  // [actual][predicted]
  long total() const;
  long errors() const;
  double error_rate() const;
  double actual_error_rate(int label) const;
  double predicted_error_rate(int label) const;
};
ConfusionMatrix confusion_matrix(std::span<const int> y,
                                 std::span<const int> y_hat);

}  // namespace bart::stats

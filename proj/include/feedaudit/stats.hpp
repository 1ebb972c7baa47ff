#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace feedaudit {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

enum class TTestVariant { Student, Welch };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool degenerate_variance = false;
};

/// Two-sample t test of mean(a) - mean(b). Needs at least two values per
/// sample. With zero variance: equal means give p = 1, otherwise p = 0 and
/// degenerate_variance is set.
TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestVariant variant = TTestVariant::Student);

double mean(std::span<const double> values);
/// Sample variance (n - 1 denominator).
double sample_variance(std::span<const double> values);

}  // namespace feedaudit

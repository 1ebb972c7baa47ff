#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "feedaudit/stats.hpp"

using namespace feedaudit;

namespace {

// Two-sided tail for even df from the finite cosine series of the t CDF.
double even_df_two_sided(double t, int df) {
  const double theta = std::atan(std::abs(t) / std::sqrt(double(df)));
  const double c2 = std::cos(theta) * std::cos(theta);
  double term = 1, sum = 1;
  for (int k = 1; k < df / 2; ++k) {
    term *= c2 * (2 * k - 1) / (2 * k);
    sum += term;
  }
  return 1.0 - std::sin(theta) * sum;
}

double binomial(int n, int k) {
  double r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// I_x(a, b) for integer a, b as a binomial tail.
double beta_integer(int a, int b, double x) {
  double s = 0;
  for (int j = a; j <= a + b - 1; ++j) s += binomial(a + b - 1, j) * std::pow(x, j) * std::pow(1 - x, a + b - 1 - j);
  return s;
}

}  // namespace

TEST(IncompleteBeta, ClosedForms) {
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    EXPECT_NEAR(incomplete_beta(1, 1, x), x, 1e-12);
    EXPECT_NEAR(incomplete_beta(2, 3, x), beta_integer(2, 3, x), 1e-10);
    EXPECT_NEAR(incomplete_beta(7, 4, x), beta_integer(7, 4, x), 1e-10);
    EXPECT_NEAR(incomplete_beta(2.5, 1.5, x), 1 - incomplete_beta(1.5, 2.5, 1 - x), 1e-10);
  }
  EXPECT_THROW(incomplete_beta(1, 1, 1.5), StatsError);
  EXPECT_THROW(incomplete_beta(0, 1, 0.5), StatsError);
}

TEST(StudentT, EvenDfSeries) {
  for (int df : {2, 4, 8, 20})
    for (double t : {0.0, 0.3, 1.0, 2.0, 4.5, 12.0})
      EXPECT_NEAR(student_t_two_sided(t, df), even_df_two_sided(t, df), 1e-10) << df << " " << t;
  EXPECT_NEAR(student_t_two_sided(1.0, 1), 0.5, 1e-12);  // Cauchy
  EXPECT_NEAR(student_t_two_sided(-2.0, 8), student_t_two_sided(2.0, 8), 1e-15);
}

TEST(StudentT, MonotoneInT) {
  for (double df : {3.0, 8.0, 41.5}) {
    double last = 1.0;
    for (double t = 0.0; t < 10.0; t += 0.25) {
      const double p = student_t_two_sided(t, df);
      EXPECT_LE(p, last);
      last = p;
    }
  }
}

TEST(TTest, TextbookPooled) {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {3, 4, 5, 6, 7};
  const auto r = t_test(a, b);
  EXPECT_NEAR(r.t, -2.0, 1e-12);
  EXPECT_EQ(r.df, 8.0);
  EXPECT_NEAR(r.p, even_df_two_sided(2.0, 8), 1e-10);
  EXPECT_NEAR(r.p, 0.0805, 5e-4);
}

TEST(TTest, IdenticalSamples) {
  const std::vector<double> a = {0.2, 0.5, 0.9};
  const auto r = t_test(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
}

TEST(TTest, Antisymmetric) {
  const std::vector<double> a = {0.1, 0.4, 0.35, 0.8}, b = {0.5, 0.9, 0.7, 0.66, 0.95};
  for (auto v : {TTestVariant::Student, TTestVariant::Welch}) {
    const auto ab = t_test(a, b, v), ba = t_test(b, a, v);
    EXPECT_DOUBLE_EQ(ab.t, -ba.t);
    EXPECT_DOUBLE_EQ(ab.p, ba.p);
    EXPECT_DOUBLE_EQ(ab.df, ba.df);
  }
}

TEST(TTest, Welch) {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 4, 6, 8, 10, 12};
  const double va = 2.5, vb = 14.0, na = 5, nb = 6;
  const double se2 = va / na + vb / nb;
  const double t = (3.0 - 7.0) / std::sqrt(se2);
  const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
  const auto r = t_test(a, b, TTestVariant::Welch);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_NEAR(r.df, df, 1e-12);
  EXPECT_NEAR(r.p, student_t_two_sided(t, df), 1e-15);
}

TEST(TTest, DegenerateVariance) {
  const std::vector<double> one = {1, 1}, two = {2, 2, 2};
  const auto same = t_test(one, one);
  EXPECT_EQ(same.p, 1.0);
  const auto diff = t_test(one, two);
  EXPECT_EQ(diff.p, 0.0);
  EXPECT_TRUE(diff.degenerate_variance);
  const std::vector<double> single = {1};
  EXPECT_THROW(t_test(single, two), StatsError);
}

TEST(Moments, MeanAndSampleVariance) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(sample_variance(v), 32.0 / 7.0);
}

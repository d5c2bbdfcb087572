#ifndef PREFRANK_METRICS_HPP
#define PREFRANK_METRICS_HPP

#include <map>
#include <string>
#include <vector>

namespace prefrank {

/// system id -> rank (1 = highest score; tied groups share the average of
/// the ranks they span, so ranks always sum to N(N+1)/2).
using RankVector = std::map<std::string, double>;

RankVector rank(const std::map<std::string, double>& scores);

/// Spearman rank correlation: Pearson correlation of the tie-averaged rank
/// vectors. Both maps must cover the same systems and contain at least two
/// distinct values each.
double srcc(const std::map<std::string, double>& x, const std::map<std::string, double>& y);

/// Pearson product-moment correlation.
double lcc(const std::vector<double>& x, const std::vector<double>& y);

struct TTestResult {
  double t = 0.0;
  double p = 1.0; // two-sided
  int df = 0;
};

/// Paired two-sided Student t-test on a - b. Sample sd (n-1 denominator);
/// rejects zero-variance differences.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Regularized incomplete beta I_x(a, b) by continued fraction, accurate to
/// ~1e-14. Exposed for verification against quadrature.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value for |T| >= |t| under Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, int df);

} // namespace prefrank

#endif

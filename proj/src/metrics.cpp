#include "prefrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefrank/errors.hpp"

namespace prefrank {

RankVector rank(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw ValidationError("rank: no systems");
  std::vector<std::pair<double, const std::string*>> order;
  order.reserve(scores.size());
  for (const auto& [sys, score] : scores) {
    if (!std::isfinite(score))
      throw ValidationError("rank: non-finite score for system '" + sys + "'");
    order.emplace_back(score, &sys);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  RankVector ranks;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && order[j].first == order[i].first) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[*order[k].second] = avg;
    i = j;
  }
  return ranks;
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y,
               const char* what) {
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValidationError(std::string(what) + ": correlation undefined for constant input");
  double r = sxy / std::sqrt(sxx * syy);
  return std::min(1.0, std::max(-1.0, r));
}

} // namespace

double srcc(const std::map<std::string, double>& x, const std::map<std::string, double>& y) {
  if (x.size() != y.size())
    throw ValidationError("srcc: inputs cover different numbers of systems");
  if (x.size() < 2) throw ValidationError("srcc: need at least 2 systems");
  const RankVector rx = rank(x), ry = rank(y);
  std::vector<double> vx, vy;
  vx.reserve(rx.size());
  vy.reserve(rx.size());
  for (const auto& [sys, rank_x] : rx) {
    auto it = ry.find(sys);
    if (it == ry.end())
      throw ValidationError("srcc: system '" + sys + "' missing from second input");
    vx.push_back(rank_x);
    vy.push_back(it->second);
  }
  return pearson(vx, vy, "srcc");
}

double lcc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("lcc: length mismatch");
  if (x.size() < 2) throw ValidationError("lcc: need at least 2 points");
  return pearson(x, y, "lcc");
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("t-test: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw ValidationError("t-test: need at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  if (ss == 0.0) throw ValidationError("t-test: zero-variance differences");

  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.df = static_cast<int>(n - 1);
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const int max_iter = 500;
  const double eps = 1e-15;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  return h; // converged to working precision anyway for our df range
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // symmetry keeps the continued fraction in its fast-converging region
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int df) {
  if (df < 1) throw ValidationError("t-test: df must be >= 1");
  const double nu = static_cast<double>(df);
  return regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

} // namespace prefrank

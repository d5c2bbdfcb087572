#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "prefrank/errors.hpp"
#include "prefrank/metrics.hpp"
#include "prefrank/rng.hpp"

using namespace prefrank;

TEST_CASE("rank orders descending with average ties") {
  const RankVector r1 = rank({{"A", 3.0}, {"B", 1.0}, {"C", 2.0}});
  CHECK(r1.at("A") == 1.0);
  CHECK(r1.at("B") == 3.0);
  CHECK(r1.at("C") == 2.0);

  const RankVector r2 = rank({{"A", 2.0}, {"B", 2.0}});
  CHECK(r2.at("A") == 1.5);
  CHECK(r2.at("B") == 1.5);

  const RankVector r3 = rank({{"A", 5.0}, {"B", 5.0}, {"C", 1.0}, {"D", 0.0}});
  CHECK(r3.at("A") == 1.5);
  CHECK(r3.at("B") == 1.5);
  CHECK(r3.at("C") == 3.0);
  CHECK(r3.at("D") == 4.0);
}

TEST_CASE("rank rejects empty and non-finite input") {
  CHECK_THROWS_AS(rank({}), ValidationError);
  CHECK_THROWS_AS(rank({{"A", std::nan("")}, {"B", 1.0}}), ValidationError);
}

TEST_CASE("ranks always sum to N(N+1)/2") {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(39));
    std::map<std::string, double> scores;
    for (int i = 0; i < n; ++i) {
      // few distinct levels so tied groups are common
      scores["s" + std::to_string(i)] = static_cast<double>(rng.uniform_index(4));
    }
    double sum = 0.0;
    for (const auto& [id, rk] : rank(scores)) sum += rk;
    CHECK(sum == 0.5 * n * (n + 1));
  }
}

TEST_CASE("srcc at the fixed points") {
  const std::map<std::string, double> up{{"A", 4.0}, {"B", 3.0}, {"C", 2.0}, {"D", 1.0}};
  const std::map<std::string, double> down{{"A", 1.0}, {"B", 2.0}, {"C", 3.0}, {"D", 4.0}};
  CHECK(srcc(up, up) == 1.0);
  CHECK(srcc(up, down) == -1.0);

  // rank vectors (1,2,3,4) vs (1,2,4,3)
  const std::map<std::string, double> y{{"A", 4.0}, {"B", 3.0}, {"C", 1.0}, {"D", 2.0}};
  CHECK(srcc(up, y) == 0.8);
}

TEST_CASE("srcc handles ties through averaged ranks") {
  const std::map<std::string, double> x{{"A", 1.0}, {"B", 2.0}, {"C", 3.0}, {"D", 4.0}};
  const std::map<std::string, double> y{{"A", 1.0}, {"B", 1.0}, {"C", 2.0}, {"D", 3.0}};
  // Pearson on ranks (4,3,2,1) and (3.5,3.5,2,1)
  const double r = srcc(x, y);
  CHECK(r == doctest::Approx(4.5 / std::sqrt(22.5)).epsilon(1e-15));
  // the no-tie shortcut formula would report 0.95 here; make sure we do not
  CHECK(std::abs(r - 0.95) > 1e-3);
}

TEST_CASE("srcc symmetry and monotone-transform invariance") {
  Rng rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    std::map<std::string, double> x, y, x_cubed;
    const int n = 3 + static_cast<int>(rng.uniform_index(10));
    for (int i = 0; i < n; ++i) {
      const std::string id = "s" + std::to_string(i);
      x[id] = rng.uniform(0.5, 5.0);
      y[id] = static_cast<double>(rng.uniform_index(4));
    }
    bool y_constant = true;
    for (const auto& [id, v] : y) y_constant = y_constant && v == y.begin()->second;
    if (y_constant) continue;
    for (const auto& [id, v] : x) x_cubed[id] = v * v * v;
    const double r = srcc(x, y);
    CHECK(srcc(y, x) == r);
    CHECK(srcc(x_cubed, y) == r);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("srcc input validation") {
  const std::map<std::string, double> x{{"A", 1.0}, {"B", 2.0}};
  CHECK_THROWS_AS(srcc(x, {{"A", 1.0}}), ValidationError);
  CHECK_THROWS_AS(srcc(x, {{"A", 1.0}, {"Z", 2.0}}), ValidationError);
  CHECK_THROWS_AS(srcc(x, {{"A", 1.0}, {"B", 1.0}}), ValidationError);
  CHECK_THROWS_AS(srcc({{"A", 1.0}}, {{"A", 1.0}}), ValidationError);
}

TEST_CASE("lcc fixed points and validation") {
  CHECK(lcc({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lcc({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(lcc({1, 2, 3}, {1, 3, 2}) == 0.5);
  CHECK_THROWS_AS(lcc({1, 2}, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(lcc({1}, {1}), ValidationError);
  CHECK_THROWS_AS(lcc({1, 2, 3}, {5, 5, 5}), ValidationError);
}

TEST_CASE("paired t-test fixed points") {
  // differences (1, 2, 3): mean 2, sample sd 1
  const TTestResult r = paired_t_test({2, 4, 6}, {1, 2, 3});
  CHECK(r.df == 2);
  CHECK(r.t == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.t == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(r.p == doctest::Approx(0.0742).epsilon(2e-3));
  CHECK(r.p == doctest::Approx(oracles::t_two_sided_p_quad(r.t, 2)).epsilon(1e-9));

  // differences (1, -1, 1, -1): zero mean
  const TTestResult z = paired_t_test({1, 0, 1, 0}, {0, 1, 0, 1});
  CHECK(z.t == 0.0);
  CHECK(z.p == 1.0);
}

TEST_CASE("paired t-test validation and antisymmetry") {
  CHECK_THROWS_AS(paired_t_test({1, 2, 3}, {0, 1, 2}), ValidationError);
  CHECK_THROWS_AS(paired_t_test({1, 2}, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(paired_t_test({1}, {2}), ValidationError);

  Rng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(20));
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.uniform(0.0, 1.0);
      b[i] = rng.uniform(0.0, 1.0);
    }
    TTestResult fwd{}, rev{};
    try {
      fwd = paired_t_test(a, b);
      rev = paired_t_test(b, a);
    } catch (const ValidationError&) {
      continue; // zero-variance draw
    }
    CHECK(fwd.t == -rev.t);
    CHECK(fwd.p == rev.p);
  }
}

TEST_CASE("two-sided p matches tail quadrature") {
  for (int df : {1, 2, 3, 5, 10, 30, 100}) {
    for (double t : {0.3, 0.5, 1.0, 2.0, 3.5, 5.0}) {
      const double p = student_t_two_sided_p(t, df);
      const double q = oracles::t_two_sided_p_quad(t, df);
      CHECK(p == doctest::Approx(q).epsilon(1e-9));
      CHECK(student_t_two_sided_p(-t, df) == p);
    }
    CHECK(student_t_two_sided_p(0.0, df) == 1.0);
  }
  CHECK_THROWS_AS(student_t_two_sided_p(1.0, 0), ValidationError);
}

TEST_CASE("incomplete beta endpoints, symmetry, quadrature agreement") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), ValidationError);

  Rng rng(24);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = rng.uniform(0.5, 20.0);
    const double b = rng.uniform(0.5, 20.0);
    const double x = rng.uniform01();
    const double lhs = regularized_incomplete_beta(a, b, x);
    const double rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(lhs >= 0.0);
    CHECK(lhs <= 1.0);
  }
  for (double a : {1.0, 2.5, 7.0}) {
    CHECK(regularized_incomplete_beta(a, a, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
    for (double b : {1.0, 3.0, 12.0}) {
      for (double x : {0.1, 0.35, 0.62, 0.9}) {
        CHECK(regularized_incomplete_beta(a, b, x) ==
              doctest::Approx(oracles::reg_inc_beta_quad(a, b, x)).epsilon(1e-10));
      }
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "entropic/entropy_fix.hpp"
#include "entropic/theory.hpp"
#include "generators.hpp"

using namespace entropic;
using namespace entropic::theory;

namespace {

double h(double x) { return x == 0.0 ? 0.0 : x * std::log(x) - x; }

double quotient(double x, double y, double c) { return (h(x + y) - h(x + c * y)) / (h(x) - h(x + y)); }

WeightsPtr halves() { return Weights::uniform(2, 0.5); }

}  // namespace

TEST_SUITE("scalar functions") {
  TEST_CASE("h examples") {
    CHECK(h_func(1.0) == -1.0);
    CHECK(h_func(0.0) == 0.0);
    CHECK(h_func(2.0) == doctest::Approx(2.0 * std::log(2.0) - 2.0).epsilon(1e-15));
    CHECK(h_func(2.0) == doctest::Approx(-0.613706).epsilon(1e-6));
  }

  TEST_CASE("F quotient examples and domain") {
    CHECK(F_quotient(0.5, 0.25, 2.0) == doctest::Approx(quotient(0.5, 0.25, 2.0)).epsilon(1e-14));
    CHECK(F_quotient(0.5, 0.25, 2.0) == doctest::Approx(0.287264).epsilon(1e-6));
    CHECK(F_quotient(0.0, 0.25, 2.0) == doctest::Approx(0.419060).epsilon(1e-6));
    CHECK_THROWS_AS(F_quotient(0.6, 0.1, 2.0), std::domain_error);
    CHECK_THROWS_AS(F_quotient(0.1, 0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(F_quotient(0.1, 0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(F_quotient(0.1, 0.3, 2.0), std::domain_error);
  }

  TEST_CASE("F is nonnegative on its domain") {
    testgen::Gen gen(71);
    for (int trial = 0; trial < 5000; ++trial) {
      const double c = gen.real(1.0 + 1e-6, 50.0);
      const double x = gen.real(0.0, 0.5);
      const double y = gen.real(1e-9, 1.0 / (2.0 * c));
      CHECK(F_quotient(x, y, c) >= 0.0);
    }
  }

  TEST_CASE("G examples") {
    CHECK(G_func(0.0, 2.0) == doctest::Approx(0.419060).epsilon(1e-6));
    CHECK(G_func(0.5, 2.0) == doctest::Approx(0.287264).epsilon(1e-6));
    CHECK(G_func(0.3, 5.0) == doctest::Approx(quotient(0.3, 0.1, 5.0)).epsilon(1e-13));
  }

  TEST_CASE("closed forms agree with direct evaluation") {
    for (double c = 1.05; c < 200.0; c *= 1.3) {
      CHECK(G_at_zero_closed(c) == doctest::Approx(quotient(0.0, 0.5 / c, c)).epsilon(1e-12));
      CHECK(G_at_half_closed(c) == doctest::Approx(quotient(0.5, 0.5 / c, c)).epsilon(1e-12));
      CHECK(G_at_zero_closed(c) == doctest::Approx(c * (1 + std::log(2.0)) / (std::log(2 * c) + 1) - 1).epsilon(1e-14));
    }
  }

  TEST_CASE("G is bounded below by its endpoint values") {
    for (double c : {1.5, 2.0, 5.58, 10.0, 100.0}) {
      const double floor = std::min(G_func(0.0, c), G_func(0.5, c));
      for (int i = 0; i <= 200; ++i) {
        const double x = 0.5 * i / 200.0;
        CHECK(G_func(x, c) >= floor - 1e-12 * std::abs(floor));
      }
    }
  }

  TEST_CASE("C2 of C1") {
    const double l2 = std::log(2.0);
    CHECK(c2_of_c1(1.0) == doctest::Approx(std::pow(4.0 / (1.0 + l2), 2)).epsilon(1e-15));
    CHECK(c2_of_c1(1.0) == doctest::Approx(5.58124).epsilon(1e-6));
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100; ++i) {
      const double c1 = i / 100.0;
      const double c2 = c2_of_c1(c1);
      CHECK(c2 < prev);
      CHECK(c2 >= 16.0 / ((1.0 + l2) * (1.0 + l2)) * (1.0 - 1e-15));
      prev = c2;
    }
    CHECK_THROWS_AS(c2_of_c1(0.0), std::domain_error);
    CHECK_THROWS_AS(c2_of_c1(1.5), std::domain_error);
  }
}

TEST_SUITE("inequality checks") {
  TEST_CASE("report bookkeeping") {
    InequalityReport r("x");
    CHECK(r.satisfied);
    CHECK(std::isinf(r.worst_margin));
    r.record(0.5, 1.0, "a");
    r.record(-5e-13, 1.0, "b");
    CHECK(r.satisfied);
    CHECK(r.worst_sample == "b");
    r.record(-1e-11, 1.0, "c");
    CHECK_FALSE(r.satisfied);
    r.skip();
    CHECK(r.samples == 3);
    CHECK(r.skipped == 1);
    InequalityReport other("x");
    other.record(-1.0, 1.0, "d");
    r.merge(other);
    CHECK(r.samples == 4);
    CHECK(r.worst_margin == -1.0);
    CHECK(r.worst_sample == "d");
  }

  TEST_CASE("sandwich examples") {
    const InequalityReport ones = check_entropy_sandwich(Distribution({1.0, 1.0}, halves()));
    CHECK(ones.satisfied);
    CHECK(ones.worst_margin == doctest::Approx(0.0).scale(1.0));

    const Distribution f({2.0, 0.0}, halves());
    // lower side: |f-1|^2 / (2 |f|inf) = 1 / 4, upper side |f-1|^2 = 1.
    CHECK(0.25 <= gibbs_entropy(f));
    CHECK(gibbs_entropy(f) <= 1.0);
    const InequalityReport r = check_entropy_sandwich(f);
    CHECK(r.satisfied);
    CHECK(r.worst_margin == doctest::Approx(std::min(std::log(2.0) - 0.25, 1.0 - std::log(2.0))));
  }

  TEST_CASE("sandwich holds on a reduced sampling plan") {
    const InequalityReport r = check_entropy_sandwich(SamplingPlan{7, 2000, 64});
    CHECK(r.satisfied);
    CHECK(r.samples >= 2000);
  }

  TEST_CASE("difference bound examples") {
    const Distribution f1({1.5, 0.5}, halves());
    const Distribution f2({1.2, 0.8}, halves());
    CHECK(check_entropy_diff_bound(f1, f1, 0.5).worst_margin == doctest::Approx(0.0).scale(1.0));
    const InequalityReport r = check_entropy_diff_bound(f1, f2, 0.5);
    CHECK(r.satisfied);
    CHECK(r.samples == 1);
    // Direct evaluation: |f1 - f2|_2 = 0.3, |f1-1|_2 = 0.5, |f2-1|_2 = 0.2.
    auto eta = [](double a, double b) { return 0.5 * (a * std::log(a) + b * std::log(b)); };
    const double lhs = std::abs(eta(1.5, 0.5) - eta(1.2, 0.8));
    const double rhs = std::max(2.0, 2.0 * std::abs(std::log(0.5))) * 0.3 * (0.5 + 0.2);
    CHECK(rhs == doctest::Approx(0.42));
    CHECK(r.worst_margin > 0.0);
    CHECK(r.worst_margin == doctest::Approx(rhs - lhs).epsilon(1e-12));
  }

  TEST_CASE("difference bound on a reduced sampling plan") {
    for (double c0 : {0.1, 0.5}) {
      const InequalityReport r = check_entropy_diff_bound(SamplingPlan{8, 2000, 64}, c0);
      CHECK(r.satisfied);
    }
  }

  TEST_CASE("F lower bound grid") {
    const std::vector<double> grid{1.0, 0.1};
    const InequalityReport r = check_F_lower_bound(grid, 101);
    CHECK(r.satisfied);
    CHECK(r.worst_margin >= 0.0);
  }

  TEST_CASE("F equals G on the boundary y = 1/(2 C2)") {
    for (double c1 : {1.0, 0.5, 0.1}) {
      const double c2 = c2_of_c1(c1);
      for (int i = 0; i <= 20; ++i) {
        const double x = 0.5 * i / 20.0;
        CHECK(F_quotient(x, 0.5 / c2, c2) == doctest::Approx(G_func(x, c2)).epsilon(1e-12));
        CHECK(G_func(x, c2) >= 1.0 / c1);
      }
    }
  }

  TEST_CASE("cheap versus root on a reduced plan") {
    const InequalityReport r = check_cheap_vs_root(SamplingPlan{9, 500, 64});
    CHECK(r.satisfied);
    CHECK(r.samples == 500);
  }
}

TEST_SUITE("maxlogratio") {
  TEST_CASE("gaussian example") {
    const Distribution g = example_gaussian();
    CHECK(g.size() == 21);
    CHECK(weighted_mean(g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(check_maxlogratio(g, 0.5, 0.125));
  }

  TEST_CASE("piecewise example with I1 / N fixed") {
    for (double cf : {1.0, 0.5, 0.125, 0.01}) {
      CHECK(check_maxlogratio(example_piecewise(30, 10), 1.0 / 3.0, cf));
      CHECK(check_maxlogratio(example_piecewise(300, 100), 1.0 / 3.0, cf));
    }
  }

  TEST_CASE("piecewise example with I1 = 1 fails as N grows") {
    for (int n : {300, 1000, 10000}) {
      for (double c1 : {1.0 / 3.0, 0.1, 0.01}) {
        CHECK_FALSE(check_maxlogratio(example_piecewise(n, 1), c1, 0.5));
      }
    }
  }

  TEST_CASE("sorting and edge conventions") {
    const auto w = Weights::uniform(4, 0.25);
    const Distribution shuffled({1.5, 0.5, 1.2, 0.8}, w);
    const Distribution sorted({0.5, 0.8, 1.2, 1.5}, w);
    for (double c1 : {0.2, 0.5, 0.9}) {
      for (double cf : {0.1, 0.5, 1.0}) {
        CHECK(check_maxlogratio(shuffled, c1, cf) == check_maxlogratio(sorted, c1, cf));
      }
    }
    // Oracle for the sorted case, c1 = 0.5: I1 = 2, f1 = 0.5, fI1 = 0.8.
    const double lhs = 1.0 / std::abs(std::log(0.5));
    const double ratio = lhs * std::abs(std::log(0.8));
    CHECK(check_maxlogratio(sorted, 0.5, ratio * 0.999));
    CHECK_FALSE(check_maxlogratio(sorted, 0.5, ratio * 1.001));
    CHECK(check_maxlogratio(Distribution({1.0, 1.0}, halves()), 0.5, 1.0));
  }
}

TEST_SUITE("theorem bounds") {
  TEST_CASE("no entropy gap is not applicable") {
    const Distribution f({1.5, 0.5}, halves());
    for (Theorem t : {Theorem::log_bound, Theorem::c0_bound, Theorem::linf_bound}) {
      CHECK_FALSE(evaluate_thm_bound(t, f, f).applicable);
    }
  }

  TEST_CASE("log bound example") {
    const Distribution next({2.0, 0.0}, halves());
    const Distribution exact({1.5, 0.5}, halves());
    const BoundEvaluation e = evaluate_thm_bound(Theorem::log_bound, next, exact);
    REQUIRE(e.applicable);
    CHECK(e.beta == doctest::Approx(0.5).epsilon(1e-12));
    // |0.5 (1 - f)|_2 with dv = 0.5: sqrt(0.5 * 0.25 + 0.5 * 0.25).
    CHECK(e.lhs == doctest::Approx(0.5).epsilon(1e-12));
    const double eps = 0.5;
    const double m2 = 8.0 * (1.0 * 2.0 + 1.0) * 2.0 * (1.0 + std::sqrt(1.5));
    CHECK(e.rhs == doctest::Approx(m2 * eps * (std::abs(std::log(eps)) + 1.0)).epsilon(1e-14));
    CHECK(e.lhs <= e.rhs);
  }

  TEST_CASE("c0 bound needs a positive floor") {
    const Distribution next({2.0, 0.0}, halves());
    const Distribution exact({1.5, 0.5}, halves());
    CHECK_FALSE(evaluate_thm_bound(Theorem::c0_bound, next, exact).applicable);
    const Distribution next2({1.8, 0.2}, halves());
    const BoundEvaluation e = evaluate_thm_bound(Theorem::c0_bound, next2, exact);
    REQUIRE(e.applicable);
    const double k = 2.0 * std::abs(std::log(0.2));
    const double eps2 = std::sqrt(0.5 * 0.09 + 0.5 * 0.09);
    CHECK(e.rhs == doctest::Approx(2.0 * k * 1.8 * (1.0 + std::sqrt(1.5)) * eps2).epsilon(1e-14));
    CHECK(e.lhs <= e.rhs);
    CHECK(e.beta == doctest::Approx(solve_beta(next2, gibbs_entropy(exact))).epsilon(1e-15));
  }

  TEST_CASE("linf bound needs a small sup-norm difference") {
    const Distribution exact({1.5, 0.5}, halves());
    CHECK_FALSE(evaluate_thm_bound(Theorem::linf_bound, Distribution({2.0, 0.0}, halves()), exact).applicable);
    const BoundEvaluation e = evaluate_thm_bound(Theorem::linf_bound, Distribution({1.7, 0.3}, halves()), exact);
    REQUIRE(e.applicable);
    CHECK(e.lhs <= e.rhs);
  }

  TEST_CASE("unequal mass is not applicable") {
    const Distribution next({2.0, 0.2}, halves());
    const Distribution exact({1.5, 0.5}, halves());
    CHECK_FALSE(evaluate_thm_bound(Theorem::log_bound, next, exact).applicable);
  }

  TEST_CASE("sampled bounds hold on reduced plans") {
    for (Theorem t : {Theorem::log_bound, Theorem::c0_bound, Theorem::linf_bound}) {
      const InequalityReport r = check_thm_bounds(t, SamplingPlan{10, 200, 64});
      CHECK_MESSAGE(r.satisfied, theorem_name(t) << ": " << r.worst_sample);
      CHECK(r.samples == 200);
    }
  }
}

#include <doctest.h>

#include <cmath>

#include "pickands/errors.hpp"
#include "pickands/pickands_optimizer.hpp"
#include "pickands/special_functions.hpp"

using namespace pickands;

TEST_SUITE("pickands_optimizer") {
  TEST_CASE("f(kappa)") {
    CHECK(f_kappa(0.0) == doctest::Approx(kE / 2.0).epsilon(1e-15));
    CHECK(f_kappa(1.18267) == doctest::Approx(6.02449).epsilon(1e-6));
    // mpmath, 40 digits
    CHECK(f_kappa(1.18267) == doctest::Approx(6.024491018198023553).epsilon(1e-14));
    CHECK(f_kappa(10.0) == doctest::Approx(46152258.18926076081).epsilon(1e-14));
    double previous = 0.0;
    for (double k = 0.0; k <= 20.0; k += 0.01) {
      CHECK(f_kappa(k) > previous);
      previous = f_kappa(k);
    }
    CHECK_THROWS_AS(f_kappa(-0.1), DomainError);
  }

  TEST_CASE("objective g") {
    CHECK(objective_g(1e-3) == doctest::Approx(kE / 2.0).epsilon(1e-3));
    CHECK(objective_g(1e-3) == doctest::Approx(1.3605007347706275809).epsilon(1e-13));
    CHECK(objective_g(1.18267) == doctest::Approx(3.1336248738955864919).epsilon(1e-13));
    CHECK(objective_g(1.3) == doctest::Approx(3.0858185259788489417).epsilon(1e-13));
    CHECK(objective_g(1.3) < objective_g(1.18267));
    CHECK_FALSE(std::isnan(log_objective_g(1000.0)));
    CHECK_THROWS_AS(objective_g(0.0), DomainError);
    CHECK_THROWS_AS(objective_g(1001.0), DomainError);
  }

  TEST_CASE("optimize") {
    const OptimizationResult r = optimize();
    CHECK(r.kappa_star == doctest::Approx(1.18267).epsilon(1e-4 / 1.18267));
    CHECK(std::abs(r.f_at_kappa - 6.02449) <= 1e-4);
    CHECK(std::abs(r.b_chosen - 6.02448) <= 1e-4);
    CHECK(std::abs(r.Y_chosen - 6.446) <= 1e-2);
    CHECK(std::abs(r.g_star - 3.13362) <= 1e-4);
    CHECK(r.g_star / kE >= kPickandsBase);
    CHECK(r.g_star <= 3.1337);
    CHECK(r.b_chosen < r.f_at_kappa);
    CHECK(std::abs(1.0 + r.kappa_star * r.b_chosen / r.Y_chosen - std::sqrt(2.0 * r.b_chosen / kE)) <= 1e-9);
    CHECK(r.constraints.all());
    CHECK(r.brackets_agree);
    CHECK_FALSE(r.used_fallback);
    CHECK(r.kappa_spread <= 1e-6);
  }

  TEST_CASE("golden section") {
    const double x = golden_section_max([](double v) { return -(v - 0.3) * (v - 0.3); }, -2.0, 5.0, 1e-10);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-9));
  }

  TEST_CASE("gamma sum bound") {
    const auto geometric = gamma_sum_bound_check(1.0, 1.0);
    CHECK(geometric.lhs == doctest::Approx(1.0 / (kE - 1.0)).epsilon(1e-12));
    CHECK(geometric.rhs == doctest::Approx(1.0));
    CHECK(geometric.holds());
    // direct compensated sums (400000 terms) and the closed form
    const auto half = gamma_sum_bound_check(2.0, 0.5);
    CHECK(half.lhs == doctest::Approx(0.023361339993580246849).epsilon(1e-10));
    CHECK(half.rhs == doctest::Approx(0.125).epsilon(1e-14));
    const auto quarter = gamma_sum_bound_check(0.5, 0.25);
    CHECK(quarter.lhs == doctest::Approx(1.358787237807212).epsilon(1e-10));
    CHECK(quarter.rhs == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(quarter.ratio() > 0.0);
    CHECK(quarter.ratio() <= 1.0);
    for (double lambda : {0.1, 0.5, 1.0, 3.0, 10.0})
      for (double alpha : {0.2, 0.25, 0.5, 0.75, 1.0}) CHECK(gamma_sum_bound_check(lambda, alpha).ratio() <= 1.0);
    CHECK_THROWS_AS(gamma_sum_bound_check(1.0, 1.5), DomainError);
    CHECK_THROWS_AS(gamma_sum_bound_check(0.0, 0.5), DomainError);
  }

  TEST_CASE("weighted sum maximiser") {
    const auto one = weighted_sum_maximizer_check(1.0, 1.0);
    CHECK(one.y_star == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
    CHECK(one.value == doctest::Approx(std::exp(-std::sqrt(5.0)) * (1.0 + std::sqrt(5.0)) / 2.0));
    CHECK(one.relative_gap() <= 1e-8);
    const auto tiny = weighted_sum_maximizer_check(1.0, 1e-12);
    CHECK(tiny.y_star == doctest::Approx(1.0));
    CHECK(tiny.value == doctest::Approx(std::exp(-1.0)));
    const double b = 6.02448;
    const double kappa = 1.18267;
    const auto paper = weighted_sum_maximizer_check(1.0 / (2.0 * b), kappa * kappa * b / 2.0);
    CHECK(paper.relative_gap() <= 1e-8);
    CHECK(paper.numeric_y == doctest::Approx(paper.y_star).epsilon(1e-4));
  }

  TEST_CASE("H_alpha curve") {
    const auto p1 = halpha_point(1.0);
    CHECK(p1.conjecture == 1.0);
    CHECK(p1.michna == 1.0 / 16.0);
    CHECK(p1.lower_bound_shape == doctest::Approx(kPickandsBase));
    CHECK(halpha_point(2.0).conjecture == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));
    CHECK(halpha_point(0.01).conjecture > 0.0);
    // 1/Gamma(250) underflows a double
    CHECK_THROWS_AS(halpha_point(0.004), DomainError);
    CHECK_THROWS_AS(halpha_point(0.0), DomainError);
    CHECK_THROWS_AS(halpha_point(2.5), DomainError);

    const std::vector<double> alphas{0.05, 0.5, 1.0, 2.0};
    const auto points = emit_halpha_curve(alphas, 2.0);
    REQUIRE(points.size() == 4);
    CHECK(points[2].lower_bound_shape == doctest::Approx(2.0 * kPickandsBase));
    const auto round = parse_halpha_csv(halpha_csv(points));
    REQUIRE(round.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(round[i].alpha == points[i].alpha);
      CHECK(round[i].lower_bound_shape == points[i].lower_bound_shape);
      CHECK(round[i].michna == points[i].michna);
      CHECK(round[i].prior_harper == points[i].prior_harper);
    }
    CHECK(halpha_csv(points).rfind("alpha,lower_bound_shape,conjecture,michna,prior_harper\n", 0) == 0);
    CHECK_THROWS(parse_halpha_csv("alpha,x\n1,2\n"));
  }

  TEST_CASE("crossover") {
    const Crossover c = halpha_crossover();
    auto shape = [](double a) { return std::pow(a, 2.5) * std::pow(kPickandsBase, 1.0 / a); };
    CHECK(shape(c.lower) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(shape(c.upper) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(shape(0.5 * c.lower) > 1.0);
    CHECK(shape(0.5 * (c.lower + c.upper)) < 1.0);
    // mpmath bisection
    CHECK(c.lower == doctest::Approx(0.013125092336246477).epsilon(1e-8));
    CHECK(c.upper == doctest::Approx(0.94137278259568955).epsilon(1e-8));
  }

  TEST_CASE("prop2 parameters") {
    const auto opt = optimize();
    const auto p = prop2_parameters(0.5, 3.0, 183, opt);
    CHECK(p.C == doctest::Approx(1.5));
    CHECK(p.K == doctest::Approx(opt.kappa_star / 1.5));
    CHECK(p.N == 41);
    CHECK(prop2_parameters(0.5, 3.0, 10, opt).N == 9);
  }
}

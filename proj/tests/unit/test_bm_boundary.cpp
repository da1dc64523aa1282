#include <doctest.h>

#include <cmath>

#include "golden.hpp"
#include "pickands/bm_boundary.hpp"
#include "pickands/errors.hpp"
#include "pickands/special_functions.hpp"

using namespace pickands;

namespace {

double bias_allowance(const LineBoundary& line, double step) {
  const double shift = 2.0 * kDiscreteMonitoringShift * std::sqrt(step);
  return exact_line_noncrossing({line.a + shift, line.b, line.t}) - exact_line_noncrossing(line);
}

}  // namespace

TEST_SUITE("bm_boundary") {
  TEST_CASE("exact line formula") {
    CHECK(exact_line_noncrossing({1.0, 0.0, 1.0}) == doctest::Approx(2.0 * normal_cdf(1.0) - 1.0).epsilon(1e-14));
    CHECK(exact_line_noncrossing({1.0, 0.0, 1.0}) == doctest::Approx(0.682689492137086).epsilon(1e-13));
    // mpmath: Phi(0) - e^2 Phi(-2)
    CHECK(exact_line_noncrossing({1.0, -1.0, 1.0}) == doctest::Approx(0.3318979987768293936).epsilon(1e-12));
    CHECK(exact_line_noncrossing({100.0, -0.1, 1.0}) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(exact_line_noncrossing({2.0, 3.0, 1.0}) == doctest::Approx(0.99999454394764591868).epsilon(1e-12));
    CHECK(exact_line_noncrossing({0.1, -5.0, 4.0}) == doctest::Approx(1.2308359836427041957e-25).epsilon(1e-9));
  }

  TEST_CASE("exact line errors") {
    CHECK_THROWS_AS(exact_line_noncrossing({0.0, 0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(exact_line_noncrossing({1.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(exact_line_noncrossing({-1.0, 0.0, 1.0}), DomainError);
  }

  TEST_CASE("exact line monotonicity and range on a 10x10x10 grid") {
    std::vector<double> as, bs, ts;
    for (int i = 0; i < 10; ++i) {
      as.push_back(0.05 * std::pow(1.8, i));
      bs.push_back(-6.0 + 1.2 * i);
      ts.push_back(0.02 * std::pow(2.0, i));
    }
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t k = 0; k < 10; ++k) {
          const double p = exact_line_noncrossing({as[i], bs[j], ts[k]});
          REQUIRE(p >= 0.0);
          REQUIRE(p <= 1.0);
          const double slack = 1e-14;
          if (i + 1 < 10) CHECK(exact_line_noncrossing({as[i + 1], bs[j], ts[k]}) >= p - slack);
          if (j + 1 < 10) CHECK(exact_line_noncrossing({as[i], bs[j + 1], ts[k]}) >= p - slack);
          if (k + 1 < 10) CHECK(exact_line_noncrossing({as[i], bs[j], ts[k + 1]}) <= p + slack);
          if (j == 5) {
            // b = 0 exactly at j = 5
            CHECK(exact_line_noncrossing({as[i], 0.0, ts[k]}) ==
                  doctest::Approx(2.0 * normal_cdf(as[i] / std::sqrt(ts[k])) - 1.0).epsilon(1e-12));
          }
        }
  }

  TEST_CASE("log_line_noncrossing in deep tails") {
    const double lp = log_line_noncrossing({0.1, -50.0, 4.0});
    CHECK(std::isfinite(lp));
    CHECK(lp < -1000.0);
  }

  TEST_CASE("lemma1") {
    const ConstantPolicy shape = ConstantPolicy::shape();
    // a + bt = -10 here, so the Phi factor is Phi(-5), not Phi(0)
    CHECK(lemma1_lower_bound({10.0, -5.0, 4.0}, shape) == doctest::Approx(0.5 * normal_cdf(-5.0)).epsilon(1e-14));
    CHECK(lemma1_lower_bound({20.0, -5.0, 4.0}, shape) == doctest::Approx(0.5));
    CHECK(lemma1_lower_bound({0.1, -5.0, 4.0}, shape) ==
          doctest::Approx(0.1 / 20.0 * normal_cdf(-9.95)).epsilon(1e-12));
    const ConstantPolicy cal = ConstantPolicy::calibrated();
    CHECK(lemma1_lower_bound({10.0, -5.0, 4.0}, cal) <= exact_line_noncrossing({10.0, -5.0, 4.0}));
    CHECK(lemma1_lower_bound({10.0, -5.0, 4.0}, cal) == doctest::Approx(0.5 * normal_cdf(-5.0) * cal.lemma1));
    CHECK_THROWS_AS(lemma1_lower_bound({1.0, -1.0, 1.0}, shape), PreconditionError);
    CHECK_THROWS_AS(lemma1_lower_bound({1.0, 4.0, 1.0}, shape), PreconditionError);
  }

  TEST_CASE("lemma2") {
    const ConstantPolicy shape = ConstantPolicy::shape();
    CHECK(lemma2_lower_bound({2.0, 0.0, 1.0}, 1.0, shape) == 1.0);
    CHECK(lemma2_lower_bound({0.5, 0.0, 4.0}, 1.0, shape) == doctest::Approx(0.25));
    const ConstantPolicy cal = ConstantPolicy::calibrated();
    CHECK(lemma2_lower_bound({1.0, -0.5, 1.0}, 1.0, cal) <= exact_line_noncrossing({1.0, -0.5, 1.0}));
    CHECK_THROWS_AS(lemma2_lower_bound({1.0, -2.0, 1.0}, 1.0, shape), PreconditionError);
    CHECK_THROWS_AS(lemma2_lower_bound({1.0, -0.5, 1.0}, 10.0, cal), PreconditionError);
  }

  TEST_CASE("lemma3") {
    const ConstantPolicy shape = ConstantPolicy::shape();
    CHECK(lemma3_lower_bound({1.0, 0.0, 1.0, 4.0}, shape) == doctest::Approx(normal_cdf(0.5) * 0.5).epsilon(1e-14));
    CHECK(lemma3_lower_bound({2.0, -1.0, 1.0, 9.0}, shape) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(lemma3_lower_bound({1.0, 0.5, 1.0, 4.0}, shape), DomainError);
    CHECK_THROWS_AS(lemma3_lower_bound({1.0, -0.5, 5.0, 4.0}, shape), DomainError);
    // t0 = t: the piecewise boundary is a line
    CHECK(lemma3_log_shape(1.0, -1.0, 1.0, 1.0) == doctest::Approx(std::log(normal_cdf(-0.5))));
  }

  TEST_CASE("piecewise quadrature") {
    // mpmath quadrature of the same decomposition
    CHECK(piecewise_noncrossing_quadrature({0.5, -2.0, 0.25, 2.0}) ==
          doctest::Approx(0.09638574902263337180).epsilon(1e-10));
    // flat boundary: the line formula
    CHECK(piecewise_noncrossing_quadrature({1.0, 0.0, 1.0, 4.0}) ==
          doctest::Approx(exact_line_noncrossing({1.0, 0.0, 4.0})).epsilon(1e-10));
    // t0 -> t approaches the line with slope b
    CHECK(piecewise_noncrossing_quadrature({1.0, -1.0, 0.999999, 1.0}) ==
          doctest::Approx(exact_line_noncrossing({1.0, -1.0, 1.0})).epsilon(1e-4));
    CHECK(piecewise_noncrossing_quadrature({1.0, -1.0, 1.0, 1.0}) == exact_line_noncrossing({1.0, -1.0, 1.0}));
  }

  TEST_CASE("lemma3 proof decomposition") {
    // P(below piecewise) >= P(W <= a/2 + b s on [0, t0]) P(B <= a/2 on [0, t - t0])
    for (double a : {0.3, 1.0, 3.0})
      for (double b : {0.0, -0.5, -2.0})
        for (double t0 : {0.25, 1.0}) {
          const double t = 3.0 * t0;
          const double lhs = piecewise_noncrossing_quadrature({a, b, t0, t});
          const double rhs = exact_line_noncrossing({0.5 * a, b, t0}) * exact_line_noncrossing({0.5 * a, 0.0, t - t0});
          CHECK(lhs >= rhs);
        }
    PathConfig cfg{MCConfig{3, 20000}, 1e-3};
    const auto mc = mc_piecewise_noncrossing({1.0, -1.0, 0.5, 1.5}, cfg);
    const double rhs = exact_line_noncrossing({0.5, -1.0, 0.5}) * exact_line_noncrossing({0.5, 0.0, 1.0});
    CHECK(mc.ci_high >= rhs);
  }

  TEST_CASE("Monte Carlo oracle agrees with the line formula within the bias allowance") {
    const double step = 1e-4;
    for (auto line : {LineBoundary{1.0, 0.0, 1.0}, LineBoundary{1.0, -1.0, 1.0}}) {
      PathConfig cfg{MCConfig{11, 20000}, step};
      const MCEstimate e = mc_line_noncrossing(line, cfg);
      const double exact = exact_line_noncrossing(line);
      CHECK(e.ci_low - bias_allowance(line, step) <= exact);
      CHECK(exact <= e.ci_high);
      const MCEstimate pw = mc_piecewise_noncrossing({line.a, line.b, line.t, line.t}, cfg);
      CHECK(pw.hits == e.hits);
    }
  }

  TEST_CASE("Monte Carlo preconditions and determinism") {
    CHECK_THROWS_AS(mc_line_noncrossing({1.0, 0.0, 1.0}, PathConfig{MCConfig{0, 999}, 0.0}), PreconditionError);
    CHECK_THROWS_AS(mc_line_noncrossing({1.0, 0.0, 1.0}, PathConfig{MCConfig{0, 1000}, 0.02}), PreconditionError);
    MCConfig one{5, 5000, 512, 1};
    MCConfig many{5, 5000, 512, 4};
    const auto a = mc_piecewise_noncrossing({0.5, -2.0, 0.25, 2.0}, PathConfig{one, 2e-3});
    const auto b = mc_piecewise_noncrossing({0.5, -2.0, 0.25, 2.0}, PathConfig{many, 2e-3});
    CHECK(a.hits == b.hits);
    CHECK(a.mean == b.mean);
    CHECK(a.ci_low <= a.mean);
    CHECK(a.mean <= a.ci_high);
  }

  TEST_CASE("golden Monte Carlo value") {
    const auto& g = golden()["bm_mc_piecewise"];
    MCConfig mc;
    mc.seed = g["seed"];
    mc.samples = g["samples"];
    const MCEstimate e = mc_piecewise_noncrossing({g["a"], g["b"], g["t0"], g["t"]}, PathConfig{mc, g["step"]});
    CHECK(e.hits == g["hits"].get<std::uint64_t>());
    // skeleton bias is upward, so the quadrature value sits at or below the interval
    CHECK(piecewise_noncrossing_quadrature({g["a"], g["b"], g["t0"], g["t"]}) <= e.ci_high);
  }

  TEST_CASE("calibration reproduces the frozen constants") {
    using namespace calibrated_constants;
    const LemmaCalibration cal = calibrate_lemma_constants();
    CHECK(cal.lemma1_worst_ratio == doctest::Approx(kLemma1WorstRatio).epsilon(1e-12));
    CHECK(cal.lemma2_worst_ratio == doctest::Approx(kLemma2WorstRatio).epsilon(1e-12));
    CHECK(cal.lemma2_H == kLemma2H);
    CHECK(cal.lemma3_worst_ratio == doctest::Approx(kLemma3WorstRatio).epsilon(1e-12));
    CHECK(cal.points > 1000);
    REQUIRE(!cal.lemma1_ratio_by_threshold.empty());
    for (std::size_t i = 1; i < cal.lemma1_ratio_by_threshold.size(); ++i)
      CHECK(cal.lemma1_ratio_by_threshold[i].second <= cal.lemma1_ratio_by_threshold[i - 1].second);
  }
}

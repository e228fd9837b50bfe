#include <doctest.h>

#include <cmath>
#include <vector>

#include "fkgeo/expr.hpp"

using namespace fkgeo;

namespace {

const std::vector<int> kDirsT{0};
const std::vector<int> kDirsTX{0, 1};

ExprPtr t() { return ScalarExpr::coordinate(0); }
ExprPtr x1() { return ScalarExpr::coordinate(1); }

}  // namespace

TEST_CASE("polynomial jets are exact") {
  // t^2 at t=3: value 9, d = 6, dd = 2
  auto e = pow_i(t(), 2);
  std::vector<double> p{3.0};
  Jet j = eval_jet(e, p, 2, kDirsT);
  CHECK(j.value() == 9.0);
  CHECK(j.partial({0}) == 6.0);
  CHECK(j.partial({0, 0}) == 2.0);
}

TEST_CASE("exponential jets to order 3") {
  // exp(2t) at t=0: (1, 2, 4, 8)
  auto e = exp(2.0 * t());
  std::vector<double> p{0.0};
  Jet j = eval_jet(e, p, 3, kDirsT);
  CHECK(j.value() == doctest::Approx(1.0));
  CHECK(j.partial({0}) == doctest::Approx(2.0));
  CHECK(j.partial({0, 0}) == doctest::Approx(4.0));
  CHECK(j.partial({0, 0, 0}) == doctest::Approx(8.0));
}

TEST_CASE("reciprocal jet against finite differences") {
  // 1/(t+2) at t=0: value 0.5, d/dt = -0.25
  auto e = 1.0 / (t() + 2.0);
  std::vector<double> p{0.0};
  Jet j = eval_jet(e, p, 1, kDirsT);
  CHECK(j.value() == doctest::Approx(0.5));
  CHECK(j.partial({0}) == doctest::Approx(-0.25));

  const double h = 1e-5;
  const double fd = (1.0 / (h + 2.0) - 1.0 / (-h + 2.0)) / (2.0 * h);
  CHECK(std::abs(j.partial({0}) - fd) < 1e-8);
}

TEST_CASE("fd_check oracle") {
  SUBCASE("exp(2t) at t=1") {
    auto e = exp(2.0 * t());
    std::vector<double> p{1.0};
    CHECK(fd_check(e, p, 1e-5, kDirsT) < 1e-7);
  }
  SUBCASE("constant has zero discrepancy") {
    auto e = ScalarExpr::constant(5.0);
    std::vector<double> p{0.3};
    CHECK(fd_check(e, p, 1e-5, kDirsT) == 0.0);
  }
  SUBCASE("bilinear mixed partial") {
    auto e = t() * x1();
    std::vector<double> p{1.0, 1.0};
    Jet j = eval_jet(e, p, 2, kDirsTX);
    CHECK(j.partial({0, 1}) == doctest::Approx(1.0));
    CHECK(fd_check(e, p, 1e-5, kDirsTX) < 1e-9);
  }
}

TEST_CASE("mixed partials are symmetric by construction") {
  auto e = exp(t() * x1()) + pow_i(t(), 3) * x1();
  std::vector<double> p{0.4, -0.7};
  Jet j = eval_jet(e, p, 3, kDirsTX);
  CHECK(j.partial({0, 1}) == j.partial({1, 0}));
  CHECK(j.partial({0, 0, 1}) == j.partial({0, 1, 0}));
  CHECK(j.partial({0, 0, 1}) == j.partial({1, 0, 0}));
}

TEST_CASE("jet order 0 reproduces plain evaluation") {
  auto e = tanh(t()) / (1.0 + pow_i(x1(), 2)) + log(t() + 3.0);
  std::vector<double> p{0.7, -0.2};
  Jet j = eval_jet(e, p, 3, kDirsTX);
  CHECK(j.value() == doctest::Approx(eval_value(e, p)).epsilon(1e-15));
}

TEST_CASE("division, log, tanh derivative values") {
  // f = tanh(t): f' = sech^2 = 1 - tanh^2, f'' = -2 tanh sech^2
  auto e = tanh(t());
  std::vector<double> p{0.5};
  Jet j = eval_jet(e, p, 3, kDirsT);
  const double T = std::tanh(0.5), s = 1.0 - T * T;
  CHECK(j.partial({0}) == doctest::Approx(s).epsilon(1e-14));
  CHECK(j.partial({0, 0}) == doctest::Approx(-2.0 * T * s).epsilon(1e-13));
  CHECK(j.partial({0, 0, 0}) == doctest::Approx(s * (6.0 * T * T - 2.0)).epsilon(1e-13));
  CHECK(fd_check(e, p, 1e-5, kDirsT) < 1e-7);
}

TEST_CASE("domain errors") {
  std::vector<double> p{-3.0};
  CHECK_THROWS_AS((void)eval_jet(log(t()), p, 1, kDirsT), DomainError);
  CHECK_THROWS_AS((void)eval_jet(1.0 / (t() + 3.0), p, 1, kDirsT), DomainError);
  CHECK_THROWS_AS((void)eval_value(log(t()), p), DomainError);
}

TEST_CASE("negative integer powers") {
  auto e = pow_i(t() + 2.0, -2);
  std::vector<double> p{0.0};
  Jet j = eval_jet(e, p, 2, kDirsT);
  CHECK(j.value() == doctest::Approx(0.25));
  CHECK(j.partial({0}) == doctest::Approx(-2.0 / 8.0));
  CHECK(j.partial({0, 0}) == doctest::Approx(6.0 / 16.0));
}

TEST_CASE("random polynomial jets match closed-form derivatives exactly") {
  // p(t,x) = 3 t^3 - 2 t x^2 + x - 7
  auto e = 3.0 * pow_i(t(), 3) - 2.0 * t() * pow_i(x1(), 2) + x1() - 7.0;
  for (double tv : {-1.0, 0.25, 2.0}) {
    for (double xv : {-0.5, 1.5}) {
      std::vector<double> p{tv, xv};
      Jet j = eval_jet(e, p, 3, kDirsTX);
      CHECK(j.value() == doctest::Approx(3 * tv * tv * tv - 2 * tv * xv * xv + xv - 7).epsilon(1e-15));
      CHECK(j.partial({0}) == doctest::Approx(9 * tv * tv - 2 * xv * xv).epsilon(1e-15));
      CHECK(j.partial({1}) == doctest::Approx(-4 * tv * xv + 1).epsilon(1e-15));
      CHECK(j.partial({0, 0}) == doctest::Approx(18 * tv).epsilon(1e-15));
      CHECK(j.partial({0, 1}) == doctest::Approx(-4 * xv).epsilon(1e-15));
      CHECK(j.partial({1, 1}) == doctest::Approx(-4 * tv).epsilon(1e-15));
      CHECK(j.partial({0, 0, 0}) == doctest::Approx(18.0).epsilon(1e-15));
      CHECK(j.partial({0, 1, 1}) == doctest::Approx(-4.0).epsilon(1e-15));
    }
  }
}

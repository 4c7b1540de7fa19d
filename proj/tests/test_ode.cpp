#include "doctest.h"
#include "omsim/ode.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "omsim/constants.hpp"

using namespace omsim;
using Vec1 = Eigen::Matrix<double, 1, 1>;
using Vec2 = Eigen::Vector2d;

TEST_CASE("exponential decay") {
  Vec1 y;
  y << 1.0;
  OdeOptions opt;
  integrate_to([](double, const Vec1& v) { return Vec1(-2.0 * v); }, 0.0, 3.0, y, opt);
  CHECK(y[0] == doctest::Approx(std::exp(-6.0)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator stays on the circle") {
  Vec2 y;
  y << 1.0, 0.0;
  OdeOptions opt;
  const double w = 5.0;
  auto f = [w](double, const Vec2& v) { return Vec2(v[1], -w * w * v[0]); };
  const double t_end = 40.0 * constants::pi;
  integrate_to(f, 0.0, t_end, y, opt);
  CHECK(y[0] == doctest::Approx(std::cos(w * t_end)).epsilon(1e-6));
  CHECK(y[1] / w == doctest::Approx(-std::sin(w * t_end)).epsilon(1e-6));
}

TEST_CASE("tighter tolerance means smaller error") {
  auto run = [](double rtol) {
    Vec2 y;
    y << 1.0, 0.0;
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol;
    auto f = [](double, const Vec2& v) { return Vec2(v[1], -v[0]); };
    integrate_to(f, 0.0, 20.0, y, opt);
    return std::abs(y[0] - std::cos(20.0)) + std::abs(y[1] + std::sin(20.0));
  };
  const double coarse = run(1e-6);
  const double fine = run(1e-11);
  CHECK(fine < coarse);
  CHECK(fine < 1e-9);
}

TEST_CASE("overflow guard trips on exponential growth") {
  Vec1 y;
  y << 1.0;
  OdeOptions opt;
  opt.overflow_guard = 1e12;
  CHECK_THROWS_AS(
      integrate_to([](double, const Vec1& v) { return Vec1(5.0 * v); }, 0.0, 10.0,
                   y, opt),
      InstabilityError);
}

TEST_CASE("lands exactly on the endpoint") {
  Vec1 y;
  y << 1.0;
  OdeOptions opt;
  double reached = 0.0;
  auto f = [&reached](double t, const Vec1& v) {
    reached = std::max(reached, t);
    return Vec1(-v);
  };
  integrate_to(f, 0.0, 1.7, y, opt);
  CHECK(reached <= 1.7 + 1e-12);
  CHECK(y[0] == doctest::Approx(std::exp(-1.7)).epsilon(1e-9));
}

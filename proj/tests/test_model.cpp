#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lifshitz/model.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

using namespace lifshitz;

static Permittivity make(PermKind kind, double Om, double g) {
  Permittivity p;
  p.kind = kind;
  p.params.omega_p = Om;
  p.params.gamma = g;
  return p;
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.omega_p = 1.0;
  p.gap = 1.0;
  CHECK_NOTHROW(p.validate());
  p.gamma = -0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.gamma = 0.0;
  p.gap = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.gap = 1.0;
  p.temperature = 0.3;
  CHECK(p.beta() == doctest::Approx(1.0 / 0.3));
  p.temperature = 0.0;
  CHECK_THROWS_AS(p.beta(), std::invalid_argument);
}

TEST_CASE("relaxation law vanishes at T = 0") {
  TemperatureLaw law{0.7, 2.0};
  CHECK(law.gamma_at(0.0) == 0.0);
  CHECK(law.gamma_at(2.0) == doctest::Approx(0.7 * 4.0));
}

TEST_CASE("real-axis permittivity values") {
  CHECK(eval_permittivity_real(make(PermKind::Vacuum, 1, 0), {2.0, 0.0}) ==
        std::complex<double>(1.0, 0.0));

  // plasma with omega = Omega sits exactly at the zero of eps
  auto z = eval_permittivity_real(make(PermKind::Plasma, 1, 0), {1.0, 0.0});
  CHECK(std::abs(z) < 1e-15);

  auto d = eval_permittivity_real(make(PermKind::Drude, 1, 0.1), {1.0, 0.0});
  auto expected = 1.0 - 1.0 / std::complex<double>(1.0, 0.1);
  CHECK(std::abs(d - expected) < 1e-15);
}

TEST_CASE("real-axis pole guard") {
  auto drude = make(PermKind::Drude, 1, 0.1);
  CHECK_THROWS_AS(eval_permittivity_real(drude, {0.0, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(eval_permittivity_real(drude, {0.0, -0.1}),
                  std::domain_error);
  CHECK_THROWS_AS(eval_permittivity_real(drude, {5e-13, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(eval_permittivity_real(drude, {5e-13, -0.1}),
                  std::domain_error);
  // a point close to, but outside, the guard band is fine
  CHECK_NOTHROW(eval_permittivity_real(drude, {1e-11, 0.0}));
}

TEST_CASE("imaginary-axis permittivity values") {
  CHECK(eval_permittivity_imag(make(PermKind::Plasma, 1, 0), 1.0) ==
        doctest::Approx(2.0));
  CHECK(eval_permittivity_imag(make(PermKind::Drude, 1, 0.1), 1.0) ==
        doctest::Approx(1.0 + 1.0 / 1.1));
  CHECK(eval_permittivity_imag(make(PermKind::Vacuum, 1, 0), 5.0) == 1.0);
}

TEST_CASE("imaginary-axis behavior at xi = 0") {
  CHECK_THROWS_AS(eval_permittivity_imag(make(PermKind::Drude, 1, 0.1), 0.0),
                  std::domain_error);
  CHECK(std::isinf(eval_permittivity_imag(make(PermKind::Plasma, 1, 0), 0.0)));
  CHECK(eval_permittivity_imag(make(PermKind::Vacuum, 1, 0), 0.0) == 1.0);
}

TEST_CASE("imaginary-axis permittivity is >= 1 and decreasing in xi") {
  auto drude = make(PermKind::Drude, 1.3, 0.2);
  double prev = eval_permittivity_imag(drude, 0.01);
  for (double xi = 0.02; xi < 50.0; xi *= 1.5) {
    double cur = eval_permittivity_imag(drude, xi);
    CHECK(cur >= 1.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("Drude converges to plasma pointwise as gamma -> 0") {
  auto plasma = make(PermKind::Plasma, 1, 0);
  std::complex<double> w{0.7, 0.4};
  double prev_gap = 1e300;
  for (double g : {1e-2, 1e-4, 1e-6}) {
    auto drude = make(PermKind::Drude, 1, g);
    double gap_real =
        std::abs(eval_permittivity_real(drude, w) -
                 eval_permittivity_real(plasma, w));
    double gap_imag = std::abs(eval_permittivity_imag(drude, 0.5) -
                               eval_permittivity_imag(plasma, 0.5));
    CHECK(gap_real < prev_gap);
    // at xi = 0.5 the gap is 4 - 4/(1+2g) ~ 8g
    CHECK(gap_imag < g * 10.0);
    prev_gap = gap_real;
  }
}

TEST_CASE("Schwarz reflection eps(-conj(w)) == conj(eps(w))") {
  auto drude = make(PermKind::Drude, 1.0, 0.3);
  for (auto w : {std::complex<double>{0.5, 0.2},
                 std::complex<double>{-1.2, 0.01},
                 std::complex<double>{2.0, -0.6}}) {
    auto lhs = eval_permittivity_real(drude, -std::conj(w));
    auto rhs = std::conj(eval_permittivity_real(drude, w));
    CHECK(std::abs(lhs - rhs) < 1e-14);
  }
}

TEST_CASE("eps_minus_one_xi2 closed forms") {
  CHECK(eps_minus_one_xi2(make(PermKind::Vacuum, 1, 0), 0.7) == 0.0);
  CHECK(eps_minus_one_xi2(make(PermKind::Plasma, 2, 0), 0.0) ==
        doctest::Approx(4.0));
  CHECK(eps_minus_one_xi2(make(PermKind::Plasma, 2, 0), 3.0) ==
        doctest::Approx(4.0));

  auto drude = make(PermKind::Drude, 2, 0.5);
  // finite at the origin even though eps itself diverges there
  CHECK(eps_minus_one_xi2(drude, 0.0) == 0.0);
  CHECK(eps_minus_one_xi2(drude, 1.0) == doctest::Approx(4.0 / 1.5));
  // consistent with the permittivity itself away from the origin
  double xi = 0.37;
  CHECK(eps_minus_one_xi2(drude, xi) ==
        doctest::Approx((eval_permittivity_imag(drude, xi) - 1.0) * xi * xi));
}

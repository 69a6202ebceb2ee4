#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lifshitz/scattering.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

using namespace lifshitz;
using cd = std::complex<double>;

static Permittivity plasma(double Om, double L = 1.0) {
  Permittivity p;
  p.kind = PermKind::Plasma;
  p.params.omega_p = Om;
  p.params.gap = L;
  return p;
}

static Permittivity drude(double Om, double g, double L = 1.0) {
  Permittivity p;
  p.kind = PermKind::Drude;
  p.params.omega_p = Om;
  p.params.gamma = g;
  p.params.gap = L;
  return p;
}

// half-space permittivity consistent with a propagating state of momentum
// (k_par, k3) in the plasma model: eps(omega), omega^2 = Om^2+k_par^2+k3^2
static double plasma_eps_photonic(double Om, double k_par, double k3) {
  const double m2 = k_par * k_par + k3 * k3;
  return m2 / (Om * Om + m2);
}

// same at a discrete mode k3 = i*kappa
static double plasma_eps_mode(double Om, double k_par, double kappa) {
  const double m2 = k_par * k_par - kappa * kappa;
  return m2 / (Om * Om + m2);
}

static ScatteringInput inp(cd k3, double k_par, cd eps, double L,
                           Polarization pol) {
  ScatteringInput s;
  s.k3 = k3;
  s.k_par = k_par;
  s.epsilon = eps;
  s.gap = L;
  s.polarization = pol;
  return s;
}

TEST_CASE("empty gap transmits a pure phase") {
  for (double k3 : {0.3, 1.0, 7.0}) {
    for (double L : {0.5, 1.0, 3.0}) {
      auto t = transmission(inp(cd(k3, 0.0), 0.7, cd(1.0, 0.0), L,
                                Polarization::TE));
      CHECK(std::abs(t - std::exp(cd(0.0, k3 * L))) < 1e-12);
      CHECK(std::abs(std::abs(t) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("empty gap phase shift is exactly linear, no folding") {
  for (double k3 : {0.2, 1.0, 7.0, 20.0}) {
    auto d = phase_shift(
        inp(cd(k3, 0.0), 0.5, cd(1.0, 0.0), 1.0, Polarization::TE));
    CHECK(d == doctest::Approx(k3).epsilon(1e-12));
  }
}

TEST_CASE("lossless TE transmission never exceeds unit magnitude") {
  for (double eps : {2.0, 4.0, 9.0}) {
    for (double k3 = 0.05; k3 < 8.0; k3 *= 1.7) {
      for (double kp : {0.0, 0.5, 2.0}) {
        auto t = transmission(
            inp(cd(k3, 0.0), kp, cd(eps, 0.0), 1.0, Polarization::TE));
        CHECK(std::abs(t) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("transmission is even in the gap-momentum branch") {
  // build t by hand with +q and with -q; the production value must match both
  const cd k3(0.8, 0.0);
  const double kp = 1.0, L = 1.0;
  const cd eps(plasma_eps_photonic(1.0, kp, k3.real()), 0.0);
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    auto s = inp(k3, kp, eps, L, pol);
    const cd q = gap_momentum(s);
    const cd c = (pol == Polarization::TM) ? eps : cd(1.0, 0.0);
    auto by_hand = [&](cd qq) {
      const cd ph = std::exp(cd(0.0, 1.0) * qq * L);
      return 4.0 * k3 * c * qq /
             ((k3 + c * qq) * (k3 + c * qq) / ph -
              (k3 - c * qq) * (k3 - c * qq) * ph);
    };
    const cd t = transmission(s);
    CHECK(std::abs(t - by_hand(q)) < 1e-14);
    CHECK(std::abs(t - by_hand(-q)) < 1e-12);
  }
}

TEST_CASE("phase shift equals the transmission log-ratio") {
  const double Om = 1.0, kp = 1.0, L = 1.0;
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    for (double k3 = 0.1; k3 < 30.0; k3 *= 1.9) {
      const cd eps(plasma_eps_photonic(Om, kp, k3), 0.0);
      const double d = phase_shift(inp(cd(k3, 0.0), kp, eps, L, pol));
      const cd ratio = transmission(inp(cd(k3, 0.0), kp, eps, L, pol)) /
                       transmission(inp(cd(-k3, 0.0), kp, eps, L, pol));
      CHECK(std::abs(std::exp(cd(0.0, 2.0 * d)) - ratio) < 1e-10);
      CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-10);  // delta is real
    }
  }
}

TEST_CASE("phase shift approaches the empty-gap line at high momentum") {
  const double Om = 1.0, kp = 1.0, L = 1.0;
  auto gap_to_line = [&](double k3) {
    const cd eps(plasma_eps_photonic(Om, kp, k3), 0.0);
    return std::abs(phase_shift(inp(cd(k3, 0.0), kp, eps, L,
                                    Polarization::TE)) -
                    k3 * L);
  };
  CHECK(gap_to_line(50.0) < 0.1);
  CHECK(gap_to_line(200.0) < 0.02);
  CHECK(gap_to_line(200.0) < gap_to_line(50.0));
}

TEST_CASE("phase shift rejects non-positive or complex k3") {
  auto s = inp(cd(-1.0, 0.0), 1.0, cd(1.5, 0.0), 1.0, Polarization::TE);
  CHECK_THROWS_AS(phase_shift(s), std::domain_error);
  s.k3 = cd(1.0, 0.5);
  CHECK_THROWS_AS(phase_shift(s), std::domain_error);
}

TEST_CASE("reflection closed-form values") {
  // lossy metal: the TE coefficient dies at zero frequency ...
  CHECK(reflection(Polarization::TE, 0.0, 1.0, drude(1.0, 0.1)) == 0.0);
  CHECK(std::abs(reflection(Polarization::TE, 1e-8, 1.0, drude(1.0, 0.1))) <
        1e-6);
  // ... the lossless one does not
  const double r0 = (1.0 - std::sqrt(2.0)) / (1.0 + std::sqrt(2.0));
  CHECK(reflection(Polarization::TE, 0.0, 1.0, plasma(1.0)) ==
        doctest::Approx(r0).epsilon(1e-14));
  // TM saturates to a perfect reflector at zero frequency either way
  CHECK(reflection(Polarization::TM, 0.0, 1.0, drude(1.0, 0.1)) == 1.0);
  CHECK(reflection(Polarization::TM, 1e-8, 1.0, drude(1.0, 0.1)) >
        1.0 - 1e-6);
  CHECK(reflection(Polarization::TM, 0.0, 1.0, plasma(1.0)) == 1.0);
}

TEST_CASE("reflection stays in [-1, 1] on the imaginary axis") {
  auto d = drude(1.3, 0.2);
  for (double xi = 1e-3; xi < 40.0; xi *= 2.1) {
    for (double kp : {0.0, 0.4, 2.0}) {
      for (auto pol : {Polarization::TE, Polarization::TM}) {
        const double r = reflection(pol, xi, kp, d);
        CHECK(r <= 1.0);
        CHECK(r >= -1.0);
      }
    }
  }
}

TEST_CASE("reflection domain error at the origin of the momentum plane") {
  CHECK_THROWS_AS(reflection(Polarization::TE, 0.0, 0.0, plasma(1.0)),
                  std::domain_error);
}

TEST_CASE("TE mode spectrum: residuals and labels") {
  auto spec = discrete_modes(Polarization::TE, 1.0, plasma(1.0), 5.0);
  REQUIRE(!spec.kappa_list.empty());
  const double Om = 1.0, L = 1.0;
  for (std::size_t i = 0; i < spec.kappa_list.size(); ++i) {
    const double kappa = spec.kappa_list[i];
    CHECK(kappa > 0.0);
    if (i > 0) CHECK(kappa > spec.kappa_list[i - 1]);
    // every TE plasma mode is a waveguide mode
    CHECK(spec.labels[i] == ModeKind::Waveguide);
    CHECK(kappa < Om);
    // defining equation: kappa/q = tan(qL/2) or -cot(qL/2)
    const double q = std::sqrt(Om * Om - kappa * kappa);
    const double sym = kappa * std::cos(0.5 * q * L) -
                       q * std::sin(0.5 * q * L);
    const double asym = kappa * std::sin(0.5 * q * L) +
                        q * std::cos(0.5 * q * L);
    CHECK(std::min(std::abs(sym), std::abs(asym)) < 1e-10);
  }
}

TEST_CASE("plasma TE has no evanescent branch, TM below k_par does") {
  for (double kp : {0.3, 1.0, 2.0}) {
    auto te = discrete_modes(Polarization::TE, kp, plasma(1.0), 5.0);
    for (auto label : te.labels) CHECK(label == ModeKind::Waveguide);
  }
  auto tm = discrete_modes(Polarization::TM, 0.3, plasma(1.0), 5.0);
  int evanescent = 0;
  for (std::size_t i = 0; i < tm.labels.size(); ++i) {
    if (tm.labels[i] == ModeKind::Evanescent) {
      ++evanescent;
      CHECK(tm.kappa_list[i] > 1.0);                  // above Omega
      CHECK(tm.kappa_list[i] < std::sqrt(1.09));      // below the cutoff
    }
  }
  CHECK(evanescent >= 1);
}

TEST_CASE("every discrete mode is a transmission pole") {
  const double Om = 1.0, kp = 1.0, L = 1.0;
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    auto spec = discrete_modes(pol, kp, plasma(Om, L), 5.0);
    REQUIRE(!spec.kappa_list.empty());
    for (double kappa : spec.kappa_list) {
      const cd eps(plasma_eps_mode(Om, kp, kappa), 0.0);
      double biggest = 0.0;
      for (double off : {0.0, 1e-12, -1e-12, 1e-10, -1e-10, 1e-8, -1e-8}) {
        auto s = inp(cd(0.0, kappa + off), kp, eps, L, pol);
        try {
          biggest = std::max(biggest, std::abs(transmission(s)));
        } catch (const std::runtime_error&) {
          biggest = 1e300;  // landed on the pole itself
        }
      }
      CHECK(biggest > 1e12);
    }
  }
}

TEST_CASE("empty or truncated search windows") {
  auto none = discrete_modes(Polarization::TE, 1.0, plasma(1.0), 1e-6);
  CHECK(none.kappa_list.empty());
  CHECK(none.warnings.empty());

  auto full = discrete_modes(Polarization::TE, 1.0, plasma(1.0), 5.0);
  REQUIRE(!full.kappa_list.empty());
  const double near = full.kappa_list.back() / 0.995;
  auto clipped = discrete_modes(Polarization::TE, 1.0, plasma(1.0), near);
  CHECK(!clipped.warnings.empty());
}

TEST_CASE("vacuum has an empty spectrum; lossy models are rejected") {
  Permittivity vac;
  vac.kind = PermKind::Vacuum;
  vac.params.omega_p = 1.0;
  vac.params.gap = 1.0;
  CHECK(discrete_modes(Polarization::TE, 1.0, vac, 5.0).kappa_list.empty());
  CHECK(discrete_modes(Polarization::TM, 1.0, vac, 5.0).kappa_list.empty());
  CHECK_THROWS_AS(discrete_modes(Polarization::TE, 1.0, drude(1.0, 0.1), 5.0),
                  std::invalid_argument);
}

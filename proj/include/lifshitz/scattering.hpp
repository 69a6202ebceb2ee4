#pragma once

#include "lifshitz/model.hpp"

#include <complex>
#include <string>
#include <vector>

namespace lifshitz {

enum class Polarization { TE, TM };

// One-dimensional scattering across the two-interface gap. epsilon is the
// half-space permittivity at the frequency of the asymptotic state; callers
// chasing a dispersive medium pass the self-consistent value per k3.
struct ScatteringInput {
  std::complex<double> k3{};
  double k_par = 0.0;
  std::complex<double> epsilon{1.0, 0.0};
  double gap = 1.0;
  Polarization polarization = Polarization::TE;
};

// q^2 = ((1 - eps) k_par^2 + k3^2)/eps, principal square root (cut along the
// negative real axis of q^2). Everything downstream is even in q, so the
// sign of the branch is harmless; tests assert that instead of assuming it.
std::complex<double> gap_momentum(const ScatteringInput& inp);

// t = 4 k3 c q / ((k3 + c q)^2 e^{-iqL} - (k3 - c q)^2 e^{iqL}), c = 1 for
// TE and c = eps for TM. The denominator zeros on the positive imaginary
// k3 axis are the discrete modes.
std::complex<double> transmission(const ScatteringInput& inp);

// delta(k3) = (1/2i) ln( t(k3)/t(-k3) ), evaluated in the factorized form
// qL - arg(1 - rho^2 e^{2iqL}), rho = (k3 - cq)/(k3 + cq), which keeps the
// branch continuous in k3: |rho| < 1 in the propagating regime pins the
// argument inside (-pi/2, pi/2), and an empty gap gives exactly k3 * L.
double phase_shift(const ScatteringInput& inp);

// Imaginary-axis reflection coefficients; eta = sqrt(xi^2 + k_par^2). The
// (eps - 1) xi^2 combination is evaluated in closed form so the Drude
// xi -> 0 limit (r_TE -> 0) needs no special casing; TM at xi = 0 returns
// the analytic limit 1 for a diverging eps.
double reflection(Polarization pol, double xi, double k_par,
                  const Permittivity& perm);

enum class ModeKind { Waveguide, Evanescent };

struct ModeSpectrum {
  std::vector<double> kappa_list;  // ascending, each > 0
  std::vector<ModeKind> labels;    // label[i] goes with kappa_list[i]
  Polarization polarization = Polarization::TE;
  double k_par = 0.0;
  PermKind epsilon_kind = PermKind::Plasma;
  std::vector<std::string> warnings;
};

// Roots of the symmetric/antisymmetric secular equations on k3 = i kappa,
// kappa in (0, kappa_max], for a lossless model (vacuum or plasma; the gap
// width comes from perm.params.gap). Modes above sqrt(Omega^2 + k_par^2)
// would have imaginary frequency and are excluded. Waveguide label means
// the gap momentum is real at that root, Evanescent means imaginary.
ModeSpectrum discrete_modes(Polarization pol, double k_par,
                            const Permittivity& perm, double kappa_max);

}  // namespace lifshitz

#pragma once

#include <complex>

namespace lifshitz {

// Natural units hbar = c = k_B = 1 everywhere; no hidden rescaling, so
// parameter sets like (omega_p=1, gamma=0.1, k_par=1) can be used literally.
struct ModelParams {
  double omega_p = 1.0;     // plasma frequency
  double gamma = 0.0;       // relaxation parameter, >= 0
  double gap = 1.0;         // wall separation L
  double temperature = 0.0;

  void validate() const;    // throws std::invalid_argument on a bad field
  double beta() const;      // 1/temperature; requires temperature > 0
};

// gamma(T) = gamma1 * T^alpha_exp; vanishes at T=0 for alpha_exp > 0.
struct TemperatureLaw {
  double gamma1 = 0.0;
  double alpha_exp = 2.0;
  double gamma_at(double T) const;
};

enum class PermKind { Vacuum, Plasma, Drude };

struct Permittivity {
  PermKind kind = PermKind::Plasma;
  ModelParams params{};
};

// eps(omega) = 1 - Omega^2/(omega(omega + i*gamma)); plasma is gamma = 0.
// Throws std::domain_error within 1e-12 of the poles omega = 0, -i*gamma.
std::complex<double> eval_permittivity_real(const Permittivity& perm,
                                            std::complex<double> omega);

// eps(i*xi) = 1 + Omega^2/(xi(xi + gamma)), real and >= 1. With gamma > 0
// a domain error is raised at (and within 1e-12 of) xi = 0; with gamma = 0
// the xi = 0 limit is +infinity and is returned as such.
double eval_permittivity_imag(const Permittivity& perm, double xi);

// (eps(i xi) - 1) * xi^2 in closed form, finite for every xi >= 0:
// Drude Omega^2 xi/(xi+gamma) (-> 0 at xi=0), plasma Omega^2, vacuum 0.
// This is the combination the reflection coefficients actually need, and
// evaluating it directly is what makes the Drude zero-frequency TE mode
// vanish without special-casing.
double eps_minus_one_xi2(const Permittivity& perm, double xi);

}  // namespace lifshitz

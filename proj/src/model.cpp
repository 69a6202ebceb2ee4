#include "lifshitz/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lifshitz {

void ModelParams::validate() const {
  if (!(omega_p > 0.0) || !std::isfinite(omega_p))
    throw std::invalid_argument("omega_p must be positive and finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("gamma must be >= 0 and finite");
  if (!(gap > 0.0) || !std::isfinite(gap))
    throw std::invalid_argument("gap must be positive and finite");
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw std::invalid_argument("temperature must be >= 0 and finite");
}

double ModelParams::beta() const {
  if (!(temperature > 0.0))
    throw std::invalid_argument("beta() requires temperature > 0");
  return 1.0 / temperature;
}

double TemperatureLaw::gamma_at(double T) const {
  if (!(T >= 0.0)) throw std::invalid_argument("gamma_at requires T >= 0");
  return gamma1 * std::pow(T, alpha_exp);
}

std::complex<double> eval_permittivity_real(const Permittivity& perm,
                                            std::complex<double> omega) {
  if (perm.kind == PermKind::Vacuum) return {1.0, 0.0};
  const double Om = perm.params.omega_p;
  const double g = (perm.kind == PermKind::Drude) ? perm.params.gamma : 0.0;
  const double guard = 1e-12;
  if (std::abs(omega) <= guard)
    throw std::domain_error("permittivity pole at omega = 0");
  if (std::abs(omega - std::complex<double>(0.0, -g)) <= guard)
    throw std::domain_error("permittivity pole at omega = -i*gamma");
  return 1.0 - Om * Om / (omega * (omega + std::complex<double>(0.0, g)));
}

double eval_permittivity_imag(const Permittivity& perm, double xi) {
  if (!(xi >= 0.0)) throw std::domain_error("xi must be >= 0");
  if (perm.kind == PermKind::Vacuum) return 1.0;
  const double Om = perm.params.omega_p;
  const double g =
      (perm.kind == PermKind::Drude) ? perm.params.gamma : 0.0;
  if (g > 0.0 && xi <= 1e-12)
    throw std::domain_error("Drude eps(i*xi) diverges at xi = 0");
  // gamma = 0: the xi = 0 limit is +infinity, which we return as such; the
  // finite combination downstream code needs is eps_minus_one_xi2.
  if (xi == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + Om * Om / (xi * (xi + g));
}

double eps_minus_one_xi2(const Permittivity& perm, double xi) {
  if (!(xi >= 0.0)) throw std::domain_error("xi must be >= 0");
  switch (perm.kind) {
    case PermKind::Vacuum:
      return 0.0;
    case PermKind::Plasma:
      return perm.params.omega_p * perm.params.omega_p;
    case PermKind::Drude: {
      const double Om = perm.params.omega_p;
      const double g = perm.params.gamma;
      if (xi == 0.0 && g > 0.0) return 0.0;
      if (xi == 0.0) return Om * Om;  // gamma = 0 falls back to plasma
      return Om * Om * xi / (xi + g);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace lifshitz

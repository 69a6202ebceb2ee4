#include "lifshitz/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lifshitz {

namespace {

using cd = std::complex<double>;

void check_input(const ScatteringInput& inp) {
  if (!(inp.k_par >= 0.0)) throw std::invalid_argument("k_par must be >= 0");
  if (!(inp.gap > 0.0)) throw std::invalid_argument("gap must be positive");
  if (std::abs(inp.epsilon) < 1e-300)
    throw std::invalid_argument("epsilon must be nonzero");
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x; }
double sinhc(double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sinh(x) / x; }

}  // namespace

std::complex<double> gap_momentum(const ScatteringInput& inp) {
  check_input(inp);
  const cd q2 =
      ((1.0 - inp.epsilon) * inp.k_par * inp.k_par + inp.k3 * inp.k3) /
      inp.epsilon;
  return std::sqrt(q2);
}

std::complex<double> transmission(const ScatteringInput& inp) {
  const cd q = gap_momentum(inp);
  const cd c = (inp.polarization == Polarization::TM) ? inp.epsilon
                                                      : cd(1.0, 0.0);
  const cd cq = c * q;
  const cd phase = std::exp(cd(0.0, 1.0) * q * inp.gap);
  const cd plus = inp.k3 + cq;
  const cd minus = inp.k3 - cq;
  const cd denom = plus * plus / phase - minus * minus * phase;
  if (std::abs(denom) < 1e-300)
    throw std::runtime_error(
        "transmission pole: k3 sits on a discrete mode of the gap");
  return 4.0 * inp.k3 * cq / denom;
}

double phase_shift(const ScatteringInput& inp) {
  if (inp.k3.imag() != 0.0 || !(inp.k3.real() > 0.0))
    throw std::domain_error("phase shift is defined for real k3 > 0");
  const cd q = gap_momentum(inp);
  const cd c = (inp.polarization == Polarization::TM) ? inp.epsilon
                                                      : cd(1.0, 0.0);
  const cd rho = (inp.k3 - c * q) / (inp.k3 + c * q);
  const cd e2 = std::exp(cd(0.0, 2.0) * q * inp.gap);
  const cd g = 1.0 - rho * rho * e2;
  const cd gbar = 1.0 - rho * rho / e2;
  const cd delta =
      q * inp.gap + (std::log(gbar) - std::log(g)) / cd(0.0, 2.0);
  return delta.real();
}

double reflection(Polarization pol, double xi, double k_par,
                  const Permittivity& perm) {
  if (!(xi >= 0.0)) throw std::domain_error("xi must be >= 0");
  if (!(k_par >= 0.0)) throw std::domain_error("k_par must be >= 0");
  if (xi == 0.0 && k_par == 0.0)
    throw std::domain_error("reflection undefined at xi = k_par = 0");
  const double eta = std::hypot(xi, k_par);
  const double s = std::sqrt(eps_minus_one_xi2(perm, xi) + eta * eta);
  if (pol == Polarization::TE) return (eta - s) / (eta + s);
  if (perm.kind == PermKind::Vacuum) return 0.0;
  if (xi == 0.0) return 1.0;  // eps*eta overwhelms s as eps -> infinity
  const double eps = eval_permittivity_imag(perm, xi);
  return (eps * eta - s) / (eps * eta + s);
}

ModeSpectrum discrete_modes(Polarization pol, double k_par,
                            const Permittivity& perm, double kappa_max) {
  if (!(k_par >= 0.0)) throw std::invalid_argument("k_par must be >= 0");
  if (!(kappa_max >= 0.0))
    throw std::invalid_argument("kappa_max must be >= 0");
  perm.params.validate();
  if (perm.kind == PermKind::Drude && perm.params.gamma > 0.0)
    throw std::invalid_argument(
        "discrete modes need a lossless model (real secular equation)");

  ModeSpectrum out;
  out.polarization = pol;
  out.k_par = k_par;
  out.epsilon_kind = perm.kind;

  const double Om = (perm.kind == PermKind::Vacuum) ? 0.0 : perm.params.omega_p;
  const double L = perm.params.gap;
  const double k0 = std::hypot(Om, k_par);  // frequency turns imaginary above
  const double hi = std::min(kappa_max, k0 * (1.0 - 1e-12));
  if (!(hi > 0.0)) return out;
  const double lo = 1e-9 * k0;

  // permittivity at the mode frequency omega_j = sqrt(Om^2 + k_par^2 - kappa^2)
  auto cfactor = [&](double kappa) {
    if (pol == Polarization::TE) return 1.0;
    const double w2 = k0 * k0 - kappa * kappa;
    return (k_par * k_par - kappa * kappa) / w2;
  };

  // secular pair, written even in q so the waveguide/evanescent seam q = 0
  // is smooth; the antisymmetric family is divided by q to drop its
  // spurious zero there
  auto secular = [&](double kappa, bool symmetric) {
    const double c = cfactor(kappa);
    const double q2 = Om * Om - kappa * kappa;
    if (q2 >= 0.0) {
      const double q = std::sqrt(q2), x = 0.5 * q * L;
      if (symmetric) return kappa * std::cos(x) - c * q * std::sin(x);
      return kappa * 0.5 * L * sinc(x) + c * std::cos(x);
    }
    const double Q = std::sqrt(-q2), y = 0.5 * Q * L;
    if (symmetric) return kappa * std::cosh(y) + c * Q * std::sinh(y);
    return kappa * 0.5 * L * sinhc(y) + c * std::cosh(y);
  };

  auto bisect = [&](double a, double b, bool symmetric) {
    double fa = secular(a, symmetric);
    for (int i = 0; i < 200 && (b - a) > 1e-15 * std::max(1.0, b); ++i) {
      const double m = 0.5 * (a + b);
      const double fm = secular(m, symmetric);
      if ((fa < 0.0) == (fm < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  struct Hit {
    double kappa;
    ModeKind kind;
  };
  std::vector<Hit> hits;

  // scan both families on a dense grid; where sign changes cluster in
  // adjacent cells, rescan that stretch at higher density
  auto scan = [&](bool symmetric) {
    const int n =
        std::max(64, static_cast<int>(std::ceil(2048.0 * (hi - lo))));
    std::vector<double> grid(n + 1), val(n + 1);
    for (int i = 0; i <= n; ++i) {
      grid[i] = lo + (hi - lo) * i / n;
      val[i] = secular(grid[i], symmetric);
    }
    std::vector<std::pair<double, double>> brackets;
    int last_change = -10;
    bool cluster = false;
    for (int i = 0; i < n; ++i) {
      if ((val[i] < 0.0) != (val[i + 1] < 0.0)) {
        brackets.emplace_back(grid[i], grid[i + 1]);
        if (i - last_change <= 2) cluster = true;
        last_change = i;
      }
    }
    if (cluster) {
      // repeat at 8x density over the whole window; roots this close
      // oscillate faster than the base grid resolves
      brackets.clear();
      const int m = 8 * n;
      double prev_x = lo, prev_f = secular(lo, symmetric);
      for (int i = 1; i <= m; ++i) {
        const double x = lo + (hi - lo) * i / m;
        const double f = secular(x, symmetric);
        if ((prev_f < 0.0) != (f < 0.0)) brackets.emplace_back(prev_x, x);
        prev_x = x;
        prev_f = f;
      }
    }
    for (auto [a, b] : brackets) {
      const double root = bisect(a, b, symmetric);
      const ModeKind kind =
          (root < Om) ? ModeKind::Waveguide : ModeKind::Evanescent;
      hits.push_back({root, kind});
    }
  };
  scan(true);
  scan(false);

  std::sort(hits.begin(), hits.end(),
            [](const Hit& a, const Hit& b) { return a.kappa < b.kappa; });
  for (const auto& h : hits) {
    out.kappa_list.push_back(h.kappa);
    out.labels.push_back(h.kind);
  }
  if (kappa_max < k0 && !out.kappa_list.empty() &&
      out.kappa_list.back() > 0.99 * kappa_max) {
    out.warnings.push_back(
        "mode found within 1% of kappa_max; the window may truncate the "
        "spectrum");
  }
  return out;
}

}  // namespace lifshitz

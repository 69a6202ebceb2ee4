#include "lifshitz/free_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lifshitz {
namespace {

using cd = std::complex<double>;
using std::numbers::pi;

constexpr cd kI{0.0, 1.0};

Permittivity wall_of(const ModelParams& params, PermKind kind) {
  Permittivity perm;
  perm.kind = kind;
  perm.params = params;
  if (kind != PermKind::Drude) perm.params.gamma = 0.0;
  return perm;
}

double bose_ln(double w, double T) { return std::log1p(-std::exp(-w / T)); }
cd bose_ln(cd w, double T) { return std::log(1.0 - std::exp(-w / T)); }

// One Matsubara moment (1/2pi) int_0^inf k dk ln(1 - r^2 e^{-2 eta L}),
// taken over u = e^{-2 eta L} in (0, e^{-2 xi L}]. The u -> 1 and u -> 0
// endpoints carry integrable log singularities; the panels never evaluate
// them.
quad::Result channel_moment(const Permittivity& perm, Polarization pol,
                            double xi, const quad::Options& opt) {
  const double L = perm.params.gap;
  const double u0 = std::exp(-2.0 * xi * L);
  auto f = [&](double u) {
    const double eta = -std::log(u) / (2.0 * L);
    const double k2 = eta * eta - xi * xi;
    const double k = k2 > 0.0 ? std::sqrt(k2) : 0.0;
    const double r = reflection(pol, xi, k, perm);
    return -std::log(u) / (4.0 * L * L * u) * std::log1p(-r * r * u);
  };
  auto res = quad::integrate(f, 0.0, u0, opt);
  res.value /= 2.0 * pi;
  res.error /= 2.0 * pi;
  return res;
}

struct ChannelSum {
  double sum = 0.0;     // half-weighted l = 0 plus the certified tail
  double vacuum = 0.0;  // the same moment integrated over xi / 2pi
  double thermal = 0.0;
  double error = 0.0;
};

ChannelSum channel_thermal(const Permittivity& perm, Polarization pol,
                           double T, int l_max, const quad::Options& opt) {
  ChannelSum out;
  std::vector<double> terms;
  {
    const auto zero = channel_moment(perm, pol, 0.0, opt);
    terms.push_back(0.5 * zero.value);
    out.error += 0.5 * zero.error;
  }
  bool closed = false;
  double prev_mag = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    const auto res = channel_moment(perm, pol, 2.0 * pi * l * T, opt);
    out.error += res.error;
    terms.push_back(res.value);
    const double mag = std::abs(res.value);
    if (mag == 0.0) {  // decayed past underflow, nothing left to certify
      closed = true;
      break;
    }
    if (l >= 4 && prev_mag > 0.0 && mag < prev_mag) {
      const double rho = mag / prev_mag;
      if (rho <= 0.999) {
        const double tail = res.value * rho / (1.0 - rho);
        const double run = std::abs(quad::pairwise_sum(terms));
        if (std::abs(tail) <= 1e-8 * std::max(run, 1e-300)) {
          terms.push_back(tail);
          out.error += std::abs(tail);
          closed = true;
          break;
        }
      }
    }
    prev_mag = mag;
  }
  if (!closed)
    throw std::runtime_error(
        "matsubara sum did not reach a certified geometric tail by l = " +
        std::to_string(l_max));
  out.sum = quad::pairwise_sum(terms);

  double inner_err = 0.0;
  const auto vac = quad::integrate_to_inf(
      [&](double xi) {
        const auto res = channel_moment(perm, pol, xi, opt);
        inner_err += res.error;
        return res.value;
      },
      0.0, 0.5 / perm.params.gap, opt);
  out.vacuum = vac.value / (2.0 * pi);
  out.error = T * out.error + (vac.error + inner_err) / (2.0 * pi);
  out.thermal = T * out.sum - out.vacuum;
  return out;
}

// --- real-frequency assembly -------------------------------------------

// d/dx ln(1 - rho^2 e^{sgn 2iqL}) along the continuum, q = sqrt(Om^2 + x^2).
// |rho| < 1 keeps g away from zero, so the principal branch never jumps.
cd gap_log_derivative(Polarization pol, double Om, double kp, double x,
                      int sgn, double L) {
  const double q = std::sqrt(Om * Om + x * x);
  const double dq = x / q;
  double c = 1.0, dc = 0.0;
  if (pol == Polarization::TM) {
    const double w2 = Om * Om + kp * kp + x * x;
    c = (kp * kp + x * x) / w2;
    dc = (2.0 * x * w2 - (kp * kp + x * x) * 2.0 * x) / (w2 * w2);
  }
  const double cq = c * q;
  const double dcq = dc * q + c * dq;
  const double rho = (x - cq) / (x + cq);
  const double drho =
      ((1.0 - dcq) * (x + cq) - (x - cq) * (1.0 + dcq)) / ((x + cq) * (x + cq));
  const cd e = std::exp(cd(0.0, sgn * 2.0 * q * L));
  const cd g = 1.0 - rho * rho * e;
  const cd dg = -(2.0 * rho * drho + cd(0.0, sgn * 2.0 * L * dq * rho * rho)) * e;
  return dg / g;
}

double phase_density(Polarization pol, double Om, double kp, double x,
                     double L) {
  const cd d = gap_log_derivative(pol, Om, kp, x, -1, L) -
               gap_log_derivative(pol, Om, kp, x, +1, L);
  return (d / (2.0 * kI)).real();
}

double interference_phase(Polarization pol, double Om, double kp, double x,
                          double L) {
  const double q = std::sqrt(Om * Om + x * x);
  double c = 1.0;
  if (pol == Polarization::TM) {
    const double w2 = Om * Om + kp * kp + x * x;
    c = (kp * kp + x * x) / w2;
  }
  const double rho = (x - c * q) / (x + c * q);
  const cd gm = 1.0 - rho * rho * std::exp(cd(0.0, -2.0 * q * L));
  const cd gp = 1.0 - rho * rho * std::exp(cd(0.0, 2.0 * q * L));
  return ((std::log(gm) - std::log(gp)) / (2.0 * kI)).real();
}

// 64 random spot checks of the analytic density against a central
// difference of the phase itself; fixed seed so reruns are byte-identical.
void crosscheck_phase_density(double Om, double L) {
  std::mt19937 rng(0x5eed);
  std::uniform_real_distribution<double> draw_kp(0.05, 3.0);
  std::uniform_real_distribution<double> draw_x(0.05, 8.0);
  for (int i = 0; i < 64; ++i) {
    const Polarization pol = i % 2 == 0 ? Polarization::TE : Polarization::TM;
    const double kp = draw_kp(rng);
    const double x = draw_x(rng);
    const double h = 1e-5 * (1.0 + x);
    const double fd = (interference_phase(pol, Om, kp, x + h, L) -
                       interference_phase(pol, Om, kp, x - h, L)) /
                      (2.0 * h);
    const double an = phase_density(pol, Om, kp, x, L);
    if (std::abs(fd - an) > 1e-5 * (1.0 + std::abs(an)))
      throw std::runtime_error(
          "real-frequency phase density failed its finite-difference audit");
  }
}

// Newton refinement of one root of w^3 + i g w^2 - (k2 + Om^2) w - i g k2
// from a caller-supplied seed. The residual scale follows the coefficient
// magnitudes so the test is meaningful for both tiny and large roots.
cd cubic_newton(cd gamma_c, double k2, double Om, cd seed, const char* label) {
  const double A = k2 + Om * Om;
  const cd igc = kI * gamma_c;
  cd w = seed;
  auto residual = [&](cd v) { return ((v + igc) * v - A) * v - igc * k2; };
  auto scale = [&](cd v) {
    const double m = std::abs(v);
    return m * m * m + std::abs(gamma_c) * m * m + A * m +
           std::abs(gamma_c) * std::abs(k2) + 1e-300;
  };
  for (int it = 0; it < 60; ++it) {
    const cd f = residual(w);
    if (std::abs(f) <= 1e-14 * scale(w)) break;
    const cd fp = (3.0 * w + 2.0 * igc) * w - A;
    w -= f / fp;
  }
  if (!(std::abs(residual(w)) <= 1e-9 * scale(w)))
    throw std::runtime_error(std::string(label) + ": refinement failed");
  return w;
}

// All three roots of w^3 + i gamma_c w^2 - (k2 + Om^2) w - i gamma_c k2,
// Cardano plus one Newton polish per root.
std::array<cd, 3> damped_spectrum(cd gamma_c, double k2, double Om) {
  const cd b = kI * gamma_c;
  const cd c = -(k2 + Om * Om);
  const cd d = -kI * gamma_c * k2;
  const cd p = c - b * b / 3.0;
  const cd q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const cd disc = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  cd u3 = -0.5 * q + disc;
  if (std::abs(u3) < std::abs(-0.5 * q - disc)) u3 = -0.5 * q - disc;
  const cd u = std::pow(u3, 1.0 / 3.0);
  constexpr cd rot{-0.5, 0.8660254037844386467637231707529362};
  std::array<cd, 3> out;
  cd uk = u;
  for (int k = 0; k < 3; ++k, uk *= rot) {
    cd w = (std::abs(uk) > 0.0 ? uk - p / (3.0 * uk) : uk) - b / 3.0;
    for (int it = 0; it < 3; ++it) {
      const cd f = ((w + b) * w + c) * w + d;
      const cd fp = (3.0 * w + 2.0 * b) * w + c;
      if (std::abs(fp) > 0.0) w -= f / fp;
    }
    out[k] = w;
  }
  return out;
}

// The oscillation root that continues sqrt(Om^2 + k2) to gamma_c != 0,
// labeled by analytic continuation along t * gamma_c. Weakly bound modes
// (W^3 below |gamma_c| Om^2) sit outside the perturbative basin, so the
// label is tracked through the full spectrum with adaptive steps; an
// ambiguous nearest-root assignment means two branches collided
// (overdamping) and the label is genuinely lost.
cd damped_root(cd gamma_c, double k2, double Om) {
  const double W = std::sqrt(Om * Om + k2);  // k2 > -Om^2 for every gap mode
  const double W2 = W * W;
  const double g = std::abs(gamma_c);
  auto shift_at = [&](cd gc) { return -0.5 * kI * gc * Om * Om / W2; };
  if (std::abs(shift_at(gamma_c)) < 0.02 * W) {
    const cd seed = W + shift_at(gamma_c) -
                    0.125 * gamma_c * gamma_c * Om * Om * (Om * Om + 4.0 * k2) /
                        (W2 * W2 * W);
    const cd w = cubic_newton(gamma_c, k2, Om, seed, "damped oscillation root");
    if (!(std::abs(w - W) < 0.5 * W))
      throw std::runtime_error(
          "damped oscillation root left the basin of its lossless label");
    return w;
  }
  auto nearest = [&](cd target, cd anchor, double* sep) {
    const auto roots = damped_spectrum(target, k2, Om);
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    cd best = anchor;
    for (const cd r : roots) {
      const double d = std::abs(r - anchor);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = r;
      } else if (d < d2) {
        d2 = d;
      }
    }
    *sep = d2 - 2.5 * d1;
    return best;
  };
  double t = std::min(1.0, 0.04 * W * W2 / (g * Om * Om));
  double sep = 0.0;
  cd w = nearest(t * gamma_c, W + shift_at(t * gamma_c), &sep);
  double fac = 2.0;
  for (int it = 0; it < 20000 && t < 1.0; ++it) {
    const double t_next = std::min(1.0, t * fac);
    const cd cand = nearest(t_next * gamma_c, w, &sep);
    if (sep > 0.0) {
      w = cand;
      t = t_next;
      fac = std::min(fac * fac, 2.0);
    } else {
      // branches too close to assign; retry the hop with a smaller step
      fac = std::sqrt(fac);
      if (fac <= 1.0 + 1e-9)
        throw std::runtime_error(
            "damped oscillation root lost its lossless label; relaxation "
            "too strong for this labeling");
    }
  }
  if (t < 1.0)
    throw std::runtime_error(
        "damped oscillation root continuation did not settle");
  return w;
}

// Separation-independent part of one (pol, k_par) channel: slab bulk,
// isolated-interface phase (integrated by parts so the k -> 0 boundary term
// carries the full weight), the half edge mode, and the TM surface wave
// when its secular equation changes sign inside the evanescent window.
double channel_background(Polarization pol, const ModelParams& p, double kp,
                          const quad::Options& opt, double& err_acc) {
  const double Om = p.omega_p, L = p.gap, T = p.temperature;
  const double k0 = std::hypot(Om, kp);

  const auto bulk = quad::integrate(
      [&](double q) { return bose_ln(std::hypot(kp, q), T); }, 0.0, Om, opt);

  // isolated-interface phase in the frequency variable; the occupation
  // derivative peaks like 1/w^2 at the lower border w -> k_par, so the
  // integration runs in ln w where w B'(w) flattens to a bounded profile
  auto phase_at = [&](double w) {
    const double c =
        pol == Polarization::TM ? (w * w - Om * Om) / (w * w) : 1.0;
    return std::atan2(c * std::sqrt(std::max(w * w - kp * kp, 0.0)),
                      std::sqrt(std::max(k0 * k0 - w * w, 0.0)));
  };
  const auto surf_int = quad::integrate(
      [&](double t) {
        const double w = std::exp(t);
        return phase_at(w) * (w / T) / std::expm1(w / T);
      },
      std::log(kp), std::log(k0), opt);
  const double surf =
      -(2.0 / pi) * (-phase_at(k0) * bose_ln(k0, T) + surf_int.value);

  const double edge = -0.5 * bose_ln(kp, T);

  double sp = 0.0;
  if (pol == Polarization::TM && kp > 0.0) {
    // surface wave of one interface, one per wall; the root of
    // w^4 - (Om^2 + 2 kp^2) w^2 + kp^2 Om^2 below the light line, written
    // to stay exact down to kp -> 0 where w_sp hugs kp itself
    const double x = 4.0 * std::pow(kp / Om, 4.0);
    const double w2 =
        kp * kp - 2.0 * std::pow(kp, 4.0) / (Om * Om * (1.0 + std::sqrt(1.0 + x)));
    sp = 2.0 * bose_ln(std::sqrt(w2), T);
  }

  err_acc += T * ((L / pi) * bulk.error + (2.0 / pi) * surf_int.error);
  return T * ((L / pi) * bulk.value + surf + edge + sp);
}

// Gap-mode side of the same channel: discrete modes of the lossless
// geometry plus the continuum weighted by the interference phase density.
// damped = true replaces each occupation frequency by the damped root at
// the mode's in-plane k^2; the geometry itself stays lossless.
cd channel_gap_part(Polarization pol, const ModelParams& p, bool damped,
                    cd gamma_c, double kp, const Permittivity& lossless,
                    const quad::Options& opt, double& err_acc) {
  const double Om = p.omega_p, L = p.gap, T = p.temperature;
  auto mode_energy = [&](double k2) -> cd {
    if (!damped) return std::sqrt(Om * Om + k2);
    return damped_root(gamma_c, k2, Om);
  };

  cd disc = 0.0;
  const auto spectrum = discrete_modes(pol, kp, lossless, std::hypot(Om, kp));
  for (const double kj : spectrum.kappa_list)
    disc += bose_ln(mode_energy(kp * kp - kj * kj), T);

  const double hi = 45.0 * T + 15.0;
  auto f = [&](double x) -> cd {
    return bose_ln(mode_energy(kp * kp + x * x), T) *
           phase_density(pol, Om, kp, x, L);
  };
  if (std::abs(f(hi)) > 1e-12)
    throw std::runtime_error(
        "continuum occupation has not decayed at the momentum cutoff");
  const auto cont = quad::integrate_complex(f, 0.0, hi, opt);
  err_acc += T * cont.error / pi;
  return T * (disc + cont.value / pi);
}

cd gap_thermal_value(const ModelParams& p, bool damped, cd gamma_c,
                     const quad::Options& opt, double& err_acc) {
  const Permittivity lossless = wall_of(p, PermKind::Plasma);
  // each slice carries ~1e-10 evaluation noise from its own quadratures and
  // mode searches; the outer acceptance must not chase structure below that
  // floor or it bisects forever
  quad::Options inner;
  inner.abs_tol = 1e-12;
  inner.rel_tol = 1e-12;
  inner.max_depth = opt.max_depth;
  quad::Options outer = opt;
  outer.abs_tol = std::max(opt.abs_tol, 3e-9);
  outer.rel_tol = std::max(opt.rel_tol, 1e-7);
  outer.max_depth = std::min(opt.max_depth, 22);
  auto slice = [&](double kp) -> cd {
    cd acc = 0.0;
    for (const Polarization pol : {Polarization::TE, Polarization::TM}) {
      acc += channel_gap_part(pol, p, damped, gamma_c, kp, lossless, inner,
                              err_acc);
      acc -= channel_background(pol, p, kp, inner, err_acc);
    }
    return kp * acc;
  };
  // k_par integral to infinity through u = e^{-k_par / scale}
  const double scale = 0.5 / p.gap + 0.5 * p.temperature;
  const auto res = quad::integrate_complex(
      [&](double u) { return slice(-scale * std::log(u)) * (scale / u); }, 0.0,
      1.0, outer);
  err_acc += res.error;
  return res.value / (2.0 * pi);
}

// --- boundary-integral (resummed) pieces --------------------------------

// Decaying-momentum piece of the continued phase integral at complex w.
quad::Result decaying_region_moment(cd w, double L, const quad::Options& opt) {
  return quad::integrate_to_inf(
      [&](double eta) {
        const cd s = std::sqrt(w + eta * eta);
        const cd r = (eta - s) / (eta + s);
        return (eta * std::log(1.0 - r * r * std::exp(-2.0 * eta * L))).imag();
      },
      0.0, 0.5 / L, opt);
}

quad::Result oscillating_region_moment(cd w, double x, double L,
                                       const quad::Options& opt) {
  return quad::integrate(
      [&](double y) {
        const cd s = std::sqrt(w - y * y);
        const cd r = (cd(0.0, y) - s) / (cd(0.0, y) + s);
        return (y * std::log(1.0 - r * r * std::exp(cd(0.0, -2.0 * y * L))))
            .imag();
      },
      0.0, x, opt);
}

double im_phi(double x, double gamma, double Om, double L,
              const quad::Options& opt, double& err_acc) {
  const cd w = Om * Om * (kI * x) / (kI * x + gamma);
  // both pieces must continue the same medium-momentum branch across the
  // junction where the gap momentum changes character
  const double probe = 1e-8;
  const cd s_osc = std::sqrt(w - probe * probe);
  const cd s_dec = std::sqrt(w + probe * probe);
  if (std::abs(s_osc - s_dec) > 1e-6 * (1.0 + std::abs(s_dec)))
    throw std::runtime_error(
        "analytic continuation pieces disagree at their junction");
  const auto osc = oscillating_region_moment(w, x, L, opt);
  const auto dec = decaying_region_moment(w, L, opt);
  err_acc += osc.error + dec.error;
  return osc.value + dec.value;
}

double bose_weighted_line(const std::function<double(double)>& phi_im,
                          double T, const quad::Options& opt, double& err_acc) {
  auto f = [&](double x) { return -2.0 * phi_im(x) / std::expm1(x / T); };
  const double hi = 40.0 * T + 10.0;
  std::vector<double> cuts{0.0, 1.0, 5.0, hi};
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const auto res = quad::integrate(f, cuts[i], cuts[i + 1], opt);
    acc += res.value;
    err_acc += res.error;
  }
  return acc / (4.0 * pi * pi);
}

quad::Options tightened(const quad::Options& opt) {
  quad::Options inner = opt;
  inner.abs_tol = std::min(opt.abs_tol, 1e-14);
  inner.rel_tol = std::min(opt.rel_tol, 1e-12);
  return inner;
}

}  // namespace

FreeEnergyReport matsubara_free_energy(const ModelParams& params,
                                       PermKind kind, std::optional<int> l_max,
                                       quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "matsubara_free_energy: temperature must be positive");
  const int lm = l_max.value_or(100000);
  if (lm < 1)
    throw std::invalid_argument("matsubara_free_energy: l_max must be >= 1");
  const Permittivity perm = wall_of(params, kind);
  double F = 0.0, vac = 0.0, err = 0.0;
  for (const Polarization pol : {Polarization::TE, Polarization::TM}) {
    const auto ch = channel_thermal(perm, pol, params.temperature, lm, opt);
    F += params.temperature * ch.sum;
    vac += ch.vacuum;
    err += ch.error;
  }
  FreeEnergyReport rep;
  rep.total = F;
  rep.vacuum_part = vac;
  rep.thermal_part = F - vac;
  rep.representation = Representation::Matsubara;
  rep.error_estimate = err;
  rep.params = params;
  rep.kind = kind;
  return rep;
}

double matsubara_thermal_channel(const ModelParams& params, PermKind kind,
                                 Polarization pol, quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "matsubara_thermal_channel: temperature must be positive");
  const Permittivity perm = wall_of(params, kind);
  return channel_thermal(perm, pol, params.temperature, 100000, opt).thermal;
}

FreeEnergyReport real_frequency_thermal_part(const ModelParams& params,
                                             PermKind kind,
                                             quad::Options opt) {
  params.validate();
  if (kind == PermKind::Vacuum)
    throw std::invalid_argument(
        "real_frequency_thermal_part: bare walls carry no interface modes");
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "real_frequency_thermal_part: temperature must be positive");
  crosscheck_phase_density(params.omega_p, params.gap);
  const bool damped = kind == PermKind::Drude && params.gamma > 0.0;
  double err = 0.0;
  const cd value =
      gap_thermal_value(params, damped, cd(params.gamma, 0.0), opt, err);
  FreeEnergyReport rep;
  rep.total = value;
  rep.vacuum_part = 0.0;
  rep.thermal_part = value;
  rep.representation = Representation::RealFrequency;
  rep.error_estimate = err;
  rep.params = params;
  rep.kind = kind;
  return rep;
}

std::array<cd, 3> real_frequency_gamma_terms(const ModelParams& params,
                                             int circle_points,
                                             quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "real_frequency_gamma_terms: temperature must be positive");
  if (!(params.gamma > 0.0))
    throw std::invalid_argument(
        "real_frequency_gamma_terms: gamma sets the circle radius and must "
        "be positive");
  if (circle_points < 4)
    throw std::invalid_argument(
        "real_frequency_gamma_terms: need at least 4 circle points");
  crosscheck_phase_density(params.omega_p, params.gap);
  // Sample angles sit half a step off the axes: on the negative imaginary
  // axis the mode cubic has real coefficients and weakly bound modes push
  // root collisions toward the origin, so rays there can lose the label.
  // The offset keeps every ray clear while the trapezoid sum on the circle
  // stays an exact Fourier projection.
  std::vector<double> alpha(circle_points);
  std::vector<cd> values(circle_points);
  for (int m = 0; m < circle_points; ++m) {
    alpha[m] = 2.0 * pi * (m + 0.5) / circle_points;
    double err = 0.0;
    values[m] = gap_thermal_value(
        params, true, std::polar(params.gamma, alpha[m]), opt, err);
  }
  std::array<cd, 3> terms{};
  for (int n = 0; n < 3; ++n) {
    cd acc = 0.0;
    for (int m = 0; m < circle_points; ++m)
      acc += values[m] * std::polar(1.0, -n * alpha[m]);
    terms[n] = acc / static_cast<double>(circle_points);
  }
  return terms;
}

cd StairFunction::value(double kappa) const {
  const auto below = std::lower_bound(kappa_thresholds.begin(),
                                      kappa_thresholds.end(), kappa) -
                     kappa_thresholds.begin();
  return cd(0.0, pi * static_cast<double>(below));
}

StairFunction stair_thresholds(const ModelParams& params, double k_par,
                               int l_count) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument("stair_thresholds: temperature must be positive");
  if (!(k_par >= 0.0))
    throw std::invalid_argument("stair_thresholds: k_par must be nonnegative");
  if (l_count < 1)
    throw std::invalid_argument("stair_thresholds: need at least one threshold");
  StairFunction st;
  const double k0 = std::hypot(params.omega_p, k_par);
  st.kappa_thresholds.reserve(static_cast<std::size_t>(l_count));
  for (int l = 1; l <= l_count; ++l)
    st.kappa_thresholds.push_back(
        std::hypot(2.0 * pi * l * params.temperature, k0));
  return st;
}

ContourIdentityReport verify_plasma_contour_identity(const ModelParams& params,
                                                     double k_par,
                                                     int l_count) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "verify_plasma_contour_identity: temperature must be positive");
  if (!(k_par > 0.0))
    throw std::invalid_argument(
        "verify_plasma_contour_identity: k_par must be positive");
  if (l_count < 1)
    throw std::invalid_argument(
        "verify_plasma_contour_identity: need at least one frequency");
  const double T = params.temperature, L = params.gap, Om = params.omega_p;
  const Permittivity perm = wall_of(params, PermKind::Plasma);

  ContourIdentityReport rep;
  rep.l_count = l_count;
  rep.stair = stair_thresholds(params, k_par, l_count);

  cd dir_te = 0.0, dir_tm = 0.0;
  double dec_te = 0.0, dec_tm = 0.0;
  for (int l = 0; l <= l_count; ++l) {
    const double xi = 2.0 * pi * l * T;
    const double eta = std::hypot(xi, k_par);
    const double kappa = std::sqrt(xi * xi + Om * Om + k_par * k_par);
    if (l >= 1)
      rep.max_threshold_mismatch =
          std::max(rep.max_threshold_mismatch,
                   std::abs(kappa - rep.stair.kappa_thresholds[l - 1]));
    const double weight = l == 0 ? 0.5 : 1.0;
    for (const Polarization pol : {Polarization::TE, Polarization::TM}) {
      const double r = reflection(pol, xi, k_par, perm);
      const double lng = std::log1p(-r * r * std::exp(-2.0 * eta * L));
      (pol == Polarization::TE ? rep.thermal_terms_te : rep.thermal_terms_tm)
          .push_back(lng);
      // the static wall blocks transmission entirely in TM; its factor
      // check would compare log(0) against -inf, so only TE is checked
      // at l = 0 (with a large finite stand-in for the diverging response,
      // which perturbs the gap momentum at the 1e-15 level)
      if (pol == Polarization::TM && l == 0) continue;
      const double eps_hat = l == 0 ? 1e14 : 1.0 + Om * Om / (xi * xi);
      const double chat = pol == Polarization::TE ? 1.0 : eps_hat;
      const double decomp = std::log(4.0 * kappa * chat * eta) -
                            2.0 * std::log(kappa + chat * eta) - eta * L - lng;
      ScatteringInput inp;
      inp.k3 = cd(0.0, kappa);
      inp.k_par = k_par;
      inp.epsilon = cd(eps_hat, 0.0);
      inp.gap = L;
      inp.polarization = pol;
      const cd t = transmission(inp);
      if (!(std::abs(t) > 0.0) || !std::isfinite(t.real()))
        throw std::runtime_error(
            "verify_plasma_contour_identity: transmission underflowed; "
            "reduce l_count");
      const cd direct = std::log(t);
      rep.max_identity_residual =
          std::max(rep.max_identity_residual, std::abs(direct - decomp));
      if (pol == Polarization::TE) {
        dir_te += weight * direct;
        dec_te += weight * decomp;
      } else {
        dir_tm += weight * direct;
        dec_tm += weight * decomp;
      }
    }
  }
  rep.primed_sum_mismatch =
      std::abs(dir_te - dec_te) + std::abs(dir_tm - dec_tm);
  if (rep.max_threshold_mismatch > 1e-10)
    throw std::runtime_error(
        "verify_plasma_contour_identity: thresholds missed the thermal "
        "frequencies");
  return rep;
}

FreeEnergyReport abel_plana_thermal_part(const ModelParams& params,
                                         quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "abel_plana_thermal_part: temperature must be positive");
  const quad::Options inner = tightened(opt);
  double err = 0.0;
  const double value = bose_weighted_line(
      [&](double x) {
        return im_phi(x, params.gamma, params.omega_p, params.gap, inner, err);
      },
      params.temperature, inner, err);
  FreeEnergyReport rep;
  rep.total = value;
  rep.vacuum_part = 0.0;
  rep.thermal_part = value;
  rep.representation = Representation::AbelPlana;
  rep.error_estimate = err / (4.0 * pi * pi);
  rep.params = params;
  rep.kind = params.gamma > 0.0 ? PermKind::Drude : PermKind::Plasma;
  return rep;
}

double drude_tail_thermal_part(const ModelParams& params, quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "drude_tail_thermal_part: temperature must be positive");
  const quad::Options inner = tightened(opt);
  double err = 0.0;
  return bose_weighted_line(
      [&](double x) {
        const cd w = params.omega_p * params.omega_p * (kI * x) /
                     (kI * x + params.gamma);
        const auto dec = decaying_region_moment(w, params.gap, inner);
        err += dec.error;
        return dec.value;
      },
      params.temperature, inner, err);
}

DefectResult defect_f_D0(const ModelParams& params, quad::Options opt) {
  params.validate();
  const double Om = params.omega_p, L = params.gap;
  const quad::Options inner = tightened(opt);
  DefectResult out;
  out.gamma_probes = {1e-1, 1e-2, 1e-3};
  const double lo = std::log(1e-8), hi = std::log(1e8);
  for (const double gp : out.gamma_probes) {
    // after x = gp * z the Bose tail weight is dz/z and gp cancels from w
    // algebraically; it is kept explicit so the probe spread is a real
    // measurement, not a tautology
    auto g = [&](double lnz) {
      const double x = gp * std::exp(lnz);
      const cd w = Om * Om * (kI * x) / (kI * x + gp);
      return -2.0 * decaying_region_moment(w, L, inner).value;
    };
    double interior = 0.0;
    for (const double z : {-2.0, 0.0, 2.0})
      interior = std::max(interior, std::abs(g(z)));
    if (std::abs(g(lo)) > 1e-5 * interior || std::abs(g(hi)) > 1e-5 * interior)
      throw std::runtime_error(
          "defect_f_D0: rescaled integrand has not decayed at the cutoffs");
    const auto res = quad::integrate(g, lo, hi, inner);
    out.f_D0_values.push_back(4.0 * L * L * res.value);
  }
  out.f_D0 = out.f_D0_values.back();
  const auto [mn, mx] =
      std::minmax_element(out.f_D0_values.begin(), out.f_D0_values.end());
  out.spread = (*mx - *mn) / std::max(std::abs(out.f_D0), 1e-300);
  out.defect = params.temperature * out.f_D0 / (16.0 * pi * pi * L * L);
  return out;
}

DefectCheckReport nonperturbative_defect_check(
    const ModelParams& params, const std::vector<double>& gamma_sequence,
    quad::Options opt) {
  params.validate();
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "nonperturbative_defect_check: temperature must be positive");
  if (gamma_sequence.empty())
    throw std::invalid_argument(
        "nonperturbative_defect_check: gamma_sequence must not be empty");
  for (std::size_t i = 0; i < gamma_sequence.size(); ++i) {
    if (!(gamma_sequence[i] >= 0.0))
      throw std::invalid_argument(
          "nonperturbative_defect_check: gamma values must be nonnegative");
    if (i > 0 && !(gamma_sequence[i] < gamma_sequence[i - 1]))
      throw std::invalid_argument(
          "nonperturbative_defect_check: gamma_sequence must descend");
  }

  const auto base = defect_f_D0(params, opt);
  DefectCheckReport rep;
  rep.defect = base.defect;
  rep.defect_alt_normalization = params.temperature * base.f_D0 /
                                 (16.0 * pi * params.gap * params.gap);
  const auto lossless = matsubara_free_energy(params, PermKind::Plasma, {}, opt);
  for (const double ga : gamma_sequence) {
    ModelParams damped = params;
    damped.gamma = ga;
    const auto fe = matsubara_free_energy(
        damped, ga > 0.0 ? PermKind::Drude : PermKind::Plasma, {}, opt);
    DefectCheckRow row;
    row.gamma = ga;
    row.difference = (fe.thermal_part - lossless.thermal_part).real();
    row.ratio_to_defect =
        rep.defect != 0.0 ? row.difference / rep.defect : 0.0;
    rep.rows.push_back(row);
  }
  rep.nonzero = std::abs(base.f_D0) > 1e-6;
  rep.converged_within_2pct =
      std::abs(rep.rows.back().difference - rep.defect) <=
      0.02 * std::abs(rep.defect);
  return rep;
}

EntropyEstimate entropy(const ModelParams& params, PermKind kind, double T,
                        std::optional<double> h_opt,
                        const std::optional<TemperatureLaw>& law,
                        quad::Options opt) {
  params.validate();
  if (!(T > 0.0))
    throw std::invalid_argument("entropy: temperature must be positive");
  const double h = h_opt.value_or(T / 50.0);
  if (!(h > 0.0) || !(h < T))
    throw std::invalid_argument("entropy: need 0 < h < T");
  double quad_err = 0.0;
  auto F = [&](double Tq) {
    ModelParams p = params;
    p.temperature = Tq;
    if (law) p.gamma = law->gamma_at(Tq);
    const auto rep = matsubara_free_energy(p, kind, {}, opt);
    quad_err = std::max(quad_err, rep.error_estimate);
    return rep.total.real();
  };
  auto slope = [&](double step) {
    return -(F(T + step) - F(T - step)) / (2.0 * step);
  };
  const double d1 = slope(h);
  const double d2 = slope(0.5 * h);
  if (std::abs(d1 - d2) > 0.1 * std::max(std::abs(d2), 1e-12))
    throw std::runtime_error(
        "entropy: halving the step moved the derivative by more than 10%; "
        "the step is too large for this curvature");
  const double value = (4.0 * d2 - d1) / 3.0;
  return {value, std::abs(value - d2) + quad_err / h};
}

NernstEstimate nernst_limit(const ModelParams& params, PermKind kind,
                            const std::optional<TemperatureLaw>& law,
                            const std::vector<double>& T_sequence,
                            quad::Options opt) {
  params.validate();
  if (T_sequence.size() < 5)
    throw std::invalid_argument("nernst_limit: need at least 5 temperatures");
  for (std::size_t i = 0; i < T_sequence.size(); ++i) {
    if (!(T_sequence[i] > 0.0))
      throw std::invalid_argument(
          "nernst_limit: temperatures must be positive");
    if (i > 0 && !(T_sequence[i] < T_sequence[i - 1]))
      throw std::invalid_argument("nernst_limit: temperatures must descend");
  }
  if (!(T_sequence.front() >= 10.0 * T_sequence.back() * (1.0 - 1e-12)))
    throw std::invalid_argument(
        "nernst_limit: sequence must span at least a decade");

  NernstEstimate out;
  out.temperatures = T_sequence;
  for (const double T : T_sequence)
    out.entropies.push_back(entropy(params, kind, T, {}, law, opt).value);

  const int n = static_cast<int>(T_sequence.size());
  const int np = 400;
  double best_ssr = std::numeric_limits<double>::infinity();
  int best_i = -1;
  double best_p = 0.0, best_c = 0.0, best_s0 = 0.0;
  for (int i = 0; i < np; ++i) {
    const double p = 0.1 * std::pow(40.0, i / static_cast<double>(np - 1));
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = std::pow(T_sequence[j], p);
      sx += t;
      sxx += t * t;
      sy += out.entropies[j];
      sxy += t * out.entropies[j];
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 1e-300)) continue;
    const double c = (n * sxy - sx * sy) / det;
    const double s0 = (sy - c * sx) / n;
    double ssr = 0.0;
    for (int j = 0; j < n; ++j) {
      const double m = s0 + c * std::pow(T_sequence[j], p);
      ssr += (out.entropies[j] - m) * (out.entropies[j] - m);
    }
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_i = i;
      best_p = p;
      best_c = c;
      best_s0 = s0;
    }
  }
  double mean = 0.0;
  for (const double s : out.entropies) mean += s;
  mean /= n;
  double spread = 0.0;
  for (const double s : out.entropies)
    spread = std::max(spread, std::abs(s - mean));
  out.S0 = best_s0;
  out.amplitude = best_c;
  out.exponent = best_p;
  out.rel_residual = std::sqrt(best_ssr / n) / std::max(spread, 1e-300);
  if (best_i < 0 || best_p <= 0.2 || best_i >= np - 1 ||
      out.rel_residual > 0.05)
    throw std::runtime_error(
        "nernst_limit: power-law fit unstable (exponent at a grid edge or "
        "residual above 5%)");
  return out;
}

std::vector<std::pair<double, double>> overdamped_integrand_growth(
    const ModelParams& params, const std::vector<double>& k_par_samples) {
  params.validate();
  if (!(params.gamma > 0.0))
    throw std::invalid_argument(
        "overdamped_integrand_growth: needs gamma > 0");
  if (!(params.temperature > 0.0))
    throw std::invalid_argument(
        "overdamped_integrand_growth: temperature must be positive");
  std::vector<std::pair<double, double>> out;
  out.reserve(k_par_samples.size());
  for (const double kp : k_par_samples) {
    if (!(kp > 0.0))
      throw std::invalid_argument(
          "overdamped_integrand_growth: k_par samples must be positive");
    const double W2 = params.omega_p * params.omega_p + kp * kp;
    const cd seed = -kI * params.gamma * kp * kp / W2;
    const cd w3 = cubic_newton(cd(params.gamma, 0.0), kp * kp, params.omega_p,
                               seed, "overdamped root");
    const double weight =
        kp * std::abs(std::log(1.0 - std::exp(-w3 / params.temperature)));
    out.emplace_back(kp, weight);
  }
  return out;
}

}  // namespace lifshitz

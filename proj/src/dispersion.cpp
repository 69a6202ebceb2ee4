#include "lifshitz/dispersion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lifshitz {

namespace {

using cd = std::complex<double>;

// min pairwise distance among the three roots
double min_separation(const std::array<cd, 3>& r) {
  return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]),
                   std::abs(r[1] - r[2])});
}

// assigns candidate roots to the previous labeled triple; returns the
// permutation minimizing the total move and that assignment's largest move
struct Assignment {
  std::array<int, 3> perm;
  double max_move;
};

Assignment best_assignment(const std::array<cd, 3>& prev,
                           const std::array<cd, 3>& next) {
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best_cost = std::numeric_limits<double>::infinity();
  Assignment out{{0, 1, 2}, 0.0};
  for (const auto& p : perms) {
    double cost = 0.0, worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      double d = std::abs(next[p[i]] - prev[i]);
      cost += d;
      worst = std::max(worst, d);
    }
    if (cost < best_cost) {
      best_cost = cost;
      out.perm = {p[0], p[1], p[2]};
      out.max_move = worst;
    }
  }
  return out;
}

std::array<cd, 3> permuted(const std::array<cd, 3>& r,
                        const std::array<int, 3>& perm) {
  return {r[perm[0]], r[perm[1]], r[perm[2]]};
}

// classify by continuity in s*gamma from the labeled plasma triple at s=0
std::array<cd, 3> classify_by_homotopy(cd gamma, double k, double omega_p) {
  const double W = std::hypot(omega_p, k);
  const double tol_coll = collision_tolerance(omega_p, k);
  std::array<cd, 3> cur = {cd(W, 0.0), cd(-W, 0.0), cd(0.0, 0.0)};
  double s = 0.0;
  double ds = 1.0 / 64.0;
  int iterations = 0;
  while (s < 1.0) {
    if (++iterations > 200000)
      throw std::runtime_error(
          "root classification ambiguous: continuation did not converge");
    const double s_next = std::min(1.0, s + ds);
    auto raw = dispersion_cubic_raw(gamma * s_next, cd(k * k, 0.0), omega_p);
    const double m = min_separation(raw);
    if (m < tol_coll) {
      if (ds < 1e-7)
        throw std::runtime_error(
            "root classification ambiguous: branches collide between gamma=0 "
            "and the requested gamma");
      ds *= 0.5;
      continue;
    }
    auto asg = best_assignment(cur, raw);
    // a jump comparable to the branch separation means the step straddled
    // a near-collision; resolve it before accepting
    if (asg.max_move > 0.4 * std::min(min_separation(cur), m)) {
      if (ds < 1e-9)
        throw std::runtime_error(
            "root classification ambiguous: branches collide between gamma=0 "
            "and the requested gamma");
      ds *= 0.5;
      continue;
    }
    cur = permuted(raw, asg.perm);
    s = s_next;
    ds = std::min(ds * 2.0, 1.0 / 64.0);
  }
  return cur;
}

// cheap labeling valid while the perturbation keeps the plasma structure:
// omega3 hugs the imaginary axis, omega1/omega2 keep their real-part signs
std::optional<std::array<cd, 3>> classify_by_signs(
    const std::array<cd, 3>& raw) {
  int i3 = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(raw[i].real()) < std::abs(raw[i3].real())) i3 = i;
  std::array<int, 2> rest{};
  int n = 0;
  for (int i = 0; i < 3; ++i)
    if (i != i3) rest[n++] = i;
  const double a = raw[rest[0]].real(), b = raw[rest[1]].real();
  if (a > 0.0 && b < 0.0) return std::array<cd, 3>{raw[rest[0]], raw[rest[1]], raw[i3]};
  if (b > 0.0 && a < 0.0) return std::array<cd, 3>{raw[rest[1]], raw[rest[0]], raw[i3]};
  return std::nullopt;
}

}  // namespace

std::complex<double> SeriesExpansion::evaluate(std::complex<double> gamma) const {
  cd acc{0.0, 0.0};
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = acc * gamma + *it;
  return acc;
}

std::complex<double> cubic_residual(std::complex<double> w,
                                    std::complex<double> gamma, double k,
                                    double omega_p) {
  return (w * w - k * k) * (w + cd(0.0, 1.0) * gamma) - w * omega_p * omega_p;
}

double collision_tolerance(double omega_p, double k) {
  return 1e-6 * std::max(omega_p, k);
}

std::array<std::complex<double>, 3> dispersion_cubic_raw(
    std::complex<double> gamma, std::complex<double> k_squared,
    double omega_p) {
  const cd c2 = cd(0.0, 1.0) * gamma;
  const cd c1 = -(k_squared + omega_p * omega_p);
  const cd c0 = -cd(0.0, 1.0) * gamma * k_squared;
  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(0, 2) = -c0;
  companion(1, 0) = 1.0;
  companion(1, 2) = -c1;
  companion(2, 1) = 1.0;
  companion(2, 2) = -c2;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(companion);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("cubic eigenvalue solve failed");
  std::array<cd, 3> roots{solver.eigenvalues()(0), solver.eigenvalues()(1),
                          solver.eigenvalues()(2)};
  for (auto& w : roots) {
    const cd p = ((w + c2) * w + c1) * w + c0;
    const cd dp = (3.0 * w + 2.0 * c2) * w + c1;
    if (std::abs(dp) > 0.0) w -= p / dp;
  }
  return roots;
}

RootTriple solve_dispersion_cubic(
    const ModelParams& params, double k,
    std::optional<std::complex<double>> gamma_override) {
  params.validate();
  if (!(k >= 0.0)) throw std::invalid_argument("k must be >= 0");
  const cd gamma = gamma_override.value_or(cd(params.gamma, 0.0));
  const double Om = params.omega_p;
  const double W = std::hypot(Om, k);

  RootTriple out;
  out.k = k;
  out.gamma_used = gamma;
  if (gamma == cd(0.0, 0.0)) {
    out.omega1 = cd(W, 0.0);
    out.omega2 = cd(-W, 0.0);
    out.omega3 = cd(0.0, 0.0);
    return out;
  }

  std::array<cd, 3> labeled;
  if (std::abs(gamma) < 0.1 * Om) {
    auto raw = dispersion_cubic_raw(gamma, cd(k * k, 0.0), Om);
    if (auto byi = classify_by_signs(raw))
      labeled = *byi;
    else
      labeled = classify_by_homotopy(gamma, k, Om);
  } else {
    labeled = classify_by_homotopy(gamma, k, Om);
  }
  out.omega1 = labeled[0];
  out.omega2 = labeled[1];
  out.omega3 = labeled[2];
  return out;
}

std::array<SeriesExpansion, 3> perturbative_roots(const ModelParams& params,
                                                  double k, int order) {
  params.validate();
  if (!(k >= 0.0)) throw std::invalid_argument("k must be >= 0");
  if (order < 0 || order > 2)
    throw std::invalid_argument("series order must be 0, 1, or 2");
  const double Om = params.omega_p;
  const double W = std::hypot(Om, k);
  const double W2 = W * W;
  const double W5 = W2 * W2 * W;

  // gamma^1: the propagating pair acquires -i/2 * Om^2/W^2 damping, the
  // over-damped root leaves the origin along -i k^2/W^2.
  const cd c1_pair = cd(0.0, -0.5) * (Om * Om / W2);
  const cd c1_over = cd(0.0, -1.0) * (k * k / W2);
  // gamma^2: real shift of the pair, antisymmetric between the two branches;
  // the over-damped root has no gamma^2 term.
  const double c2_mag = 0.125 * Om * Om * (Om * Om + 4.0 * k * k) / W5;

  auto make = [&](RootLabel label, cd a0, cd a1, cd a2) {
    SeriesExpansion s;
    s.root_label = label;
    s.k = k;
    s.omega_p = Om;
    s.coefficients = {a0};
    if (order >= 1) s.coefficients.push_back(a1);
    if (order >= 2) s.coefficients.push_back(a2);
    return s;
  };
  return {
      make(RootLabel::Omega1, cd(W, 0.0), c1_pair, cd(-c2_mag, 0.0)),
      make(RootLabel::Omega2, cd(-W, 0.0), c1_pair, cd(c2_mag, 0.0)),
      make(RootLabel::Omega3, cd(0.0, 0.0), c1_over, cd(0.0, 0.0)),
  };
}

ConvergenceProbe probe_convergence(const ModelParams& params, double k,
                                   double alpha,
                                   const std::vector<double>& gamma_grid) {
  params.validate();
  if (!(k >= 0.0)) throw std::invalid_argument("k must be >= 0");
  if (!(alpha >= 0.0) || !(alpha < 2.0 * std::numbers::pi))
    throw std::invalid_argument("alpha must lie in [0, 2*pi)");
  if (gamma_grid.empty())
    throw std::invalid_argument("gamma_grid must be non-empty");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > 0.0))
      throw std::invalid_argument("gamma_grid entries must be positive");
    if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
      throw std::invalid_argument("gamma_grid must be strictly ascending");
  }

  const double Om = params.omega_p;
  const cd dir = std::polar(1.0, alpha);
  const double tol_coll = collision_tolerance(Om, k);

  ConvergenceProbe probe;
  const char* names[3] = {"omega1", "omega2", "omega3"};
  for (int b = 0; b < 3; ++b) {
    auto& p = probe.paths[b];
    p.meta.alpha = alpha;
    p.meta.gamma = gamma_grid.back() * dir;
    p.meta.k_par = k;
    p.meta.omega_p = Om;
    p.meta.branch = names[b];
    p.parameter_samples.reserve(gamma_grid.size());
    p.points.reserve(gamma_grid.size());
  }

  // label the first point; if it already sits past a collision the labels
  // are a convention, not an error, so fall back to a fixed ordering
  std::array<cd, 3> cur;
  try {
    auto first = solve_dispersion_cubic(params, k, gamma_grid.front() * dir);
    cur = first.as_array();
  } catch (const std::runtime_error&) {
    auto raw = dispersion_cubic_raw(gamma_grid.front() * dir, cd(k * k, 0.0), Om);
    std::sort(raw.begin(), raw.end(),
              [](cd a, cd b) { return a.real() > b.real(); });
    cur = {raw[0], raw[2], raw[1]};
  }

  std::vector<double> separation(gamma_grid.size());
  auto record = [&](std::size_t i, const std::array<cd, 3>& roots) {
    for (int b = 0; b < 3; ++b) {
      probe.paths[b].parameter_samples.push_back(gamma_grid[i]);
      probe.paths[b].points.push_back(roots[b]);
    }
    separation[i] = min_separation(roots);
  };
  record(0, cur);

  for (std::size_t i = 1; i < gamma_grid.size(); ++i) {
    auto raw = dispersion_cubic_raw(gamma_grid[i] * dir, cd(k * k, 0.0), Om);
    cur = permuted(raw, best_assignment(cur, raw).perm);
    record(i, cur);
  }

  // locate the first dip of the (label-free) separation below tol_coll;
  // grid points rarely land on the collision itself, so minimize over the
  // bracket around each local minimum
  auto sep_at = [&](double g) {
    return min_separation(dispersion_cubic_raw(g * dir, cd(k * k, 0.0), Om));
  };
  for (std::size_t i = 0; i < gamma_grid.size() && !probe.first_collision_gamma;
       ++i) {
    const bool left_ok = (i == 0) || separation[i] <= separation[i - 1];
    const bool right_ok =
        (i + 1 == gamma_grid.size()) || separation[i] <= separation[i + 1];
    if (!(left_ok && right_ok)) continue;
    if (separation[i] < tol_coll) {
      probe.first_collision_gamma = gamma_grid[i];
      break;
    }
    if (i == 0 || i + 1 == gamma_grid.size()) continue;
    double lo = gamma_grid[i - 1], hi = gamma_grid[i + 1];
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (sep_at(m1) < sep_at(m2))
        hi = m2;
      else
        lo = m1;
    }
    const double g_star = 0.5 * (lo + hi);
    if (sep_at(g_star) < tol_coll) probe.first_collision_gamma = g_star;
  }
  return probe;
}

}  // namespace lifshitz

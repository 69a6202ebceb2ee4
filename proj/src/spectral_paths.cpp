#include "lifshitz/spectral_paths.hpp"

#include "lifshitz/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lifshitz {

namespace {

using cd = std::complex<double>;

constexpr int kInitialSamples = 512;
constexpr int kMaxRefineLevels = 20;
constexpr double kStepFraction = 0.02;
constexpr std::size_t kMaxSamples = 200000;

double half_pi() { return std::asin(1.0); }

double cross(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }

double min_pair_separation(const std::array<cd, 3>& r) {
  return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]),
                   std::abs(r[1] - r[2])});
}

struct Match {
  std::array<int, 3> perm;
  double max_move;
};

// permutation of nxt minimizing the total move away from cur
Match match_triples(const std::array<cd, 3>& cur, const std::array<cd, 3>& nxt) {
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  Match best{{0, 1, 2}, 0.0};
  double best_total = std::numeric_limits<double>::infinity();
  for (const auto& p : kPerms) {
    double total = 0.0, mx = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = std::abs(cur[i] - nxt[p[i]]);
      total += d;
      mx = std::max(mx, d);
    }
    if (total < best_total) {
      best_total = total;
      best = {{p[0], p[1], p[2]}, mx};
    }
  }
  return best;
}

// the k = 0 roots in label order; these are the anchors every trace starts at
std::array<cd, 3> zero_momentum_roots(double gamma, double omega_p) {
  const cd disc = std::sqrt(cd(4.0 * omega_p * omega_p - gamma * gamma, 0.0));
  const cd mig(0.0, -gamma);
  return {0.5 * (mig + disc), 0.5 * (mig - disc), cd(0.0, 0.0)};
}

struct OmegaGrid {
  std::vector<double> xs;                 // ascending, xs[0] == 0
  std::vector<std::array<cd, 3>> raw;     // unlabeled roots per sample
  std::vector<int> lev;                   // refinement level per interval
};

std::array<cd, 3> omega_roots_at(double xi, double alpha, double gamma,
                                 double omega_p) {
  const cd k = std::polar(xi, alpha);
  return dispersion_cubic_raw(cd(gamma, 0.0), k * k, omega_p);
}

std::vector<std::array<cd, 3>> propagate_labels(const OmegaGrid& g) {
  std::vector<std::array<cd, 3>> out(g.xs.size());
  out[0] = g.raw[0];
  for (std::size_t i = 1; i < g.xs.size(); ++i) {
    const Match m = match_triples(out[i - 1], g.raw[i]);
    for (int b = 0; b < 3; ++b) out[i][b] = g.raw[i][m.perm[b]];
  }
  return out;
}

struct Diameters {
  std::array<double, 3> branch;
  double global;
};

Diameters path_diameters(const std::vector<std::array<cd, 3>>& labeled) {
  Diameters d{{0.0, 0.0, 0.0}, 0.0};
  for (int b = 0; b < 3; ++b) {
    double xlo = labeled[0][b].real(), xhi = xlo;
    double ylo = labeled[0][b].imag(), yhi = ylo;
    for (const auto& t : labeled) {
      xlo = std::min(xlo, t[b].real());
      xhi = std::max(xhi, t[b].real());
      ylo = std::min(ylo, t[b].imag());
      yhi = std::max(yhi, t[b].imag());
    }
    d.branch[b] = std::hypot(xhi - xlo, yhi - ylo);
    d.global = std::max(d.global, d.branch[b]);
  }
  return d;
}

}  // namespace

std::array<ComplexPath, 3> trace_omega_paths(const ModelParams& params,
                                             double k_par, double alpha,
                                             double xi_max) {
  params.validate();
  if (!(alpha >= 0.0 && alpha <= half_pi() * (1.0 + 1e-14)))
    throw std::invalid_argument("rotation angle outside [0, pi/2]");
  if (!(xi_max > 1e-4))
    throw std::invalid_argument("xi_max must exceed the smallest grid sample");

  const double gamma = params.gamma;
  const double omega_p = params.omega_p;

  OmegaGrid grid;
  grid.xs.reserve(kInitialSamples + 1);
  grid.xs.push_back(0.0);
  const double lo = 1e-4;
  for (int i = 0; i < kInitialSamples; ++i)
    grid.xs.push_back(lo * std::pow(xi_max / lo,
                                    static_cast<double>(i) /
                                        (kInitialSamples - 1.0)));
  grid.raw.resize(grid.xs.size());
  grid.raw[0] = zero_momentum_roots(gamma, omega_p);
  for (std::size_t i = 1; i < grid.xs.size(); ++i)
    grid.raw[i] = omega_roots_at(grid.xs[i], alpha, gamma, omega_p);
  grid.lev.assign(grid.xs.size() - 1, 0);

  std::vector<std::array<cd, 3>> labeled;
  for (int round = 0; round < 2 * kMaxRefineLevels + 8; ++round) {
    labeled = propagate_labels(grid);
    const Diameters diam = path_diameters(labeled);

    std::vector<std::size_t> split;
    for (std::size_t i = 0; i + 1 < grid.xs.size(); ++i) {
      if (grid.lev[i] >= kMaxRefineLevels) continue;
      if (grid.xs[i + 1] - grid.xs[i] < 1e-15 * grid.xs.back()) continue;
      double move = 0.0;
      bool fast = false;
      for (int b = 0; b < 3; ++b) {
        const double mb = std::abs(labeled[i + 1][b] - labeled[i][b]);
        move = std::max(move, mb);
        // the floor keeps a numerically motionless branch from demanding
        // endless subdivision
        const double bound =
            kStepFraction * std::max(diam.branch[b], 1e-6 * diam.global);
        if (mb > bound) fast = true;
      }
      const double sep = std::min(min_pair_separation(labeled[i]),
                                  min_pair_separation(labeled[i + 1]));
      // keep the per-step motion well under the branch separation so the
      // nearest-continuation matching stays unambiguous through approaches
      const bool near_collision =
          move > 0.5 * sep && move > 1e-12 * diam.global;
      if (fast || near_collision) split.push_back(i);
    }
    if (split.empty() || grid.xs.size() + split.size() > kMaxSamples) break;

    OmegaGrid next;
    next.xs.reserve(grid.xs.size() + split.size());
    next.raw.reserve(grid.xs.size() + split.size());
    next.lev.reserve(grid.lev.size() + split.size());
    std::size_t si = 0;
    for (std::size_t i = 0; i + 1 < grid.xs.size(); ++i) {
      next.xs.push_back(grid.xs[i]);
      next.raw.push_back(grid.raw[i]);
      if (si < split.size() && split[si] == i) {
        const double mid = 0.5 * (grid.xs[i] + grid.xs[i + 1]);
        next.xs.push_back(mid);
        next.raw.push_back(omega_roots_at(mid, alpha, gamma, omega_p));
        next.lev.push_back(grid.lev[i] + 1);
        next.lev.push_back(grid.lev[i] + 1);
        ++si;
      } else {
        next.lev.push_back(grid.lev[i]);
      }
    }
    next.xs.push_back(grid.xs.back());
    next.raw.push_back(grid.raw.back());
    grid = std::move(next);
  }

  const Diameters diam = path_diameters(labeled);
  for (std::size_t i = 1; i + 1 < grid.xs.size(); ++i) {
    for (int b = 0; b < 3; ++b) {
      const double move = std::abs(labeled[i + 1][b] - labeled[i][b]);
      const double prev = std::abs(labeled[i][b] - labeled[i - 1][b]);
      if (move > 10.0 * std::max(prev, 1e-9 * diam.global) &&
          move > kStepFraction * diam.global) {
        std::ostringstream msg;
        msg << "tracking lost between xi = " << grid.xs[i] << " and "
            << grid.xs[i + 1]
            << ": a branch collision was crossed without refinement";
        throw std::runtime_error(msg.str());
      }
    }
  }

  // past the flip angle the branch that started first is the decaying one,
  // so gauge the asymptotic reach by whichever branch flew farthest
  const double reach = std::max({std::abs(labeled.back()[0]),
                                 std::abs(labeled.back()[1]),
                                 std::abs(labeled.back()[2])});
  if (reach <= 5.0 * omega_p)
    throw std::invalid_argument(
        "xi_max too small: no branch has reached its asymptotic regime at "
        "the endpoint");

  static const char* kNames[3] = {"omega1", "omega2", "omega3"};
  std::array<ComplexPath, 3> out;
  for (int b = 0; b < 3; ++b) {
    out[b].parameter_samples = grid.xs;
    out[b].points.resize(grid.xs.size());
    for (std::size_t i = 0; i < grid.xs.size(); ++i)
      out[b].points[i] = labeled[i][b];
    out[b].meta = {alpha, cd(gamma, 0.0), k_par, omega_p, kNames[b]};
  }
  return out;
}

CriticalAlpha find_critical_alpha(const ModelParams& params, double k_par) {
  params.validate();
  const double gamma = params.gamma;
  const double omega_p = params.omega_p;
  const double xi_max = 8.0 * std::max(omega_p, gamma);

  // past the touch point, the branch that decays toward -i*gamma at large xi
  // is no longer the one that started at the origin
  auto pairing_changed = [&](double alpha) -> bool {
    const auto paths = trace_omega_paths(params, k_par, alpha, xi_max);
    const cd sink(0.0, -gamma);
    int decaying = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < 3; ++b) {
      const double d = std::abs(paths[b].points.back() - sink);
      if (d < best) {
        best = d;
        decaying = b;
      }
    }
    return decaying != 2;
  };

  double lo = 0.0;
  double hi = 0.999 * half_pi();
  if (pairing_changed(lo))
    throw std::runtime_error("branch pairing ill-defined already at alpha = 0");
  if (!pairing_changed(hi))
    throw std::runtime_error(
        "no branch collision: the pairing never changes below alpha = pi/2");

  const double tol = 1e-4 * half_pi();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (pairing_changed(mid) ? hi : lo) = mid;
  }
  const double alpha_star = 0.5 * (lo + hi);

  // closest approach just below the flip gives the touch point
  const auto paths = trace_omega_paths(params, k_par, lo, xi_max);
  const std::size_t n = paths[0].points.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  int pa = 0, pb = 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double d = std::abs(paths[a].points[i] - paths[b].points[i]);
        if (d < best) {
          best = d;
          at = i;
          pa = a;
          pb = b;
        }
      }
    }
  }

  PathEvent event;
  event.kind = PathEventKind::BranchCollision;
  event.location = 0.5 * (paths[pa].points[at] + paths[pb].points[at]);
  event.parameter_value = paths[0].parameter_samples[at];
  event.alpha_at_event = alpha_star;
  return {alpha_star, event};
}

ComplexPath trace_kappa_path(const ModelParams& params, double k_par,
                             double alpha, const std::vector<double>& xi_grid) {
  params.validate();
  if (!(k_par >= 0.0)) throw std::invalid_argument("k_par must be >= 0");
  if (!(alpha >= 0.0 && alpha <= half_pi() * (1.0 + 1e-14)))
    throw std::invalid_argument("rotation angle outside [0, pi/2]");
  if (xi_grid.size() < 2)
    throw std::invalid_argument("need at least two xi samples");
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    if (!(xi_grid[i] > 0.0))
      throw std::invalid_argument("xi samples must be positive");
    if (i > 0 && !(xi_grid[i] > xi_grid[i - 1]))
      throw std::invalid_argument("xi samples must be strictly ascending");
  }

  const double gamma = params.gamma;
  const double omega_p = params.omega_p;
  auto squared = [&](double xi) -> cd {
    const cd z = std::polar(xi, -alpha);
    return z * z + omega_p * omega_p * z / (z + gamma) + k_par * k_par;
  };
  const cd start = (gamma > 0.0) ? cd(k_par, 0.0)
                                 : cd(std::hypot(omega_p, k_par), 0.0);

  std::vector<double> xs;
  xs.reserve(xi_grid.size() + 1);
  xs.push_back(0.0);
  xs.insert(xs.end(), xi_grid.begin(), xi_grid.end());
  std::vector<cd> vals(xs.size());
  vals[0] = start * start;
  for (std::size_t i = 1; i < xs.size(); ++i) vals[i] = squared(xs[i]);
  std::vector<int> lev(xs.size() - 1, 0);

  std::vector<cd> pts;
  auto chain = [&]() {
    pts.assign(xs.size(), cd{});
    pts[0] = start;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const cd s = std::sqrt(vals[i]);
      pts[i] = (std::abs(s - pts[i - 1]) <= std::abs(-s - pts[i - 1])) ? s : -s;
    }
  };

  for (int round = 0; round < 2 * kMaxRefineLevels + 8; ++round) {
    chain();
    double xlo = pts[0].real(), xhi = xlo, ylo = pts[0].imag(), yhi = ylo;
    for (const cd& p : pts) {
      xlo = std::min(xlo, p.real());
      xhi = std::max(xhi, p.real());
      ylo = std::min(ylo, p.imag());
      yhi = std::max(yhi, p.imag());
    }
    const double diam = std::hypot(xhi - xlo, yhi - ylo);
    const double bound = kStepFraction * std::max(diam, 1e-300);

    std::vector<std::size_t> split;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (lev[i] >= kMaxRefineLevels) continue;
      if (xs[i + 1] - xs[i] < 1e-15 * xs.back()) continue;
      if (std::abs(pts[i + 1] - pts[i]) > bound) split.push_back(i);
    }
    if (split.empty() || xs.size() + split.size() > kMaxSamples) break;

    std::vector<double> nxs;
    std::vector<cd> nvals;
    std::vector<int> nlev;
    nxs.reserve(xs.size() + split.size());
    nvals.reserve(xs.size() + split.size());
    nlev.reserve(lev.size() + split.size());
    std::size_t si = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      nxs.push_back(xs[i]);
      nvals.push_back(vals[i]);
      if (si < split.size() && split[si] == i) {
        const double mid = 0.5 * (xs[i] + xs[i + 1]);
        nxs.push_back(mid);
        nvals.push_back(squared(mid));
        nlev.push_back(lev[i] + 1);
        nlev.push_back(lev[i] + 1);
        ++si;
      } else {
        nlev.push_back(lev[i]);
      }
    }
    nxs.push_back(xs.back());
    nvals.push_back(vals.back());
    xs = std::move(nxs);
    vals = std::move(nvals);
    lev = std::move(nlev);
  }

  chain();
  double xlo = pts[0].real(), xhi = xlo, ylo = pts[0].imag(), yhi = ylo;
  for (const cd& p : pts) {
    xlo = std::min(xlo, p.real());
    xhi = std::max(xhi, p.real());
    ylo = std::min(ylo, p.imag());
    yhi = std::max(yhi, p.imag());
  }
  const double diam = std::hypot(xhi - xlo, yhi - ylo);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (lev[i] >= kMaxRefineLevels &&
        std::abs(pts[i + 1] - pts[i]) > kStepFraction * diam) {
      std::ostringstream msg;
      msg << "branch jump between xi = " << xs[i] << " and " << xs[i + 1]
          << ": the square-root sheet could not be continued";
      throw std::runtime_error(msg.str());
    }
  }

  ComplexPath path;
  path.parameter_samples = std::move(xs);
  path.points = std::move(pts);
  path.meta = {alpha, cd(gamma, 0.0), k_par, omega_p, "kappa"};
  return path;
}

std::optional<PathEvent> detect_self_intersection(const ComplexPath& path) {
  const auto& P = path.points;
  const auto& X = path.parameter_samples;
  if (P.size() < 4)
    throw std::invalid_argument("need at least four path points");
  const double diam = path.diameter();
  if (diam == 0.0) return std::nullopt;
  const double pad = 1e-8 * diam;
  const std::size_t n = P.size();

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cd a1 = P[i], a2 = P[i + 1];
    const double axlo = std::min(a1.real(), a2.real()) - pad;
    const double axhi = std::max(a1.real(), a2.real()) + pad;
    const double aylo = std::min(a1.imag(), a2.imag()) - pad;
    const double ayhi = std::max(a1.imag(), a2.imag()) + pad;
    const cd d1 = a2 - a1;

    double best_t = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      const cd b1 = P[j], b2 = P[j + 1];
      if (std::max(b1.real(), b2.real()) < axlo ||
          std::min(b1.real(), b2.real()) > axhi ||
          std::max(b1.imag(), b2.imag()) < aylo ||
          std::min(b1.imag(), b2.imag()) > ayhi)
        continue;
      const cd d2 = b2 - b1;
      const double den = cross(d1, d2);
      if (std::abs(den) < 1e-300) continue;
      const cd r = b1 - a1;
      const double t = cross(r, d2) / den;
      const double s = cross(r, d1) / den;
      const double eps = 1e-12;
      if (t < -eps || t > 1.0 + eps || s < -eps || s > 1.0 + eps) continue;
      if (t < best_t) {
        best_t = t;
        best_s = s;
        best_j = j;
      }
    }
    if (best_j != 0) {
      PathEvent ev;
      ev.kind = PathEventKind::SelfIntersection;
      ev.location = a1 + best_t * d1;
      ev.parameter_value = X[i] + best_t * (X[i + 1] - X[i]);
      ev.parameter_value_b =
          X[best_j] + best_s * (X[best_j + 1] - X[best_j]);
      ev.alpha_at_event = path.meta.alpha;
      return ev;
    }
  }
  return std::nullopt;
}

LoopMetrics loop_metrics(const ComplexPath& path, const PathEvent& event) {
  if (event.kind != PathEventKind::SelfIntersection ||
      !event.parameter_value_b.has_value())
    throw std::invalid_argument("event is not a self-intersection");
  const double xa = event.parameter_value;
  const double xb = *event.parameter_value_b;
  if (!(xa < xb))
    throw std::invalid_argument("crossing parameters out of order");
  if (path.parameter_samples.empty() || xa < path.parameter_samples.front() ||
      xb > path.parameter_samples.back())
    throw std::invalid_argument("event does not lie on this path");

  std::vector<cd> poly;
  poly.push_back(event.location);
  for (std::size_t i = 0; i < path.parameter_samples.size(); ++i) {
    const double x = path.parameter_samples[i];
    if (x > xa && x < xb) poly.push_back(path.points[i]);
  }

  double area2 = 0.0, perimeter = 0.0;
  cd weighted{};
  const std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const cd p = poly[k];
    const cd q = poly[(k + 1) % m];
    const double w = cross(p, q);
    area2 += w;
    weighted += (p + q) * w;
    perimeter += std::abs(q - p);
  }
  const double area = 0.5 * area2;
  if (std::abs(area) < 1e-14)
    throw std::runtime_error("degenerate loop: enclosed area below 1e-14");
  return {area, perimeter, weighted / (6.0 * area)};
}

}  // namespace lifshitz

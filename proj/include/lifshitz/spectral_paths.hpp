#pragma once

#include "lifshitz/model.hpp"
#include "lifshitz/paths.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace lifshitz {

// Traces the three dispersion branches along the rotated momentum ray
// k = xi * e^{i alpha}, xi in [0, xi_max]. All three curves start at the
// k = 0 roots (those points do not move with alpha); branch identity is kept
// by nearest continuation, with the xi grid refined where a curve moves fast
// or where two branches approach each other.
std::array<ComplexPath, 3> trace_omega_paths(const ModelParams& params,
                                             double k_par, double alpha,
                                             double xi_max);

struct CriticalAlpha {
  double alpha;     // rotation angle at which the start-to-end pairing flips
  PathEvent event;  // closest approach of the touching pair at that angle
};

// Bisects on alpha for the angle where the branch that decays at large xi
// stops being the over-damped one: beyond it the first and third curves have
// exchanged their endpoints. Throws when no such angle exists below pi/2.
CriticalAlpha find_critical_alpha(const ModelParams& params, double k_par);

// kappa(xi) = sqrt(xi^2 + Omega^2/(1 + gamma/xi) + k_par^2) evaluated at
// xi -> xi * e^{-i alpha}, square-root branch continued from kappa(0+)
// (= k_par for gamma > 0, sqrt(Omega^2 + k_par^2) for gamma = 0). The given
// grid is refined in place; the exact xi = 0 limit point is prepended.
ComplexPath trace_kappa_path(const ModelParams& params, double k_par,
                             double alpha, const std::vector<double>& xi_grid);

// First crossing of the curve with itself (ordered by the smaller parameter),
// found by a pairwise segment sweep. Returns nothing for a simple curve.
std::optional<PathEvent> detect_self_intersection(const ComplexPath& path);

struct LoopMetrics {
  double area;  // signed; orientation of the traversal is preserved
  double perimeter;
  std::complex<double> centroid;
};

// Measures the closed sub-path between the two crossing parameters of a
// self-intersection event on this path.
LoopMetrics loop_metrics(const ComplexPath& path, const PathEvent& event);

}  // namespace lifshitz

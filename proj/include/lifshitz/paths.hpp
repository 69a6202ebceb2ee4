#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lifshitz {

enum class PathEventKind { BranchCollision, Cusp, SelfIntersection, LoopDetected };

struct PathEvent {
  PathEventKind kind = PathEventKind::BranchCollision;
  std::complex<double> location{};
  double parameter_value = 0.0;
  // second parameter of a self-intersection; parameter_value < parameter_value_b
  std::optional<double> parameter_value_b{};
  double alpha_at_event = 0.0;
};

struct PathMeta {
  double alpha = 0.0;
  std::complex<double> gamma{};
  double k_par = 0.0;   // transverse momentum (or full momentum for root curves)
  double omega_p = 0.0;
  std::string branch{};
};

// A parametric curve in the complex plane. parameter_samples is strictly
// ascending; points[i] is the curve value at parameter_samples[i].
struct ComplexPath {
  std::vector<double> parameter_samples;
  std::vector<std::complex<double>> points;
  PathMeta meta;

  // bounding-box extent; the scale self-intersection tolerances hang off
  double diameter() const {
    if (points.empty()) return 0.0;
    double xlo = points[0].real(), xhi = xlo;
    double ylo = points[0].imag(), yhi = ylo;
    for (const auto& p : points) {
      xlo = std::min(xlo, p.real());
      xhi = std::max(xhi, p.real());
      ylo = std::min(ylo, p.imag());
      yhi = std::max(yhi, p.imag());
    }
    return std::hypot(xhi - xlo, yhi - ylo);
  }
};

}  // namespace lifshitz

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lifshitz::quad {

struct Options {
  double abs_tol = 1e-10;  // per-panel acceptance target
  double rel_tol = 1e-10;
  int max_depth = 48;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // accumulated panel-disagreement estimate
  std::size_t evals = 0;
};

struct ComplexResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  std::size_t evals = 0;
};

// Adaptive Gauss-Legendre on [a,b]: 15-point panels, bisected until the two
// half-panel sum agrees with the parent panel within the (budget-split)
// tolerance. Endpoints are never evaluated, so integrable endpoint
// singularities (log, inverse square root) are handled by subdivision alone.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt = {});

ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                        double a, double b, Options opt = {});

// Upper-tail integral via x = a - scale*ln(u), u in (0,1]. The caller picks
// scale near the integrand's decay length.
Result integrate_to_inf(const std::function<double(double)>& f, double a,
                        double scale, Options opt = {});

// Fixed-order pairwise reduction; result is independent of how the work that
// produced xs was scheduled.
double pairwise_sum(std::span<const double> xs);

// Evaluates f(0..n-1) on a worker pool (size capped by LIFSHITZ_LAB_THREADS)
// into an index-ordered vector, so downstream reductions are bit-stable
// regardless of worker count.
std::vector<double> parallel_map(const std::function<double(std::size_t)>& f,
                                 std::size_t n);

}  // namespace lifshitz::quad

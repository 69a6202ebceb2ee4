#pragma once

#include "lifshitz/model.hpp"
#include "lifshitz/paths.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace lifshitz {

// The three roots of (w^2 - k^2)(w + i*gamma) - w*Omega^2 = 0, labeled by
// continuity from the gamma = 0 limit: omega1 -> +sqrt(Omega^2+k^2),
// omega2 -> -sqrt(Omega^2+k^2), omega3 -> 0 (the over-damped branch).
struct RootTriple {
  std::complex<double> omega1{};
  std::complex<double> omega2{};
  std::complex<double> omega3{};
  double k = 0.0;
  std::complex<double> gamma_used{};

  std::array<std::complex<double>, 3> as_array() const {
    return {omega1, omega2, omega3};
  }
};

enum class RootLabel { Omega1, Omega2, Omega3 };

// Truncated expansion of one root in powers of gamma about gamma = 0.
struct SeriesExpansion {
  RootLabel root_label = RootLabel::Omega1;
  std::vector<std::complex<double>> coefficients;  // index = power of gamma
  double k = 0.0;
  double omega_p = 0.0;

  std::complex<double> evaluate(std::complex<double> gamma) const;
};

// Residual of the cubic at w; roots satisfy |residual| <= 1e-12 max(1,|w|^3).
std::complex<double> cubic_residual(std::complex<double> w,
                                    std::complex<double> gamma, double k,
                                    double omega_p);

// Unlabeled roots for complex gamma and complex k^2 (no classification).
// This is the raw kernel the path tracer drives with rotated momenta.
std::array<std::complex<double>, 3> dispersion_cubic_raw(
    std::complex<double> gamma, std::complex<double> k_squared, double omega_p);

// Root separation below which two branches are declared coincident.
double collision_tolerance(double omega_p, double k);

// Solves and classifies. gamma_override, when given, replaces params.gamma
// and may be complex (gamma * e^{i alpha} probing). Classification walks
// gamma from 0 to its target and throws std::runtime_error when two branches
// collide on the way (the labels stop being well defined past that point).
RootTriple solve_dispersion_cubic(
    const ModelParams& params, double k,
    std::optional<std::complex<double>> gamma_override = {});

// Expansions of all three roots up to the requested power of gamma (0..2).
std::array<SeriesExpansion, 3> perturbative_roots(const ModelParams& params,
                                                  double k, int order);

struct ConvergenceProbe {
  std::array<ComplexPath, 3> paths;          // roots versus gamma along the ray
  std::optional<double> first_collision_gamma;
};

// Tracks the three roots along gamma * e^{i alpha} for gamma in gamma_grid.
// A collision is reported in first_collision_gamma, never thrown.
ConvergenceProbe probe_convergence(const ModelParams& params, double k,
                                   double alpha,
                                   const std::vector<double>& gamma_grid);

}  // namespace lifshitz

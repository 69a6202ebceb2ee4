#pragma once

#include "lifshitz/model.hpp"
#include "lifshitz/quadrature.hpp"
#include "lifshitz/scattering.hpp"

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace lifshitz {

enum class Representation { Matsubara, RealFrequency, AbelPlana };

struct FreeEnergyReport {
  std::complex<double> total{};        // vacuum_part + thermal_part
  double vacuum_part = 0.0;            // separation-dependent part of the T=0 integral
  std::complex<double> thermal_part{}; // what temperature adds on top
  Representation representation = Representation::Matsubara;
  double error_estimate = 0.0;
  ModelParams params{};
  PermKind kind = PermKind::Plasma;
};

// Free energy per unit area from the imaginary-axis sum,
//   F = T sum'_{l>=0} (1/2pi) int_0^inf k dk [ln g_TE + ln g_TM],
//   g = 1 - r^2 e^{-2 eta L},  eta = sqrt(xi_l^2 + k^2),  xi_l = 2 pi l T,
// with the l = 0 term at half weight. vacuum_part replaces the sum by
// (1/2pi) int dxi; only this separation-dependent piece of the zero-point
// energy is computed (the separation-free bulk needs a regulator and is out
// of scope). thermal_part is their difference. The k integral runs over
// u = e^{-2 eta L} where the integrand is smooth; the l sum stops once a
// geometric tail estimate drops below rel 1e-8 and the tail is added.
// Throws std::runtime_error if term magnitudes fail to decay by l_max.
FreeEnergyReport matsubara_free_energy(const ModelParams& params, PermKind kind,
                                       std::optional<int> l_max = {},
                                       quad::Options opt = {});

// Single-polarization thermal part (sum minus integral) of the same object;
// the comparison target for abel_plana_thermal_part.
double matsubara_thermal_channel(const ModelParams& params, PermKind kind,
                                 Polarization pol, quad::Options opt = {});

// Thermal part assembled on the real frequency axis: for each (pol, k_par)
// the discrete gap modes contribute ln(1 - e^{-beta omega_j}) and the
// continuum contributes the same weight under d(delta)/dk3 / pi, with the
// separation-independent background (bulk slab, isolated interfaces, edge
// and surface-wave pieces) removed so only the gap physics is left. The mode
// geometry is always the lossless one; gamma > 0 moves the oscillation
// frequencies to the damped root omega_1 of the dispersion cubic, which
// makes the result complex. Lossless input gives a real value equal to the
// Matsubara thermal part. Vacuum walls are rejected (no interface modes).
// Throws std::runtime_error if the k3 integrand has not decayed at its
// cutoff or if the damped-root labeling becomes ambiguous.
FreeEnergyReport real_frequency_thermal_part(const ModelParams& params,
                                             PermKind kind,
                                             quad::Options opt = {});

// Taylor terms a_n gamma^n (n = 0, 1, 2) of the real-frequency thermal part
// about gamma = 0, from trapezoidal contour averages over the circle
// |gamma_c| = params.gamma, sampled half a step off the axes (on the negative
// imaginary axis the softest interface mode degenerates with the relaxation
// root, and rays there can lose the mode label). Parity is exact by the
// sampling symmetry: a_0 and a_2 come out real, a_1 purely imaginary. The
// soft-mode response is not analytic at gamma = 0, so a_0 reproduces the
// lossless value only up to a contamination that shrinks with gamma, while
// a_1 tracks the leading imaginary part closely.
std::array<std::complex<double>, 3> real_frequency_gamma_terms(
    const ModelParams& params, int circle_points = 8, quad::Options opt = {});

// Thresholds kappa_l = sqrt(xi_l^2 + Omega^2 + k_par^2) where the rotated
// momentum contour crosses a thermal pole; the jump function counts them.
struct StairFunction {
  std::vector<double> kappa_thresholds;  // ascending, l = 1..count
  std::complex<double> value(double kappa) const;  // i pi * (#thresholds below)
};

StairFunction stair_thresholds(const ModelParams& params, double k_par,
                               int l_count);

struct ContourIdentityReport {
  StairFunction stair;
  double max_threshold_mismatch = 0.0;  // stair vs directly mapped frequencies
  double max_identity_residual = 0.0;   // per-l transmission-log decomposition
  double primed_sum_mismatch = 0.0;     // truncated half-weighted sums, two routes
  // ln g at each xi_l; the separation-dependent summand the identity isolates
  std::vector<double> thermal_terms_te;
  std::vector<double> thermal_terms_tm;
  int l_count = 0;
};

// For lossless walls the rotated-contour mode sum collapses onto the
// imaginary-axis sum. Checks, per l: the transmission evaluated at
// k3 = i kappa_l factorizes into separation-free terms, a linear -eta_l L
// piece, and ln g(xi_l); and the thresholds land exactly on the thermal
// frequencies. The l = 0 term enters at half weight on both routes (TM walls
// block static transmission, so its direct factor check is TE-only).
// Throws std::runtime_error on threshold mismatch above 1e-10.
ContourIdentityReport verify_plasma_contour_identity(const ModelParams& params,
                                                     double k_par,
                                                     int l_count = 20);

// TE-channel thermal part evaluated as a Bose-weighted boundary integral
//   (1/4pi^2) int_0^inf dx (e^{x/T}-1)^{-1} (-2 Im phi(ix)),
// phi continued off the imaginary axis in two pieces split at k_par = x
// (oscillating gap momentum below, decaying above). For lossless walls the
// decaying piece is identically real. The static TM channel needs no
// resummation, so only TE is evaluated. Throws std::runtime_error if the
// split-point branch check fails.
FreeEnergyReport abel_plana_thermal_part(const ModelParams& params,
                                         quad::Options opt = {});

// The decaying-momentum piece alone, Bose-weighted: the part of the thermal
// energy that survives gamma -> 0 at fixed T and is absent for lossless
// walls. Evaluating it at small gamma cross-checks defect_f_D0.
double drude_tail_thermal_part(const ModelParams& params,
                               quad::Options opt = {});

struct DefectResult {
  double f_D0 = 0.0;    // dimensionless residual integral
  double defect = 0.0;  // T * f_D0 / (16 pi^2 L^2)
  std::vector<double> gamma_probes;
  std::vector<double> f_D0_values;  // one per probe; table of the invariance
  double spread = 0.0;              // relative spread across probes
};

// The gamma -> 0 residual of the decaying-momentum thermal piece. After
// rescaling the Bose variable by gamma the integrand loses its gamma
// dependence, so the limit is a finite dimensionless number f_D0 times
// T/(16 pi^2 L^2). Evaluated at gamma = 1e-1, 1e-2, 1e-3 to exhibit the
// invariance (spread is recorded). Throws std::runtime_error if the
// rescaled integrand has not decayed at the cutoffs.
DefectResult defect_f_D0(const ModelParams& params, quad::Options opt = {});

struct DefectCheckRow {
  double gamma = 0.0;
  double difference = 0.0;       // damped-minus-lossless thermal part
  double ratio_to_defect = 0.0;
};

struct DefectCheckReport {
  std::vector<DefectCheckRow> rows;
  double defect = 0.0;                  // T f_D0 / (16 pi^2 L^2)
  double defect_alt_normalization = 0.0;  // T f_D0 / (16 pi L^2), for comparison
  bool converged_within_2pct = false;
  bool nonzero = false;
};

// Tabulates the imaginary-axis thermal part for damped walls against the
// lossless value along a descending gamma sequence and compares the limit
// against the residual from defect_f_D0. Report-style: never throws on
// physics, only on bad input.
DefectCheckReport nonperturbative_defect_check(
    const ModelParams& params, const std::vector<double>& gamma_sequence,
    quad::Options opt = {});

struct EntropyEstimate {
  double value = 0.0;
  double error = 0.0;
};

// S = -dF/dT by central differences with step h (default T/50) and one
// Richardson refinement; the relaxation parameter follows law(T) when a law
// is given. Throws std::runtime_error when the two difference estimates
// disagree by more than 10% (step too large for this curvature).
EntropyEstimate entropy(const ModelParams& params, PermKind kind, double T,
                        std::optional<double> h = {},
                        const std::optional<TemperatureLaw>& law = {},
                        quad::Options opt = {});

struct NernstEstimate {
  double S0 = 0.0;         // extrapolated zero-temperature entropy
  double amplitude = 0.0;  // c in S = S0 + c T^p
  double exponent = 0.0;   // p
  double rel_residual = 0.0;
  std::vector<double> temperatures;
  std::vector<double> entropies;
};

// Fits S(T) = S0 + c T^p over a descending temperature sequence (at least 5
// points spanning a decade) with p scanned on a fixed grid and (S0, c) by
// least squares. Throws std::runtime_error when the fit is unstable
// (p below 0.2, p at the grid edge, or residuals above 5%).
NernstEstimate nernst_limit(const ModelParams& params, PermKind kind,
                            const std::optional<TemperatureLaw>& law,
                            const std::vector<double>& T_sequence,
                            quad::Options opt = {});

// Weight of the overdamped root against the in-plane momentum measure:
// k_par * |ln(1 - e^{-beta omega_3(gamma, k_par)})| per sample. The root
// tends to -i gamma at large momentum, so the weight tends to a nonzero
// constant times k_par and its integral has no chance to converge; this is
// why the damped sums keep omega_1 only.
std::vector<std::pair<double, double>> overdamped_integrand_growth(
    const ModelParams& params, const std::vector<double>& k_par_samples);

}  // namespace lifshitz

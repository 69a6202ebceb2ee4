#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lifshitz/dispersion.hpp"
#include "lifshitz/spectral_paths.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace lifshitz;
using cd = std::complex<double>;

static const double kHalfPi = std::asin(1.0);

static ModelParams mp(double omega_p, double gamma) {
  ModelParams p;
  p.omega_p = omega_p;
  p.gamma = gamma;
  return p;
}

static std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, i / (n - 1.0));
  return v;
}

TEST_CASE("root curves start at the zero-momentum anchors for every angle") {
  const cd w1(0.8660254037844386, -0.5);  // half of (-i + sqrt(3)) at gamma 1
  for (double alpha : {0.0, 0.5, 1.2}) {
    auto paths = trace_omega_paths(mp(1.0, 1.0), 0.0, alpha, 8.0);
    CHECK(std::abs(paths[0].points.front() - w1) < 1e-12);
    CHECK(std::abs(paths[1].points.front() + std::conj(w1)) < 1e-12);
    CHECK(std::abs(paths[2].points.front()) == 0.0);
    CHECK(paths[0].parameter_samples.front() == 0.0);
    CHECK(paths[0].meta.branch == "omega1");
    CHECK(paths[2].meta.branch == "omega3");
    for (std::size_t i = 1; i < paths[0].parameter_samples.size(); ++i)
      CHECK(paths[0].parameter_samples[i] > paths[0].parameter_samples[i - 1]);
  }
}

TEST_CASE("over-damped branch runs down the imaginary axis at alpha = 0") {
  auto paths = trace_omega_paths(mp(1.0, 1.0), 0.0, 0.0, 8.0);
  for (const cd& p : paths[2].points) {
    CHECK(std::abs(p.real()) < 1e-9);
    CHECK(p.imag() < 1e-12);
    CHECK(p.imag() > -1.0);
  }
  CHECK(std::abs(paths[2].points.back() - cd(0.0, -1.0)) < 0.05);
  CHECK(std::abs(paths[0].points.back()) > 5.0);
}

TEST_CASE("lossless curves follow the gapped dispersion, third branch stays put") {
  const double alpha = 0.6;
  auto paths = trace_omega_paths(mp(1.0, 0.0), 0.0, alpha, 8.0);
  const auto& xs = paths[0].parameter_samples;
  for (std::size_t i = 0; i < xs.size(); i += 16) {
    const cd k = std::polar(xs[i], alpha);
    const cd expected = std::sqrt(1.0 + k * k);
    CHECK(std::abs(paths[0].points[i] - expected) < 1e-8);
    CHECK(std::abs(paths[1].points[i] + expected) < 1e-8);
    CHECK(std::abs(paths[2].points[i]) < 1e-10);
  }
}

TEST_CASE("trace validates angle range and endpoint reach") {
  CHECK_THROWS_AS(trace_omega_paths(mp(1.0, 1.0), 0.0, -0.1, 8.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(trace_omega_paths(mp(1.0, 1.0), 0.0, 1.6, 8.0),
                  std::invalid_argument);
  // first branch only reaches |omega| ~ 2.2 here, not the asymptotic regime
  CHECK_THROWS_AS(trace_omega_paths(mp(1.0, 1.0), 0.0, 0.3, 2.0),
                  std::invalid_argument);
}

TEST_CASE("downward re-tracing lands back on the starting anchors") {
  const double alpha = 0.3 * kHalfPi;
  auto paths = trace_omega_paths(mp(1.0, 1.0), 0.0, alpha, 8.0);
  const auto& xs = paths[0].parameter_samples;
  std::array<cd, 3> cur = {paths[0].points.back(), paths[1].points.back(),
                           paths[2].points.back()};
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (std::size_t step = xs.size() - 1; step-- > 0;) {
    const cd k = std::polar(xs[step], alpha);
    const auto raw = dispersion_cubic_raw(cd(1.0, 0.0), k * k, 1.0);
    double best = 1e300;
    std::array<cd, 3> pick{};
    for (const auto& p : kPerms) {
      const double tot = std::abs(cur[0] - raw[p[0]]) +
                         std::abs(cur[1] - raw[p[1]]) +
                         std::abs(cur[2] - raw[p[2]]);
      if (tot < best) {
        best = tot;
        pick = {raw[p[0]], raw[p[1]], raw[p[2]]};
      }
    }
    cur = pick;
  }
  for (int b = 0; b < 3; ++b)
    CHECK(std::abs(cur[b] - paths[b].points.front()) < 1e-9);
}

TEST_CASE("critical angle for the lossy model") {
  auto res = find_critical_alpha(mp(1.0, 1.0), 0.0);
  CHECK(res.alpha / kHalfPi == doctest::Approx(0.406665).epsilon(8e-4));
  CHECK(res.event.kind == PathEventKind::BranchCollision);
  CHECK(std::abs(res.event.parameter_value - 0.615695) < 0.02);
  CHECK(res.event.alpha_at_event == res.alpha);

  auto weak = find_critical_alpha(mp(1.0, 0.1), 0.0);
  CHECK(weak.alpha / kHalfPi == doctest::Approx(0.885188).epsilon(8e-4));
  CHECK(std::abs(weak.event.parameter_value - 0.904897) < 0.02);
}

TEST_CASE("critical angle search rejects the lossless model") {
  CHECK_THROWS_AS(find_critical_alpha(mp(1.0, 0.0), 0.0), std::runtime_error);
}

TEST_CASE("branch pairing flips across the critical angle") {
  const auto res = find_critical_alpha(mp(1.0, 1.0), 0.0);
  const cd sink(0.0, -1.0);
  auto decaying_branch = [&](double alpha) {
    auto paths = trace_omega_paths(mp(1.0, 1.0), 0.0, alpha, 8.0);
    int which = 0;
    double best = 1e300;
    for (int b = 0; b < 3; ++b) {
      const double d = std::abs(paths[b].points.back() - sink);
      if (d < best) {
        best = d;
        which = b;
      }
    }
    return which;
  };
  CHECK(decaying_branch(res.alpha - 0.03 * kHalfPi) == 2);
  CHECK(decaying_branch(res.alpha + 0.03 * kHalfPi) == 0);

  // below the flip the three curves stay separated everywhere
  auto paths = trace_omega_paths(mp(1.0, 1.0), 0.0, res.alpha - 0.03 * kHalfPi,
                                 8.0);
  double minsep = 1e300;
  for (std::size_t i = 0; i < paths[0].points.size(); ++i) {
    minsep = std::min(minsep,
                      std::abs(paths[0].points[i] - paths[2].points[i]));
    minsep = std::min(minsep,
                      std::abs(paths[0].points[i] - paths[1].points[i]));
    minsep = std::min(minsep,
                      std::abs(paths[1].points[i] - paths[2].points[i]));
  }
  CHECK(minsep > 1e-6);
}

TEST_CASE("momentum curve at alpha = 0 is real, from k_par upward") {
  auto path = trace_kappa_path(mp(1.0, 0.1), 1.0, 0.0, logspace(1e-6, 5.0, 800));
  CHECK(path.points.front() == cd(1.0, 0.0));
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    CHECK(std::abs(path.points[i].imag()) < 1e-12);
    if (i > 0) CHECK(path.points[i].real() > path.points[i - 1].real());
  }
  CHECK(path.points.back().real() ==
        doctest::Approx(std::sqrt(25.0 + 5.0 / 5.1 + 1.0)).epsilon(1e-10));
}

TEST_CASE("lossless momentum curve is simple for every angle") {
  for (double frac : {0.2, 0.5, 0.85, 1.0}) {
    auto path = trace_kappa_path(mp(1.0, 0.0), 1.0, frac * kHalfPi,
                                 logspace(1e-6, 5.0, 1500));
    CHECK(path.points.front() == cd(std::sqrt(2.0), 0.0));
    CHECK(!detect_self_intersection(path).has_value());
  }
}

TEST_CASE("momentum curve grows its crossing at full rotation") {
  auto grid = logspace(1e-6, 5.0, 3000);
  auto path = trace_kappa_path(mp(1.0, 0.1), 1.0, kHalfPi, grid);
  auto ev = detect_self_intersection(path);
  REQUIRE(ev.has_value());
  CHECK(std::abs(ev->location - cd(1.006215, -0.049691)) < 2e-3);
  CHECK(ev->parameter_value > 0.008);
  CHECK(ev->parameter_value < 0.012);
  REQUIRE(ev->parameter_value_b.has_value());
  CHECK(*ev->parameter_value_b > 0.97);
  CHECK(*ev->parameter_value_b < 1.01);

  auto gentle = trace_kappa_path(mp(1.0, 0.1), 1.0, 0.2 * kHalfPi, grid);
  CHECK(!detect_self_intersection(gentle).has_value());
}

TEST_CASE("loop size stabilizes as the loss parameter shrinks") {
  auto measure = [](double gamma) {
    const double lo = std::min(1e-6, gamma * gamma / 10.0);
    auto path = trace_kappa_path(mp(1.0, gamma), 1.0, kHalfPi,
                                 logspace(lo, 5.0, 3000));
    auto ev = detect_self_intersection(path);
    REQUIRE(ev.has_value());
    return loop_metrics(path, *ev);
  };
  const auto big = measure(0.1);
  const auto mid = measure(0.01);
  const auto fine = measure(0.001);

  CHECK(big.area == doctest::Approx(0.0390464).epsilon(3e-3));
  CHECK(mid.area == doctest::Approx(0.0633204).epsilon(3e-3));
  CHECK(fine.area == doctest::Approx(0.0660877).epsilon(3e-3));
  CHECK(big.perimeter == doctest::Approx(0.82318).epsilon(1e-2));
  CHECK(fine.perimeter == doctest::Approx(1.05374).epsilon(1e-2));
  CHECK(std::abs(mid.centroid - cd(1.2048, -0.0905)) < 2e-2);
  CHECK(std::abs(fine.centroid - cd(1.2070, -0.0870)) < 2e-2);

  // same orientation throughout, growing toward a finite limit
  CHECK(big.area > 0.0);
  CHECK(mid.area > big.area);
  CHECK(fine.area > mid.area);
  CHECK(std::abs(fine.area - mid.area) / std::abs(fine.area) < 0.05);
}

TEST_CASE("synthetic near-circle loop measures pi") {
  const int n = 4001;
  ComplexPath path;
  path.parameter_samples.resize(n);
  path.points.resize(n);
  const double lo = -0.3, hi = 2.0 * std::acos(-1.0) + 0.3;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1.0);
    const double r = 1.0 + 1e-4 * std::sin(0.5 * t);
    path.parameter_samples[i] = t;
    path.points[i] = std::polar(r, t);
  }
  auto ev = detect_self_intersection(path);
  REQUIRE(ev.has_value());
  CHECK(std::abs(ev->parameter_value) < 0.01);
  CHECK(std::abs(*ev->parameter_value_b - 2.0 * std::acos(-1.0)) < 0.01);

  const auto m = loop_metrics(path, *ev);
  CHECK(std::abs(m.area - std::acos(-1.0)) < 1e-3);
  CHECK(m.area > 0.0);  // counterclockwise traversal kept its sign
  CHECK(std::abs(m.perimeter - 2.0 * std::acos(-1.0)) < 0.01);
  CHECK(std::abs(m.centroid) < 0.01);
}

TEST_CASE("simple curves yield no event, short paths are rejected") {
  ComplexPath line;
  for (int i = 0; i < 10; ++i) {
    line.parameter_samples.push_back(i);
    line.points.push_back(cd(i, 0.5 * i));
  }
  CHECK(!detect_self_intersection(line).has_value());

  ComplexPath stub;
  for (int i = 0; i < 3; ++i) {
    stub.parameter_samples.push_back(i);
    stub.points.push_back(cd(i, 0.0));
  }
  CHECK_THROWS_AS(detect_self_intersection(stub), std::invalid_argument);
}

TEST_CASE("loop measurement rejects bad events and flat loops") {
  ComplexPath line;
  for (int i = 0; i < 5; ++i) {
    line.parameter_samples.push_back(i);
    line.points.push_back(cd(i, 0.0));
  }
  PathEvent ev;
  ev.kind = PathEventKind::SelfIntersection;
  ev.location = cd(0.5, 0.0);
  ev.parameter_value = 0.5;
  ev.parameter_value_b = 3.5;
  CHECK_THROWS_AS(loop_metrics(line, ev), std::runtime_error);

  PathEvent wrong = ev;
  wrong.kind = PathEventKind::BranchCollision;
  CHECK_THROWS_AS(loop_metrics(line, wrong), std::invalid_argument);

  PathEvent off = ev;
  off.parameter_value_b = 9.0;  // beyond the last sample
  CHECK_THROWS_AS(loop_metrics(line, off), std::invalid_argument);
}

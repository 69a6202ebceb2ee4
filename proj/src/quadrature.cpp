#include "lifshitz/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace lifshitz::quad {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1], positive half; the
// negative half mirrors. Node 0 is the midpoint.
constexpr double kNodes[8] = {
    0.0,
    0.2011940939974345223006283033945962078128,
    0.3941513470775633698972073709810454683627,
    0.5709721726085388475372267372539106412383,
    0.7244177313601700474161860546139380096308,
    0.8482065834104272162006483207742168513662,
    0.9372733924007059043077589477102094712439,
    0.9879925180204854284895657185866125811469};

constexpr double kWeights[8] = {
    0.2025782419255612728806201999675193148386,
    0.1984314853271115764561183264438393248186,
    0.1861610000155622110268005618664228245062,
    0.1662692058169939335532008604812088111309,
    0.1395706779261543144478047945110283225208,
    0.1071592204671719350118695466858693034155,
    0.0703660474881081247092674164506673384667,
    0.0307532419961172683546283935772044177217};

template <typename T>
T panel15(const std::function<T(double)>& f, double a, double b,
          std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T acc = kWeights[0] * f(c);
  ++evals;
  for (int i = 1; i < 8; ++i) {
    const double dx = h * kNodes[i];
    acc += kWeights[i] * (f(c - dx) + f(c + dx));
    evals += 2;
  }
  return acc * h;
}

template <typename T>
struct Accum {
  T value{};
  double error = 0.0;
  std::size_t evals = 0;
  // smallest disagreement worth chasing: panels cannot agree below roundoff
  // of the integral's own magnitude, so halving the budget down a singular
  // chain must not drag sibling panels past this floor
  double noise = 0.0;
};

template <typename T>
void refine(const std::function<T(double)>& f, double a, double b, T parent,
            double tol, int depth, const Options& opt, Accum<T>& out) {
  const double m = 0.5 * (a + b);
  const T left = panel15(f, a, m, out.evals);
  const T right = panel15(f, m, b, out.evals);
  const T sum = left + right;
  const double disagree = std::abs(sum - parent);
  const double local_tol =
      std::max({tol, opt.rel_tol * std::abs(sum), out.noise, 1e-300});
  if (disagree <= local_tol || depth >= opt.max_depth) {
    out.value += sum;
    out.error += disagree;
    out.noise = std::max(out.noise, 1e-15 * std::abs(sum));
    return;
  }
  refine(f, a, m, left, 0.5 * tol, depth + 1, opt, out);
  refine(f, m, b, right, 0.5 * tol, depth + 1, opt, out);
}

template <typename T>
Accum<T> run(const std::function<T(double)>& f, double a, double b,
             const Options& opt) {
  Accum<T> acc;
  if (a == b) return acc;
  const T whole = panel15(f, a, b, acc.evals);
  acc.noise = 4e-16 * std::abs(whole);
  refine(f, a, b, whole, opt.abs_tol, 0, opt, acc);
  return acc;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt) {
  auto acc = run<double>(f, a, b, opt);
  return {acc.value, acc.error, acc.evals};
}

ComplexResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                        double a, double b, Options opt) {
  auto acc = run<std::complex<double>>(f, a, b, opt);
  return {acc.value, acc.error, acc.evals};
}

Result integrate_to_inf(const std::function<double(double)>& f, double a,
                        double scale, Options opt) {
  if (scale <= 0.0) throw std::invalid_argument("integrate_to_inf: scale > 0");
  auto g = [&](double u) { return f(a - scale * std::log(u)) * scale / u; };
  auto acc = run<double>(g, 0.0, 1.0, opt);
  return {acc.value, acc.error, acc.evals};
}

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

std::vector<double> parallel_map(const std::function<double(std::size_t)>& f,
                                 std::size_t n) {
  std::vector<double> out(n);
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* cap = std::getenv("LIFSHITZ_LAB_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v >= 1) workers = std::min<unsigned>(workers, (unsigned)v);
    } catch (const std::exception&) {
      // unparsable cap: keep the hardware default
    }
  }
  workers = std::min<unsigned>(workers, n == 0 ? 1 : (unsigned)std::min<std::size_t>(n, 256));
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        out[i] = f(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace lifshitz::quad

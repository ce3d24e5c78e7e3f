#pragma once

// Quadrature and small special-function helpers shared by every module.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace roekit {

using cplx = std::complex<double>;

/// Thrown when a numerical procedure cannot meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

inline constexpr double pi = 3.141592653589793238462643383279502884;

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980765469, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }

template <class T, class F>
Panel<T> kronrod21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * kWgk[10];
  T gauss = T{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    T s = f(c - dx) + f(c + dx);
    kron += s * kWgk[j];
    if (j % 2 == 1) gauss += s * kWg[j / 2];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) over the panels delimited by
/// `breaks`. Works for real or complex integrands.
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const QuadOptions& opt = {})
    -> QuadResult<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (breaks.size() < 2) throw std::invalid_argument("integrate: need at least two break points");
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] >= breaks[i])) throw std::invalid_argument("integrate: break points must ascend");
    if (breaks[i + 1] == breaks[i]) continue;
    auto p = detail::kronrod21<T>(f, breaks[i], breaks[i + 1]);
    evals += 21;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  QuadResult<T> out;
  while (!heap.empty()) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total));
    if (err <= target) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted at machine precision
    auto left = detail::kronrod21<T>(f, worst.a, mid);
    auto right = detail::kronrod21<T>(f, mid, worst.b);
    evals += 42;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  if (heap.empty()) out.converged = true;
  // Recompute the sums from the panels to shed accumulated round-off.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  out.evaluations = evals;
  if (!out.converged) out.converged = esum <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(sum));
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const std::array<double, 2> br{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(br), opt);
}

/// Same as integrate() but throws NumericalError when the tolerance is not met.
template <class F>
auto integrate_or_throw(F&& f, std::span<const double> breaks, const QuadOptions& opt,
                        const std::string& what) {
  auto r = integrate(std::forward<F>(f), breaks, opt);
  if (!r.converged) {
    throw NumericalError(what + ": quadrature did not converge (error estimate " +
                         std::to_string(r.error) + ")");
  }
  return r;
}

/// Nodes and weights of a fixed Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// n-point Gauss-Gegenbauer rule for the weight (1 - x^2)^(alpha - 1/2) on
/// [-1, 1], alpha > -1/2. Built with the Golub-Welsch eigenvalue method.
GaussRule gauss_gegenbauer(int n, double alpha);

/// log(sinh x) for x > 0 without overflow.
double log_sinh(double x);

/// log(cosh x) without overflow.
double log_cosh(double x);

/// coth x for x != 0.
double coth(double x);

/// Surface area of the unit sphere S^{k-1} in R^k (k >= 1; |S^0| = 2).
double sphere_area(int k);

/// Angle of z mapped into [0, 2*pi).
double phase_0_2pi(const cplx& z);

/// Evenly spaced grid with `count` points from a to b inclusive.
std::vector<double> linspace(double a, double b, int count);

/// Grid a, a+h, ..., up to and including b (b is appended if the last step
/// falls short by more than h/1000).
std::vector<double> arange_inclusive(double a, double b, double h);

}  // namespace numerics
}  // namespace roekit

#include "roekit/numerics.hpp"

#include <Eigen/Eigenvalues>

namespace roekit::numerics {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  if (n == 1) return {{0.0}, {2.0}};
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

GaussRule gauss_gegenbauer(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_gegenbauer: n must be positive");
  if (!(alpha > -0.5)) throw std::invalid_argument("gauss_gegenbauer: alpha must exceed -1/2");
  // Monic recurrence x p_k = p_{k+1} + b_k p_{k-1} for the symmetric Jacobi
  // weight with a = b = alpha - 1/2.
  const double a = alpha - 0.5;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double bk;
    if (k == 1) {
      // The general expression is 0/0 at a = -1/2; its limit is 1/(2a+3).
      bk = 1.0 / (2.0 * a + 3.0);
    } else {
      const double kk = k;
      const double num = 4.0 * kk * (kk + a) * (kk + a) * (kk + 2.0 * a);
      const double den = (2.0 * kk + 2.0 * a) * (2.0 * kk + 2.0 * a) * (2.0 * kk + 2.0 * a + 1.0) *
                         (2.0 * kk + 2.0 * a - 1.0);
      bk = num / den;
    }
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(bk);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  const double mu0 = std::sqrt(pi) * std::tgamma(alpha + 0.5) / std::tgamma(alpha + 1.0);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

double log_sinh(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_sinh: argument must be positive");
  if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

double log_cosh(double x) {
  x = std::abs(x);
  return x - std::log(2.0) + std::log1p(std::exp(-2.0 * x));
}

double coth(double x) {
  if (std::abs(x) > 20.0) return x > 0 ? 1.0 + 2.0 * std::exp(-2.0 * x) : -1.0 - 2.0 * std::exp(2.0 * x);
  return std::cosh(x) / std::sinh(x);
}

double sphere_area(int k) {
  if (k < 1) throw std::invalid_argument("sphere_area: dimension must be positive");
  return 2.0 * std::pow(pi, 0.5 * k) / std::tgamma(0.5 * k);
}

double phase_0_2pi(const cplx& z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * pi;
  if (a >= 2.0 * pi) a -= 2.0 * pi;
  return a;
}

std::vector<double> linspace(double a, double b, int count) {
  if (count < 2) throw std::invalid_argument("linspace: need at least two points");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
  out.back() = b;
  return out;
}

std::vector<double> arange_inclusive(double a, double b, double h) {
  if (!(h > 0.0) || !(b >= a)) throw std::invalid_argument("arange_inclusive: bad range");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
  out.reserve(n + 2);
  for (long i = 0; i <= n; ++i) out.push_back(a + h * static_cast<double>(i));
  if (b - out.back() > h * 1e-3) out.push_back(b);
  return out;
}

}  // namespace roekit::numerics

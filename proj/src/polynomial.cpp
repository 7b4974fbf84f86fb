#include "superkrylov/polynomial.hpp"

#include <cmath>
#include <vector>

#include "superkrylov/error.hpp"

namespace superkrylov::poly {

double factorial(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "factorial of a negative number");
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

namespace {

// Coefficients of (alpha + w)^p in powers of w.
std::vector<double> binomial_expansion(int p, double alpha) {
  std::vector<double> c(static_cast<std::size_t>(p) + 1);
  double binom = 1.0;
  for (int i = 0; i <= p; ++i) {
    c[static_cast<std::size_t>(i)] = binom * std::pow(alpha, p - i);
    binom = binom * (p - i) / (i + 1);
  }
  return c;
}

}  // namespace

double shifted_product_integral(int p, double a, int q, double b, double u) {
  if (p < 0 || q < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  if (u == 0.0) return 0.0;
  // With w = u - s: a - s = (a - u) + w, and w runs over [0, u].
  const auto ca = binomial_expansion(p, a - u);
  const auto cb = binomial_expansion(q, b - u);
  double total = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i)
    for (std::size_t j = 0; j < cb.size(); ++j) {
      const int n = static_cast<int>(i + j);
      total += ca[i] * cb[j] * std::pow(u, n + 1) / (n + 1);
    }
  return total;
}

}  // namespace superkrylov::poly

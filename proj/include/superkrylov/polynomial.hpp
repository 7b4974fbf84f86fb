#pragma once

namespace superkrylov::poly {

/// int_0^u (a - s)^p (b - s)^q ds for integers p, q >= 0, evaluated exactly
/// by expanding about s = u so that every term is nonnegative when u <= a, b.
double shifted_product_integral(int p, double a, int q, double b, double u);

double factorial(int n);

}  // namespace superkrylov::poly

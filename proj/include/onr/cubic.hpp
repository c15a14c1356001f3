#pragma once

#include <array>
#include <complex>

namespace onr {

// Roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 != 0) by the trigonometric /
// Cardano closed form. When all three roots are real they are returned in
// ascending order with zero imaginary parts; otherwise roots[0] is the real
// root and roots[1], roots[2] are the conjugate pair (imag > 0 first).
// No refinement is applied.
std::array<std::complex<double>, 3> cubic_roots(double c3, double c2, double c1, double c0);

// Newton refinement of an approximate real root of the same cubic. Stops
// after max_steps or as soon as a step fails to reduce |p(x)|.
double polish_cubic_root(double c3, double c2, double c1, double c0, double x, int max_steps = 4);

}  // namespace onr

#include "onr/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace onr {

std::array<std::complex<double>, 3> cubic_roots(double c3, double c2, double c1, double c0) {
    if (c3 == 0.0) throw std::domain_error("cubic_roots: leading coefficient is zero");
    const double a = c2 / c3;
    const double b = c1 / c3;
    const double c = c0 / c3;

    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    const double shift = a / 3.0;

    std::array<std::complex<double>, 3> out{};
    if (r * r < q * q * q) {
        const double sq = std::sqrt(q);
        const double theta = std::acos(std::clamp(r / (sq * sq * sq), -1.0, 1.0));
        constexpr double two_pi = 2.0 * std::numbers::pi;
        std::array<double, 3> x{-2.0 * sq * std::cos(theta / 3.0) - shift,
                                -2.0 * sq * std::cos((theta + two_pi) / 3.0) - shift,
                                -2.0 * sq * std::cos((theta - two_pi) / 3.0) - shift};
        std::sort(x.begin(), x.end());
        for (int i = 0; i < 3; ++i) out[i] = {x[i], 0.0};
        return out;
    }

    const double big = std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q));
    const double A = r > 0.0 ? -big : big;
    const double B = A != 0.0 ? q / A : 0.0;
    const double re = -0.5 * (A + B) - shift;
    const double im = 0.5 * std::sqrt(3.0) * std::abs(A - B);
    out[0] = {A + B - shift, 0.0};
    out[1] = {re, im};
    out[2] = {re, -im};
    return out;
}

double polish_cubic_root(double c3, double c2, double c1, double c0, double x, int max_steps) {
    auto eval = [&](double t) { return ((c3 * t + c2) * t + c1) * t + c0; };
    auto deriv = [&](double t) { return (3.0 * c3 * t + 2.0 * c2) * t + c1; };
    double fx = eval(x);
    for (int i = 0; i < max_steps && fx != 0.0; ++i) {
        const double d = deriv(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double next = x - fx / d;
        const double fn = eval(next);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = next;
        fx = fn;
    }
    return x;
}

}  // namespace onr

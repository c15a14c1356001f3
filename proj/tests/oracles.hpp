#pragma once

// Independent reference computations for the tests. Nothing here calls the
// cubic solver or the turning-point finder; everything is evaluated straight
// from the nonlinear input-output relation and brute-force scans.

#include <cmath>
#include <vector>

#include "onr/params.hpp"

namespace oracle {

// P_in from P_t, written out term by term.
inline double eq1_input(double output_flux, onr::Direction d, const onr::SystemParams& p) {
    const double k1 = p.kappa1();
    const double k2 = p.kappa2();
    const double kappa = k1 + k2 + p.kappa_loss();
    const double Delta = p.delta_atom();
    const double delta = p.delta_cav();
    const double gamma = p.gamma();
    const double g = p.g();
    const double omega2 = p.n_eff() * g * g;
    const double lorentz = Delta * Delta + gamma * gamma;
    const double k_out = d == onr::Direction::Forward ? k2 : k1;
    const double pct = k_out * lorentz / (g * g);
    const double y = output_flux / pct;
    const double re = kappa + omega2 * gamma / (lorentz * (1.0 + y));
    const double im = -delta + omega2 * Delta / (lorentz * (1.0 + y));
    return output_flux / (4.0 * k1 * k2) * (re * re + im * im);
}

inline double critical_flux(onr::Direction d, const onr::SystemParams& p) {
    const double k_out = d == onr::Direction::Forward ? p.kappa2() : p.kappa1();
    return k_out * (p.delta_atom() * p.delta_atom() + p.gamma() * p.gamma()) / (p.g() * p.g());
}

inline double input_at_y(double y, onr::Direction d, const onr::SystemParams& p) {
    return eq1_input(y * critical_flux(d, p), d, p);
}

inline std::vector<double> log_grid(double lo, double hi, double per_decade) {
    const int n = static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))) + 1;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

// Saturation parameters where P_in(y) crosses target: dense log scan for
// sign changes, each bracket bisected to machine precision.
inline std::vector<double> scan_roots(double target, onr::Direction d, const onr::SystemParams& p,
                                      double y_lo = 1e-12, double y_hi = 1e14,
                                      double per_decade = 2000.0) {
    const auto grid = log_grid(y_lo, y_hi, per_decade);
    auto f = [&](double y) { return input_at_y(y, d, p) - target; };
    std::vector<double> roots;
    double prev = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = f(grid[i]);
        if ((prev < 0.0) != (cur < 0.0)) {
            double a = grid[i - 1], b = grid[i];
            double fa = prev;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (m == a || m == b) break;
                const double fm = f(m);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    return roots;
}

struct Extremum {
    double y = 0.0;
    double input = 0.0;
    bool is_max = false;
};

// Local extrema of P_in(y) from a dense scan followed by ternary search.
inline std::vector<Extremum> scan_extrema(onr::Direction d, const onr::SystemParams& p,
                                          double y_lo = 1e-6, double y_hi = 1e8,
                                          double per_decade = 2000.0) {
    const auto grid = log_grid(y_lo, y_hi, per_decade);
    auto f = [&](double y) { return input_at_y(y, d, p); };
    std::vector<Extremum> out;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double a = f(grid[i - 1]), b = f(grid[i]), c = f(grid[i + 1]);
        const bool is_max = b > a && b >= c;
        const bool is_min = b < a && b <= c;
        if (!is_max && !is_min) continue;
        // Ternary search in log y.
        double lo = std::log(grid[i - 1]), hi = std::log(grid[i + 1]);
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            const double f1 = f(std::exp(m1)), f2 = f(std::exp(m2));
            if ((f1 < f2) == is_max) lo = m1;
            else hi = m2;
        }
        const double y = std::exp(0.5 * (lo + hi));
        out.push_back({y, f(y), is_max});
    }
    return out;
}

}  // namespace oracle

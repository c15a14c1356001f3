#include "onr/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "onr/cubic.hpp"

namespace onr {

namespace {

constexpr double kMergeTolerance = 1e-9;

}  // namespace

ResponseShape ResponseShape::from(const SystemParams& p) {
    const double kappa = p.total_kappa();
    const double denom = p.delta_atom() * p.delta_atom() + p.gamma() * p.gamma();
    const double omega2 = p.n_eff() * p.g() * p.g();
    // Everything in units of kappa.
    const double G = omega2 * p.gamma() / denom / kappa;
    const double H = omega2 * p.delta_atom() / denom / kappa;
    const double delta = p.delta_cav() / kappa;

    ResponseShape s;
    s.a = 1.0 + delta * delta;
    s.b = 2.0 * (G - delta * H);
    s.c = G * G + H * H;
    return s;
}

double ResponseShape::value(double y) const {
    const double u = 1.0 + y;
    return y * (a + b / u + c / (u * u));
}

double ResponseShape::slope(double y) const {
    const double u = 1.0 + y;
    return a + b / u + c / (u * u) - y * (b / (u * u) + 2.0 * c / (u * u * u));
}

double input_scale(Direction d, const SystemParams& p) {
    const double kappa = p.total_kappa();
    return p.critical_flux(d) * kappa * kappa / (4.0 * p.kappa1() * p.kappa2());
}

double input_for_saturation(double y, Direction d, const SystemParams& p) {
    if (y < 0.0) throw std::domain_error("saturation parameter must be non-negative");
    return input_scale(d, p) * ResponseShape::from(p).value(y);
}

double input_for_output(double output_flux, Direction d, const SystemParams& p) {
    if (output_flux < 0.0) throw std::domain_error("output flux must be non-negative");
    return input_for_saturation(output_flux / p.critical_flux(d), d, p);
}

double input_slope(double y, Direction d, const SystemParams& p) {
    return input_scale(d, p) * ResponseShape::from(p).slope(y);
}

std::vector<SteadyStateSolution> output_for_input(double input_flux, Direction d,
                                                  const SystemParams& p) {
    if (!(input_flux >= 0.0) || !std::isfinite(input_flux)) {
        throw std::domain_error("input flux must be finite and non-negative");
    }
    const double pct = p.critical_flux(d);
    auto make = [&](double y, bool degenerate) {
        SteadyStateSolution s;
        s.y = y;
        s.output_flux = y * pct;
        s.input_flux = input_flux;
        s.degenerate = degenerate;
        s.stable = degenerate || ResponseShape::from(p).slope(y) >= 0.0;
        return s;
    };

    if (input_flux == 0.0) return {make(0.0, false)};

    const ResponseShape shape = ResponseShape::from(p);
    const double k = input_flux / input_scale(d, p);

    if (p.n_eff() == 0.0) return {make(k / shape.a, false)};

    const double c3 = shape.a;
    const double c2 = 2.0 * shape.a + shape.b - k;
    const double c1 = shape.a + shape.b + shape.c - 2.0 * k;
    const double c0 = -k;

    const auto raw = cubic_roots(c3, c2, c1, c0);
    const bool three_real = raw[1].imag() == 0.0;

    std::vector<double> ys;
    if (three_real) {
        for (const auto& r : raw) ys.push_back(polish_cubic_root(c3, c2, c1, c0, r.real()));
    } else {
        ys.push_back(polish_cubic_root(c3, c2, c1, c0, raw[0].real()));
    }
    std::sort(ys.begin(), ys.end());

    auto near_input = [&](double y) {
        return y > 0.0 && std::abs(shape.value(y) - k) <= kMergeTolerance * k;
    };

    std::vector<SteadyStateSolution> out;
    if (three_real) {
        // Merge adjacent roots whose separating extremum touches the input.
        std::size_t i = 0;
        while (i < ys.size()) {
            if (i + 1 < ys.size() && ys[i] > 0.0 && near_input(0.5 * (ys[i] + ys[i + 1]))) {
                out.push_back(make(0.5 * (ys[i] + ys[i + 1]), true));
                i += 2;
                continue;
            }
            if (ys[i] > 0.0) out.push_back(make(ys[i], false));
            ++i;
        }
    } else {
        if (ys[0] > 0.0) out.push_back(make(ys[0], false));
        // A nearly real conjugate pair just below a saddle node.
        const double re = raw[1].real();
        const double im = std::abs(raw[1].imag());
        if (re > 0.0 && im <= 1e-2 * re) {
            // Stationary point of the cubic closest to the pair's real part.
            double guess = re;
            const double disc = c2 * c2 - 3.0 * c3 * c1;
            if (disc >= 0.0) {
                const double s = std::sqrt(disc);
                const double y1 = (-c2 - s) / (3.0 * c3);
                const double y2 = (-c2 + s) / (3.0 * c3);
                const double y = std::abs(y1 - re) < std::abs(y2 - re) ? y1 : y2;
                if (std::abs(y - re) <= im) guess = y;
            }
            if (near_input(guess)) {
                out.push_back(make(guess, true));
                std::sort(out.begin(), out.end(),
                          [](const auto& l, const auto& r) { return l.y < r.y; });
            }
        }
    }
    return out;
}

double linear_transmission(Direction, const SystemParams& p) {
    const ResponseShape shape = ResponseShape::from(p);
    // R'(0) = a + b + c, so T = 4 k1 k2 / (k^2 R'(0)).
    return p.empty_cavity_transmission() / (shape.a + shape.b + shape.c);
}

double approx_forward_output(double input_flux, const SystemParams& p) {
    if (input_flux < 0.0) throw std::domain_error("input flux must be non-negative");
    const double offset = 2.0 * p.n_eff() * p.kappa2() * p.gamma() / p.total_kappa();
    return std::max(p.empty_cavity_transmission() * input_flux - offset, 0.0);
}

double approx_backward_output(double input_flux, const SystemParams& p) {
    if (input_flux < 0.0) throw std::domain_error("input flux must be non-negative");
    const double s = 1.0 + 2.0 * p.cooperativity();
    return p.empty_cavity_transmission() * input_flux / (s * s);
}

BlockingRatio blocking_ratio_simplified(const SystemParams& p) {
    const double s = 1.0 + 2.0 * p.cooperativity();
    return {s * s, to_db(s * s)};
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace onr

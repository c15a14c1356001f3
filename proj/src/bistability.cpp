#include "onr/bistability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "onr/errors.hpp"

namespace onr {

namespace {

constexpr double kGridPerDecade = 400.0;
constexpr double kRefineTolerance = 1e-12;
constexpr double kScanFloor = 1e-6;

// Bisection on a bracketed sign change of f.
template <typename F>
double bisect(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && (hi - lo) > kRefineTolerance * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

const SteadyStateSolution* highest_stable(const std::vector<SteadyStateSolution>& sols) {
    for (auto it = sols.rbegin(); it != sols.rend(); ++it) {
        if (it->stable) return &*it;
    }
    return nullptr;
}

const SteadyStateSolution* lowest_stable(const std::vector<SteadyStateSolution>& sols) {
    for (const auto& s : sols) {
        if (s.stable) return &s;
    }
    return nullptr;
}

double forward_upper_photons(double flux, const SystemParams& p) {
    const auto sols = output_for_input(flux, Direction::Forward, p);
    const auto* s = highest_stable(sols);
    return s ? intracavity_photons(s->output_flux, p.kappa2()) : 0.0;
}

}  // namespace

int SCurve::unstable_segments() const {
    int segments = 0;
    bool in_unstable = false;
    for (const auto& s : samples) {
        if (!s.stable && !in_unstable) ++segments;
        in_unstable = !s.stable;
    }
    return segments;
}

SCurve scurve(Direction d, const SystemParams& p, double y_min, double y_max, int n_samples) {
    if (!(y_min > 0.0) || !(y_max > y_min) || n_samples < 2) {
        throw std::domain_error("scurve: require 0 < y_min < y_max and n_samples >= 2");
    }
    const ResponseShape shape = ResponseShape::from(p);
    const double scale = input_scale(d, p);
    const double pct = p.critical_flux(d);
    const double step = std::log(y_max / y_min) / (n_samples - 1);

    SCurve curve;
    curve.direction = d;
    curve.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double y = i == n_samples - 1 ? y_max : y_min * std::exp(step * i);
        SteadyStateSolution s;
        s.y = y;
        s.output_flux = y * pct;
        s.input_flux = scale * shape.value(y);
        s.stable = shape.slope(y) >= 0.0;
        curve.samples.push_back(s);
    }
    return curve;
}

SwitchThresholds switch_thresholds(Direction d, const SystemParams& p) {
    SwitchThresholds t;
    t.direction = d;
    if (p.n_eff() == 0.0) return t;

    const ResponseShape shape = ResponseShape::from(p);
    // Turning points satisfy a u^3 + (b - c) u + 2c = 0, so u^2 < (c - b) / a.
    if (shape.c <= shape.b) return t;
    const double y_hi = 2.0 * std::sqrt((shape.c - shape.b) / shape.a) + 1.0;
    if (y_hi <= kScanFloor) return t;

    const auto slope = [&](double y) { return shape.slope(y); };
    const int n = static_cast<int>(std::ceil(kGridPerDecade * std::log10(y_hi / kScanFloor))) + 1;
    const double ratio = std::pow(y_hi / kScanFloor, 1.0 / (n - 1));

    std::vector<double> maxima;
    std::vector<double> minima;
    double y_prev = kScanFloor;
    double s_prev = slope(y_prev);
    for (int i = 1; i < n; ++i) {
        const double y = i == n - 1 ? y_hi : kScanFloor * std::pow(ratio, i);
        const double s = slope(y);
        if ((s_prev > 0.0) != (s > 0.0)) {
            const double root = bisect(slope, y_prev, y);
            (s_prev > 0.0 ? maxima : minima).push_back(root);
        }
        y_prev = y;
        s_prev = s;
    }

    if (maxima.size() == 1 && minima.size() == 1 && maxima[0] < minima[0]) {
        const double scale = input_scale(d, p);
        t.bistable = true;
        t.up_switch_y = maxima[0];
        t.down_switch_y = minima[0];
        t.up_switch_flux = scale * shape.value(maxima[0]);
        t.down_switch_flux = scale * shape.value(minima[0]);
    }
    return t;
}

std::optional<std::pair<double, double>> resonant_turning_points(const SystemParams& p) {
    const double A = p.total_kappa();
    const double B = p.n_eff() * p.g() * p.g() / p.gamma();
    const double disc = B * B - 8.0 * A * B;
    if (!(disc > 0.0)) return std::nullopt;
    const double root = std::sqrt(disc);
    // Smaller root via the product u- u+ = 2B/A to avoid cancellation.
    const double u_plus = (B + root) / (2.0 * A);
    const double u_minus = 2.0 * B / (A * u_plus);
    return std::make_pair(u_minus - 1.0, u_plus - 1.0);
}

std::string_view to_string(WindowConvention c) {
    return c == WindowConvention::Guaranteed ? "guaranteed" : "hysteretic";
}

WindowConvention parse_convention(std::string_view text) {
    if (text == "guaranteed") return WindowConvention::Guaranteed;
    if (text == "hysteretic") return WindowConvention::Hysteretic;
    throw std::invalid_argument("unknown window convention '" + std::string(text) +
                                "' (expected guaranteed|hysteretic)");
}

OnrWindow onr_window(const SystemParams& p, WindowConvention convention) {
    OnrWindow w;
    w.convention = convention;
    const auto fwd = switch_thresholds(Direction::Forward, p);
    const auto bwd = switch_thresholds(Direction::Backward, p);
    if (!fwd.bistable || !bwd.bistable) return w;

    if (convention == WindowConvention::Guaranteed) {
        w.p_lower = *fwd.up_switch_flux;
        w.p_upper = *bwd.down_switch_flux;
    } else {
        w.p_lower = *fwd.down_switch_flux;
        w.p_upper = *bwd.up_switch_flux;
    }
    w.nonempty = w.p_lower < w.p_upper;
    if (w.nonempty) {
        w.photons_lower = forward_upper_photons(w.p_lower, p);
        w.photons_upper = forward_upper_photons(w.p_upper, p);
    }
    return w;
}

BranchPair select_branches(double input_flux, const SystemParams& p) {
    const auto f = output_for_input(input_flux, Direction::Forward, p);
    const auto b = output_for_input(input_flux, Direction::Backward, p);
    const auto* fs = highest_stable(f);
    const auto* bs = lowest_stable(b);
    if (!fs || !bs) throw std::runtime_error("no stable steady state found");
    return {*fs, *bs};
}

WindowMetrics window_metrics(const SystemParams& p, const OnrWindow& window, int n_power_samples) {
    if (!window.nonempty) throw EmptyWindowError("window_metrics: the ONR window is empty");
    if (n_power_samples < 1) throw std::domain_error("window_metrics: need at least one sample");

    WindowMetrics m;
    const double width = window.p_upper - window.p_lower;
    double sum_t = 0.0;
    double sum_db = 0.0;
    for (int i = 0; i < n_power_samples; ++i) {
        const double flux = window.p_lower + (i + 0.5) / n_power_samples * width;
        const auto br = select_branches(flux, p);
        sum_t += br.forward.output_flux / flux;
        sum_db += to_db(br.forward.output_flux / br.backward.output_flux);
    }
    m.samples = n_power_samples;
    m.mean_forward_transmission = sum_t / n_power_samples;
    m.mean_blocking_ratio_db = sum_db / n_power_samples;
    return m;
}

AtomNumberSweep sweep_atom_number(const SystemParams& base, const std::vector<double>& n_eff_values,
                                  int n_power_samples) {
    if (n_eff_values.empty()) throw std::domain_error("sweep_atom_number: empty n_eff list");

    AtomNumberSweep sweep;
    sweep.rows.reserve(n_eff_values.size());
    for (double n : n_eff_values) {
        const SystemParams p = base.with_n_eff(n);
        SweepRow row;
        row.n_eff = n;
        row.cooperativity = p.cooperativity();
        row.simplified = blocking_ratio_simplified(p);
        row.forward = switch_thresholds(Direction::Forward, p);
        row.backward = switch_thresholds(Direction::Backward, p);
        row.guaranteed = onr_window(p, WindowConvention::Guaranteed);
        row.hysteretic = onr_window(p, WindowConvention::Hysteretic);
        if (row.guaranteed.nonempty) {
            row.guaranteed_metrics = window_metrics(p, row.guaranteed, n_power_samples);
        }
        if (row.hysteretic.nonempty) {
            row.hysteretic_metrics = window_metrics(p, row.hysteretic, n_power_samples);
        }
        sweep.rows.push_back(row);
    }

    const SweepRow* prev_t = nullptr;
    const SweepRow* prev_g = nullptr;
    const SweepRow* prev_h = nullptr;
    for (const auto& row : sweep.rows) {
        if (row.forward.bistable) {
            if (prev_t && (*row.forward.up_switch_flux < *prev_t->forward.up_switch_flux ||
                           *row.forward.down_switch_flux < *prev_t->forward.down_switch_flux)) {
                sweep.thresholds_nondecreasing = false;
            }
            prev_t = &row;
        }
        if (row.guaranteed.nonempty) {
            if (prev_g && (row.guaranteed.p_lower < prev_g->guaranteed.p_lower ||
                           row.guaranteed.p_upper < prev_g->guaranteed.p_upper)) {
                sweep.windows_nondecreasing = false;
            }
            prev_g = &row;
        }
        if (row.hysteretic.nonempty) {
            if (prev_h && (row.hysteretic.p_lower < prev_h->hysteretic.p_lower ||
                           row.hysteretic.p_upper < prev_h->hysteretic.p_upper)) {
                sweep.windows_nondecreasing = false;
            }
            prev_h = &row;
        }
    }
    return sweep;
}

}  // namespace onr

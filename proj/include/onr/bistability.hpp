#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "onr/params.hpp"
#include "onr/steady_state.hpp"

namespace onr {

struct SCurve {
    Direction direction = Direction::Forward;
    std::vector<SteadyStateSolution> samples;  // strictly increasing in y

    // Number of maximal runs of unstable samples.
    int unstable_segments() const;
};

// Steady-state branch sampled on a log grid y in [y_min, y_max].
SCurve scurve(Direction d, const SystemParams& p, double y_min, double y_max, int n_samples);

struct SwitchThresholds {
    Direction direction = Direction::Forward;
    bool bistable = false;
    // Local maximum of P_in(y): the lower branch ends here on an upward sweep.
    std::optional<double> up_switch_flux;
    // Local minimum of P_in(y): the upper branch ends here on a downward sweep.
    std::optional<double> down_switch_flux;
    std::optional<double> up_switch_y;
    std::optional<double> down_switch_y;
};

// Turning points of P_in(y) found by bracketing sign changes of dP_in/dy on
// a 400-points-per-decade log grid, refined by bisection to 1e-12 relative.
SwitchThresholds switch_thresholds(Direction d, const SystemParams& p);

// Closed-form turning points at Delta = delta = 0: u = [B +- sqrt(B^2 - 8 kappa B)] / (2 kappa)
// with B = Omega^2 / gamma and u = 1 + y. Returns (y_up, y_down), or nothing
// below the onset C = 4. Ignores the detunings in p.
std::optional<std::pair<double, double>> resonant_turning_points(const SystemParams& p);

enum class WindowConvention {
    Guaranteed,  // [up(F), down(B)]: both directions single-valued on the intended branch
    Hysteretic,  // [down(F), up(B)]: reachable with an upward power sweep
};

std::string_view to_string(WindowConvention c);
WindowConvention parse_convention(std::string_view text);

struct OnrWindow {
    WindowConvention convention = WindowConvention::Guaranteed;
    double p_lower = 0.0;  // photon flux (1/s)
    double p_upper = 0.0;
    bool nonempty = false;
    // Forward upper-branch intracavity photon number at the two edges.
    double photons_lower = 0.0;
    double photons_upper = 0.0;
};

OnrWindow onr_window(const SystemParams& p, WindowConvention convention);

struct WindowMetrics {
    double mean_forward_transmission = 0.0;
    double mean_blocking_ratio_db = 0.0;
    int samples = 0;
};

// Averages over n_power_samples evenly spaced interior powers of the window.
// Forward uses the highest stable output, backward the lowest. Throws
// EmptyWindowError for an empty window.
WindowMetrics window_metrics(const SystemParams& p, const OnrWindow& window, int n_power_samples);

// Forward/backward branch outputs at one input flux, chosen as in window_metrics.
struct BranchPair {
    SteadyStateSolution forward;
    SteadyStateSolution backward;
};
BranchPair select_branches(double input_flux, const SystemParams& p);

struct SweepRow {
    double n_eff = 0.0;
    double cooperativity = 0.0;
    BlockingRatio simplified;
    SwitchThresholds forward;
    SwitchThresholds backward;
    OnrWindow guaranteed;
    OnrWindow hysteretic;
    std::optional<WindowMetrics> guaranteed_metrics;
    std::optional<WindowMetrics> hysteretic_metrics;
};

struct AtomNumberSweep {
    std::vector<SweepRow> rows;  // same order as the requested n_eff values
    // Over rows with nonempty windows, taken in input order.
    bool thresholds_nondecreasing = true;
    bool windows_nondecreasing = true;
};

AtomNumberSweep sweep_atom_number(const SystemParams& base, const std::vector<double>& n_eff_values,
                                  int n_power_samples = 40);

}  // namespace onr

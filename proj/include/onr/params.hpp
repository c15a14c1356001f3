#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace onr {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Rates are stored as angular frequencies (rad/s). The user-facing unit is
// "MHz" in the sense rate / 2pi, the usual cavity-QED quoting convention.
constexpr double mhz_to_rate(double mhz) { return kTwoPi * 1e6 * mhz; }
constexpr double rate_to_mhz(double rate) { return rate / (kTwoPi * 1e6); }

enum class Direction {
    Forward,   // input through M1 (mode a), output through M2
    Backward,  // input through M2 (mode b), output through M1
};

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

// Field decay rate of a Fabry-Perot mirror with power transmission T (ppm)
// at mirror spacing L: kappa = c T / (4 L).
double mirror_ppm_to_rate(double transmission_ppm, double cavity_length);
double rate_to_mirror_ppm(double rate, double cavity_length);

// Photon flux (1/s) of an optical power (W) at the given wavelength.
double power_to_flux(double power, double wavelength);
double flux_to_power(double flux, double wavelength);

// Mean intracavity photon number from the flux leaking through a mirror
// with field decay rate output_kappa: n = flux / (2 kappa_out).
double intracavity_photons(double output_flux, double output_kappa);

/// Validated cavity + atom parameter set.
///
/// All rates are angular (rad/s) field decay / coupling rates. Detunings are
/// Delta = w_atom - w_probe and delta = w_cavity - w_probe. Construction
/// throws std::domain_error on any invariant violation; values are never
/// clamped.
class SystemParams {
public:
    struct Fields {
        double kappa1 = 0.0;
        double kappa2 = 0.0;
        double kappa_loss = 0.0;
        double g = 0.0;
        double gamma = 0.0;
        double n_eff = 0.0;
        double delta_atom = 0.0;
        double delta_cav = 0.0;
        double wavelength = 852.3e-9;
        double cavity_length = 335e-6;
    };

    explicit SystemParams(const Fields& fields);

    const Fields& fields() const { return f_; }

    double kappa1() const { return f_.kappa1; }
    double kappa2() const { return f_.kappa2; }
    double kappa_loss() const { return f_.kappa_loss; }
    double g() const { return f_.g; }
    double gamma() const { return f_.gamma; }
    double n_eff() const { return f_.n_eff; }
    double delta_atom() const { return f_.delta_atom; }
    double delta_cav() const { return f_.delta_cav; }
    double wavelength() const { return f_.wavelength; }
    double cavity_length() const { return f_.cavity_length; }

    double total_kappa() const { return f_.kappa1 + f_.kappa2 + f_.kappa_loss; }
    double collective_coupling() const;  // Omega = sqrt(N) g
    double cooperativity() const;        // C = N g^2 / (2 kappa gamma)

    // 4 kappa1 kappa2 / kappa^2: resonant empty-cavity transmission.
    double empty_cavity_transmission() const;

    double input_kappa(Direction d) const;
    double output_kappa(Direction d) const;

    // Saturation reference flux P_ct = kappa_out (Delta^2 + gamma^2) / g^2.
    double critical_flux(Direction d) const;

    SystemParams with_n_eff(double n_eff) const;
    SystemParams with_detunings(double delta_atom, double delta_cav) const;

private:
    Fields f_;
};

// Named parameter sets. "paper-fig2" is the experimental configuration
// (N_eff = 12.8, probe on cavity resonance, Delta - delta = -2pi x 0.64 MHz);
// "paper-resonant" is the same with Delta = delta = 0.
SystemParams preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace onr

#include "onr/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace onr {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw std::domain_error(what);
    }
}

bool finite_all(const SystemParams::Fields& f) {
    for (double v : {f.kappa1, f.kappa2, f.kappa_loss, f.g, f.gamma, f.n_eff, f.delta_atom,
                     f.delta_cav, f.wavelength, f.cavity_length}) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

SystemParams::Fields experiment_fields() {
    SystemParams::Fields f;
    f.kappa1 = mhz_to_rate(3.1);
    f.kappa2 = mhz_to_rate(0.2);
    f.kappa_loss = mhz_to_rate(0.4);
    f.g = mhz_to_rate(5.5);
    f.gamma = mhz_to_rate(2.6);
    f.n_eff = 12.8;
    f.delta_atom = mhz_to_rate(-0.64);
    f.delta_cav = 0.0;
    f.wavelength = 852.3e-9;
    f.cavity_length = 335e-6;
    return f;
}

}  // namespace

std::string_view to_string(Direction d) {
    return d == Direction::Forward ? "forward" : "backward";
}

Direction parse_direction(std::string_view text) {
    if (text == "forward" || text == "a") return Direction::Forward;
    if (text == "backward" || text == "b") return Direction::Backward;
    throw std::invalid_argument("unknown direction '" + std::string(text) +
                                "' (expected forward|backward)");
}

double mirror_ppm_to_rate(double transmission_ppm, double cavity_length) {
    require(transmission_ppm > 0.0, "mirror transmission must be positive");
    require(cavity_length > 0.0, "cavity length must be positive");
    return kSpeedOfLight * transmission_ppm * 1e-6 / (4.0 * cavity_length);
}

double rate_to_mirror_ppm(double rate, double cavity_length) {
    require(rate > 0.0, "decay rate must be positive");
    require(cavity_length > 0.0, "cavity length must be positive");
    return rate * 4.0 * cavity_length / kSpeedOfLight * 1e6;
}

double power_to_flux(double power, double wavelength) {
    require(power >= 0.0, "optical power must be non-negative");
    require(wavelength > 0.0, "wavelength must be positive");
    return power * wavelength / (kPlanck * kSpeedOfLight);
}

double flux_to_power(double flux, double wavelength) {
    require(flux >= 0.0, "photon flux must be non-negative");
    require(wavelength > 0.0, "wavelength must be positive");
    return flux * kPlanck * kSpeedOfLight / wavelength;
}

double intracavity_photons(double output_flux, double output_kappa) {
    require(output_kappa > 0.0, "output coupling rate must be positive");
    require(output_flux >= 0.0, "output flux must be non-negative");
    return output_flux / (2.0 * output_kappa);
}

SystemParams::SystemParams(const Fields& fields) : f_(fields) {
    require(finite_all(f_), "system parameters must be finite");
    require(f_.kappa1 > 0.0, "kappa1 must be positive");
    require(f_.kappa2 > 0.0, "kappa2 must be positive");
    require(f_.kappa_loss >= 0.0, "kappa_loss must be non-negative");
    require(f_.g > 0.0, "g must be positive");
    require(f_.gamma > 0.0, "gamma must be positive");
    require(f_.n_eff >= 0.0, "n_eff must be non-negative");
    require(f_.wavelength > 0.0, "wavelength must be positive");
    require(f_.cavity_length > 0.0, "cavity length must be positive");
}

double SystemParams::collective_coupling() const { return std::sqrt(f_.n_eff) * f_.g; }

double SystemParams::cooperativity() const {
    return f_.n_eff * f_.g * f_.g / (2.0 * total_kappa() * f_.gamma);
}

double SystemParams::empty_cavity_transmission() const {
    const double k = total_kappa();
    return 4.0 * f_.kappa1 * f_.kappa2 / (k * k);
}

double SystemParams::input_kappa(Direction d) const {
    return d == Direction::Forward ? f_.kappa1 : f_.kappa2;
}

double SystemParams::output_kappa(Direction d) const {
    return d == Direction::Forward ? f_.kappa2 : f_.kappa1;
}

double SystemParams::critical_flux(Direction d) const {
    return output_kappa(d) * (f_.delta_atom * f_.delta_atom + f_.gamma * f_.gamma) /
           (f_.g * f_.g);
}

SystemParams SystemParams::with_n_eff(double n_eff) const {
    Fields f = f_;
    f.n_eff = n_eff;
    return SystemParams(f);
}

SystemParams SystemParams::with_detunings(double delta_atom, double delta_cav) const {
    Fields f = f_;
    f.delta_atom = delta_atom;
    f.delta_cav = delta_cav;
    return SystemParams(f);
}

SystemParams preset(std::string_view name) {
    if (name == "paper-fig2") {
        return SystemParams(experiment_fields());
    }
    if (name == "paper-resonant") {
        auto f = experiment_fields();
        f.delta_atom = 0.0;
        return SystemParams(f);
    }
    if (name == "paper-matched") {
        // Impedance-matched mirror split at the same total kappa and loss.
        auto f = experiment_fields();
        f.kappa1 = mhz_to_rate(1.85);
        f.kappa2 = mhz_to_rate(1.45);
        return SystemParams(f);
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"paper-fig2", "paper-resonant", "paper-matched"}; }

}  // namespace onr

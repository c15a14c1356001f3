#include "onr/designer.hpp"

#include <cmath>
#include <stdexcept>

#include "onr/errors.hpp"

namespace onr {

MirrorSplit optimal_mirror_split(double total_kappa, double kappa_loss) {
    if (!(kappa_loss >= 0.0)) throw std::domain_error("kappa_loss must be non-negative");
    if (!(total_kappa > 2.0 * kappa_loss)) {
        throw InfeasibleDesignError(
            "no impedance-matched design: total kappa must exceed twice the loss rate "
            "(kappa = " + std::to_string(rate_to_mhz(total_kappa)) + " MHz, kappa_loss = " +
                std::to_string(rate_to_mhz(kappa_loss)) + " MHz)",
            total_kappa, kappa_loss);
    }
    MirrorSplit s;
    s.kappa1 = 0.5 * total_kappa;
    s.kappa2 = s.kappa1 - kappa_loss;
    s.transmission = 4.0 * s.kappa1 * s.kappa2 / (total_kappa * total_kappa);
    s.asymmetric = s.kappa1 > s.kappa2;
    return s;
}

RequiredAtoms required_neff_for_blocking(double target_db, const SystemParams& params_template) {
    if (!(target_db >= 0.0)) throw std::domain_error("target blocking ratio must be >= 0 dB");
    // (1 + 2C)^2 = 10^(dB/10)  =>  C = (10^(dB/20) - 1) / 2.
    const double c = 0.5 * (std::pow(10.0, target_db / 20.0) - 1.0);
    const double g = params_template.g();
    const double n = 2.0 * params_template.total_kappa() * params_template.gamma() * c / (g * g);

    RequiredAtoms r;
    r.continuous = n;
    r.ceiling = std::ceil(n);
    // Guard the ceiling against round-off in the inversion.
    while (r.ceiling > 0.0 &&
           blocking_ratio_simplified(params_template.with_n_eff(r.ceiling - 1.0)).db >= target_db) {
        r.ceiling -= 1.0;
    }
    while (blocking_ratio_simplified(params_template.with_n_eff(r.ceiling)).db < target_db) {
        r.ceiling += 1.0;
    }
    return r;
}

DesignReport design_report(const SystemParams& params, std::optional<double> target_blocking_db) {
    DesignReport r(params);
    r.transmission = params.empty_cavity_transmission();
    r.cooperativity = params.cooperativity();
    r.blocking = blocking_ratio_simplified(params);
    r.guaranteed = onr_window(params, WindowConvention::Guaranteed);
    r.hysteretic = onr_window(params, WindowConvention::Hysteretic);
    if (r.guaranteed.nonempty) r.metrics = window_metrics(params, r.guaranteed, 40);

    try {
        r.matched = optimal_mirror_split(params.total_kappa(), params.kappa_loss());
        if (!r.matched->asymmetric) {
            r.matched_note = "matched design is symmetric (kappa1 = kappa2); no nonreciprocity";
        }
    } catch (const InfeasibleDesignError& e) {
        r.matched_note = e.what();
    }

    r.target_blocking_db = target_blocking_db;
    if (target_blocking_db) r.required_atoms = required_neff_for_blocking(*target_blocking_db, params);
    return r;
}

DesignReport design_report(const DesignInputs& in) {
    SystemParams::Fields f = in.atoms.fields();
    f.cavity_length = in.cavity_length;
    f.kappa1 = mirror_ppm_to_rate(in.t1_ppm, in.cavity_length);
    f.kappa2 = mirror_ppm_to_rate(in.t2_ppm, in.cavity_length);
    if (in.loss_ppm < 0.0) throw std::domain_error("loss_ppm must be non-negative");
    f.kappa_loss = in.loss_ppm == 0.0 ? 0.0 : mirror_ppm_to_rate(in.loss_ppm, in.cavity_length);
    return design_report(SystemParams(f), in.target_blocking_db);
}

}  // namespace onr

#pragma once

#include <optional>
#include <string>
#include <utility>

#include "onr/bistability.hpp"
#include "onr/params.hpp"

namespace onr {

struct MirrorSplit {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double transmission = 0.0;  // 4 kappa1 kappa2 / kappa^2
    bool asymmetric = false;    // kappa1 > kappa2, required for nonreciprocity
};

// Impedance-matched split kappa1 = kappa2 + kappa_loss at fixed total kappa:
// kappa1 = kappa/2, kappa2 = kappa/2 - kappa_loss, T = (kappa - 2 kappa_loss)/kappa.
// Throws InfeasibleDesignError unless total_kappa > 2 kappa_loss.
MirrorSplit optimal_mirror_split(double total_kappa, double kappa_loss);

struct RequiredAtoms {
    double continuous = 0.0;  // N solving (1 + 2C)^2 = target exactly
    double ceiling = 0.0;     // smallest integer N meeting the target
};

// Smallest atom number whose simplified blocking ratio reaches target_db,
// using kappa, g and gamma from the template.
RequiredAtoms required_neff_for_blocking(double target_db, const SystemParams& params_template);

struct DesignInputs {
    double t1_ppm = 0.0;
    double t2_ppm = 0.0;
    double loss_ppm = 0.0;
    double cavity_length = 0.0;  // m
    SystemParams atoms;          // g, gamma, n_eff, detunings, wavelength; cavity rates ignored
    std::optional<double> target_blocking_db;
};

struct DesignReport {
    explicit DesignReport(SystemParams p) : params(std::move(p)) {}

    SystemParams params;  // rates derived from the mirror ppm values
    double transmission = 0.0;
    double cooperativity = 0.0;
    BlockingRatio blocking;
    OnrWindow guaranteed;
    OnrWindow hysteretic;
    std::optional<WindowMetrics> metrics;  // over the guaranteed window
    std::optional<MirrorSplit> matched;    // absent when infeasible
    std::string matched_note;
    std::optional<RequiredAtoms> required_atoms;
    std::optional<double> target_blocking_db;
};

DesignReport design_report(const DesignInputs& in);

// Same report from an already-built parameter set (no ppm conversion).
DesignReport design_report(const SystemParams& params, std::optional<double> target_blocking_db);

}  // namespace onr

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "onr/params.hpp"

namespace onr {

struct SpectrumPoint {
    double probe_offset = 0.0;  // delta = w_cav - w_probe (rad/s)
    double transmission = 0.0;  // dimensionless, or raw counts
};

struct SpectrumData {
    std::vector<SpectrumPoint> points;

    // Throws std::domain_error unless offsets strictly increase and values are >= 0.
    void validate() const;
};

// Weak-probe transmission with the probe scanned across the cavity line:
// Delta = atom_cavity_offset + delta, where atom_cavity_offset = w_at - w_cav.
SpectrumData transmission_spectrum(const SystemParams& p, double atom_cavity_offset,
                                   std::span<const double> probe_grid);

// Offsets of the local maxima of the sampled spectrum, ascending.
std::vector<double> spectrum_peaks(const SpectrumData& s);

// Distance between the outermost two local maxima (0 for a single peak).
double peak_splitting(const SpectrumData& s);

struct FitOptions {
    bool fit_amplitude = false;   // global scale for uncalibrated counts
    bool fit_background = false;  // constant offset, e.g. detector dark counts
    double atom_cavity_offset = 0.0;
    double n_min = 1e-3;          // smallest nonzero grid value; N = 0 is always scanned
    double n_max = 1e3;
    int grid_per_decade = 30;
};

struct FitResult {
    double n_eff_hat = 0.0;
    double residual_rms = 0.0;
    double confidence_halfwidth = 0.0;  // Delta chi^2 = 1 analogue, residual-scaled
    double amplitude = 1.0;
    double background = 0.0;
    double best_grid_ssr = 0.0;  // smallest sum of squares over the coarse scan
    double ssr = 0.0;            // sum of squares at n_eff_hat
};

/// Least-squares atom number from a transmission spectrum.
///
/// Coarse scan over N = 0 and a log grid, then golden-section refinement in
/// the bracket around the best grid point. Amplitude and background, when
/// enabled, are profiled out by linear least squares at each N. Throws
/// FitError for degenerate (constant) spectra and std::domain_error for
/// fewer than five points.
FitResult fit_neff(const SpectrumData& spectrum, const SystemParams& params_known,
                   const FitOptions& options = {});

// CSV with header "offset_MHz,transmission" (second column may be counts).
SpectrumData read_spectrum_csv(std::istream& in);
void write_spectrum_csv(std::ostream& out, const SpectrumData& s);

}  // namespace onr

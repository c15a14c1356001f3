#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "onr/params.hpp"

namespace onr {

// Expected-value photon counting model: counts = (eta flux + dark) t.
struct DetectorModel {
    double quantum_efficiency = 1.0;  // (0, 1]
    double dark_rate = 0.0;           // 1/s
    double integration_time = 1.0;    // s

    void validate() const;
};

struct DetectorReading {
    double expected_counts = 0.0;
    double inferred_flux = 0.0;  // dark-subtracted, efficiency-corrected
};

DetectorReading apply_detector(double true_flux, const DetectorModel& det);

// max(counts / t - dark, 0) / eta
double infer_flux(double counts, const DetectorModel& det);

// Ratio of raw forward to raw backward counts, i.e. what the detector shows
// without background subtraction. Lies between 1 and the true ratio.
double apparent_blocking_ratio(double forward_flux, double backward_flux, const DetectorModel& det);

struct SweepRecord {
    double input_power = 0.0;  // W
    double forward_counts = 0.0;
    double backward_counts = 0.0;
    int repeats = 1;
    int line = 0;  // source line, 0 for synthetic data
};

// CSV with header "input_power_pW,forward_counts,backward_counts,repeats".
// Every malformed row is reported (ParseError carries all of them); fewer
// than three valid rows is an error.
std::vector<SweepRecord> ingest_sweep(std::istream& in);
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);

struct ThresholdRule {
    double multiple = 5.0;    // edge when counts exceed this multiple of the baseline
    int baseline_points = 3;  // lowest-power points used for the affine baseline
};

struct MeasuredWindow {
    bool detected = false;
    std::string status;
    double p_lower = 0.0;  // W, first forward point above threshold
    double p_upper = 0.0;  // W, first backward point above threshold
    bool upper_in_range = false;  // false when backward never switched within the sweep
};

// Window edges from an upward power sweep. Each trace gets an affine
// baseline fitted to its lowest-power points (slope and intercept clamped
// at zero); the edge is the first later point whose counts exceed
// rule.multiple times that baseline.
MeasuredWindow measured_window(std::span<const SweepRecord> records, const ThresholdRule& rule = {});

struct MeasuredMetrics {
    double transmission = 0.0;          // mean inferred forward flux / input flux
    double blocking_ratio_db = 0.0;     // mean raw-count ratio in dB
    double blocking_ratio_db_stderr = 0.0;
    int points = 0;
};

// Metrics over the records inside the detected window (upper edge excluded).
// Throws EmptyWindowError when no window is detected.
MeasuredMetrics measured_metrics(std::span<const SweepRecord> records, const DetectorModel& det,
                                 double wavelength = 852.3e-9, const ThresholdRule& rule = {});

// Upward power sweep from the semiclassical model: each direction stays on
// its lower branch until the up-switch threshold. Counts are expected values,
// or Poisson draws averaged over the repeats when a seed is given.
std::vector<SweepRecord> synthesize_sweep(const SystemParams& p, std::span<const double> powers,
                                          const DetectorModel& det, int repeats = 1,
                                          std::optional<std::uint64_t> poisson_seed = std::nullopt);

}  // namespace onr

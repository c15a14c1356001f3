#include "onr/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "onr/bistability.hpp"
#include "onr/csv.hpp"
#include "onr/errors.hpp"
#include "onr/steady_state.hpp"

namespace onr {

void DetectorModel::validate() const {
    if (!(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0)) {
        throw std::domain_error("detector efficiency must lie in (0, 1]");
    }
    if (!(dark_rate >= 0.0)) throw std::domain_error("dark rate must be non-negative");
    if (!(integration_time > 0.0)) throw std::domain_error("integration time must be positive");
}

DetectorReading apply_detector(double true_flux, const DetectorModel& det) {
    det.validate();
    if (!(true_flux >= 0.0)) throw std::domain_error("true flux must be non-negative");
    DetectorReading r;
    r.expected_counts =
        (det.quantum_efficiency * true_flux + det.dark_rate) * det.integration_time;
    r.inferred_flux = infer_flux(r.expected_counts, det);
    return r;
}

double infer_flux(double counts, const DetectorModel& det) {
    det.validate();
    return std::max(counts / det.integration_time - det.dark_rate, 0.0) / det.quantum_efficiency;
}

double apparent_blocking_ratio(double forward_flux, double backward_flux, const DetectorModel& det) {
    const double f = apply_detector(forward_flux, det).expected_counts;
    const double b = apply_detector(backward_flux, det).expected_counts;
    if (b == 0.0) throw std::domain_error("backward counts are zero; ratio undefined");
    return f / b;
}

std::vector<SweepRecord> ingest_sweep(std::istream& in) {
    std::vector<RowError> errors;
    std::vector<SweepRecord> records;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = csv::split(line);
        if (!header) {
            header = true;
            const bool ok = fields.size() == 4 && fields[0] == "input_power_pW" &&
                            fields[1] == "forward_counts" && fields[2] == "backward_counts" &&
                            fields[3] == "repeats";
            if (!ok) {
                errors.push_back(
                    {line_no, "expected header 'input_power_pW,forward_counts,backward_counts,repeats'"});
            }
            continue;
        }
        if (fields.size() != 4) {
            errors.push_back({line_no, "expected 4 columns, got " + std::to_string(fields.size())});
            continue;
        }
        const auto power = csv::to_double(fields[0]);
        const auto fwd = csv::to_double(fields[1]);
        const auto bwd = csv::to_double(fields[2]);
        const auto rep = csv::to_double(fields[3]);
        if (!power || !fwd || !bwd || !rep) {
            errors.push_back({line_no, "non-numeric field"});
            continue;
        }
        if (*power < 0.0 || *fwd < 0.0 || *bwd < 0.0) {
            errors.push_back({line_no, "negative power or counts"});
            continue;
        }
        if (*rep < 1.0 || std::floor(*rep) != *rep) {
            errors.push_back({line_no, "repeats must be an integer >= 1"});
            continue;
        }
        records.push_back({*power * 1e-12, *fwd, *bwd, static_cast<int>(*rep), line_no});
    }
    if (!header) errors.push_back({0, "empty file"});
    if (!errors.empty()) throw ParseError(std::move(errors));
    if (records.size() < 3) {
        throw std::domain_error("sweep needs at least 3 power points, got " +
                                std::to_string(records.size()));
    }
    return records;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
    out << "input_power_pW,forward_counts,backward_counts,repeats\n";
    for (const auto& r : records) {
        out << csv::format(r.input_power * 1e12) << ',' << csv::format(r.forward_counts) << ','
            << csv::format(r.backward_counts) << ',' << r.repeats << '\n';
    }
}

namespace {

std::vector<SweepRecord> sorted_by_power(std::span<const SweepRecord> records) {
    std::vector<SweepRecord> v(records.begin(), records.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& l, const auto& r) { return l.input_power < r.input_power; });
    return v;
}

// Index of the first point exceeding multiple x affine baseline, if any.
template <typename Get>
std::optional<std::size_t> find_edge(const std::vector<SweepRecord>& v, const ThresholdRule& rule,
                                     Get counts) {
    const auto k = static_cast<std::size_t>(rule.baseline_points);
    double sp = 0.0, sc = 0.0, spp = 0.0, spc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double p = v[i].input_power;
        const double c = counts(v[i]);
        sp += p;
        sc += c;
        spp += p * p;
        spc += p * c;
    }
    const double n = static_cast<double>(k);
    const double det = n * spp - sp * sp;
    double slope = det > 0.0 ? (n * spc - sp * sc) / det : 0.0;
    double intercept = (sc - slope * sp) / n;
    if (slope < 0.0) {
        slope = 0.0;
        intercept = sc / n;
    }
    if (intercept < 0.0) {
        intercept = 0.0;
        slope = spp > 0.0 ? spc / spp : 0.0;
    }
    for (std::size_t i = k; i < v.size(); ++i) {
        const double baseline = intercept + slope * v[i].input_power;
        if (counts(v[i]) > rule.multiple * baseline) return i;
    }
    return std::nullopt;
}

}  // namespace

MeasuredWindow measured_window(std::span<const SweepRecord> records, const ThresholdRule& rule) {
    if (rule.baseline_points < 2 || !(rule.multiple > 1.0)) {
        throw std::domain_error("threshold rule needs >= 2 baseline points and a multiple > 1");
    }
    if (records.size() < static_cast<std::size_t>(rule.baseline_points) + 1) {
        throw std::domain_error("sweep too short for the threshold rule");
    }
    const auto v = sorted_by_power(records);
    MeasuredWindow w;
    const auto fwd = find_edge(v, rule, [](const SweepRecord& r) { return r.forward_counts; });
    if (!fwd) {
        w.status = "no window detected";
        return w;
    }
    const auto bwd = find_edge(v, rule, [](const SweepRecord& r) { return r.backward_counts; });
    w.p_lower = v[*fwd].input_power;
    if (bwd) {
        w.p_upper = v[*bwd].input_power;
        w.upper_in_range = true;
    } else {
        w.p_upper = v.back().input_power;
    }
    if (!(w.p_lower < w.p_upper) || (bwd && *bwd <= *fwd)) {
        w.status = "no window detected";
        return w;
    }
    w.detected = true;
    w.status = w.upper_in_range ? "window detected" : "window detected; upper edge beyond sweep range";
    return w;
}

MeasuredMetrics measured_metrics(std::span<const SweepRecord> records, const DetectorModel& det,
                                 double wavelength, const ThresholdRule& rule) {
    det.validate();
    const auto w = measured_window(records, rule);
    if (!w.detected) throw EmptyWindowError("measured_metrics: " + w.status);

    const auto v = sorted_by_power(records);
    MeasuredMetrics m;
    double sum_t = 0.0, sum_db = 0.0, sum_db2 = 0.0;
    for (const auto& r : v) {
        const bool inside = r.input_power >= w.p_lower &&
                            (w.upper_in_range ? r.input_power < w.p_upper : r.input_power <= w.p_upper);
        if (!inside || r.input_power == 0.0 || r.backward_counts == 0.0) continue;
        const double flux_in = power_to_flux(r.input_power, wavelength);
        sum_t += infer_flux(r.forward_counts, det) / flux_in;
        const double db = to_db(r.forward_counts / r.backward_counts);
        sum_db += db;
        sum_db2 += db * db;
        ++m.points;
    }
    if (m.points == 0) throw EmptyWindowError("measured_metrics: no usable points inside the window");
    m.transmission = sum_t / m.points;
    m.blocking_ratio_db = sum_db / m.points;
    if (m.points > 1) {
        const double var = (sum_db2 - m.points * m.blocking_ratio_db * m.blocking_ratio_db) / (m.points - 1);
        m.blocking_ratio_db_stderr = std::sqrt(std::max(var, 0.0) / m.points);
    }
    return m;
}

std::vector<SweepRecord> synthesize_sweep(const SystemParams& p, std::span<const double> powers,
                                          const DetectorModel& det, int repeats,
                                          std::optional<std::uint64_t> poisson_seed) {
    det.validate();
    if (repeats < 1) throw std::domain_error("repeats must be >= 1");
    const auto fwd_t = switch_thresholds(Direction::Forward, p);
    const auto bwd_t = switch_thresholds(Direction::Backward, p);

    auto upward_output = [&](double flux, Direction d, const SwitchThresholds& t) {
        const auto sols = output_for_input(flux, d, p);
        const bool lower = t.bistable && flux < *t.up_switch_flux;
        if (lower) {
            for (const auto& s : sols) {
                if (s.stable) return s.output_flux;
            }
        }
        for (auto it = sols.rbegin(); it != sols.rend(); ++it) {
            if (it->stable) return it->output_flux;
        }
        return sols.back().output_flux;
    };

    std::mt19937_64 rng(poisson_seed.value_or(0));
    auto sample = [&](double expected) {
        if (!poisson_seed) return expected;
        std::poisson_distribution<long long> dist(expected);
        double total = 0.0;
        for (int i = 0; i < repeats; ++i) total += static_cast<double>(dist(rng));
        return total / repeats;
    };

    std::vector<SweepRecord> out;
    out.reserve(powers.size());
    for (double power : powers) {
        const double flux = power_to_flux(power, p.wavelength());
        SweepRecord r;
        r.input_power = power;
        r.repeats = repeats;
        r.forward_counts =
            sample(apply_detector(upward_output(flux, Direction::Forward, fwd_t), det).expected_counts);
        r.backward_counts =
            sample(apply_detector(upward_output(flux, Direction::Backward, bwd_t), det).expected_counts);
        out.push_back(r);
    }
    return out;
}

}  // namespace onr

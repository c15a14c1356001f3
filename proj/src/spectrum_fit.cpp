#include "onr/spectrum_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "onr/csv.hpp"
#include "onr/errors.hpp"
#include "onr/steady_state.hpp"

namespace onr {

void SpectrumData::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].probe_offset) || !std::isfinite(points[i].transmission)) {
            throw std::domain_error("spectrum contains non-finite values");
        }
        if (points[i].transmission < 0.0) throw std::domain_error("negative transmission in spectrum");
        if (i > 0 && !(points[i].probe_offset > points[i - 1].probe_offset)) {
            throw std::domain_error("spectrum offsets must be strictly increasing");
        }
    }
}

SpectrumData transmission_spectrum(const SystemParams& p, double atom_cavity_offset,
                                   std::span<const double> probe_grid) {
    SpectrumData s;
    s.points.reserve(probe_grid.size());
    for (std::size_t i = 0; i < probe_grid.size(); ++i) {
        if (i > 0 && !(probe_grid[i] > probe_grid[i - 1])) {
            throw std::domain_error("probe grid must be strictly increasing");
        }
        const double delta = probe_grid[i];
        const auto detuned = p.with_detunings(atom_cavity_offset + delta, delta);
        s.points.push_back({delta, linear_transmission(Direction::Forward, detuned)});
    }
    return s;
}

std::vector<double> spectrum_peaks(const SpectrumData& s) {
    std::vector<double> peaks;
    const auto& pts = s.points;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (pts[i].transmission > pts[i - 1].transmission &&
            pts[i].transmission >= pts[i + 1].transmission) {
            peaks.push_back(pts[i].probe_offset);
        }
    }
    return peaks;
}

double peak_splitting(const SpectrumData& s) {
    const auto peaks = spectrum_peaks(s);
    return peaks.size() < 2 ? 0.0 : peaks.back() - peaks.front();
}

namespace {

struct Profiled {
    double ssr = 0.0;
    double amplitude = 1.0;
    double background = 0.0;
};

class Objective {
public:
    Objective(const SpectrumData& data, const SystemParams& known, const FitOptions& opt)
        : data_(data), known_(known), opt_(opt), model_(data.points.size()) {}

    Profiled operator()(double n_eff) {
        const auto p = known_.with_n_eff(n_eff);
        for (std::size_t i = 0; i < model_.size(); ++i) {
            const double delta = data_.points[i].probe_offset;
            model_[i] = linear_transmission(
                Direction::Forward, p.with_detunings(opt_.atom_cavity_offset + delta, delta));
        }

        double a = 1.0;
        double b = 0.0;
        const double n = static_cast<double>(model_.size());
        double sm = 0.0, smm = 0.0, st = 0.0, stm = 0.0;
        for (std::size_t i = 0; i < model_.size(); ++i) {
            const double m = model_[i];
            const double t = data_.points[i].transmission;
            sm += m;
            smm += m * m;
            st += t;
            stm += t * m;
        }
        if (opt_.fit_amplitude && opt_.fit_background) {
            const double det = smm * n - sm * sm;
            if (det > 0.0) {
                a = (stm * n - sm * st) / det;
                b = (smm * st - sm * stm) / det;
            } else {
                a = 0.0;
                b = st / n;
            }
        } else if (opt_.fit_amplitude) {
            a = smm > 0.0 ? stm / smm : 0.0;
        } else if (opt_.fit_background) {
            b = (st - sm) / n;
        }

        double ssr = 0.0;
        for (std::size_t i = 0; i < model_.size(); ++i) {
            const double r = data_.points[i].transmission - (a * model_[i] + b);
            ssr += r * r;
        }
        return {ssr, a, b};
    }

private:
    const SpectrumData& data_;
    const SystemParams& known_;
    const FitOptions& opt_;
    std::vector<double> model_;
};

}  // namespace

FitResult fit_neff(const SpectrumData& spectrum, const SystemParams& params_known,
                   const FitOptions& options) {
    spectrum.validate();
    const auto& pts = spectrum.points;
    if (pts.size() < 5) throw std::domain_error("fit_neff: need at least 5 spectrum points");
    if (!(options.n_min > 0.0) || !(options.n_max > options.n_min) || options.grid_per_decade < 1) {
        throw std::domain_error("fit_neff: invalid scan range");
    }
    const auto [lo_it, hi_it] = std::minmax_element(
        pts.begin(), pts.end(),
        [](const auto& l, const auto& r) { return l.transmission < r.transmission; });
    if (hi_it->transmission - lo_it->transmission <=
        1e-12 * std::max(std::abs(hi_it->transmission), 1e-300)) {
        throw FitError("fit_neff: spectrum is flat; atom number is not identifiable");
    }

    Objective objective(spectrum, params_known, options);

    std::vector<double> grid{0.0};
    const int decades_steps = static_cast<int>(
        std::ceil(options.grid_per_decade * std::log10(options.n_max / options.n_min)));
    for (int i = 0; i <= decades_steps; ++i) {
        grid.push_back(options.n_min * std::pow(options.n_max / options.n_min,
                                                static_cast<double>(i) / decades_steps));
    }

    std::size_t best = 0;
    double best_ssr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = objective(grid[i]).ssr;
        if (s < best_ssr) {
            best_ssr = s;
            best = i;
        }
    }

    // Golden-section search on the bracket around the best grid point.
    double lo = grid[best == 0 ? 0 : best - 1];
    double hi = grid[std::min(best + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1).ssr;
    double f2 = objective(x2).ssr;
    for (int it = 0; it < 300 && (hi - lo) > 1e-13 * std::max(hi, 1e-6); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1).ssr;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2).ssr;
        }
    }
    double n_hat = 0.5 * (lo + hi);
    Profiled at = objective(n_hat);
    if (at.ssr > best_ssr) {
        n_hat = grid[best];
        at = objective(n_hat);
    }

    FitResult r;
    r.n_eff_hat = n_hat;
    r.ssr = at.ssr;
    r.best_grid_ssr = best_ssr;
    r.amplitude = at.amplitude;
    r.background = at.background;
    r.residual_rms = std::sqrt(at.ssr / static_cast<double>(pts.size()));

    // Curvature of the residual valley; sigma^2 estimated from the residuals.
    const int n_params = 1 + (options.fit_amplitude ? 1 : 0) + (options.fit_background ? 1 : 0);
    const double dof = static_cast<double>(pts.size()) - n_params;
    const double sigma2 = dof > 0.0 ? at.ssr / dof : 0.0;
    const double h = 1e-4 * std::max(n_hat, 1e-2);
    const double left = objective(std::max(n_hat - h, 0.0)).ssr;
    const double right = objective(n_hat + h).ssr;
    const double h_left = n_hat - std::max(n_hat - h, 0.0);
    const double curvature = h_left > 0.0
                                 ? 2.0 * ((right - at.ssr) / h - (at.ssr - left) / h_left) / (h + h_left)
                                 : 2.0 * (right - at.ssr) / (h * h);
    if (sigma2 == 0.0) {
        r.confidence_halfwidth = 0.0;
    } else if (curvature > 0.0) {
        r.confidence_halfwidth = std::sqrt(2.0 * sigma2 / curvature);
    } else {
        r.confidence_halfwidth = std::numeric_limits<double>::infinity();
    }
    return r;
}

SpectrumData read_spectrum_csv(std::istream& in) {
    std::vector<RowError> errors;
    SpectrumData s;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = csv::split(line);
        if (!header) {
            header = true;
            if (fields.size() != 2 || csv::to_double(fields[0])) {
                errors.push_back({line_no, "expected header 'offset_MHz,transmission'"});
            }
            continue;
        }
        if (fields.size() != 2) {
            errors.push_back({line_no, "expected 2 columns, got " + std::to_string(fields.size())});
            continue;
        }
        const auto offset = csv::to_double(fields[0]);
        const auto value = csv::to_double(fields[1]);
        if (!offset || !value) {
            errors.push_back({line_no, "non-numeric field"});
            continue;
        }
        if (*value < 0.0) {
            errors.push_back({line_no, "negative transmission"});
            continue;
        }
        if (!s.points.empty() && !(mhz_to_rate(*offset) > s.points.back().probe_offset)) {
            errors.push_back({line_no, "offsets must be strictly increasing"});
            continue;
        }
        s.points.push_back({mhz_to_rate(*offset), *value});
    }
    if (!header) errors.push_back({0, "empty file"});
    if (!errors.empty()) throw ParseError(std::move(errors));
    return s;
}

void write_spectrum_csv(std::ostream& out, const SpectrumData& s) {
    out << "offset_MHz,transmission\n";
    for (const auto& p : s.points) {
        out << csv::format(rate_to_mhz(p.probe_offset)) << ',' << csv::format(p.transmission) << '\n';
    }
}

}  // namespace onr

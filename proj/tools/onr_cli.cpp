// onr: command-line front end for the nonreciprocity model.
// Tables go out as CSV, reports as JSON. Errors are a JSON object on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "onr/bistability.hpp"
#include "onr/config.hpp"
#include "onr/csv.hpp"
#include "onr/designer.hpp"
#include "onr/errors.hpp"
#include "onr/measurement.hpp"
#include "onr/quantum.hpp"
#include "onr/spectrum_fit.hpp"
#include "onr/steady_state.hpp"

using namespace onr;
using json = nlohmann::ordered_json;

namespace {

constexpr int kUsageError = 2;
constexpr int kModelError = 1;

struct Globals {
    std::string preset = "paper-fig2";
    std::string config;
    std::optional<double> n_eff;
    std::string out;
};

SystemParams resolve(const Globals& g) {
    SystemParams p = preset(g.preset);
    if (!g.config.empty()) p = load_params_file(g.config, p);
    if (g.n_eff) p = p.with_n_eff(*g.n_eff);
    return p;
}

// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string num(double v) { return csv::format(v); }

double to_pw(double flux, const SystemParams& p) { return flux_to_power(flux, p.wavelength()) * 1e12; }

double unit_scale(std::string_view unit) {
    if (unit.empty() || unit == "pW") return 1e-12;
    if (unit == "nW") return 1e-9;
    if (unit == "uW") return 1e-6;
    if (unit == "W") return 1.0;
    throw std::invalid_argument("unknown power unit '" + std::string(unit) + "' (pW, nW, uW, W)");
}

double parse_double(std::string_view text, const std::string& what) {
    const auto v = csv::to_double(text);
    if (!v) throw std::invalid_argument("bad number '" + std::string(text) + "' in " + what);
    return *v;
}

// "30:110:10pW" (inclusive range) or "30,50,80pW"; result in watts.
std::vector<double> parse_powers(const std::string& spec) {
    std::string body = spec;
    std::string unit;
    while (!body.empty() && std::isalpha(static_cast<unsigned char>(body.back()))) {
        unit.insert(unit.begin(), body.back());
        body.pop_back();
    }
    const double scale = unit_scale(unit);
    std::vector<double> out;
    if (body.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(parse_double(item, "--powers"));
        if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
            throw std::invalid_argument("--powers range must be start:stop:step with step > 0");
        }
        const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] * (1.0 + 1e-12))) + 1;
        for (long i = 0; i < n; ++i) out.push_back((parts[0] + i * parts[2]) * scale);
    } else {
        for (auto f : csv::split(body)) out.push_back(parse_double(f, "--powers") * scale);
    }
    if (out.empty()) throw std::invalid_argument("--powers is empty");
    for (double w : out) {
        if (!(w >= 0.0)) throw std::invalid_argument("--powers must be non-negative");
    }
    return out;
}

std::vector<double> parse_list(const std::string& spec, const std::string& what) {
    std::vector<double> out;
    for (auto f : csv::split(spec)) out.push_back(parse_double(f, what));
    if (out.empty()) throw std::invalid_argument(what + " is empty");
    return out;
}

// "dark=300,eff=0.5,t=0.1"
DetectorModel parse_detector(const std::string& spec) {
    DetectorModel det;
    if (spec.empty()) return det;
    for (auto field : csv::split(spec)) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("--detector expects key=value pairs");
        const auto key = field.substr(0, eq);
        const double v = parse_double(field.substr(eq + 1), "--detector");
        if (key == "dark") det.dark_rate = v;
        else if (key == "eff") det.quantum_efficiency = v;
        else if (key == "t") det.integration_time = v;
        else throw std::invalid_argument("unknown --detector key '" + std::string(key) + "' (dark, eff, t)");
    }
    det.validate();
    return det;
}

json params_json(const SystemParams& p) {
    return {{"kappa1_MHz", rate_to_mhz(p.kappa1())},
            {"kappa2_MHz", rate_to_mhz(p.kappa2())},
            {"kappa_loss_MHz", rate_to_mhz(p.kappa_loss())},
            {"g_MHz", rate_to_mhz(p.g())},
            {"gamma_MHz", rate_to_mhz(p.gamma())},
            {"n_eff", p.n_eff()},
            {"delta_atom_MHz", rate_to_mhz(p.delta_atom())},
            {"delta_cav_MHz", rate_to_mhz(p.delta_cav())},
            {"wavelength_nm", p.wavelength() * 1e9},
            {"cavity_length_um", p.cavity_length() * 1e6}};
}

json thresholds_json(const SwitchThresholds& t, const SystemParams& p) {
    json j{{"direction", std::string(to_string(t.direction))}, {"bistable", t.bistable}};
    if (t.bistable) {
        j["up_switch_pW"] = to_pw(*t.up_switch_flux, p);
        j["down_switch_pW"] = to_pw(*t.down_switch_flux, p);
    }
    return j;
}

json window_json(const OnrWindow& w, const SystemParams& p) {
    json j{{"convention", std::string(to_string(w.convention))},
           {"status", w.nonempty ? "ok" : "empty window"}};
    if (w.nonempty) {
        j["p_lower_pW"] = to_pw(w.p_lower, p);
        j["p_upper_pW"] = to_pw(w.p_upper, p);
        j["photons_lower"] = w.photons_lower;
        j["photons_upper"] = w.photons_upper;
    }
    return j;
}

json metrics_json(const WindowMetrics& m) {
    return {{"mean_forward_transmission", m.mean_forward_transmission},
            {"mean_blocking_ratio_dB", m.mean_blocking_ratio_db},
            {"samples", m.samples}};
}

void emit(Sink& sink, const json& j) { sink.stream() << j.dump(2) << '\n'; }

// --- subcommands -----------------------------------------------------------

struct ScurveOpts {
    std::string direction = "forward";
    double y_min = 1e-3;
    double y_max = 1e3;
    int samples = 400;
};

void run_scurve(const Globals& g, const ScurveOpts& o) {
    const auto p = resolve(g);
    const Direction d = parse_direction(o.direction);
    const auto curve = scurve(d, p, o.y_min, o.y_max, o.samples);
    Sink sink(g.out);
    auto& out = sink.stream();
    out << "y,input_power_pW,output_power_pW,transmission,intracavity_photons,stable\n";
    for (const auto& s : curve.samples) {
        out << num(s.y) << ',' << num(to_pw(s.input_flux, p)) << ',' << num(to_pw(s.output_flux, p)) << ','
            << num(s.input_flux > 0.0 ? s.output_flux / s.input_flux : 0.0) << ','
            << num(intracavity_photons(s.output_flux, p.output_kappa(d))) << ',' << (s.stable ? 1 : 0) << '\n';
    }
}

struct WindowOpts {
    std::string convention = "guaranteed";
    int samples = 40;
};

void run_window(const Globals& g, const WindowOpts& o) {
    const auto p = resolve(g);
    const auto w = onr_window(p, parse_convention(o.convention));
    json j{{"params", params_json(p)},
           {"cooperativity", p.cooperativity()},
           {"forward", thresholds_json(switch_thresholds(Direction::Forward, p), p)},
           {"backward", thresholds_json(switch_thresholds(Direction::Backward, p), p)},
           {"window", window_json(w, p)}};
    j["status"] = j["window"]["status"];
    if (w.nonempty) j["metrics"] = metrics_json(window_metrics(p, w, o.samples));
    Sink sink(g.out);
    emit(sink, j);
}

struct SweepOpts {
    std::string values = "3.0,5.2,8.0,10.4,12.8,14.7";
    int samples = 40;
};

void run_sweep(const Globals& g, const SweepOpts& o) {
    const auto p = resolve(g);
    const auto sweep = sweep_atom_number(p, parse_list(o.values, "--values"), o.samples);
    Sink sink(g.out);
    auto& out = sink.stream();
    out << "n_eff,cooperativity,blocking_simplified_dB,"
           "fwd_up_pW,fwd_down_pW,bwd_up_pW,bwd_down_pW,"
           "guaranteed_lower_pW,guaranteed_upper_pW,guaranteed_T,guaranteed_BR_dB,"
           "hysteretic_lower_pW,hysteretic_upper_pW,hysteretic_T,hysteretic_BR_dB\n";
    auto opt = [&](const std::optional<double>& flux) { return flux ? num(to_pw(*flux, p)) : std::string(); };
    auto window = [&](const OnrWindow& w, const std::optional<WindowMetrics>& m) {
        std::string s = w.nonempty ? num(to_pw(w.p_lower, p)) + ',' + num(to_pw(w.p_upper, p)) : std::string(",");
        s += m ? ',' + num(m->mean_forward_transmission) + ',' + num(m->mean_blocking_ratio_db) : std::string(",,");
        return s;
    };
    for (const auto& r : sweep.rows) {
        out << num(r.n_eff) << ',' << num(r.cooperativity) << ',' << num(r.simplified.db) << ','
            << opt(r.forward.up_switch_flux) << ',' << opt(r.forward.down_switch_flux) << ','
            << opt(r.backward.up_switch_flux) << ',' << opt(r.backward.down_switch_flux) << ','
            << window(r.guaranteed, r.guaranteed_metrics) << ',' << window(r.hysteretic, r.hysteretic_metrics)
            << '\n';
    }
}

struct MetricsOpts {
    std::string powers;
    std::string convention = "guaranteed";
    int samples = 40;
};

void run_metrics(const Globals& g, const MetricsOpts& o) {
    const auto p = resolve(g);
    Sink sink(g.out);
    if (o.powers.empty()) {
        const auto w = onr_window(p, parse_convention(o.convention));
        json j{{"window", window_json(w, p)}, {"status", w.nonempty ? "ok" : "empty window"}};
        if (w.nonempty) j["metrics"] = metrics_json(window_metrics(p, w, o.samples));
        emit(sink, j);
        return;
    }
    auto& out = sink.stream();
    out << "input_power_pW,forward_output_pW,backward_output_pW,forward_T,backward_T,blocking_ratio_dB,"
           "forward_branches,backward_branches\n";
    for (double watts : parse_powers(o.powers)) {
        const double flux = power_to_flux(watts, p.wavelength());
        const auto br = select_branches(flux, p);
        const auto nf = output_for_input(flux, Direction::Forward, p).size();
        const auto nb = output_for_input(flux, Direction::Backward, p).size();
        const double tf = flux > 0.0 ? br.forward.output_flux / flux : 0.0;
        const double tb = flux > 0.0 ? br.backward.output_flux / flux : 0.0;
        out << num(watts * 1e12) << ',' << num(to_pw(br.forward.output_flux, p)) << ','
            << num(to_pw(br.backward.output_flux, p)) << ',' << num(tf) << ',' << num(tb) << ','
            << (tb > 0.0 ? num(to_db(tf / tb)) : std::string()) << ',' << nf << ',' << nb << '\n';
    }
}

struct SpectrumOpts {
    double span_mhz = 40.0;
    int points = 161;
    double offset_mhz = 0.0;
    double noise = 0.0;
    std::optional<std::uint64_t> seed;
};

void run_spectrum(const Globals& g, const SpectrumOpts& o) {
    const auto p = resolve(g);
    if (o.points < 2 || !(o.span_mhz > 0.0)) throw std::invalid_argument("need --points >= 2 and --span-mhz > 0");
    if (o.noise < 0.0) throw std::invalid_argument("--noise must be non-negative");
    if (o.noise > 0.0 && !o.seed) throw std::invalid_argument("--noise requires an explicit --seed");
    std::vector<double> grid(static_cast<std::size_t>(o.points));
    for (int i = 0; i < o.points; ++i) grid[i] = mhz_to_rate(-o.span_mhz + 2.0 * o.span_mhz * i / (o.points - 1));
    auto s = transmission_spectrum(p, mhz_to_rate(o.offset_mhz), grid);
    if (o.noise > 0.0) {
        std::mt19937_64 rng(*o.seed);
        std::normal_distribution<double> noise(0.0, o.noise);
        for (auto& pt : s.points) pt.transmission *= 1.0 + noise(rng);
    }
    Sink sink(g.out);
    write_spectrum_csv(sink.stream(), s);
}

struct FitOpts {
    std::string in;
    bool amplitude = false;
    bool background = false;
    double offset_mhz = 0.0;
};

void run_fit(const Globals& g, const FitOpts& o) {
    const auto p = resolve(g);
    std::ifstream in(o.in);
    if (!in) throw std::runtime_error("cannot open input file '" + o.in + "'");
    const auto data = read_spectrum_csv(in);
    FitOptions opt;
    opt.fit_amplitude = o.amplitude;
    opt.fit_background = o.background;
    opt.atom_cavity_offset = mhz_to_rate(o.offset_mhz);
    const auto r = fit_neff(data, p, opt);
    json j{{"status", "ok"},
           {"points", data.points.size()},
           {"n_eff", r.n_eff_hat},
           {"confidence_halfwidth", r.confidence_halfwidth},
           {"residual_rms", r.residual_rms},
           {"amplitude", r.amplitude},
           {"background", r.background},
           {"collective_coupling_MHz", std::sqrt(r.n_eff_hat) * rate_to_mhz(p.g())}};
    Sink sink(g.out);
    emit(sink, j);
}

struct DesignOpts {
    std::optional<double> t1_ppm, t2_ppm, loss_ppm, length_um;
    std::optional<double> target_db;
    bool optimize = false;
    int samples = 40;
};

json report_json(const DesignReport& r) {
    json j{{"params", params_json(r.params)},
           {"transmission", r.transmission},
           {"cooperativity", r.cooperativity},
           {"blocking_ratio_dB", r.blocking.db},
           {"guaranteed", window_json(r.guaranteed, r.params)},
           {"hysteretic", window_json(r.hysteretic, r.params)}};
    if (r.metrics) j["metrics"] = metrics_json(*r.metrics);
    if (r.matched) {
        j["matched"] = {{"kappa1_MHz", rate_to_mhz(r.matched->kappa1)},
                        {"kappa2_MHz", rate_to_mhz(r.matched->kappa2)},
                        {"transmission", r.matched->transmission},
                        {"asymmetric", r.matched->asymmetric}};
    } else {
        j["matched"] = nullptr;
        j["matched_note"] = r.matched_note;
    }
    if (r.required_atoms) {
        j["target_blocking_dB"] = *r.target_blocking_db;
        j["required_atoms"] = {{"continuous", r.required_atoms->continuous},
                               {"ceiling", r.required_atoms->ceiling}};
    }
    return j;
}

void run_design(const Globals& g, const DesignOpts& o) {
    const auto p = resolve(g);
    const int given = o.t1_ppm.has_value() + o.t2_ppm.has_value() + o.loss_ppm.has_value();
    if (given != 0 && given != 3) throw std::invalid_argument("give all of --t1-ppm, --t2-ppm, --loss-ppm or none");

    std::optional<DesignReport> report;
    if (given == 3) {
        const double length = o.length_um ? *o.length_um * 1e-6 : p.cavity_length();
        report.emplace(design_report(DesignInputs{*o.t1_ppm, *o.t2_ppm, *o.loss_ppm, length, p, o.target_db}));
    } else {
        if (o.length_um) throw std::invalid_argument("--length-um needs the mirror ppm values");
        report.emplace(design_report(p, o.target_db));
    }

    json j{{"status", "ok"}};
    if (o.optimize) {
        // Throws when kappa < 2 kappa_loss; no design is fabricated.
        const auto split = optimal_mirror_split(report->params.total_kappa(), report->params.kappa_loss());
        auto f = report->params.fields();
        f.kappa1 = split.kappa1;
        f.kappa2 = split.kappa2;
        const auto optimized = design_report(SystemParams(f), o.target_db);
        j["as_given"] = report_json(*report);
        j["optimized"] = report_json(optimized);
        j["transmission"] = split.transmission;
    } else {
        j.update(report_json(*report));
    }
    Sink sink(g.out);
    emit(sink, j);
}

struct QuantumOpts {
    int atoms = 1;
    int fock = 20;
    std::string scan = "1:1000:7";
    std::string direction = "forward";
    std::size_t cap = 2048;
};

void run_quantum(const Globals& g, const QuantumOpts& o) {
    const auto base = resolve(g);
    const Direction d = parse_direction(o.direction);
    // lo:hi:count in pW, log-spaced
    std::vector<double> parts;
    std::stringstream ss(o.scan);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(item, "--drive-scan"));
    if (parts.size() != 3 || !(parts[0] > 0.0) || parts[1] < parts[0] || parts[2] < 1 ||
        parts[2] != std::floor(parts[2])) {
        throw std::invalid_argument("--drive-scan must be lo:hi:count in pW with 0 < lo <= hi");
    }
    const int count = static_cast<int>(parts[2]);
    std::vector<double> fluxes;
    for (int i = 0; i < count; ++i) {
        const double pw = count == 1 ? parts[0] : parts[0] * std::pow(parts[1] / parts[0], double(i) / (count - 1));
        fluxes.push_back(power_to_flux(pw * 1e-12, base.wavelength()));
    }

    QuantumModel tmpl{.n_atoms = o.atoms, .fock_dim = o.fock, .params = base.with_n_eff(o.atoms), .direction = d};
    tmpl.dimension_cap = o.cap;
    const auto curve = quantum_io_curve(tmpl, fluxes);

    Sink sink(g.out);
    auto& out = sink.stream();
    out << "input_power_pW,quantum_output_pW,quantum_T,mean_photons,adequate,"
           "semiclassical_roots,semiclassical_low_pW,semiclassical_high_pW\n";
    for (const auto& pt : curve.points) {
        const auto sc = output_for_input(pt.input_flux, d, tmpl.params);
        out << num(to_pw(pt.input_flux, base)) << ',' << num(to_pw(pt.output_flux, base)) << ','
            << num(pt.output_flux / pt.input_flux) << ',' << num(pt.mean_photon_number) << ','
            << (pt.adequate ? 1 : 0) << ',' << sc.size() << ',' << num(to_pw(sc.front().output_flux, base)) << ','
            << num(to_pw(sc.back().output_flux, base)) << '\n';
    }
}

struct IngestOpts {
    std::string in;
    std::string detector;
    double threshold = 5.0;
    int baseline = 3;
};

void run_ingest(const Globals& g, const IngestOpts& o) {
    const auto p = resolve(g);
    const auto det = parse_detector(o.detector);
    std::ifstream in(o.in);
    if (!in) throw std::runtime_error("cannot open input file '" + o.in + "'");
    const auto records = ingest_sweep(in);
    const ThresholdRule rule{o.threshold, o.baseline};
    const auto w = measured_window(records, rule);
    json j{{"status", w.detected ? "ok" : w.status}, {"rows", records.size()}};
    if (w.detected) {
        j["window"] = {{"p_lower_pW", w.p_lower * 1e12},
                       {"p_upper_pW", w.p_upper * 1e12},
                       {"upper_in_range", w.upper_in_range}};
        const auto m = measured_metrics(records, det, p.wavelength(), rule);
        j["metrics"] = {{"transmission", m.transmission},
                        {"blocking_ratio_dB", m.blocking_ratio_db},
                        {"blocking_ratio_dB_stderr", m.blocking_ratio_db_stderr},
                        {"points", m.points}};
    }
    Sink sink(g.out);
    emit(sink, j);
}

struct SynthOpts {
    std::string powers = "10:3000:10pW";
    std::string detector;
    int repeats = 1;
    std::optional<std::uint64_t> seed;
};

void run_synth(const Globals& g, const SynthOpts& o) {
    const auto p = resolve(g);
    const auto powers = parse_powers(o.powers);
    const auto records = synthesize_sweep(p, powers, parse_detector(o.detector), o.repeats, o.seed);
    Sink sink(g.out);
    write_sweep_csv(sink.stream(), records);
}

// --- errors ----------------------------------------------------------------

int report_error(const std::string& type, const std::string& message, json extra = json::object()) {
    json j{{"error", {{"type", type}, {"message", message}}}};
    for (auto& [k, v] : extra.items()) j["error"][k] = v;
    std::cerr << j.dump() << '\n';
    return type == "usage" ? kUsageError : kModelError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-photon optical nonreciprocity in an asymmetric atom-cavity system"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--preset", g.preset, "Parameter preset")
        ->check(CLI::IsMember(preset_names()))
        ->capture_default_str();
    app.add_option("--config", g.config, "key = value parameter file (see docs/formats.md)");
    app.add_option("--neff", g.n_eff, "Effective atom number (overrides preset and config)");
    app.add_option("--out", g.out, "Output file (default stdout)");

    ScurveOpts sc;
    auto* c_scurve = app.add_subcommand("scurve", "Input-output S-curve, sampled in the saturation parameter y");
    c_scurve->add_option("--direction", sc.direction, "forward|backward")->capture_default_str();
    c_scurve->add_option("--y-min", sc.y_min)->capture_default_str();
    c_scurve->add_option("--y-max", sc.y_max)->capture_default_str();
    c_scurve->add_option("--samples", sc.samples)->capture_default_str();
    c_scurve->footer("CSV: y,input_power_pW,output_power_pW,transmission,intracavity_photons,stable");

    WindowOpts wo;
    auto* c_window = app.add_subcommand("window", "Switching thresholds and ONR working window (JSON)");
    c_window->add_option("--convention", wo.convention, "guaranteed|hysteretic")->capture_default_str();
    c_window->add_option("--samples", wo.samples, "Power samples for the window metrics")->capture_default_str();
    c_window->footer("JSON: status is \"ok\" or \"empty window\"; powers in pW");

    SweepOpts so;
    auto* c_sweep = app.add_subcommand("sweep-neff", "Thresholds, windows and metrics versus atom number");
    c_sweep->add_option("--values", so.values, "Comma-separated N_eff values")->capture_default_str();
    c_sweep->add_option("--samples", so.samples)->capture_default_str();
    c_sweep->footer(
        "CSV: n_eff,cooperativity,blocking_simplified_dB,fwd_up_pW,fwd_down_pW,bwd_up_pW,bwd_down_pW,"
        "guaranteed_lower_pW,guaranteed_upper_pW,guaranteed_T,guaranteed_BR_dB,"
        "hysteretic_lower_pW,hysteretic_upper_pW,hysteretic_T,hysteretic_BR_dB (blank when absent)");

    MetricsOpts mo;
    auto* c_metrics = app.add_subcommand("metrics", "Forward transmission and blocking ratio");
    c_metrics->add_option("--powers", mo.powers, "start:stop:step[unit] or a,b,c[unit]; unit pW (default), nW, uW, W");
    c_metrics->add_option("--convention", mo.convention, "Window used when --powers is absent")
        ->capture_default_str();
    c_metrics->add_option("--samples", mo.samples)->capture_default_str();
    c_metrics->footer(
        "With --powers, CSV: input_power_pW,forward_output_pW,backward_output_pW,forward_T,backward_T,"
        "blocking_ratio_dB,forward_branches,backward_branches. Without, JSON window metrics.");

    SpectrumOpts spo;
    auto* c_spectrum = app.add_subcommand("spectrum", "Weak-probe transmission spectrum");
    c_spectrum->add_option("--span-mhz", spo.span_mhz, "Half-width of the probe scan")->capture_default_str();
    c_spectrum->add_option("--points", spo.points)->capture_default_str();
    c_spectrum->add_option("--offset-mhz", spo.offset_mhz, "Atom-cavity offset")->capture_default_str();
    c_spectrum->add_option("--noise", spo.noise, "Relative Gaussian noise (needs --seed)")->capture_default_str();
    c_spectrum->add_option("--seed", spo.seed);
    c_spectrum->footer("CSV: offset_MHz,transmission");

    FitOpts fo;
    auto* c_fit = app.add_subcommand("fit-neff", "Fit N_eff to a measured spectrum (JSON)");
    c_fit->add_option("--in", fo.in, "Spectrum CSV (offset_MHz,transmission)")->required();
    c_fit->add_flag("--fit-amplitude", fo.amplitude, "Free overall scale");
    c_fit->add_flag("--fit-background", fo.background, "Free constant offset");
    c_fit->add_option("--offset-mhz", fo.offset_mhz, "Atom-cavity offset")->capture_default_str();

    DesignOpts dso;
    auto* c_design = app.add_subcommand("design", "Cavity design report from mirror specifications (JSON)");
    c_design->add_option("--t1-ppm", dso.t1_ppm, "Input mirror transmission");
    c_design->add_option("--t2-ppm", dso.t2_ppm, "Output mirror transmission");
    c_design->add_option("--loss-ppm", dso.loss_ppm, "Round-trip scatter and absorption");
    c_design->add_option("--length-um", dso.length_um, "Cavity length");
    c_design->add_option("--target-db", dso.target_db, "Blocking target for the atom-number estimate");
    c_design->add_flag("--optimize", dso.optimize, "Report the impedance-matched split at the same total kappa");
    c_design->footer("JSON; rates in MHz (rate / 2 pi), powers in pW");

    QuantumOpts qo;
    auto* c_quantum = app.add_subcommand("quantum-validate", "Master-equation curve next to the semiclassical roots");
    c_quantum->add_option("--n-atoms", qo.atoms)->capture_default_str();
    c_quantum->add_option("--fock", qo.fock, "Photon-number truncation")->capture_default_str();
    c_quantum->add_option("--drive-scan", qo.scan, "lo:hi:count input powers in pW, log-spaced")
        ->capture_default_str();
    c_quantum->add_option("--direction", qo.direction)->capture_default_str();
    c_quantum->add_option("--dimension-cap", qo.cap, "Largest Hilbert dimension accepted")->capture_default_str();
    c_quantum->footer(
        "CSV: input_power_pW,quantum_output_pW,quantum_T,mean_photons,adequate,"
        "semiclassical_roots,semiclassical_low_pW,semiclassical_high_pW");

    IngestOpts io;
    auto* c_ingest = app.add_subcommand("ingest", "Window and metrics from a measured sweep CSV (JSON)");
    c_ingest->add_option("--in", io.in, "input_power_pW,forward_counts,backward_counts,repeats")->required();
    c_ingest->add_option("--detector", io.detector, "dark=<1/s>,eff=<0..1>,t=<s>");
    c_ingest->add_option("--threshold", io.threshold, "Edge at this multiple of the baseline")
        ->capture_default_str();
    c_ingest->add_option("--baseline-points", io.baseline)->capture_default_str();

    SynthOpts sy;
    auto* c_synth = app.add_subcommand("synth-sweep", "Synthetic detector sweep from the model (CSV)");
    c_synth->add_option("--powers", sy.powers)->capture_default_str();
    c_synth->add_option("--detector", sy.detector, "dark=<1/s>,eff=<0..1>,t=<s>");
    c_synth->add_option("--repeats", sy.repeats)->capture_default_str();
    c_synth->add_option("--seed", sy.seed, "Poisson sampling seed; expected counts when absent");
    c_synth->footer("CSV: input_power_pW,forward_counts,backward_counts,repeats");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what());
    }

    try {
        if (*c_scurve) run_scurve(g, sc);
        else if (*c_window) run_window(g, wo);
        else if (*c_sweep) run_sweep(g, so);
        else if (*c_metrics) run_metrics(g, mo);
        else if (*c_spectrum) run_spectrum(g, spo);
        else if (*c_fit) run_fit(g, fo);
        else if (*c_design) run_design(g, dso);
        else if (*c_quantum) run_quantum(g, qo);
        else if (*c_ingest) run_ingest(g, io);
        else if (*c_synth) run_synth(g, sy);
    } catch (const ParseError& e) {
        json rows = json::array();
        for (const auto& r : e.rows()) rows.push_back({{"line", r.line}, {"message", r.message}});
        return report_error("parse", e.what(), {{"rows", rows}});
    } catch (const InfeasibleDesignError& e) {
        return report_error("infeasible_design", e.what(),
                            {{"total_kappa_MHz", rate_to_mhz(e.total_kappa)},
                             {"kappa_loss_MHz", rate_to_mhz(e.kappa_loss)}});
    } catch (const DimensionCapError& e) {
        return report_error("dimension_cap", e.what());
    } catch (const EmptyWindowError& e) {
        return report_error("empty_window", e.what());
    } catch (const FitError& e) {
        return report_error("fit", e.what());
    } catch (const std::logic_error& e) {
        return report_error("invalid_input", e.what());
    } catch (const std::exception& e) {
        return report_error("runtime", e.what());
    }
    return 0;
}

#include "onr/config.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace onr {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view text, int line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        fail(line, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

SystemParams load_params(std::istream& in, const SystemParams& base) {
    SystemParams::Fields f = base.fields();
    std::optional<double> t1, t2, loss;

    std::string raw;
    int line = 0;
    bool seen_value = false;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;

        const auto eq = s.find('=');
        if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
        const auto key = trim(s.substr(0, eq));
        const auto value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) fail(line, "empty key or value");

        if (key == "preset") {
            if (seen_value) fail(line, "'preset' must precede other keys");
            try {
                f = preset(value).fields();
            } catch (const std::exception& e) {
                fail(line, e.what());
            }
            continue;
        }
        seen_value = true;
        const double v = parse_number(value, line);
        if (key == "kappa1") f.kappa1 = mhz_to_rate(v);
        else if (key == "kappa2") f.kappa2 = mhz_to_rate(v);
        else if (key == "kappa_loss") f.kappa_loss = mhz_to_rate(v);
        else if (key == "g") f.g = mhz_to_rate(v);
        else if (key == "gamma") f.gamma = mhz_to_rate(v);
        else if (key == "delta_atom") f.delta_atom = mhz_to_rate(v);
        else if (key == "delta_cav") f.delta_cav = mhz_to_rate(v);
        else if (key == "n_eff") f.n_eff = v;
        else if (key == "wavelength") f.wavelength = v * 1e-9;
        else if (key == "cavity_length") f.cavity_length = v * 1e-6;
        else if (key == "t1_ppm") t1 = v;
        else if (key == "t2_ppm") t2 = v;
        else if (key == "loss_ppm") loss = v;
        else fail(line, "unknown key '" + std::string(key) + "'");
    }

    if (t1) f.kappa1 = mirror_ppm_to_rate(*t1, f.cavity_length);
    if (t2) f.kappa2 = mirror_ppm_to_rate(*t2, f.cavity_length);
    if (loss) f.kappa_loss = *loss == 0.0 ? 0.0 : mirror_ppm_to_rate(*loss, f.cavity_length);
    return SystemParams(f);
}

SystemParams load_params_file(const std::string& path, const SystemParams& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return load_params(in, base);
}

}  // namespace onr

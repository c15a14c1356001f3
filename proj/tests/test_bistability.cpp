#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "onr/bistability.hpp"
#include "onr/errors.hpp"

using namespace onr;

namespace {

double to_pw(double flux) { return flux_to_power(flux, 852.3e-9) * 1e12; }

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> k1(0.5, 5.0), k2(0.05, 2.0), loss(0.0, 1.0), g(1.0, 10.0),
        gam(1.0, 5.0), n(0.0, 20.0), det(-5.0, 5.0);
    SystemParams::Fields f;
    f.kappa1 = mhz_to_rate(k1(rng));
    f.kappa2 = mhz_to_rate(k2(rng));
    f.kappa_loss = mhz_to_rate(loss(rng));
    f.g = mhz_to_rate(g(rng));
    f.gamma = mhz_to_rate(gam(rng));
    f.n_eff = n(rng);
    f.delta_atom = mhz_to_rate(det(rng));
    f.delta_cav = mhz_to_rate(det(rng));
    return SystemParams(f);
}

}  // namespace

TEST_CASE("scurve") {
    const auto p = preset("paper-resonant");

    SUBCASE("empty cavity is a straight stable line") {
        const auto c = scurve(Direction::Forward, p.with_n_eff(0.0), 1e-3, 1e3, 200);
        REQUIRE(c.samples.size() == 200);
        CHECK(c.unstable_segments() == 0);
        for (const auto& s : c.samples) {
            CHECK(s.stable);
            CHECK(s.output_flux / s.input_flux == doctest::Approx(p.empty_cavity_transmission()).epsilon(1e-12));
        }
    }

    SUBCASE("one unstable segment, consistent with slope scan") {
        const auto c = scurve(Direction::Forward, p, 1e-3, 1e4, 800);
        CHECK(c.unstable_segments() == 1);
        for (std::size_t i = 1; i < c.samples.size(); ++i) {
            CHECK(c.samples[i].y > c.samples[i - 1].y);
            const double in = oracle::input_at_y(c.samples[i].y, Direction::Forward, p);
            CHECK(std::abs(c.samples[i].input_flux - in) <= 1e-9 * in);
        }
        const auto ext = oracle::scan_extrema(Direction::Forward, p);
        REQUIRE(ext.size() == 2);
        for (const auto& s : c.samples) {
            const bool inside = s.y > ext[0].y && s.y < ext[1].y;
            if (std::abs(std::log(s.y / ext[0].y)) < 1e-3 || std::abs(std::log(s.y / ext[1].y)) < 1e-3) continue;
            CHECK(s.stable == !inside);
        }
    }

    SUBCASE("forward and backward differ by the critical-flux rescaling at resonance") {
        const auto f = scurve(Direction::Forward, p, 1e-2, 1e3, 50);
        const auto b = scurve(Direction::Backward, p, 1e-2, 1e3, 50);
        const double ratio = p.kappa1() / p.kappa2();
        for (std::size_t i = 0; i < f.samples.size(); ++i) {
            CHECK(b.samples[i].y == f.samples[i].y);
            CHECK(b.samples[i].input_flux == doctest::Approx(ratio * f.samples[i].input_flux).epsilon(1e-12));
            CHECK(b.samples[i].stable == f.samples[i].stable);
        }
    }

    SUBCASE("invalid ranges") {
        CHECK_THROWS_AS(scurve(Direction::Forward, p, 0.0, 1.0, 10), std::domain_error);
        CHECK_THROWS_AS(scurve(Direction::Forward, p, 2.0, 1.0, 10), std::domain_error);
        CHECK_THROWS_AS(scurve(Direction::Forward, p, 1.0, 2.0, 1), std::domain_error);
    }
}

TEST_CASE("resonant switching thresholds") {
    const auto p = preset("paper-resonant");
    const auto f = switch_thresholds(Direction::Forward, p);
    REQUIRE(f.bistable);
    CHECK(*f.up_switch_y + 1.0 == doctest::Approx(2.110684374039).epsilon(1e-9));
    CHECK(*f.down_switch_y + 1.0 == doctest::Approx(38.138795875441).epsilon(1e-9));
    CHECK(*f.up_switch_flux == doctest::Approx(6.934933465e8).epsilon(1e-8));
    CHECK(*f.down_switch_flux == doctest::Approx(2.432086629e8).epsilon(1e-8));
    CHECK(to_pw(*f.up_switch_flux) == doctest::Approx(161.0).epsilon(0.01));
    CHECK(to_pw(*f.down_switch_flux) == doctest::Approx(57.0).epsilon(0.01));
    CHECK(*f.down_switch_flux < *f.up_switch_flux);

    const auto closed = resonant_turning_points(p);
    REQUIRE(closed);
    CHECK(std::abs(closed->first - *f.up_switch_y) <= 1e-8 * closed->first);
    CHECK(std::abs(closed->second - *f.down_switch_y) <= 1e-8 * closed->second);

    const auto b = switch_thresholds(Direction::Backward, p);
    REQUIRE(b.bistable);
    const double ratio = p.kappa1() / p.kappa2();
    CHECK(std::abs(*b.up_switch_flux - ratio * *f.up_switch_flux) <= 1e-9 * *b.up_switch_flux);
    CHECK(std::abs(*b.down_switch_flux - ratio * *f.down_switch_flux) <= 1e-9 * *b.down_switch_flux);
}

TEST_CASE("thresholds agree with the brute-force extremum oracle") {
    std::mt19937_64 rng(7);
    int bistable = 0;
    for (int i = 0; i < 40; ++i) {
        const auto p = random_params(rng);
        const auto t = switch_thresholds(Direction::Forward, p);
        const auto ext = oracle::scan_extrema(Direction::Forward, p);
        REQUIRE(t.bistable == (ext.size() == 2));
        if (!t.bistable) {
            CHECK_FALSE(t.up_switch_flux);
            CHECK_FALSE(t.down_switch_flux);
            continue;
        }
        ++bistable;
        CHECK(ext[0].is_max);
        CHECK(*t.up_switch_flux == doctest::Approx(ext[0].input).epsilon(1e-9));
        CHECK(*t.down_switch_flux == doctest::Approx(ext[1].input).epsilon(1e-9));
        CHECK(*t.up_switch_y == doctest::Approx(ext[0].y).epsilon(1e-5));
        CHECK(*t.down_switch_y == doctest::Approx(ext[1].y).epsilon(1e-5));
    }
    CHECK(bistable > 5);
}

TEST_CASE("resonant onset at C = 4") {
    const auto base = preset("paper-resonant");
    const double onset = 8.0 * base.total_kappa() * base.gamma() / (base.g() * base.g());
    CHECK(onset == doctest::Approx(2.544132231).epsilon(1e-9));
    for (double n : {0.5, 1.0, 2.0, 2.5, 2.54, 2.55, 2.6, 3.0, 5.0, 12.8, 20.0}) {
        const auto p = base.with_n_eff(n);
        const bool expect = p.cooperativity() > 4.0;
        CHECK(switch_thresholds(Direction::Forward, p).bistable == expect);
        CHECK(resonant_turning_points(p).has_value() == expect);
        CHECK((oracle::scan_extrema(Direction::Forward, p).size() == 2) == expect);
        if (expect) {
            const auto t = switch_thresholds(Direction::Forward, p);
            const auto c = resonant_turning_points(p);
            CHECK(std::abs(c->first - *t.up_switch_y) <= 1e-8 * c->first);
            CHECK(std::abs(c->second - *t.down_switch_y) <= 1e-8 * c->second);
        }
    }
}

TEST_CASE("ONR windows") {
    SUBCASE("empty cavity") {
        const auto p = preset("paper-resonant").with_n_eff(0.0);
        for (auto c : {WindowConvention::Guaranteed, WindowConvention::Hysteretic}) {
            const auto w = onr_window(p, c);
            CHECK_FALSE(w.nonempty);
            CHECK_THROWS_AS(window_metrics(p, w, 10), EmptyWindowError);
        }
    }

    SUBCASE("resonant N = 12.8") {
        const auto p = preset("paper-resonant");
        const auto g = onr_window(p, WindowConvention::Guaranteed);
        REQUIRE(g.nonempty);
        CHECK(to_pw(g.p_lower) == doctest::Approx(161.6317).epsilon(1e-4));
        CHECK(to_pw(g.p_upper) == doctest::Approx(878.6).epsilon(1e-3));
        CHECK(g.photons_lower > 4.0);

        const auto h = onr_window(p, WindowConvention::Hysteretic);
        REQUIRE(h.nonempty);
        CHECK(to_pw(h.p_lower) == doctest::Approx(56.68436).epsilon(1e-4));
        CHECK(to_pw(h.p_upper) == doctest::Approx(2505.3).epsilon(1e-3));
        CHECK(h.photons_lower == doctest::Approx(4.149723).epsilon(1e-4));
    }

    SUBCASE("detuned preset") {
        const auto p = preset("paper-fig2");
        const auto g = onr_window(p, WindowConvention::Guaranteed);
        const auto h = onr_window(p, WindowConvention::Hysteretic);
        CHECK(to_pw(g.p_lower) == doctest::Approx(161.66).epsilon(1e-3));
        CHECK(to_pw(g.p_upper) == doctest::Approx(891.0).epsilon(1e-3));
        CHECK(to_pw(h.p_lower) == doctest::Approx(57.48).epsilon(1e-3));
        CHECK(to_pw(h.p_upper) == doctest::Approx(2505.7).epsilon(1e-3));
    }

    SUBCASE("few atoms sit at few intracavity photons") {
        const auto p = preset("paper-resonant").with_n_eff(3.0);
        const auto h = onr_window(p, WindowConvention::Hysteretic);
        REQUIRE(h.nonempty);
        CHECK(h.photons_lower < 5.0);
    }

    SUBCASE("convention names") {
        CHECK(to_string(WindowConvention::Guaranteed) == "guaranteed");
        CHECK(parse_convention("hysteretic") == WindowConvention::Hysteretic);
        CHECK_THROWS_AS(parse_convention("other"), std::invalid_argument);
    }
}

TEST_CASE("guaranteed window is contained in the hysteretic window") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        const auto p = random_params(rng);
        const auto g = onr_window(p, WindowConvention::Guaranteed);
        const auto h = onr_window(p, WindowConvention::Hysteretic);
        if (!g.nonempty) continue;
        REQUIRE(h.nonempty);
        CHECK(h.p_lower <= g.p_lower);
        CHECK(g.p_upper <= h.p_upper);
        CHECK(g.p_lower < g.p_upper);
        ++checked;
    }
    CHECK(checked > 3);
}

TEST_CASE("window metrics") {
    const auto p = preset("paper-resonant");
    const auto g = onr_window(p, WindowConvention::Guaranteed);
    const auto m = window_metrics(p, g, 40);
    CHECK(m.samples == 40);
    CHECK(m.mean_forward_transmission > 0.0);
    CHECK(m.mean_forward_transmission <= 1.0);
    CHECK(m.mean_forward_transmission == doctest::Approx(0.1685).epsilon(0.01));
    CHECK(std::abs(m.mean_blocking_ratio_db - blocking_ratio_simplified(p).db) <= 3.0);

    const auto h = onr_window(p, WindowConvention::Hysteretic);
    const auto mh = window_metrics(p, h, 40);
    CHECK(mh.mean_forward_transmission == doctest::Approx(0.173).epsilon(0.01));
    CHECK(mh.mean_blocking_ratio_db >= 0.0);

    const auto m147 = window_metrics(p.with_n_eff(14.7), onr_window(p.with_n_eff(14.7), WindowConvention::Guaranteed), 40);
    CHECK(std::abs(m147.mean_blocking_ratio_db - 33.5) <= 3.0);

    const auto again = window_metrics(p, g, 40);
    CHECK(again.mean_forward_transmission == m.mean_forward_transmission);
    CHECK(again.mean_blocking_ratio_db == m.mean_blocking_ratio_db);
}

TEST_CASE("branch selection inside the window") {
    const auto p = preset("paper-resonant");
    const auto g = onr_window(p, WindowConvention::Guaranteed);
    const auto b = select_branches(0.5 * (g.p_lower + g.p_upper), p);
    CHECK(b.forward.stable);
    CHECK(b.backward.stable);
    CHECK(b.forward.output_flux > b.backward.output_flux);
}

TEST_CASE("atom-number sweep") {
    const auto base = preset("paper-resonant");
    const auto sweep = sweep_atom_number(base, {0.0, 1.0, 2.0, 3.0, 5.0, 8.0, 12.8, 14.7}, 20);
    REQUIRE(sweep.rows.size() == 8);
    CHECK(sweep.thresholds_nondecreasing);
    CHECK(sweep.windows_nondecreasing);
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const auto& r = sweep.rows[i];
        CHECK(r.guaranteed.nonempty == (r.cooperativity > 4.0));
        CHECK(r.guaranteed_metrics.has_value() == r.guaranteed.nonempty);
        if (i > 0) CHECK(r.simplified.ratio > sweep.rows[i - 1].simplified.ratio);
    }
    for (std::size_t i = 4; i < sweep.rows.size(); ++i) {
        CHECK(*sweep.rows[i].forward.up_switch_flux > *sweep.rows[i - 1].forward.up_switch_flux);
        CHECK(*sweep.rows[i].forward.down_switch_flux > *sweep.rows[i - 1].forward.down_switch_flux);
    }
    CHECK_THROWS_AS(sweep_atom_number(base, {}, 10), std::domain_error);
    CHECK_THROWS_AS(sweep_atom_number(base, {-1.0}, 10), std::domain_error);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "onr/bistability.hpp"
#include "onr/errors.hpp"
#include "onr/measurement.hpp"
#include "onr/steady_state.hpp"

using namespace onr;

namespace {

std::vector<double> power_grid(double lo_pw, double hi_pw, double step_pw) {
    std::vector<double> v;
    for (double p = lo_pw; p <= hi_pw + 1e-9; p += step_pw) v.push_back(p * 1e-12);
    return v;
}

}  // namespace

TEST_CASE("detector model") {
    const DetectorModel det{0.5, 200.0, 0.1};
    CHECK(apply_detector(0.0, det).expected_counts == doctest::Approx(20.0));
    CHECK(apply_detector(0.0, det).inferred_flux == 0.0);
    for (double flux : {1.0, 1e3, 1e7}) {
        const auto r = apply_detector(flux, det);
        CHECK(r.expected_counts >= 20.0);
        CHECK(r.inferred_flux == doctest::Approx(flux).epsilon(1e-12));
    }
    CHECK(infer_flux(5.0, det) == 0.0);  // below the dark floor

    CHECK_THROWS_AS(apply_detector(-1.0, det), std::domain_error);
    CHECK_THROWS_AS(apply_detector(1.0, DetectorModel{0.0, 0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(apply_detector(1.0, DetectorModel{1.5, 0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(apply_detector(1.0, DetectorModel{1.0, -1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(apply_detector(1.0, DetectorModel{1.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("apparent blocking ratio never exceeds the true ratio and saturates") {
    const double fwd = 1.2e8, bwd = 7.0e4;
    const double truth = fwd / bwd;
    double prev = truth;
    for (double dark : {0.0, 1.0, 1e2, 1e4, 7e4, 1e5, 1e6, 1e8, 1e10}) {
        const DetectorModel det{0.6, dark, 1.0};
        const double r = apparent_blocking_ratio(fwd, bwd, det);
        CHECK(r <= truth * (1.0 + 1e-12));
        CHECK(r >= 1.0);
        CHECK(r <= prev * (1.0 + 1e-12));
        prev = r;
    }
    CHECK(prev < 1.02);

    // Dark counts equal to the detected backward signal cost about 3 dB.
    const DetectorModel matched{0.6, 0.6 * bwd, 1.0};
    CHECK(to_db(truth) - to_db(apparent_blocking_ratio(fwd, bwd, matched)) ==
          doctest::Approx(3.0103).epsilon(1e-3));
}

TEST_CASE("sweep CSV ingestion") {
    std::istringstream good(
        "input_power_pW,forward_counts,backward_counts,repeats\n"
        "10,100,90,20\n"
        "\n"
        "20,210,95,20\n"
        "30,330,99,20\n");
    const auto rows = ingest_sweep(good);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].input_power == doctest::Approx(10e-12).epsilon(1e-14));
    CHECK(rows[1].line == 4);
    CHECK(rows[2].repeats == 20);

    std::stringstream buf;
    write_sweep_csv(buf, rows);
    const auto back = ingest_sweep(buf);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].input_power == doctest::Approx(rows[i].input_power).epsilon(1e-14));
        CHECK(back[i].forward_counts == rows[i].forward_counts);
    }

    std::istringstream bad(
        "input_power_pW,forward_counts,backward_counts,repeats\n"
        "10,100,90,20\n"
        "20,abc,95,20\n"
        "30,330,-1,20\n"
        "40,330,99,0\n"
        "50,330,99\n"
        "60,330,99,20\n"
        "70,330,99,20\n");
    try {
        ingest_sweep(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.rows().size() == 4);
        CHECK(e.rows()[0].line == 3);
        CHECK(e.rows()[1].line == 4);
        CHECK(e.rows()[2].line == 5);
        CHECK(e.rows()[3].line == 6);
        CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }

    std::istringstream short_file("input_power_pW,forward_counts,backward_counts,repeats\n1,1,1,1\n2,2,2,1\n");
    CHECK_THROWS_AS(ingest_sweep(short_file), std::domain_error);
    std::istringstream wrong_header("power,f,b,r\n1,1,1,1\n2,2,2,1\n3,3,3,1\n");
    CHECK_THROWS_AS(ingest_sweep(wrong_header), ParseError);
}

TEST_CASE("synthetic sweep round-trips the switching powers") {
    const auto p = preset("paper-resonant");
    const DetectorModel det{0.4, 50.0, 0.5};
    const double step = 10e-12;
    const auto powers = power_grid(10.0, 3000.0, 10.0);
    const auto records = synthesize_sweep(p, powers, det);
    const auto w = measured_window(records);
    REQUIRE(w.detected);
    CHECK(w.upper_in_range);

    const double up_f = flux_to_power(*switch_thresholds(Direction::Forward, p).up_switch_flux, p.wavelength());
    const double up_b = flux_to_power(*switch_thresholds(Direction::Backward, p).up_switch_flux, p.wavelength());
    CHECK(w.p_lower >= up_f);
    CHECK(w.p_lower - up_f <= step);
    CHECK(w.p_upper >= up_b);
    CHECK(w.p_upper - up_b <= step);

    const auto m = measured_metrics(records, det, p.wavelength());
    CHECK(m.points > 100);
    CHECK(m.transmission > 0.1);
    CHECK(m.transmission <= 0.182);
    CHECK(m.blocking_ratio_db > 20.0);
}

TEST_CASE("backward trace sits at the dark floor below its switching power") {
    const auto p = preset("paper-fig2");
    const DetectorModel det{1.0, 1e6, 1.0};
    const auto records = synthesize_sweep(p, power_grid(10.0, 1000.0, 10.0), det);
    for (const auto& r : records) {
        CHECK(r.backward_counts >= 1e6);
        CHECK(r.backward_counts < 2e6);
    }
    CHECK(records.back().forward_counts > 100.0 * 1e6);
}

TEST_CASE("dark-only data gives no window") {
    std::vector<SweepRecord> dark;
    for (int i = 1; i <= 20; ++i) dark.push_back({i * 10e-12, 500.0, 500.0, 20, 0});
    const auto w = measured_window(dark);
    CHECK_FALSE(w.detected);
    CHECK(w.status == "no window detected");
    CHECK_THROWS_AS(measured_metrics(dark, DetectorModel{}), EmptyWindowError);
}

TEST_CASE("threshold rule is configurable") {
    const auto p = preset("paper-resonant");
    const auto records = synthesize_sweep(p, power_grid(10.0, 3000.0, 10.0), DetectorModel{});
    const auto strict = measured_window(records, ThresholdRule{1000.0, 3});
    const auto loose = measured_window(records, ThresholdRule{5.0, 3});
    CHECK(strict.p_lower >= loose.p_lower);
    CHECK_THROWS_AS(measured_window(records, ThresholdRule{1.0, 3}), std::domain_error);
    CHECK_THROWS_AS(measured_window(records, ThresholdRule{5.0, 1}), std::domain_error);
}

TEST_CASE("seeded Poisson sweeps are reproducible") {
    const auto p = preset("paper-fig2");
    const DetectorModel det{0.5, 300.0, 0.01};
    const auto powers = power_grid(10.0, 300.0, 10.0);
    const auto a = synthesize_sweep(p, powers, det, 20, 17);
    const auto b = synthesize_sweep(p, powers, det, 20, 17);
    const auto c = synthesize_sweep(p, powers, det, 20, 18);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].forward_counts == b[i].forward_counts);
        CHECK(a[i].backward_counts == b[i].backward_counts);
        CHECK(a[i].repeats == 20);
        differs = differs || a[i].forward_counts != c[i].forward_counts;
    }
    CHECK(differs);
    CHECK_THROWS_AS(synthesize_sweep(p, powers, det, 0), std::domain_error);
}

#include <doctest.h>

#include <cmath>
#include <complex>

#include "onr/bistability.hpp"
#include "onr/errors.hpp"
#include "onr/quantum.hpp"
#include "onr/steady_state.hpp"

using namespace onr;

namespace {

QuantumModel base(int atoms, int fock, const SystemParams& p, Direction d = Direction::Forward) {
    return QuantumModel{.n_atoms = atoms, .fock_dim = fock, .params = p.with_n_eff(atoms), .direction = d};
}

QuantumModel model(int atoms, int fock, const SystemParams& p, double input_flux,
                   Direction d = Direction::Forward) {
    auto m = base(atoms, fock, p, d);
    m.drive_amplitude = drive_for_input_flux(input_flux, d, m.params);
    return m;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("drive amplitude convention") {
    const auto p = preset("paper-resonant");
    const double eta = drive_for_input_flux(1e8, Direction::Forward, p);
    CHECK(eta * eta == doctest::Approx(2.0 * p.kappa1() * 1e8).epsilon(1e-14));
    CHECK(input_flux_for_drive(eta, Direction::Forward, p) == doctest::Approx(1e8).epsilon(1e-14));
    const double eta_b = drive_for_input_flux(1e8, Direction::Backward, p);
    CHECK(eta_b * eta_b == doctest::Approx(2.0 * p.kappa2() * 1e8).epsilon(1e-14));
}

TEST_CASE("empty cavity matches the coherent-state result") {
    for (double dc : {0.0, 1.3}) {
        const auto p = preset("paper-resonant").with_detunings(0.0, mhz_to_rate(dc));
        auto m = model(0, 30, p, 3e6);
        const auto s = steady_state(m);
        const double kappa = p.total_kappa();
        const double eta = m.drive_amplitude;
        const double expect = eta * eta / (kappa * kappa + p.delta_cav() * p.delta_cav());
        CHECK(std::abs(s.mean_photon_number - expect) <= 1e-6 * expect);
        CHECK(s.output_flux == doctest::Approx(2.0 * p.kappa2() * s.mean_photon_number).epsilon(1e-14));
        CHECK(s.adequate);
    }
}

TEST_CASE("zero drive gives the vacuum") {
    auto m = model(2, 4, preset("paper-resonant"), 0.0);
    const auto s = steady_state(m);
    CHECK(std::abs(s.mean_photon_number) < 1e-12);
    CHECK(std::abs(s.atomic_excitation) < 1e-12);
    CHECK(std::abs(s.density(0, 0) - std::complex<double>(1.0, 0.0)) < 1e-10);
}

TEST_CASE("weak drive reproduces the linear semiclassical transmission") {
    for (const char* name : {"paper-resonant", "paper-fig2"}) {
        for (int atoms : {0, 1, 2, 3}) {
            const auto p = preset(name).with_n_eff(atoms);
            for (auto d : {Direction::Forward, Direction::Backward}) {
                // Keep <n> around 1e-5 so saturation corrections stay far below 1%.
                const double t_lin = linear_transmission(d, p);
                const double flux = 1e-5 * 2.0 * p.output_kappa(d) / t_lin;
                const auto s = steady_state(model(atoms, 4, p, flux, d));
                CHECK(s.mean_photon_number < 1e-3);
                CHECK(std::abs(s.output_flux / flux / t_lin - 1.0) <= 0.01);
            }
        }
    }
}

TEST_CASE("density operator is physical") {
    auto m = model(3, 8, preset("paper-fig2"), 5e7);
    const auto s = steady_state(m);
    CHECK(s.trace_error <= 1e-10);
    CHECK(s.hermiticity_error <= 1e-8);
    CHECK(s.min_eigenvalue >= -1e-9);
    CHECK(std::abs(s.density.trace() - std::complex<double>(1.0, 0.0)) <= 1e-10);
    CHECK((s.density - s.density.adjoint()).norm() <= 1e-8);
    CHECK(s.density.rows() == 32);
}

TEST_CASE("truncation convergence on adequate points") {
    const auto p = preset("paper-resonant");
    for (double flux : {1e6, 1e7, 5e7}) {
        const auto small = steady_state(model(1, 12, p, flux));
        const auto big = steady_state(model(1, 24, p, flux));
        if (!small.adequate) continue;
        CHECK(std::abs(big.mean_photon_number - small.mean_photon_number) <=
              1e-4 * big.mean_photon_number);
    }
    const auto starved = steady_state(model(0, 3, p, 5e8));
    CHECK_FALSE(starved.adequate);
    CHECK(starved.top_fock_population > 1e-6);
}

TEST_CASE("model validation") {
    auto m = model(20, 200, preset("paper-resonant"), 1e6);
    CHECK(m.dimension() == 21u * 200u);
    CHECK_THROWS_AS(steady_state(m), DimensionCapError);
    m = model(1, 1, preset("paper-resonant"), 1e6);
    CHECK_THROWS_AS(m.validate(), std::domain_error);
    m = model(1, 4, preset("paper-resonant"), 1e6);
    m.n_atoms = -1;
    CHECK_THROWS_AS(m.validate(), std::domain_error);
    m.n_atoms = 1;
    m.drive_amplitude = -1.0;
    CHECK_THROWS_AS(m.validate(), std::domain_error);
}

TEST_CASE("quantum curve is single-valued where the semiclassical one is bistable") {
    auto f = preset("paper-resonant").fields();
    f.g = mhz_to_rate(15.0);
    f.n_eff = 1.0;
    const SystemParams p(f);
    CHECK(p.cooperativity() > 4.0);

    const auto t = switch_thresholds(Direction::Forward, p);
    REQUIRE(t.bistable);
    const double mid = std::sqrt(*t.up_switch_flux * *t.down_switch_flux);
    CHECK(output_for_input(mid, Direction::Forward, p).size() == 3);

    const auto tmpl = base(1, 40, p);
    std::vector<double> fluxes;
    const double lo = 0.3 * *t.down_switch_flux, hi = 3.0 * *t.up_switch_flux;
    for (int i = 0; i < 15; ++i) fluxes.push_back(lo * std::pow(hi / lo, i / 14.0));
    const auto curve = quantum_io_curve(tmpl, fluxes);
    REQUIRE(curve.points.size() == fluxes.size());
    CHECK(curve.monotone);
    CHECK(curve.all_adequate);
    for (std::size_t i = 0; i < fluxes.size(); ++i) CHECK(curve.points[i].input_flux == fluxes[i]);
}

TEST_CASE("low-drive tail follows the blocked-direction approximation") {
    const auto p = preset("paper-resonant").with_n_eff(1.0);
    const auto tmpl = base(1, 4, p, Direction::Backward);
    const auto curve = quantum_io_curve(tmpl, {1e4, 1e5, 1e6});
    for (const auto& pt : curve.points) {
        const double approx = approx_backward_output(pt.input_flux, p);
        CHECK(std::abs(pt.output_flux / approx - 1.0) <= 0.05);
    }
}

TEST_CASE("high-drive slope approaches the empty-cavity transmission") {
    const auto p = preset("paper-resonant").with_n_eff(1.0);
    const auto tmpl = base(1, 60, p);
    std::vector<double> fluxes;
    for (int i = 0; i <= 5; ++i) fluxes.push_back(2.8e7 * std::pow(10.0, i / 5.0));
    const auto curve = quantum_io_curve(tmpl, fluxes);
    CHECK(curve.monotone);
    std::vector<double> x, y;
    for (const auto& pt : curve.points) {
        if (!pt.adequate) continue;
        x.push_back(pt.input_flux);
        y.push_back(pt.output_flux);
    }
    REQUIRE(x.size() >= 4);
    CHECK(curve.points.back().mean_photon_number > 10.0);
    CHECK(std::abs(slope(x, y) / p.empty_cavity_transmission() - 1.0) <= 0.10);
}

TEST_CASE("quantum curve input validation") {
    const auto tmpl = base(0, 4, preset("paper-resonant"));
    CHECK_THROWS_AS(quantum_io_curve(tmpl, {}), std::domain_error);
    CHECK_THROWS_AS(quantum_io_curve(tmpl, {-1.0}), std::domain_error);
}

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "onr/params.hpp"

namespace onr {

/// Driven Tavis-Cummings model on the symmetric Dicke ladder of n_atoms
/// two-level atoms times a truncated cavity Fock space.
///
/// In the probe frame (hbar = 1):
///   H = delta a^dag a + Delta K + g (a^dag J- + a J+) + i eta (a^dag - a)
/// where K = J_z + N/2 counts atomic excitations,
/// and collapse operators sqrt(2 kappa) a and sqrt(2 gamma / N) J-. The
/// normalised collective decay gives the single-excitation Dicke state the
/// single-atom field decay rate gamma, matching the semiclassical model in
/// the weak-drive limit.
struct QuantumModel {
    int n_atoms = 0;
    int fock_dim = 2;
    SystemParams params;
    double drive_amplitude = 0.0;  // eta (rad/s); P_in = eta^2 / (2 kappa_in)
    Direction direction = Direction::Forward;
    std::size_t dimension_cap = 2048;

    std::size_t dimension() const;
    void validate() const;
};

// eta = sqrt(2 kappa_in P_in).
double drive_for_input_flux(double input_flux, Direction d, const SystemParams& p);
double input_flux_for_drive(double drive_amplitude, Direction d, const SystemParams& p);

struct QuantumSteadyState {
    Eigen::MatrixXcd density;
    double mean_photon_number = 0.0;
    double output_flux = 0.0;  // 2 kappa_out <a^dag a>
    double atomic_excitation = 0.0;
    double top_fock_population = 0.0;
    bool adequate = false;  // top Fock level population <= 1e-6
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double residual = 0.0;  // relative residual of the stationarity system
};

// Solves L rho = 0 with the vacuum equation replaced by Tr rho = 1, using
// GMRES preconditioned by the exact inverse of the undriven generator.
// Throws DimensionCapError above the cap and std::runtime_error if the
// solve stalls or the result is not a valid density operator (trace 1
// within 1e-10, eigenvalues >= -1e-9).
QuantumSteadyState steady_state(const QuantumModel& model);

struct QuantumIoPoint {
    double input_flux = 0.0;
    double output_flux = 0.0;
    double mean_photon_number = 0.0;
    bool adequate = false;
};

struct QuantumIoCurve {
    std::vector<QuantumIoPoint> points;  // same order as the inputs
    bool monotone = true;                // output nondecreasing in input
    bool all_adequate = true;
};

// Steady-state output for each input flux; the drive amplitude of the
// template is replaced per point.
QuantumIoCurve quantum_io_curve(const QuantumModel& model_template,
                                const std::vector<double>& input_fluxes);

}  // namespace onr

#include "onr/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "onr/errors.hpp"

namespace onr {

namespace {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;
using RowSpMat = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

// Largest Hilbert dimension for which a stalled Krylov solve falls back
// to sparse LU; above it the fill-in is prohibitive.
constexpr int kDirectSolveLimit = 144;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Product basis |n, k> (n photons, k atomic excitations) reordered so that
// each excitation manifold n + k = m occupies a contiguous index range.
struct ManifoldBasis {
    int fock = 0;
    int atoms = 0;
    std::vector<int> photons;     // per basis index
    std::vector<int> excitation;  // per basis index
    std::vector<int> offset;      // per manifold, plus a final sentinel
    int dim() const { return static_cast<int>(photons.size()); }
    int manifolds() const { return static_cast<int>(offset.size()) - 1; }
    int size(int m) const { return offset[m + 1] - offset[m]; }
    int product_index(int i) const { return excitation[i] * fock + photons[i]; }
};

ManifoldBasis make_basis(int fock, int atoms) {
    ManifoldBasis b;
    b.fock = fock;
    b.atoms = atoms;
    for (int m = 0; m <= fock - 1 + atoms; ++m) {
        b.offset.push_back(b.dim());
        for (int k = std::max(0, m - (fock - 1)); k <= std::min(atoms, m); ++k) {
            b.photons.push_back(m - k);
            b.excitation.push_back(k);
        }
    }
    b.offset.push_back(b.dim());
    return b;
}

template <typename F>
SpMat build(const ManifoldBasis& b, F element) {
    std::vector<int> index(static_cast<std::size_t>(b.fock * (b.atoms + 1)));
    for (int i = 0; i < b.dim(); ++i) index[b.product_index(i)] = i;
    std::vector<Eigen::Triplet<cd>> t;
    for (int i = 0; i < b.dim(); ++i) element(b.photons[i], b.excitation[i], [&](int n, int k, double v) {
        if (n >= 0 && n < b.fock && k >= 0 && k <= b.atoms && v != 0.0) {
            t.emplace_back(index[k * b.fock + n], i, v);
        }
    });
    SpMat m(b.dim(), b.dim());
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

// Lindblad generator L(X) = A X + X A^dag + sum_c c X c^dag, with the
// (vacuum, vacuum) equation replaced by the trace. Rates are divided by
// the total cavity decay so the operator is O(1).
struct Generator {
    ManifoldBasis basis;
    SpMat damped;  // A without the drive
    // Row-major copies for the sparse-dense products in apply().
    RowSpMat a, jm, a_adj, jm_adj;
    RowSpMat driven, driven_adj;  // A with the drive
    double cavity_jump = 0.0;  // 2 kappa
    double atom_jump = 0.0;    // 2 gamma / N

    // Per manifold: Schur form of the undriven A block, and the lowering
    // blocks from manifold m + 1 into m.
    std::vector<Mat> schur_t, schur_u;
    std::vector<Mat> a_down, jm_down;

    Mat apply(const Mat& x) const {
        Mat y(x.rows(), x.cols());
        Mat tmp(x.rows(), x.cols());
        y.noalias() = driven * x;
        y.noalias() += x * driven_adj;
        tmp.noalias() = a * x;
        y.noalias() += cavity_jump * (tmp * a_adj);
        if (atom_jump > 0.0) {
            tmp.noalias() = jm * x;
            y.noalias() += atom_jump * (tmp * jm_adj);
        }
        y(0, 0) = x.trace();
        return y;
    }

    // Solves A_m Y + Y A_n^dag = c by Bartels-Stewart on the Schur forms.
    Mat sylvester(int m, int n, const Mat& c) const {
        const Mat& t = schur_t[m];
        const Mat& s = schur_t[n];
        Mat z = schur_u[m].adjoint() * c * schur_u[n];
        for (int j = static_cast<int>(z.cols()) - 1; j >= 0; --j) {
            Vec rhs = z.col(j);
            for (int l = j + 1; l < z.cols(); ++l) rhs -= std::conj(s(j, l)) * z.col(l);
            Mat shifted = t;
            shifted.diagonal().array() += std::conj(s(j, j));
            z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
        }
        return schur_u[m] * z * schur_u[n].adjoint();
    }

    // Exact inverse of the undriven generator (with the trace row). Jumps
    // lower m + n by two and the undriven A is block diagonal, so blocks
    // are solved from the top level down.
    Mat precondition(const Mat& r) const {
        const auto& b = basis;
        const int top = b.manifolds() - 1;
        Mat x = Mat::Zero(b.dim(), b.dim());
        for (int level = 2 * top; level >= 1; --level) {
            for (int m = std::max(0, level - top); m <= std::min(top, level); ++m) {
                const int n = level - m;
                Mat c = r.block(b.offset[m], b.offset[n], b.size(m), b.size(n));
                if (m < top && n < top) {
                    const auto above = x.block(b.offset[m + 1], b.offset[n + 1], b.size(m + 1), b.size(n + 1));
                    c -= cavity_jump * a_down[m] * above * a_down[n].adjoint();
                    if (atom_jump > 0.0) c -= atom_jump * jm_down[m] * above * jm_down[n].adjoint();
                }
                x.block(b.offset[m], b.offset[n], b.size(m), b.size(n)) = sylvester(m, n, c);
            }
        }
        x(0, 0) = r(0, 0) - (x.trace() - x(0, 0));
        return x;
    }
};

Generator make_generator(const QuantumModel& model) {
    const auto& p = model.params;
    const double scale = p.total_kappa();
    Generator gen;
    gen.basis = make_basis(model.fock_dim, model.n_atoms);
    const auto& b = gen.basis;
    const int atoms = model.n_atoms;

    const SpMat a = build(b, [](int n, int k, auto put) { put(n - 1, k, std::sqrt(static_cast<double>(n))); });
    const SpMat jm = build(b, [atoms](int n, int k, auto put) {
        put(n, k - 1, std::sqrt(static_cast<double>(k) * (atoms - k + 1)));
    });
    const SpMat a_adj = a.adjoint();
    const SpMat jm_adj = jm.adjoint();

    const double delta = p.delta_cav() / scale;
    const double Delta = p.delta_atom() / scale;
    const double g = p.g() / scale;
    const double eta = model.drive_amplitude / scale;
    gen.cavity_jump = 2.0;  // 2 kappa / kappa
    gen.atom_jump = atoms > 0 ? 2.0 * p.gamma() / scale / atoms : 0.0;

    const cd i(0.0, 1.0);
    const SpMat number = a_adj * a;
    const SpMat exc = build(b, [](int n, int k, auto put) { put(n, k, static_cast<double>(k)); });
    const SpMat h = delta * number + Delta * exc + g * (a_adj * jm + a * jm_adj);
    SpMat decay = 0.5 * gen.cavity_jump * number;
    if (atoms > 0) decay += 0.5 * gen.atom_jump * SpMat(jm_adj * jm);
    gen.damped = -i * h - decay;
    gen.damped.makeCompressed();
    // -i [i eta (a^dag - a), X] = eta (B X - X B) with B = a^dag - a, B^dag = -B.
    const SpMat driven = gen.damped + eta * SpMat(a_adj - a);
    gen.driven = driven;
    gen.driven_adj = SpMat(driven.adjoint());
    gen.a = a;
    gen.a_adj = a_adj;
    gen.jm = jm;
    gen.jm_adj = jm_adj;

    const Mat dense_a = Mat(a);
    const Mat dense_jm = Mat(jm);
    const Mat dense_damped = Mat(gen.damped);
    const int count = b.manifolds();
    for (int m = 0; m < count; ++m) {
        const Mat block = dense_damped.block(b.offset[m], b.offset[m], b.size(m), b.size(m));
        Eigen::ComplexSchur<Mat> schur(block);
        gen.schur_t.push_back(schur.matrixT());
        gen.schur_u.push_back(schur.matrixU());
        if (m + 1 < count) {
            gen.a_down.push_back(dense_a.block(b.offset[m], b.offset[m + 1], b.size(m), b.size(m + 1)));
            gen.jm_down.push_back(dense_jm.block(b.offset[m], b.offset[m + 1], b.size(m), b.size(m + 1)));
        }
    }
    return gen;
}

// Right-preconditioned restarted GMRES for apply(precondition(y)) = rhs.
// Returns the solution x = precondition(y) and the final residual norm.
std::pair<Mat, double> solve_stationary(const Generator& gen, const Mat& rhs, double tol, int restart,
                                        int max_iterations) {
    const Eigen::Index d = rhs.rows();
    const Eigen::Index len = d * d;
    auto as_mat = [d](const Vec& v) { return Eigen::Map<const Mat>(v.data(), d, d); };
    auto as_vec = [len](const Mat& m) { return Eigen::Map<const Vec>(m.data(), len); };

    const Vec b = as_vec(rhs);
    const double bnorm = b.norm();
    Vec y = Vec::Zero(len);
    Vec r = b;
    double rnorm = r.norm();
    int iterations = 0;

    std::vector<Vec> v;
    while (rnorm > tol * bnorm && iterations < max_iterations) {
        v.assign(1, r / rnorm);
        Mat h = Mat::Zero(restart + 1, restart);
        Vec gvec = Vec::Zero(restart + 1);
        gvec(0) = rnorm;
        std::vector<Eigen::JacobiRotation<cd>> rot(static_cast<std::size_t>(restart));
        int k = 0;
        for (; k < restart && iterations < max_iterations; ++k) {
            ++iterations;
            Vec w = as_vec(gen.apply(gen.precondition(as_mat(v[k]))));
            for (int j = 0; j <= k; ++j) {
                h(j, k) = v[j].dot(w);
                w -= h(j, k) * v[j];
            }
            const double next = w.norm();
            h(k + 1, k) = next;
            for (int j = 0; j < k; ++j) {
                Eigen::Matrix<cd, 2, 1> pair(h(j, k), h(j + 1, k));
                pair.applyOnTheLeft(0, 1, rot[j].adjoint());
                h(j, k) = pair(0);
                h(j + 1, k) = pair(1);
            }
            cd diag;
            rot[k].makeGivens(h(k, k), h(k + 1, k), &diag);
            h(k, k) = diag;
            h(k + 1, k) = 0.0;
            Eigen::Matrix<cd, 2, 1> gpair(gvec(k), gvec(k + 1));
            gpair.applyOnTheLeft(0, 1, rot[k].adjoint());
            gvec(k) = gpair(0);
            gvec(k + 1) = gpair(1);
            if (next == 0.0 || std::abs(gvec(k + 1)) <= tol * bnorm) {
                ++k;
                break;
            }
            v.push_back(w / next);
        }
        const Vec coeff = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(gvec.head(k));
        for (int j = 0; j < k; ++j) y += coeff(j) * v[j];
        r = b - as_vec(gen.apply(gen.precondition(as_mat(y))));
        rnorm = r.norm();
    }
    return {gen.precondition(as_mat(y)), rnorm / bnorm};
}

// Sparse LU on the vectorised generator (column-major vec, so
// vec(A X B) = (B^T kron A) vec X), vacuum row replaced by the trace.
Mat solve_direct(const Generator& gen) {
    const int d = gen.basis.dim();
    SpMat id(d, d);
    id.setIdentity();
    const SpMat driven = gen.driven;
    const SpMat a = gen.a;
    const SpMat jm = gen.jm;
    SpMat l = Eigen::kroneckerProduct(id, driven);
    l += SpMat(Eigen::kroneckerProduct(SpMat(driven.conjugate()), id));
    l += gen.cavity_jump * SpMat(Eigen::kroneckerProduct(SpMat(a.conjugate()), a));
    if (gen.atom_jump > 0.0) l += gen.atom_jump * SpMat(Eigen::kroneckerProduct(SpMat(jm.conjugate()), jm));
    l.prune([](Eigen::Index row, Eigen::Index, const cd&) { return row != 0; });
    std::vector<Eigen::Triplet<cd>> trace;
    for (int k = 0; k < d; ++k) trace.emplace_back(0, k * d + k, 1.0);
    SpMat trace_row(l.rows(), l.cols());
    trace_row.setFromTriplets(trace.begin(), trace.end());
    l += trace_row;
    l.makeCompressed();

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(l);
    if (lu.info() != Eigen::Success) throw std::runtime_error("steady_state: Liouvillian factorisation failed");
    Vec rhs = Vec::Zero(l.rows());
    rhs(0) = 1.0;
    const Vec x = lu.solve(rhs);
    return Eigen::Map<const Mat>(x.data(), d, d);
}

}  // namespace

std::size_t QuantumModel::dimension() const {
    return static_cast<std::size_t>(n_atoms + 1) * static_cast<std::size_t>(fock_dim);
}

void QuantumModel::validate() const {
    if (n_atoms < 0) throw std::domain_error("n_atoms must be >= 0");
    if (fock_dim < 2) throw std::domain_error("fock_dim must be >= 2");
    if (!(drive_amplitude >= 0.0) || !std::isfinite(drive_amplitude)) {
        throw std::domain_error("drive amplitude must be finite and >= 0");
    }
    if (dimension() > dimension_cap) {
        throw DimensionCapError("Hilbert dimension " + std::to_string(dimension()) +
                                " exceeds the cap of " + std::to_string(dimension_cap));
    }
}

double drive_for_input_flux(double input_flux, Direction d, const SystemParams& p) {
    if (!(input_flux >= 0.0)) throw std::domain_error("input flux must be non-negative");
    return std::sqrt(2.0 * p.input_kappa(d) * input_flux);
}

double input_flux_for_drive(double drive_amplitude, Direction d, const SystemParams& p) {
    return drive_amplitude * drive_amplitude / (2.0 * p.input_kappa(d));
}

QuantumSteadyState steady_state(const QuantumModel& model) {
    model.validate();
    const Generator gen = make_generator(model);
    const auto& basis = gen.basis;
    const int d = basis.dim();

    Mat rhs = Mat::Zero(d, d);
    rhs(0, 0) = 1.0;
    Mat x;
    double residual = 0.0;
    const bool fallback = d <= kDirectSolveLimit;
    std::tie(x, residual) = solve_stationary(gen, rhs, 1e-13, 30, fallback ? 300 : 1000);
    if (!(residual <= 1e-10) && fallback) {
        // strong drive defeats the undriven preconditioner; small enough to factorise
        x = solve_direct(gen);
        residual = (gen.apply(x) - rhs).norm();
    }
    if (!(residual <= 1e-10)) {
        throw std::runtime_error("steady_state: iterative solve stalled at relative residual " +
                                 std::to_string(residual));
    }

    QuantumSteadyState out;
    out.residual = residual;
    out.hermiticity_error = (x - x.adjoint()).cwiseAbs().maxCoeff();
    x = 0.5 * (x + x.adjoint()).eval();
    out.trace_error = std::abs(x.trace() - cd(1.0, 0.0));

    Eigen::SelfAdjointEigenSolver<Mat> eig(x, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (out.trace_error > 1e-10 || out.min_eigenvalue < -1e-9 || out.hermiticity_error > 1e-8) {
        throw std::runtime_error("steady_state: solution is not a valid density operator (trace error " +
                                 std::to_string(out.trace_error) + ", min eigenvalue " +
                                 std::to_string(out.min_eigenvalue) + ")");
    }

    out.density.resize(d, d);
    for (int i = 0; i < d; ++i) {
        const double pop = x(i, i).real();
        out.mean_photon_number += basis.photons[i] * pop;
        out.atomic_excitation += basis.excitation[i] * pop;
        if (basis.photons[i] == basis.fock - 1) out.top_fock_population += pop;
        for (int j = 0; j < d; ++j) out.density(basis.product_index(i), basis.product_index(j)) = x(i, j);
    }
    out.output_flux = 2.0 * model.params.output_kappa(model.direction) * out.mean_photon_number;
    out.adequate = out.top_fock_population <= 1e-6;
    return out;
}

QuantumIoCurve quantum_io_curve(const QuantumModel& model_template,
                                const std::vector<double>& input_fluxes) {
    if (input_fluxes.empty()) throw std::domain_error("quantum_io_curve: empty input list");
    QuantumIoCurve curve;
    curve.points.reserve(input_fluxes.size());
    for (double flux : input_fluxes) {
        QuantumModel m = model_template;
        m.drive_amplitude = drive_for_input_flux(flux, m.direction, m.params);
        const auto ss = steady_state(m);
        curve.points.push_back({flux, ss.output_flux, ss.mean_photon_number, ss.adequate});
        curve.all_adequate = curve.all_adequate && ss.adequate;
    }

    std::vector<QuantumIoPoint> sorted = curve.points;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& l, const auto& r) { return l.input_flux < r.input_flux; });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].output_flux < sorted[k - 1].output_flux) curve.monotone = false;
    }
    return curve;
}

}  // namespace onr

#pragma once

#include <vector>

#include "onr/params.hpp"

namespace onr {

/// One semiclassical steady state of the driven atom-cavity system.
struct SteadyStateSolution {
    double y = 0.0;            // saturation parameter P_t / P_ct
    double output_flux = 0.0;  // transmitted photon flux (1/s)
    double input_flux = 0.0;   // driving photon flux (1/s)
    bool stable = true;        // dP_in/dP_t >= 0
    bool degenerate = false;   // merged double root at a saddle node
};

// Direction-independent shape of the input-output relation. In units of
// the direction-dependent scale P_ct kappa^2 / (4 kappa1 kappa2) the input
// flux is R(y) = y [a + b/u + c/u^2] with u = 1 + y, where
//   a = 1 + (delta/kappa)^2
//   b = 2 (G - delta H) / kappa^2
//   c = (G^2 + H^2) / kappa^2
// and G = Omega^2 gamma / (Delta^2 + gamma^2), H = Omega^2 Delta / (Delta^2 + gamma^2).
struct ResponseShape {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;

    static ResponseShape from(const SystemParams& p);
    double value(double y) const;  // R(y)
    double slope(double y) const;  // dR/dy
};

// P_ct kappa^2 / (4 kappa1 kappa2): converts R(y) into an input flux.
double input_scale(Direction d, const SystemParams& p);

// Input flux that produces the given saturation parameter.
double input_for_saturation(double y, Direction d, const SystemParams& p);

// Direct evaluation of the nonlinear input-output relation.
double input_for_output(double output_flux, Direction d, const SystemParams& p);

// dP_in / dy along the steady-state curve.
double input_slope(double y, Direction d, const SystemParams& p);

/// Every steady state (y > 0) for the given input flux, ascending in y.
///
/// Solves the cubic a y^3 + (2a + b - K) y^2 + (a + b + c - 2K) y - K = 0
/// with K = P_in / input_scale, obtained by clearing denominators. Roots come
/// from the closed form and are Newton-polished. Pairs of roots whose
/// separating extremum lies within 1e-9 relative of the input are merged
/// into one degenerate saddle-node solution. N_eff = 0 is solved linearly.
std::vector<SteadyStateSolution> output_for_input(double input_flux, Direction d,
                                                  const SystemParams& p);

// Weak-drive (y -> 0) transmission P_t / P_in. Independent of direction.
double linear_transmission(Direction d, const SystemParams& p);

// Large-drive forward approximation, (4 k1 k2/k^2) P_in - 2 N k2 gamma / k,
// floored at zero.
double approx_forward_output(double input_flux, const SystemParams& p);

// Weak-saturation backward approximation, (4 k1 k2/k^2) P_in / (1 + 2C)^2.
double approx_backward_output(double input_flux, const SystemParams& p);

struct BlockingRatio {
    double ratio = 1.0;
    double db = 0.0;
};

// (1 + 2C)^2, the forward/backward output ratio of the two approximations.
BlockingRatio blocking_ratio_simplified(const SystemParams& p);

double to_db(double ratio);

}  // namespace onr

#pragma once

#include <istream>
#include <string>

#include "onr/params.hpp"

namespace onr {

// Flat "key = value" parameter files. Blank lines and '#' comments are
// ignored. Recognised keys and their units:
//
//   preset          name of the base parameter set (must come first if used)
//   kappa1, kappa2, kappa_loss, g, gamma    MHz (rate / 2pi)
//   delta_atom, delta_cav                   MHz (rate / 2pi)
//   n_eff                                   dimensionless
//   wavelength                              nm
//   cavity_length                           um
//   t1_ppm, t2_ppm, loss_ppm                ppm, converted with cavity_length
//
// Mirror ppm keys are converted after the whole file is read, so their
// position relative to cavity_length does not matter. Errors carry the
// offending line number.
SystemParams load_params(std::istream& in, const SystemParams& base);
SystemParams load_params_file(const std::string& path, const SystemParams& base);

}  // namespace onr

#pragma once

#include "mvar/model.hpp"

namespace mvar {

/// Three-asset, two-regime MVAR(2;1,1) used as the reference simulation
/// design: weights (0.75, 0.25), zero intercepts, one AR lag per regime.
MvarParameters reference_two_regime_model();

}  // namespace mvar

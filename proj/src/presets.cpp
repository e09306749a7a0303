#include "mvar/presets.hpp"

namespace mvar {

MvarParameters reference_two_regime_model() {
    MvarParameters p = MvarParameters::zeros(ModelSpec(2, 3, {1, 1}));
    p.weights << 0.75, 0.25;

    p.components[0].ar[0] << 0.5, 0.0, 0.4,
                             -0.3, 0.0, 0.5,
                             -0.6, 0.5, -0.3;
    p.components[0].cov << 1.0, 0.5, -0.4,
                           0.5, 2.0, 0.8,
                           -0.4, 0.8, 4.0;

    p.components[1].ar[0] << -0.5, 1.0, -0.4,
                             0.3, 0.0, -0.2,
                             0.0, -0.5, 0.5;
    p.components[1].cov << 1.0, 0.2, 0.0,
                           0.2, 2.0, -0.55,
                           0.0, -0.55, 4.0;
    p.validate();
    return p;
}

}  // namespace mvar

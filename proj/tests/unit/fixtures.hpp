#pragma once

// The shipped two-unit configuration (examples/n2-valid.toml), built in code
// so that the numerical tests do not depend on the document loader.

#include "eirnet/anosov.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/rotation_map.hpp"

namespace eirnet::fixtures {

inline ModelParams n2_params()
{
    ModelParams p;
    p.n_units = 2;
    p.anosov = anosov_data({{{3, 1}, {2, 1}}});
    p.b = 0.3;
    p.phi.table = {0.0, 0.2, 0.4};
    p.assumptions = {0.01, 0.1};
    for (int i = 0; i < 2; ++i)
        p.fibers.push_back(NSFlowSpec::sine_family(7.0, 2.5e-13, 0.2, 0.5));
    p.rotations.push_back(build_rotation_map(1, 0.01, 0.12, 0.1, 0.0));
    p.rotations.push_back(build_rotation_map(2, 0.01, 0.12, 0.1, 0.37));
    return p;
}

} // namespace eirnet::fixtures

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eirnet/anosov.hpp"
#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/rotation_map.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

/// Inhibition strength Phi(n) for n = 0..N units in the arc (1/2, 1).
struct InhibitionSpec {
    std::vector<double> table;

    std::size_t max_count() const noexcept { return table.empty() ? 0 : table.size() - 1; }
    double operator()(std::size_t n) const { return table.at(n); }

    static InhibitionSpec linear(std::size_t n_units, double eta)
    {
        InhibitionSpec s;
        for (std::size_t n = 0; n <= n_units; ++n)
            s.table.push_back(eta * static_cast<double>(n));
        return s;
    }
};

/// Model-level constants appearing in the steepness assumptions.
struct AssumptionConstants {
    double epsilon = 0.01; ///< steep-slope parameter: r' > 1/epsilon away from the S-pole band
    double c_prime = 0.1;  ///< global slope floor of every rotation lift
};

/// Complete description of one network instance.
struct ModelParams {
    std::size_t n_units = 0;
    AnosovSpec anosov;
    double b = 0.5;
    InhibitionSpec phi;
    std::vector<NSFlowSpec> fibers;
    std::vector<RotationMapSpec> rotations;
    AssumptionConstants assumptions;

    /// (1 - b)/(1 - Phi(N)): longest inhibition phase.
    double tau_max() const { return (1.0 - b) / (1.0 - phi(n_units)); }

    /// Throws InvalidArgument if the container sizes are inconsistent.
    void check_shape() const
    {
        if (n_units == 0)
            throw InvalidArgument("model needs at least one inhibitory unit");
        if (fibers.size() != n_units || rotations.size() != n_units)
            throw InvalidArgument("fiber/rotation lists must have exactly N entries");
        if (phi.table.size() != n_units + 1)
            throw InvalidArgument("inhibition table must have N + 1 entries");
        if (!(b > 0.0 && b < 1.0))
            throw InvalidArgument("b must lie in (0,1)");
    }
};

/// Number of coordinates in the open arc (1/2, 1).
inline std::size_t inhibiting_count(std::span<const double> z) noexcept
{
    std::size_t n = 0;
    for (double zi : z)
        n += in_inhibiting_arc(zi) ? 1 : 0;
    return n;
}

/// 1 - Phi(#{i : z_i in (1/2, 1)}).
inline double speed_factor(std::span<const double> z, const InhibitionSpec& phi)
{
    return 1.0 - phi(inhibiting_count(z));
}

/// Duration of the inhibition phase from Sigma_b back to Sigma_0.
inline double return_time(std::span<const double> z, const ModelParams& params)
{
    return (1.0 - params.b) / speed_factor(z, params.phi);
}

} // namespace eirnet

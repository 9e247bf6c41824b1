#pragma once

#include "holosurf/norms/deform.hpp"
#include "holosurf/norms/flat.hpp"

namespace holosurf::norms {

struct FlatDistanceReport {
    double value = 0.0;             ///< upper bound on the flat distance: lp + deformation
    double lp_value = 0.0;          ///< flat norm LP of the deformed difference
    double deformation_bound = 0.0; ///< swept-volume bound of the deformation step
    FlatDecomposition decomposition;
    bool verified = true;
};

/// Upper bound on F(a - b): deform a - b onto the grid, solve the flat norm LP near the
/// deformed support, and add the deformation's own flat bound (triangle inequality).
inline FlatDistanceReport flat_distance(const chains::PolyhedralChain& a, const chains::PolyhedralChain& b,
                                        const GridSpec& grid, std::uint64_t seed = 1, long margin = 0) {
    FlatDistanceReport rep;
    const auto diff = chains::canonicalize(chains::combine(a, 1, b, -1));
    if (diff.empty()) return rep;
    const auto def = deform_to_grid(diff, grid, seed, false);
    rep.deformation_bound = def.flat_bound;
    if (!def.output.empty()) {
        rep.decomposition = flat_norm_local(def.output, grid, margin);
        rep.lp_value = rep.decomposition.value;
        rep.verified = rep.decomposition.verified;
    }
    rep.value = rep.lp_value + rep.deformation_bound;
    return rep;
}

}  // namespace holosurf::norms

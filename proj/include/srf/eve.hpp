#pragma once

#include "srf/su2.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace srf {

enum class EveKind {
    none,
    intercept,          // separable/planar: measure each qubit along an axis, resend eigenstate
    block_diagonal,     // bb84: POVM of the form (+)_j P_ij (x) 1 on the irrep factors only
    measure_reprepare,  // optimal/bb84: orientation measurement, re-prepare U_h|A>
    multiplicity_basis, // ekert: measure Bob's multiplicity space in the computational basis
};

struct EveModel {
    EveKind kind = EveKind::none;
    /// intercept only: per-qubit uniform axis when true, else fixed_axis.
    bool random_axis = true;
    Vec3 fixed_axis = Vec3::UnitZ();

    static EveModel none() { return {}; }
    static EveModel of(EveKind k) { return {k, true, Vec3::UnitZ()}; }
};

/// CLI names: none, intercept, blockdiag, reprepare, multbasis.
std::string_view to_string(EveKind kind);
std::optional<EveKind> parse_eve(std::string_view name);

}  // namespace srf

#include "srf/eve.hpp"

namespace srf {

std::string_view to_string(EveKind kind) {
    switch (kind) {
        case EveKind::none: return "none";
        case EveKind::intercept: return "intercept";
        case EveKind::block_diagonal: return "blockdiag";
        case EveKind::measure_reprepare: return "reprepare";
        case EveKind::multiplicity_basis: return "multbasis";
    }
    return "none";
}

std::optional<EveKind> parse_eve(std::string_view name) {
    for (EveKind k : {EveKind::none, EveKind::intercept, EveKind::block_diagonal, EveKind::measure_reprepare,
                      EveKind::multiplicity_basis})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

}  // namespace srf

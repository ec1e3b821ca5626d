#pragma once

#include "srf/rep_space.hpp"

#include <stdexcept>
#include <vector>

namespace srf {

/// <j1 m1; j2 m2 | j m> in the Condon-Shortley convention, all arguments
/// doubled. Invalid quantum numbers give 0.
double clebsch_gordan(int two_j1, int two_j2, int two_j, int two_m1, int two_m2, int two_m);

struct SchurLabel {
    Spin j;
    int t = 0;         // ladder index in H_j
    int path = 0;      // multiplicity index: rank of the coupling path
};

/// Explicit basis change from (C^2)^{(x)N} to the irrep decomposition.
///
/// Spins are coupled left to right; paths of intermediate j are ranked
/// lexicographically. Single-spin basis index 0 is m = -1/2, matching the
/// ladder order of wigner_D, and spin 1 is the most significant bit.
/// Columns are grouped by block (ascending j), then t, then path.
struct SchurBasis {
    int n_spins = 0;
    ShapePtr shape;
    CMatrix columns;                 // 2^N x 2^N
    std::vector<SchurLabel> labels;  // one per column

    /// Column of (j, t, path).
    Eigen::Index column_of(Spin j, int t, int path) const;
};

class SizeLimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr int kSchurMaxSpins = 4;

SchurBasis schur_basis(int n_spins);

/// U_r^{(x)N} as a 2^N x 2^N matrix.
CMatrix collective_rotation(int n_spins, const Rotation& r);

/// max |S^dagger U^{(x)N} S - (+)_j D^j(r) (x) 1_{m_j}|
double verify_block_action(int n_spins, const Rotation& r);

/// Maps a corner-space BlockVector into the full 2^N space.
CVector embed_to_full(const BlockVector& v);

}  // namespace srf

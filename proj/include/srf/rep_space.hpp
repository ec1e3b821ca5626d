#pragma once

#include "srf/su2.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace srf {

/// One irrep sector of N spins: H_j (dimension 2j+1) times a multiplicity
/// space of dimension mult. mult saturates at UINT64_MAX for very large N.
struct Block {
    Spin j;
    int dim = 1;
    std::uint64_t mult = 0;
};

/// Decomposition of N spin-1/2 into irreps, ascending in j.
struct BlockShape {
    int n_spins = 0;
    std::vector<Block> blocks;

    std::optional<std::size_t> index_of(Spin j) const;
    const Block& block(Spin j) const;
    /// Blocks whose multiplicity space holds a (2j+1)-dim corner (m_j >= 2j+1).
    bool has_corner(std::size_t index) const;
};

using ShapePtr = std::shared_ptr<const BlockShape>;

/// Throws std::invalid_argument for n_spins < 1.
ShapePtr block_shape(int n_spins);

/// Thrown by build_A / build_phi when every raw coefficient vanishes (N <= 2).
class DegenerateStateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Pure state on the entangled corners: block i holds a (2j+1) x (2j+1)
/// matrix C (row = H_j ladder index, column = multiplicity index), or an
/// empty matrix outside the support.
struct BlockVector {
    ShapePtr shape;
    std::vector<CMatrix> coeffs;
    bool normalized = false;

    double squared_norm() const;
    std::vector<Spin> support() const;
    bool supports(std::size_t index) const { return coeffs[index].size() > 0; }
};

/// Block-diagonal mixed state. Block operators act on H_j (x) C^trunc with
/// flattened index t * trunc + u.
struct DensityBlock {
    Spin j;
    int trunc = 0;
    CMatrix rho;
};

struct BlockDensity {
    ShapePtr shape;
    std::vector<DensityBlock> blocks;
    bool normalized = false;

    double trace() const;
};

struct Amplitude {
    Spin j;
    double value = 0.0;
};

/// Normalized A_j on the support of the optimal state: raw sin(2 pi j / N)
/// for j <= N/2 - 1, zero entries dropped.
std::vector<Amplitude> optimal_amplitudes(const BlockShape& shape);

BlockVector build_E(const ShapePtr& shape, Spin j);
BlockVector build_A(const ShapePtr& shape);
BlockVector build_A(const ShapePtr& shape, const std::vector<Amplitude>& amplitudes);
/// Unnormalized POVM seed vector, sqrt(2j+1) * identity per supported block.
BlockVector build_B(const ShapePtr& shape);

BlockVector apply_rotation(const BlockVector& v, const Rotation& r);

/// Sum_j tr(C_j^a^dagger C_j^b); blocks missing on either side contribute 0.
Complex inner(const BlockVector& a, const BlockVector& b);

/// Shift-and-multiply unitary: W[t (+) p, t] = exp(2 pi i m q / (2j+1)),
/// m = t - j the physical label, (+) addition mod 2j+1 on the ladder index.
CMatrix shift_multiply_W(Spin j, int p, int q);

struct SeedEntry {
    Spin j;
    int p = 0;
    int q = 0;
};

struct SeedSequence {
    std::vector<SeedEntry> pairs;
    /// ceil(log2 prod (2j+1)^2) over the covered blocks.
    int bit_cost = 0;
};

SeedSequence make_seed(std::vector<SeedEntry> pairs);
SeedSequence zero_seed(const std::vector<Spin>& support);
std::vector<SeedSequence> all_seeds(const std::vector<Spin>& support);

template <typename G>
SeedSequence random_seed(const std::vector<Spin>& support, G& rng) {
    std::vector<SeedEntry> pairs;
    pairs.reserve(support.size());
    for (Spin j : support) {
        std::uniform_int_distribution<int> pick(0, j.twice);
        const int p = pick(rng);
        const int q = pick(rng);
        pairs.push_back({j, p, q});
    }
    return make_seed(std::move(pairs));
}

/// C_j <- W_{j,p_j,q_j} C_j. Throws if the seed does not cover exactly the support.
BlockVector randomize(const BlockVector& v, const SeedSequence& seed);
/// C_j <- W^dagger C_j
BlockVector unrandomize(const BlockVector& v, const SeedSequence& seed);

using BigInt = boost::multiprecision::cpp_int;

/// Secret-bit accounting over the support j = 0(1/2) .. N/2 - 1.
struct SeedCount {
    BigInt sum_count;       // sum_j (2j+1)^2, the displayed count C
    BigInt product_count;   // prod_j (2j+1)^2, number of independent per-block seeds
    int bits = 0;           // ceil(log2 sum_count)
    int product_bits = 0;   // ceil(log2 product_count)
};

SeedCount seed_count(const BlockShape& shape);
int ceil_log2(const BigInt& value);

/// Rotation-invariant state seen without the seed: weight A_j^2 on
/// identity/(2j+1) (x) corner projector/(2j+1).
BlockDensity eve_average_analytic(const ShapePtr& shape, const std::vector<Amplitude>& amplitudes);

/// j-diagonal blocks of |v><v|.
BlockDensity density_of(const BlockVector& v);

/// (D^j(r) (x) 1) rho (D^j(r) (x) 1)^dagger per block.
BlockDensity conjugate(const BlockDensity& rho, const Rotation& r);

/// <v| rho |v> over the blocks rho carries.
double expectation(const BlockVector& v, const BlockDensity& rho);

/// Dense coordinates on the corner space, blocks with m_j >= 2j+1 in
/// ascending j, index offset + t * (2j+1) + u.
int corner_dimension(const BlockShape& shape);
CVector to_dense(const BlockVector& v);
CMatrix to_dense(const BlockDensity& rho);

/// Uniform average of |randomize(v,s)><randomize(v,s)| over every seed.
CMatrix exhaustive_seed_average(const BlockVector& v);

/// 0.5 * sum |eigenvalues(a - b)| for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

}  // namespace srf

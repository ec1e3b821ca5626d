#include "srf/rep_space.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace srf {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    return a > max - b ? max : a + b;
}

void check_same_shape(const ShapePtr& a, const ShapePtr& b) {
    if (a->n_spins != b->n_spins) throw std::invalid_argument("block shapes differ");
}

// Row-major flattening of a d x s coefficient matrix, index t * s + u.
CVector flatten(const CMatrix& c) {
    CVector out(c.size());
    for (Eigen::Index t = 0; t < c.rows(); ++t)
        for (Eigen::Index u = 0; u < c.cols(); ++u) out(t * c.cols() + u) = c(t, u);
    return out;
}

CMatrix kron_identity(const CMatrix& a, Eigen::Index n) {
    CMatrix out = CMatrix::Zero(a.rows() * n, a.cols() * n);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            for (Eigen::Index k = 0; k < n; ++k) out(r * n + k, c * n + k) = a(r, c);
    return out;
}

BlockVector transform(const BlockVector& v, const SeedSequence& seed, bool adjoint) {
    const std::vector<Spin> support = v.support();
    if (support.size() != seed.pairs.size())
        throw std::invalid_argument("seed does not cover the state support");
    BlockVector out = v;
    for (std::size_t k = 0; k < support.size(); ++k) {
        const SeedEntry& e = seed.pairs[k];
        if (e.j != support[k]) throw std::invalid_argument("seed does not match the state support");
        const std::size_t i = *v.shape->index_of(e.j);
        const CMatrix w = shift_multiply_W(e.j, e.p, e.q);
        out.coeffs[i] = adjoint ? CMatrix(w.adjoint() * v.coeffs[i]) : CMatrix(w * v.coeffs[i]);
    }
    return out;
}

}  // namespace

std::optional<std::size_t> BlockShape::index_of(Spin j) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].j == j) return i;
    return std::nullopt;
}

const Block& BlockShape::block(Spin j) const {
    const auto i = index_of(j);
    if (!i) throw std::invalid_argument("j = " + std::to_string(j.value()) + " not in block shape");
    return blocks[*i];
}

bool BlockShape::has_corner(std::size_t index) const {
    return blocks[index].mult >= static_cast<std::uint64_t>(blocks[index].dim);
}

ShapePtr block_shape(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("block_shape needs at least one spin");
    // Multiplicities by coupling one spin at a time: m_j(N+1) = m_{j-1/2}(N) + m_{j+1/2}(N).
    std::vector<std::uint64_t> mult(static_cast<std::size_t>(n_spins) + 2, 0);
    mult[1] = 1;
    for (int n = 2; n <= n_spins; ++n) {
        std::vector<std::uint64_t> next(mult.size(), 0);
        for (int tj = 0; tj <= n - 1; ++tj) {
            if (mult[tj] == 0) continue;
            next[tj + 1] = saturating_add(next[tj + 1], mult[tj]);
            if (tj > 0) next[tj - 1] = saturating_add(next[tj - 1], mult[tj]);
        }
        mult = std::move(next);
    }
    auto shape = std::make_shared<BlockShape>();
    shape->n_spins = n_spins;
    for (int tj = n_spins % 2; tj <= n_spins; tj += 2)
        shape->blocks.push_back({Spin{tj}, tj + 1, mult[tj]});
    return shape;
}

double BlockVector::squared_norm() const {
    double s = 0.0;
    for (const CMatrix& c : coeffs) s += c.squaredNorm();
    return s;
}

std::vector<Spin> BlockVector::support() const {
    std::vector<Spin> out;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (supports(i)) out.push_back(shape->blocks[i].j);
    return out;
}

double BlockDensity::trace() const {
    double s = 0.0;
    for (const DensityBlock& b : blocks) s += b.rho.trace().real();
    return s;
}

std::vector<Amplitude> optimal_amplitudes(const BlockShape& shape) {
    std::vector<Amplitude> out;
    double norm2 = 0.0;
    for (const Block& b : shape.blocks) {
        if (b.j.twice > shape.n_spins - 2) continue;  // j <= N/2 - 1
        const double raw = std::sin(kPi * b.j.twice / shape.n_spins);
        if (b.j.twice == 0 || raw == 0.0) continue;
        out.push_back({b.j, raw});
        norm2 += raw * raw;
    }
    if (out.empty() || norm2 <= 0.0)
        throw DegenerateStateError("optimal state needs N >= 3: every coefficient vanishes");
    const double scale = 1.0 / std::sqrt(norm2);
    for (Amplitude& a : out) a.value *= scale;
    return out;
}

BlockVector build_E(const ShapePtr& shape, Spin j) {
    const auto i = shape->index_of(j);
    if (!i) throw std::invalid_argument("build_E: j not in block shape");
    if (!shape->has_corner(*i)) throw std::invalid_argument("build_E: multiplicity smaller than 2j+1");
    BlockVector v{shape, std::vector<CMatrix>(shape->blocks.size()), false};
    v.coeffs[*i] = CMatrix::Identity(j.dim(), j.dim());
    return v;
}

BlockVector build_A(const ShapePtr& shape, const std::vector<Amplitude>& amplitudes) {
    BlockVector v{shape, std::vector<CMatrix>(shape->blocks.size()), true};
    for (const Amplitude& a : amplitudes) {
        const std::size_t i = *shape->index_of(a.j);
        const int d = a.j.dim();
        v.coeffs[i] = CMatrix::Identity(d, d) * (a.value / std::sqrt(double(d)));
    }
    return v;
}

BlockVector build_A(const ShapePtr& shape) { return build_A(shape, optimal_amplitudes(*shape)); }

BlockVector build_B(const ShapePtr& shape) {
    BlockVector v{shape, std::vector<CMatrix>(shape->blocks.size()), false};
    for (const Amplitude& a : optimal_amplitudes(*shape)) {
        const std::size_t i = *shape->index_of(a.j);
        const int d = a.j.dim();
        v.coeffs[i] = CMatrix::Identity(d, d) * std::sqrt(double(d));
    }
    return v;
}

BlockVector apply_rotation(const BlockVector& v, const Rotation& r) {
    BlockVector out = v;
    for (std::size_t i = 0; i < v.coeffs.size(); ++i)
        if (v.supports(i)) out.coeffs[i] = wigner_D(v.shape->blocks[i].j, r) * v.coeffs[i];
    return out;
}

Complex inner(const BlockVector& a, const BlockVector& b) {
    check_same_shape(a.shape, b.shape);
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        if (a.supports(i) && b.supports(i)) s += (a.coeffs[i].adjoint() * b.coeffs[i]).trace();
    return s;
}

CMatrix shift_multiply_W(Spin j, int p, int q) {
    const int d = j.dim();
    if (p < 0 || p >= d || q < 0 || q >= d)
        throw std::invalid_argument("shift_multiply_W: p, q must lie in [0, 2j]");
    CMatrix w = CMatrix::Zero(d, d);
    for (int t = 0; t < d; ++t)
        w((t + p) % d, t) = std::polar(1.0, 2.0 * kPi * j.m_of(t) * q / d);
    return w;
}

SeedSequence make_seed(std::vector<SeedEntry> pairs) {
    BigInt product = 1;
    for (const SeedEntry& e : pairs) {
        if (e.p < 0 || e.p > e.j.twice || e.q < 0 || e.q > e.j.twice)
            throw std::invalid_argument("seed entry out of range");
        product *= e.j.dim() * e.j.dim();
    }
    return SeedSequence{std::move(pairs), ceil_log2(product)};
}

SeedSequence zero_seed(const std::vector<Spin>& support) {
    std::vector<SeedEntry> pairs;
    for (Spin j : support) pairs.push_back({j, 0, 0});
    return make_seed(std::move(pairs));
}

std::vector<SeedSequence> all_seeds(const std::vector<Spin>& support) {
    std::vector<std::vector<SeedEntry>> acc{{}};
    for (Spin j : support) {
        std::vector<std::vector<SeedEntry>> next;
        for (const auto& prefix : acc)
            for (int p = 0; p < j.dim(); ++p)
                for (int q = 0; q < j.dim(); ++q) {
                    auto e = prefix;
                    e.push_back({j, p, q});
                    next.push_back(std::move(e));
                }
        acc = std::move(next);
    }
    std::vector<SeedSequence> out;
    out.reserve(acc.size());
    for (auto& pairs : acc) out.push_back(make_seed(std::move(pairs)));
    return out;
}

BlockVector randomize(const BlockVector& v, const SeedSequence& seed) { return transform(v, seed, false); }

BlockVector unrandomize(const BlockVector& v, const SeedSequence& seed) { return transform(v, seed, true); }

int ceil_log2(const BigInt& value) {
    if (value <= 1) return 0;
    const BigInt below = value - 1;
    return static_cast<int>(boost::multiprecision::msb(below)) + 1;
}

SeedCount seed_count(const BlockShape& shape) {
    SeedCount c;
    c.product_count = 1;
    for (const Block& b : shape.blocks) {
        if (b.j.twice > shape.n_spins - 2) continue;
        const BigInt d2 = BigInt(b.dim) * b.dim;
        c.sum_count += d2;
        c.product_count *= d2;
    }
    c.bits = ceil_log2(c.sum_count);
    c.product_bits = ceil_log2(c.product_count);
    return c;
}

BlockDensity eve_average_analytic(const ShapePtr& shape, const std::vector<Amplitude>& amplitudes) {
    BlockDensity rho{shape, {}, true};
    for (const Amplitude& a : amplitudes) {
        const int d = a.j.dim();
        rho.blocks.push_back({a.j, d, CMatrix::Identity(d * d, d * d) * (a.value * a.value / (d * d))});
    }
    return rho;
}

BlockDensity density_of(const BlockVector& v) {
    BlockDensity rho{v.shape, {}, v.normalized};
    for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
        if (!v.supports(i)) continue;
        const CVector f = flatten(v.coeffs[i]);
        rho.blocks.push_back({v.shape->blocks[i].j, int(v.coeffs[i].cols()), f * f.adjoint()});
    }
    return rho;
}

BlockDensity conjugate(const BlockDensity& rho, const Rotation& r) {
    BlockDensity out = rho;
    for (DensityBlock& b : out.blocks) {
        const CMatrix u = kron_identity(wigner_D(b.j, r), b.trunc);
        b.rho = u * b.rho * u.adjoint();
    }
    return out;
}

double expectation(const BlockVector& v, const BlockDensity& rho) {
    double s = 0.0;
    for (const DensityBlock& b : rho.blocks) {
        const std::size_t i = *v.shape->index_of(b.j);
        if (!v.supports(i)) continue;
        if (v.coeffs[i].cols() != b.trunc) throw std::invalid_argument("expectation: truncation mismatch");
        const CVector f = flatten(v.coeffs[i]);
        s += (f.adjoint() * b.rho * f)(0, 0).real();
    }
    return s;
}

int corner_dimension(const BlockShape& shape) {
    int n = 0;
    for (std::size_t i = 0; i < shape.blocks.size(); ++i)
        if (shape.has_corner(i)) n += shape.blocks[i].dim * shape.blocks[i].dim;
    return n;
}

CVector to_dense(const BlockVector& v) {
    CVector out = CVector::Zero(corner_dimension(*v.shape));
    int offset = 0;
    for (std::size_t i = 0; i < v.shape->blocks.size(); ++i) {
        if (!v.shape->has_corner(i)) continue;
        const int d = v.shape->blocks[i].dim;
        if (v.supports(i)) out.segment(offset, d * d) = flatten(v.coeffs[i]);
        offset += d * d;
    }
    return out;
}

CMatrix to_dense(const BlockDensity& rho) {
    const int n = corner_dimension(*rho.shape);
    CMatrix out = CMatrix::Zero(n, n);
    int offset = 0;
    for (std::size_t i = 0; i < rho.shape->blocks.size(); ++i) {
        if (!rho.shape->has_corner(i)) continue;
        const Block& blk = rho.shape->blocks[i];
        for (const DensityBlock& b : rho.blocks) {
            if (b.j != blk.j) continue;
            if (b.trunc != blk.dim) throw std::invalid_argument("to_dense: block truncation is not the corner");
            out.block(offset, offset, blk.dim * blk.dim, blk.dim * blk.dim) = b.rho;
        }
        offset += blk.dim * blk.dim;
    }
    return out;
}

CMatrix exhaustive_seed_average(const BlockVector& v) {
    const std::vector<SeedSequence> seeds = all_seeds(v.support());
    const int n = corner_dimension(*v.shape);
    CMatrix avg = CMatrix::Zero(n, n);
    for (const SeedSequence& s : seeds) {
        const CVector f = to_dense(randomize(v, s));
        avg += f * f.adjoint();
    }
    return avg / double(seeds.size());
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
    const CMatrix diff = a - b;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace srf

#include "srf/schur_oracle.hpp"
#include "srf/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace srf;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Collective J^2 from explicit Pauli matrices, spin 1 most significant,
// single-spin index 0 = down.
CMatrix total_j_squared(int n) {
    const Complex i(0, 1);
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, i, -i, 0;  // (down, up) order
    sz << -1, 0, 0, 1;
    const int dim = 1 << n;
    CMatrix j2 = CMatrix::Zero(dim, dim);
    for (const Eigen::Matrix2cd& s : {sx, sy, sz}) {
        CMatrix total = CMatrix::Zero(dim, dim);
        for (int k = 0; k < n; ++k) {
            CMatrix term = CMatrix::Identity(1, 1);
            for (int q = 0; q < n; ++q) {
                const CMatrix f = q == k ? CMatrix(0.5 * s) : CMatrix::Identity(2, 2);
                CMatrix next(term.rows() * 2, term.cols() * 2);
                for (int r = 0; r < term.rows(); ++r)
                    for (int c = 0; c < term.cols(); ++c) next.block(r * 2, c * 2, 2, 2) = term(r, c) * f;
                term = next;
            }
            total += term;
        }
        j2 += total * total;
    }
    return j2;
}

}  // namespace

TEST_CASE("Clebsch-Gordan values") {
    CHECK(clebsch_gordan(1, 1, 0, 1, -1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(clebsch_gordan(1, 1, 0, -1, 1, 0) == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(clebsch_gordan(1, 1, 2, 1, 1, 2) == doctest::Approx(1.0));
    CHECK(clebsch_gordan(1, 1, 2, 1, -1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
    // <1 1; 1/2 -1/2 | 1/2 1/2> = sqrt(2/3)
    CHECK(clebsch_gordan(2, 1, 1, 2, -1, 1) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    // Invalid quantum numbers give zero.
    CHECK(clebsch_gordan(1, 1, 4, 1, 1, 2) == 0.0);
    CHECK(clebsch_gordan(1, 1, 2, 1, 1, 0) == 0.0);

    // Orthogonality for two spin-1/2.
    for (int j = 0; j <= 2; j += 2)
        for (int jp = 0; jp <= 2; jp += 2)
            for (int m = -j; m <= j; m += 2)
                for (int mp = -jp; mp <= jp; mp += 2) {
                    double s = 0.0;
                    for (int m1 = -1; m1 <= 1; m1 += 2)
                        for (int m2 = -1; m2 <= 1; m2 += 2)
                            s += clebsch_gordan(1, 1, j, m1, m2, m) * clebsch_gordan(1, 1, jp, m1, m2, mp);
                    CHECK(s == doctest::Approx(j == jp && m == mp ? 1.0 : 0.0));
                }
}

TEST_CASE("Schur basis is orthonormal with the right labels") {
    for (int n = 1; n <= 4; ++n) {
        const SchurBasis s = schur_basis(n);
        const int dim = 1 << n;
        REQUIRE(s.columns.rows() == dim);
        CHECK(max_abs(s.columns.adjoint() * s.columns - CMatrix::Identity(dim, dim)) < 1e-10);
        // Each column is a J^2 eigenvector with eigenvalue j(j+1).
        const CMatrix j2 = total_j_squared(n);
        for (int c = 0; c < dim; ++c) {
            const double jv = s.labels[c].j.value();
            CHECK((j2 * s.columns.col(c) - jv * (jv + 1) * s.columns.col(c)).norm() < 1e-10);
        }
        for (const Block& b : s.shape->blocks) {
            int count = 0;
            for (const SchurLabel& l : s.labels) count += l.j == b.j ? 1 : 0;
            CHECK(count == b.dim * int(b.mult));
        }
    }
    const SchurBasis two = schur_basis(2);
    int triplet = 0, singlet = 0;
    for (const SchurLabel& l : two.labels) (l.j.twice == 2 ? triplet : singlet) += 1;
    CHECK(triplet == 3);
    CHECK(singlet == 1);
    CHECK_THROWS_AS(schur_basis(5), SizeLimitError);
}

TEST_CASE("collective rotation acts block-wise") {
    CHECK(verify_block_action(3, Rotation::identity()) < 1e-14);
    Rng rng = make_stream(21, 0);
    for (int n : {2, 3, 4}) {
        double dev = 0.0;
        for (int k = 0; k < 50; ++k) dev = std::max(dev, verify_block_action(n, haar_sample(rng)));
        CHECK(dev < 1e-9);
    }
}

TEST_CASE("embedding agrees with the block formalism") {
    Rng rng = make_stream(22, 0);
    for (int n : {3, 4}) {
        const ShapePtr shape = block_shape(n);
        const BlockVector a = build_A(shape);
        const BlockVector b = build_B(shape);
        const CVector ea = embed_to_full(a);
        const CVector eb = embed_to_full(b);
        CHECK(ea.squaredNorm() == doctest::Approx(a.squared_norm()).epsilon(1e-12));
        CHECK(eb.squaredNorm() == doctest::Approx(b.squared_norm()).epsilon(1e-12));
        for (int k = 0; k < 20; ++k) {
            const Rotation r = haar_sample(rng);
            const Complex full = eb.dot(collective_rotation(n, r) * ea);
            CHECK(std::abs(full - inner(b, apply_rotation(a, r))) < 1e-10);
        }
    }
    // E_0 at N = 2 lives on the singlet.
    const ShapePtr two = block_shape(2);
    const CVector e0 = embed_to_full(build_E(two, Spin{0}));
    CVector singlet = CVector::Zero(4);
    singlet(1) = 1 / std::sqrt(2.0);
    singlet(2) = -1 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(e0.dot(singlet)) - 1.0) < 1e-12);
}

TEST_CASE("exhaustive seed average is rotation invariant in the full space") {
    Rng rng = make_stream(23, 0);
    for (int n : {3, 4}) {
        const ShapePtr shape = block_shape(n);
        const BlockVector a = build_A(shape);
        const int dim = 1 << n;
        CMatrix rho = CMatrix::Zero(dim, dim);
        const auto seeds = all_seeds(a.support());
        for (const SeedSequence& s : seeds) {
            const CVector v = embed_to_full(randomize(a, s));
            rho += v * v.adjoint();
        }
        rho /= double(seeds.size());
        CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        double dev = 0.0;
        for (int k = 0; k < 20; ++k) {
            const CMatrix u = collective_rotation(n, haar_sample(rng));
            dev = std::max(dev, max_abs(u * rho * u.adjoint() - rho));
        }
        CHECK(dev < 1e-10);
    }
}

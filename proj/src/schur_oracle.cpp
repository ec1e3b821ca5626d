#include "srf/schur_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace srf {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

struct PathState {
    std::vector<int> path;  // doubled intermediate j after each spin
    int two_m = 0;
    CVector vec;
};

}  // namespace

double clebsch_gordan(int two_j1, int two_j2, int two_j, int two_m1, int two_m2, int two_m) {
    if (two_j1 < 0 || two_j2 < 0 || two_j < 0) return 0.0;
    if (two_m1 + two_m2 != two_m) return 0.0;
    if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 || std::abs(two_m) > two_j) return 0.0;
    if ((two_j1 + two_m1) % 2 || (two_j2 + two_m2) % 2 || (two_j + two_m) % 2) return 0.0;
    if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
    if ((two_j1 + two_j2 + two_j) % 2) return 0.0;

    // Racah formula with integer arguments.
    const int a = (two_j1 + two_j2 - two_j) / 2;
    const int b = (two_j1 - two_m1) / 2;
    const int c = (two_j2 + two_m2) / 2;
    const int d = (two_j - two_j2 + two_m1) / 2;
    const int e = (two_j - two_j1 - two_m2) / 2;
    const int kmin = std::max({0, -d, -e});
    const int kmax = std::min({a, b, c});
    if (kmin > kmax) return 0.0;

    const double log_pref =
        0.5 * (std::log(two_j + 1.0) + log_factorial(a) + log_factorial((two_j1 - two_j2 + two_j) / 2) +
               log_factorial((-two_j1 + two_j2 + two_j) / 2) - log_factorial((two_j1 + two_j2 + two_j) / 2 + 1) +
               log_factorial((two_j1 + two_m1) / 2) + log_factorial(b) + log_factorial(c) +
               log_factorial((two_j2 - two_m2) / 2) + log_factorial((two_j + two_m) / 2) +
               log_factorial((two_j - two_m) / 2));
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double term = std::exp(log_pref - log_factorial(k) - log_factorial(a - k) - log_factorial(b - k) -
                                     log_factorial(c - k) - log_factorial(d + k) - log_factorial(e + k));
        sum += (k % 2 ? -term : term);
    }
    return sum;
}

Eigen::Index SchurBasis::column_of(Spin j, int t, int path) const {
    Eigen::Index offset = 0;
    for (const Block& b : shape->blocks) {
        if (b.j == j) return offset + t * static_cast<Eigen::Index>(b.mult) + path;
        offset += b.dim * static_cast<Eigen::Index>(b.mult);
    }
    throw std::invalid_argument("column_of: j not in shape");
}

SchurBasis schur_basis(int n_spins) {
    if (n_spins < 1 || n_spins > kSchurMaxSpins)
        throw SizeLimitError("schur_basis supports 1..4 spins");

    // One spin: index 0 is m = -1/2, index 1 is m = +1/2.
    std::vector<PathState> states;
    for (int two_m : {-1, 1}) {
        CVector v = CVector::Zero(2);
        v((two_m + 1) / 2) = 1.0;
        states.push_back({{1}, two_m, v});
    }
    for (int n = 2; n <= n_spins; ++n) {
        std::map<std::pair<std::vector<int>, int>, CVector> by_label;
        std::map<std::vector<int>, std::vector<std::pair<int, const CVector*>>> parents;
        for (const PathState& s : states) parents[s.path].push_back({s.two_m, &s.vec});
        std::vector<PathState> next;
        for (const auto& [path, members] : parents) {
            const int two_j1 = path.back();
            for (int two_j : {two_j1 - 1, two_j1 + 1}) {
                if (two_j < 0) continue;
                std::vector<int> child = path;
                child.push_back(two_j);
                for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
                    CVector v = CVector::Zero(Eigen::Index(1) << n);
                    for (const auto& [two_m1, parent] : members)
                        for (int two_ms : {-1, 1}) {
                            const double cg = clebsch_gordan(two_j1, 1, two_j, two_m1, two_ms, two_m);
                            if (cg == 0.0) continue;
                            const int bit = (two_ms + 1) / 2;
                            for (Eigen::Index k = 0; k < parent->size(); ++k)
                                v(2 * k + bit) += cg * (*parent)(k);
                        }
                    next.push_back({child, two_m, v});
                }
            }
        }
        states = std::move(next);
    }

    SchurBasis basis;
    basis.n_spins = n_spins;
    basis.shape = block_shape(n_spins);
    const Eigen::Index dim = Eigen::Index(1) << n_spins;
    basis.columns = CMatrix::Zero(dim, dim);
    basis.labels.resize(static_cast<std::size_t>(dim));

    for (const Block& b : basis.shape->blocks) {
        std::vector<std::vector<int>> paths;
        for (const PathState& s : states)
            if (s.path.back() == b.j.twice) paths.push_back(s.path);
        std::sort(paths.begin(), paths.end());
        paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
        for (const PathState& s : states) {
            if (s.path.back() != b.j.twice) continue;
            const int rank = int(std::lower_bound(paths.begin(), paths.end(), s.path) - paths.begin());
            const int t = (s.two_m + b.j.twice) / 2;
            const Eigen::Index col = basis.column_of(b.j, t, rank);
            basis.columns.col(col) = s.vec;
            basis.labels[static_cast<std::size_t>(col)] = {b.j, t, rank};
        }
    }
    return basis;
}

CMatrix collective_rotation(int n_spins, const Rotation& r) {
    const CMatrix single = wigner_D(Spin{1}, r);
    CMatrix u = CMatrix::Ones(1, 1);
    for (int n = 0; n < n_spins; ++n) {
        CMatrix next(u.rows() * 2, u.cols() * 2);
        for (Eigen::Index i = 0; i < u.rows(); ++i)
            for (Eigen::Index k = 0; k < u.cols(); ++k) next.block(2 * i, 2 * k, 2, 2) = u(i, k) * single;
        u = std::move(next);
    }
    return u;
}

double verify_block_action(int n_spins, const Rotation& r) {
    const SchurBasis basis = schur_basis(n_spins);
    const CMatrix in_basis = basis.columns.adjoint() * collective_rotation(n_spins, r) * basis.columns;
    CMatrix expected = CMatrix::Zero(in_basis.rows(), in_basis.cols());
    Eigen::Index offset = 0;
    for (const Block& b : basis.shape->blocks) {
        const CMatrix d = wigner_D(b.j, r);
        const auto m = static_cast<Eigen::Index>(b.mult);
        for (int t = 0; t < b.dim; ++t)
            for (int s = 0; s < b.dim; ++s)
                for (Eigen::Index u = 0; u < m; ++u) expected(offset + t * m + u, offset + s * m + u) = d(t, s);
        offset += b.dim * m;
    }
    return (in_basis - expected).cwiseAbs().maxCoeff();
}

CVector embed_to_full(const BlockVector& v) {
    if (v.shape->n_spins > kSchurMaxSpins) throw SizeLimitError("embed_to_full supports 1..4 spins");
    const SchurBasis basis = schur_basis(v.shape->n_spins);
    CVector out = CVector::Zero(basis.columns.rows());
    for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
        if (!v.supports(i)) continue;
        const Spin j = v.shape->blocks[i].j;
        const CMatrix& c = v.coeffs[i];
        for (Eigen::Index t = 0; t < c.rows(); ++t)
            for (Eigen::Index u = 0; u < c.cols(); ++u)
                out += c(t, u) * basis.columns.col(basis.column_of(j, int(t), int(u)));
    }
    return out;
}

}  // namespace srf

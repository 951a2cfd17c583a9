#ifndef LPS_LINALG_HPP
#define LPS_LINALG_HPP

#include "lps/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace lps {

struct SvdResult {
    Matrix U;               // m x k
    Vector singular_values; // k, nonincreasing
    Matrix V;               // n x k
};

class SvdFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline SvdResult svd(const Matrix& M)
{
    require_finite(M, "svd");
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw SvdFailure("svd: Jacobi sweeps did not converge");
    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    if (!out.U.allFinite() || !out.V.allFinite() || !out.singular_values.allFinite())
        throw SvdFailure("svd: non-finite factors");
    return out;
}

inline Vector singular_values(const Matrix& M)
{
    require_finite(M, "singular_values");
    Eigen::JacobiSVD<Matrix> dec(M);
    if (dec.info() != Eigen::Success)
        throw SvdFailure("singular_values: Jacobi sweeps did not converge");
    return dec.singularValues();
}

inline double spectral_norm(const Matrix& M)
{
    if (M.size() == 0)
        return 0.0;
    return singular_values(M)(0);
}

/// Best rank-r approximation in Frobenius norm.
inline Matrix rank_trunc(const Matrix& M, Index r)
{
    const Index k = std::min(M.rows(), M.cols());
    if (r < 0 || r > k)
        throw DomainError("rank_trunc: r must lie in [0, min(rows, cols)]");
    if (r == 0)
        return Matrix::Zero(M.rows(), M.cols());
    const SvdResult d = svd(M);
    return d.U.leftCols(r) * d.singular_values.head(r).asDiagonal() * d.V.leftCols(r).transpose();
}

/// Row-major order of entries by decreasing magnitude, ties by position.
inline std::vector<Index> magnitude_order(const Matrix& M)
{
    const Index m = M.rows(), n = M.cols();
    std::vector<Index> idx(static_cast<size_t>(m * n));
    std::iota(idx.begin(), idx.end(), Index{0});
    auto at = [&](Index k) { return std::abs(M(k / n, k % n)); };
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return at(a) > at(b); });
    return idx;
}

inline Matrix hard_threshold(const Matrix& M, Index s)
{
    if (s < 0)
        throw DomainError("hard_threshold: s must be nonnegative");
    Matrix out = Matrix::Zero(M.rows(), M.cols());
    const Index n = M.cols();
    const auto order = magnitude_order(M);
    const Index keep = std::min<Index>(s, static_cast<Index>(order.size()));
    for (Index t = 0; t < keep; ++t) {
        const Index k = order[static_cast<size_t>(t)];
        out(k / n, k % n) = M(k / n, k % n);
    }
    return out;
}

inline double soft(double x, double tau)
{
    const double a = std::abs(x) - tau;
    if (a <= 0.0)
        return 0.0;
    return x > 0 ? a : -a;
}

inline Matrix soft_threshold(const Matrix& M, double tau)
{
    if (!(tau >= 0.0))
        throw DomainError("soft_threshold: tau must be nonnegative");
    return M.unaryExpr([tau](double x) { return soft(x, tau); });
}

inline Matrix sv_threshold(const Matrix& M, double tau)
{
    if (!(tau >= 0.0))
        throw DomainError("sv_threshold: tau must be nonnegative");
    const SvdResult d = svd(M);
    const Vector s = d.singular_values.unaryExpr([tau](double x) { return std::max(x - tau, 0.0); });
    return d.U * s.asDiagonal() * d.V.transpose();
}

inline constexpr double kRankRelTol = 1e-9;
inline constexpr double kL0AbsTol = 1e-12;

/// Count of sigma_i > max(rel_tol * sigma_1, abs_tol); zero matrix gives 0.
inline Index rank_from_singular_values(const Vector& s, double rel_tol, double abs_tol = 0.0)
{
    if (s.size() == 0 || s(0) <= 0.0)
        return 0;
    const double cut = std::max(rel_tol * s(0), abs_tol);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cut)
            ++r;
    return r;
}

inline Index numerical_rank(const Matrix& M, double rel_tol = kRankRelTol, double abs_tol = 0.0)
{
    if (!(rel_tol > 0.0))
        throw DomainError("numerical_rank: rel_tol must be positive");
    if (M.size() == 0)
        return 0;
    return rank_from_singular_values(singular_values(M), rel_tol, abs_tol);
}

struct Coherence {
    double mu_row = 0.0;
    double mu_col = 0.0;
};

inline Coherence coherence(const Matrix& L, Index r)
{
    if (r < 1)
        throw DomainError("coherence: r must be positive");
    const SvdResult d = svd(L);
    if (r > rank_from_singular_values(d.singular_values, kRankRelTol))
        throw DomainError("coherence: r exceeds the numerical rank; leading subspace undefined");
    const Matrix U = d.U.leftCols(r);
    const Matrix V = d.V.leftCols(r);
    Coherence c;
    c.mu_row = static_cast<double>(L.rows()) / static_cast<double>(r) * U.rowwise().squaredNorm().maxCoeff();
    c.mu_col = static_cast<double>(L.cols()) / static_cast<double>(r) * V.rowwise().squaredNorm().maxCoeff();
    return c;
}

inline Index count_nonzero(const Matrix& M, double abs_tol = kL0AbsTol)
{
    Index c = 0;
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j)) > abs_tol)
                ++c;
    return c;
}

struct Norms {
    double fro = 0.0;
    double nuclear = 0.0;
    double l1 = 0.0;
    Index l0 = 0;
};

inline double nuclear_norm(const Matrix& M)
{
    if (M.size() == 0)
        return 0.0;
    return singular_values(M).sum();
}

inline Norms norms(const Matrix& M, double abs_tol = kL0AbsTol)
{
    Norms n;
    n.fro = M.norm();
    n.nuclear = nuclear_norm(M);
    n.l1 = M.cwiseAbs().sum();
    n.l0 = count_nonzero(M, abs_tol);
    return n;
}

/// Minimum-norm least squares solution of A x = b (columns of b solved jointly).
inline Matrix lstsq_min_norm(const Matrix& A, const Matrix& b)
{
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    return cod.solve(b);
}

inline Matrix pad_zero(const Matrix& M, Index rows, Index cols)
{
    Matrix out = Matrix::Zero(rows, cols);
    out.topLeftCorner(M.rows(), M.cols()) = M;
    return out;
}

} // namespace lps

#endif

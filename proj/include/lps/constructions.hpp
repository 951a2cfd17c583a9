#ifndef LPS_CONSTRUCTIONS_HPP
#define LPS_CONSTRUCTIONS_HPP

#include "lps/linalg.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace lps {

enum class Family { Simple3, Lemma1General, Lemma2, Lemma3, Lemma4Block, MaxRigid3, Demo1, Demo2 };

inline std::string family_name(Family f)
{
    switch (f) {
    case Family::Simple3: return "simple3";
    case Family::Lemma1General: return "lemma1";
    case Family::Lemma2: return "lemma2";
    case Family::Lemma3: return "lemma3";
    case Family::Lemma4Block: return "lemma4";
    case Family::MaxRigid3: return "maxrigid3";
    case Family::Demo1: return "demo1";
    case Family::Demo2: return "demo2";
    }
    return "unknown";
}

inline Family parse_family(std::string_view s)
{
    for (Family f : {Family::Simple3, Family::Lemma1General, Family::Lemma2, Family::Lemma3,
                     Family::Lemma4Block, Family::MaxRigid3, Family::Demo1, Family::Demo2})
        if (family_name(f) == s)
            return f;
    throw DomainError("unknown family '" + std::string(s) +
                      "' (simple3, lemma1, lemma2, lemma3, lemma4, maxrigid3, demo1, demo2)");
}

struct ConstructionSpec {
    Family family = Family::Simple3;
    Index r = 1;
    Index s = 1;
    Index p = 1;
    double epsilon = 1e-1;
    std::uint64_t seed = 0;
    std::optional<Index> pad_to;
};

struct ConstructionOutput {
    Matrix M_limit;
    Matrix M_eps;
    Matrix L_eps;
    Matrix S_eps;
    Index r = 0;
    Index s = 0;
    Index n = 0;
    Family family = Family::Simple3;
    Index claimed_rigidity_lower_bound = 0;
    // ||M_eps - M_limit||_F <= eps_constant * epsilon (up to rounding)
    double eps_constant = 0.0;
};

inline Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

/// Smallest q with q*q >= x.
inline long long ceil_sqrt(long long x)
{
    if (x <= 0)
        return 0;
    long long q = static_cast<long long>(std::sqrt(static_cast<double>(x)));
    while (q * q < x)
        ++q;
    while (q > 0 && (q - 1) * (q - 1) >= x)
        --q;
    return q;
}

inline Index lemma2_l(Index s) { return ceil_div(s + 1, 2); }

inline Index lemma2_size(Index r, Index s)
{
    const Index l = lemma2_l(s);
    return r * (l + 1) + ceil_div(l, r);
}

inline Index lemma3_size(Index r, Index s)
{
    const Index l = lemma2_l(s);
    return s * (l + 1) + 1 + (s + 1) * (r - s);
}

inline Index lemma5_size(Index r, Index p)
{
    const Index l = ceil_div(r + 1, 2);
    return p * (r * (l + 1) + 1);
}

enum class SizeBound { TheoremMain, QuadraticSparsity, Conjecture };

inline std::optional<Index> integer_p_for(Index r, Index s)
{
    if (r < 1 || s < 1 || s % r != 0)
        return std::nullopt;
    const long long q = s / r;
    const long long p = ceil_sqrt(q);
    if (p * p != q)
        return std::nullopt;
    return static_cast<Index>(p);
}

/// nullopt: s is not of the form p^2 r required by QuadraticSparsity.
inline std::optional<Index> min_size(Index r, Index s, SizeBound bound)
{
    if (r < 1 || s < 1)
        throw DomainError("min_size: r and s must be positive");
    switch (bound) {
    case SizeBound::TheoremMain:
        return (r + 1) * (s + 2);
    case SizeBound::QuadraticSparsity: {
        if (!integer_p_for(r, s))
            return std::nullopt;
        // ceil((r+2)^{3/2} s^{1/2}) = ceil(sqrt((r+2)^3 s)) in exact integers
        const long long a = r + 2;
        return static_cast<Index>(ceil_sqrt(a * a * a * s));
    }
    case SizeBound::Conjecture:
        return r + static_cast<Index>(ceil_sqrt(s + 1));
    }
    return std::nullopt;
}

namespace detail {

inline Matrix signed_uniform_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix X(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            X(i, j) = rng.signed_uniform(0.5, 1.5);
    return X;
}

inline Matrix well_conditioned_gaussian(Rng& rng, Index n)
{
    for (;;) {
        Matrix G = rng.gaussian(n, n);
        const Vector sv = singular_values(G);
        if (sv(n - 1) > 0.0 && sv(0) / sv(n - 1) < 1e3)
            return G;
    }
}

// [[C, A], [B, 0]] limit with L = [[I/eps, A], [B, eps BA]], S = [[C - I/eps, 0], [0, 0]].
inline ConstructionOutput corner_pair(const Matrix& C, const Matrix& A, const Matrix& B, double eps)
{
    const Index r = A.rows();
    if (B.cols() != r || A.cols() != B.rows() || C.rows() != r || C.cols() != r)
        throw DomainError("lemma1_pair: A must be r x (n-r) and B (n-r) x r");
    if (!(eps > 0.0))
        throw DomainError("epsilon must be positive");
    require_finite(A, "lemma1_pair A");
    require_finite(B, "lemma1_pair B");
    const Index n = r + A.cols();
    const Matrix BA = B * A;

    ConstructionOutput out;
    out.M_limit = Matrix::Zero(n, n);
    out.M_limit.topLeftCorner(r, r) = C;
    out.M_limit.topRightCorner(r, n - r) = A;
    out.M_limit.bottomLeftCorner(n - r, r) = B;

    out.L_eps = Matrix::Zero(n, n);
    out.L_eps.topLeftCorner(r, r) = Matrix::Identity(r, r) / eps;
    out.L_eps.topRightCorner(r, n - r) = A;
    out.L_eps.bottomLeftCorner(n - r, r) = B;
    out.L_eps.bottomRightCorner(n - r, n - r) = eps * BA;

    out.S_eps = Matrix::Zero(n, n);
    out.S_eps.topLeftCorner(r, r) = C - Matrix::Identity(r, r) / eps;

    out.M_eps = out.L_eps + out.S_eps;
    out.r = r;
    out.s = r;
    out.n = n;
    out.eps_constant = BA.norm();
    return out;
}

// Lemma-2 style core with blocks beta | A(1..l) and alpha^T ; B(1..l).
inline ConstructionOutput lemma2_core(Index r, Index l, Index k, Rng& rng, double eps)
{
    const Matrix alpha = signed_uniform_matrix(rng, r, k);
    const Matrix beta = signed_uniform_matrix(rng, r, k);
    Matrix A(r, k + l * r);
    Matrix B(k + l * r, r);
    A.leftCols(k) = beta;
    B.topRows(k) = alpha.transpose();
    for (Index i = 0; i < l; ++i) {
        A.middleCols(k + i * r, r) = well_conditioned_gaussian(rng, r);
        B.middleRows(k + i * r, r) = well_conditioned_gaussian(rng, r);
    }
    return corner_pair(Matrix::Zero(r, r), A, B, eps);
}

inline Matrix kron_ones(const Matrix& X, Index p)
{
    Matrix out(X.rows() * p, X.cols() * p);
    for (Index bi = 0; bi < p; ++bi)
        for (Index bj = 0; bj < p; ++bj)
            out.block(bi * X.rows(), bj * X.cols(), X.rows(), X.cols()) = X;
    return out;
}

inline Matrix block_diag(const Matrix& X, const Matrix& Y)
{
    Matrix out = Matrix::Zero(X.rows() + Y.rows(), X.cols() + Y.cols());
    out.topLeftCorner(X.rows(), X.cols()) = X;
    out.bottomRightCorner(Y.rows(), Y.cols()) = Y;
    return out;
}

} // namespace detail

inline ConstructionOutput simple3(double epsilon)
{
    const Matrix A = from_rows({{1.0, 1.0}});
    const Matrix B = from_rows({{1.0}, {1.0}});
    ConstructionOutput out = detail::corner_pair(Matrix::Zero(1, 1), A, B, epsilon);
    out.family = Family::Simple3;
    out.claimed_rigidity_lower_bound = 2;
    return out;
}

/// Limit [[0, A], [B, 0]]; no rigidity claim for arbitrary blocks.
inline ConstructionOutput lemma1_pair(const Matrix& A, const Matrix& B, double epsilon)
{
    if (A.rows() < 1)
        throw DomainError("lemma1_pair: A needs at least one row");
    ConstructionOutput out = detail::corner_pair(Matrix::Zero(A.rows(), A.rows()), A, B, epsilon);
    out.family = Family::Lemma1General;
    out.claimed_rigidity_lower_bound = 0;
    return out;
}

inline ConstructionOutput lemma2_pair(Index r, Index s, std::uint64_t seed, double epsilon)
{
    if (r < 1 || s < 1)
        throw DomainError("lemma2: r and s must be positive");
    if (r > s)
        throw DomainError("lemma2 requires r <= s; use lemma3 for r > s");
    const Index l = lemma2_l(s);
    const Index k = ceil_div(l, r);
    Rng rng(seed);
    ConstructionOutput out = detail::lemma2_core(r, l, k, rng, epsilon);
    out.family = Family::Lemma2;
    out.s = s;
    out.claimed_rigidity_lower_bound = 2 * l;
    return out;
}

inline ConstructionOutput lemma3_pair(Index r, Index s, std::uint64_t seed, double epsilon)
{
    if (s < 1)
        throw DomainError("lemma3: s must be positive");
    if (r <= s)
        throw DomainError("lemma3 requires r > s; use lemma2 for r <= s");
    const Index l = lemma2_l(s);
    Rng rng(seed);
    const ConstructionOutput core = detail::lemma2_core(s, l, 1, rng, epsilon);
    const Matrix N = detail::well_conditioned_gaussian(rng, r - s);
    // (s+1) x (s+1) grid of the same N: rank r - s
    const Matrix tail = detail::kron_ones(N, s + 1);

    ConstructionOutput out;
    out.M_limit = detail::block_diag(core.M_limit, tail);
    out.M_eps = detail::block_diag(core.M_eps, tail);
    out.L_eps = detail::block_diag(core.L_eps, tail);
    out.S_eps = detail::block_diag(core.S_eps, Matrix::Zero(tail.rows(), tail.cols()));
    out.r = r;
    out.s = s;
    out.n = out.M_limit.rows();
    out.family = Family::Lemma3;
    out.claimed_rigidity_lower_bound = s + 1;
    out.eps_constant = core.eps_constant;
    return out;
}

inline ConstructionOutput lemma4_pair(Index r, Index p, std::uint64_t seed, double epsilon)
{
    if (r < 1 || p < 1)
        throw DomainError("lemma4: r and p must be positive");
    const Index l = ceil_div(r + 1, 2);
    Rng rng(seed);
    const ConstructionOutput core = detail::lemma2_core(r, l, 1, rng, epsilon);
    ConstructionOutput out;
    out.M_limit = detail::kron_ones(core.M_limit, p);
    out.L_eps = detail::kron_ones(core.L_eps, p);
    out.S_eps = detail::kron_ones(core.S_eps, p);
    out.M_eps = detail::kron_ones(core.M_eps, p);
    out.r = r;
    out.s = p * p * r;
    out.n = out.M_limit.rows();
    out.family = Family::Lemma4Block;
    out.claimed_rigidity_lower_bound = p * p * 2 * l;
    out.eps_constant = static_cast<double>(p) * core.eps_constant;
    return out;
}

inline ConstructionOutput maximally_rigid3(std::uint64_t seed, double epsilon)
{
    if (!(epsilon > 0.0))
        throw DomainError("epsilon must be positive");
    Rng rng(seed);
    double v[7];
    for (double& x : v)
        x = rng.signed_uniform(0.5, 1.5);
    const double a = v[0], b = v[1], c = v[2], d = v[3], e = v[4], g = v[5], i = v[6];
    const double cd = epsilon * c * d;
    const double bg = epsilon * b * g;
    const double bd = epsilon * b * d;
    const double cg = epsilon * c * g;

    ConstructionOutput out;
    out.M_limit = from_rows({{a, b, c}, {d, e, 0.0}, {g, 0.0, i}});
    out.L_eps = from_rows({{1.0 / epsilon, b, c}, {d, bd, cd}, {g, bg, cg}});
    out.S_eps = Matrix::Zero(3, 3);
    out.S_eps(0, 0) = a - 1.0 / epsilon;
    out.S_eps(1, 1) = e - bd;
    out.S_eps(2, 2) = i - cg;
    out.M_eps = out.L_eps + out.S_eps;
    out.r = 1;
    out.s = 3;
    out.n = 3;
    out.family = Family::MaxRigid3;
    out.claimed_rigidity_lower_bound = 4;
    out.eps_constant = std::hypot(c * d, b * g) + 1e-12;
    return out;
}

inline std::pair<Matrix, Matrix> demo_matrices()
{
    return {from_rows({{2, -1, -1}, {-1, 0, 0}, {-1, 0, 0}}),
            from_rows({{1, -2, -2}, {-2, 0, 0}, {-2, 0, 0}})};
}

/// Demo matrix as the limit of a corner family in LS(1,1).
inline ConstructionOutput demo_pair(int which, double epsilon)
{
    const double c = which == 1 ? 2.0 : 1.0;
    const double v = which == 1 ? -1.0 : -2.0;
    ConstructionOutput out = detail::corner_pair(Matrix::Constant(1, 1, c), Matrix::Constant(1, 2, v),
                                                 Matrix::Constant(2, 1, v), epsilon);
    out.family = which == 1 ? Family::Demo1 : Family::Demo2;
    out.claimed_rigidity_lower_bound = 2;
    return out;
}

inline ConstructionOutput pad_to(const ConstructionOutput& in, Index n)
{
    if (n < in.n)
        throw DomainError("pad_to: target " + std::to_string(n) + " below natural size " +
                          std::to_string(in.n));
    ConstructionOutput out = in;
    out.M_limit = pad_zero(in.M_limit, n, n);
    out.M_eps = pad_zero(in.M_eps, n, n);
    out.L_eps = pad_zero(in.L_eps, n, n);
    out.S_eps = pad_zero(in.S_eps, n, n);
    out.n = n;
    return out;
}

inline ConstructionOutput construct(const ConstructionSpec& spec)
{
    if (!(spec.epsilon > 0.0))
        throw DomainError("epsilon must be positive");
    ConstructionOutput out;
    switch (spec.family) {
    case Family::Simple3: out = simple3(spec.epsilon); break;
    case Family::Lemma1General: {
        // random +-[0.5,1.5] blocks, A is r x 2r
        if (spec.r < 1)
            throw DomainError("lemma1: r must be positive");
        Rng rng(spec.seed);
        const Matrix A = detail::signed_uniform_matrix(rng, spec.r, 2 * spec.r);
        const Matrix B = detail::signed_uniform_matrix(rng, 2 * spec.r, spec.r);
        out = lemma1_pair(A, B, spec.epsilon);
        break;
    }
    case Family::Lemma2: out = lemma2_pair(spec.r, spec.s, spec.seed, spec.epsilon); break;
    case Family::Lemma3: out = lemma3_pair(spec.r, spec.s, spec.seed, spec.epsilon); break;
    case Family::Lemma4Block:
        if (spec.s != spec.p * spec.p * spec.r)
            throw DomainError("lemma4 requires s = p^2 r");
        out = lemma4_pair(spec.r, spec.p, spec.seed, spec.epsilon);
        break;
    case Family::MaxRigid3: out = maximally_rigid3(spec.seed, spec.epsilon); break;
    case Family::Demo1: out = demo_pair(1, spec.epsilon); break;
    case Family::Demo2: out = demo_pair(2, spec.epsilon); break;
    }
    if (spec.pad_to)
        out = pad_to(out, *spec.pad_to);
    return out;
}

} // namespace lps

#endif

#ifndef LPS_RIGIDITY_HPP
#define LPS_RIGIDITY_HPP

#include "lps/linalg.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

namespace lps {

inline constexpr Index kNoUpperBound = std::numeric_limits<Index>::max();

inline Index valiant_upper_bound(Index n, Index r)
{
    if (r < 0 || r > n)
        throw DomainError("valiant_upper_bound: need 0 <= r <= n");
    return (n - r) * (n - r);
}

inline Index valiant_upper_bound(Index m, Index n, Index r)
{
    const Index k = std::min(m, n);
    if (r < 0)
        throw DomainError("valiant_upper_bound: r must be nonnegative");
    if (r >= k)
        return 0;
    return (m - r) * (n - r);
}

/// Row and column permutation pair that leaves the matrix unchanged.
struct Symmetry {
    std::vector<Index> row;
    std::vector<Index> col;
};

/// All (p!)^2 block-row / block-column permutations of a p x p grid of identical blocks.
inline std::vector<Symmetry> block_grid_symmetries(Index p, Index block)
{
    std::vector<Index> perm(static_cast<size_t>(p));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::vector<std::vector<Index>> perms;
    do {
        std::vector<Index> full(static_cast<size_t>(p * block));
        for (Index b = 0; b < p; ++b)
            for (Index t = 0; t < block; ++t)
                full[static_cast<size_t>(b * block + t)] = perm[static_cast<size_t>(b)] * block + t;
        perms.push_back(full);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<Symmetry> out;
    for (const auto& rp : perms)
        for (const auto& cp : perms)
            out.push_back({rp, cp});
    return out;
}

struct RigidityConfig {
    double feas_tol = 1e-7;     // sigma_{r+1}(M - S) < feas_tol * sigma_1(M)
    int restarts = 20;
    double det_rel_tol = 1e-8;  // minor tolerance det_rel_tol * scale^k
    double rank_tol = kRankRelTol;
    long long max_supports = 1'000'000;
    double budget_sec = 300.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::vector<Symmetry> symmetries;
    std::optional<Matrix> witness_hint;
};

enum class RigidityStatus { Exact, BoundsOnly, BudgetExhausted };

inline std::string status_name(RigidityStatus s)
{
    switch (s) {
    case RigidityStatus::Exact: return "Exact";
    case RigidityStatus::BoundsOnly: return "BoundsOnly";
    case RigidityStatus::BudgetExhausted: return "BudgetExhausted";
    }
    return "unknown";
}

struct RigidityCertificate {
    Index r = 0;
    Index lower_bound = 0;           // rigorous, from minor certificates
    Index numerical_lower_bound = 0; // also counts supports rejected only numerically
    Index upper_bound = kNoUpperBound;
    std::optional<Matrix> witness;
    RigidityStatus status = RigidityStatus::BoundsOnly;
    long long supports_examined = 0;
    double elapsed_sec = 0.0;
    Index levels_completed = 0; // cardinalities 0..levels_completed-1 fully enumerated
};

enum class Feasibility { Infeasible, Feasible, Unknown };

struct FeasibilityResult {
    Feasibility verdict = Feasibility::Unknown;
    bool certified = false; // infeasibility proven by minors (or feasibility by exact solve)
    std::optional<Matrix> S;
};

namespace detail {

// In-place determinant of a k x k row-major buffer, partial pivoting.
inline double det_inplace(double* a, int k)
{
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        double best = std::abs(a[c * k + c]);
        for (int i = c + 1; i < k; ++i)
            if (std::abs(a[i * k + c]) > best) {
                best = std::abs(a[i * k + c]);
                piv = i;
            }
        if (best == 0.0)
            return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j)
                std::swap(a[c * k + j], a[piv * k + j]);
            det = -det;
        }
        const double d = a[c * k + c];
        det *= d;
        for (int i = c + 1; i < k; ++i) {
            const double f = a[i * k + c] / d;
            if (f != 0.0)
                for (int j = c + 1; j < k; ++j)
                    a[i * k + j] -= f * a[c * k + j];
        }
    }
    return det;
}

inline constexpr int kMaxMinor = 8;

struct MinorIndex {
    std::array<int, kMaxMinor> rows{};
    std::array<int, kMaxMinor> cols{};
    std::uint64_t mask = 0;
};

// determinant of cur[rows, cols] with the rows/cols listed in skip_r/skip_c removed
inline double sub_det(const Matrix& cur, const MinorIndex& mi, int k, unsigned skip_r, unsigned skip_c)
{
    double buf[kMaxMinor * kMaxMinor];
    int kk = 0;
    int ri = 0;
    for (int a = 0; a < k; ++a) {
        if (skip_r & (1u << a))
            continue;
        int cj = 0;
        for (int b = 0; b < k; ++b) {
            if (skip_c & (1u << b))
                continue;
            buf[ri * k + cj] = cur(mi.rows[static_cast<size_t>(a)], mi.cols[static_cast<size_t>(b)]);
            ++cj;
        }
        kk = cj;
        ++ri;
    }
    if (ri == 0)
        return 1.0;
    // compact to ri x ri
    double packed[kMaxMinor * kMaxMinor];
    for (int i = 0; i < ri; ++i)
        for (int j = 0; j < kk; ++j)
            packed[i * ri + j] = buf[i * k + j];
    return det_inplace(packed, ri);
}

class MinorSystem {
public:
    MinorSystem(const Matrix& M, Index r, double det_rel_tol = 1e-8)
        : M_(M), r_(r), k_(static_cast<int>(r + 1)), det_rel_tol_(det_rel_tol)
    {
        m_ = M.rows();
        n_ = M.cols();
        if (m_ * n_ > 64)
            throw DomainError("rigidity oracle supports at most 64 entries (n <= 8)");
        if (k_ > kMaxMinor)
            throw DomainError("rigidity oracle: r + 1 exceeds the minor size limit");
        std::vector<std::vector<int>> rcomb, ccomb;
        combos(static_cast<int>(m_), rcomb);
        combos(static_cast<int>(n_), ccomb);
        for (const auto& rc : rcomb)
            for (const auto& cc : ccomb) {
                MinorIndex mi;
                for (int a = 0; a < k_; ++a) {
                    mi.rows[static_cast<size_t>(a)] = rc[static_cast<size_t>(a)];
                    mi.cols[static_cast<size_t>(a)] = cc[static_cast<size_t>(a)];
                }
                for (int a = 0; a < k_; ++a)
                    for (int b = 0; b < k_; ++b)
                        mi.mask |= bit(rc[static_cast<size_t>(a)], cc[static_cast<size_t>(b)]);
                minors_.push_back(mi);
            }
        scale_ = std::max(M.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        for (const auto& mi : minors_) {
            const double d = sub_det(M, mi, k_, 0, 0);
            if (std::abs(d) > tol(k_, scale_))
                nonzero_masks_.push_back(mi.mask);
        }
        sigma1_ = spectral_norm(M);
    }

    Index rows() const { return m_; }
    Index cols() const { return n_; }
    std::uint64_t bit(Index i, Index j) const { return std::uint64_t{1} << (i * n_ + j); }
    double scale() const { return scale_; }
    double sigma1() const { return sigma1_; }

    double tol(int k, double scale) const { return det_rel_tol_ * std::pow(scale, k); }

    std::uint64_t mask_of(const Support& s) const
    {
        std::uint64_t m = 0;
        for (const auto& e : s)
            m |= bit(e.i, e.j);
        return m;
    }

    bool disjoint_certificate(std::uint64_t support_mask) const
    {
        for (std::uint64_t mk : nonzero_masks_)
            if ((mk & support_mask) == 0)
                return true;
        return false;
    }

    struct Propagated {
        Feasibility verdict = Feasibility::Unknown;
        Matrix cur;
        std::vector<Entry> free;
    };

    // Forces free entries through minors that depend on a single free entry;
    // a minor that is a nonzero constant proves infeasibility.
    Propagated propagate(const Support& support) const
    {
        Propagated st;
        st.cur = M_;
        std::uint64_t free_mask = 0;
        for (const auto& e : support) {
            st.cur(e.i, e.j) = 0.0;
            free_mask |= bit(e.i, e.j);
        }
        for (;;) {
            const double sc = std::max(scale_, st.cur.cwiseAbs().maxCoeff());
            bool forced = false;
            for (const auto& mi : minors_) {
                // local free positions
                int fr[kMaxMinor * kMaxMinor], fc[kMaxMinor * kMaxMinor];
                int nf = 0;
                if (mi.mask & free_mask) {
                    for (int a = 0; a < k_; ++a)
                        for (int b = 0; b < k_; ++b)
                            if (free_mask & bit(mi.rows[static_cast<size_t>(a)], mi.cols[static_cast<size_t>(b)])) {
                                fr[nf] = a;
                                fc[nf] = b;
                                ++nf;
                            }
                }
                const double c0 = sub_det(st.cur, mi, k_, 0, 0);
                if (nf == 0) {
                    if (std::abs(c0) > tol(k_, sc)) {
                        st.verdict = Feasibility::Infeasible;
                        return st;
                    }
                    continue;
                }
                // coefficients of every matching monomial in the free entries
                int live_single = -1;
                int live_count = 0;
                bool multi_live = false;
                double c1 = 0.0;
                const unsigned subsets = 1u << nf;
                for (unsigned T = 1; T < subsets; ++T) {
                    unsigned rm = 0, cm = 0;
                    bool matching = true;
                    int cnt = 0;
                    for (int t = 0; t < nf && matching; ++t)
                        if (T & (1u << t)) {
                            if ((rm & (1u << fr[t])) || (cm & (1u << fc[t])))
                                matching = false;
                            rm |= 1u << fr[t];
                            cm |= 1u << fc[t];
                            ++cnt;
                        }
                    if (!matching)
                        continue;
                    const double coef = sub_det(st.cur, mi, k_, rm, cm);
                    if (std::abs(coef) <= tol(k_ - cnt, sc))
                        continue;
                    if (cnt == 1) {
                        const int t = std::countr_zero(T);
                        if (live_single >= 0 && live_single != t)
                            multi_live = true;
                        live_single = t;
                        c1 = ((fr[t] + fc[t]) % 2 == 0 ? 1.0 : -1.0) * coef;
                    } else {
                        multi_live = true;
                    }
                    ++live_count;
                    if (multi_live)
                        break;
                }
                if (live_count == 0) {
                    if (std::abs(c0) > tol(k_, sc)) {
                        st.verdict = Feasibility::Infeasible;
                        return st;
                    }
                    continue;
                }
                if (!multi_live && live_single >= 0) {
                    const Index gi = mi.rows[static_cast<size_t>(fr[live_single])];
                    const Index gj = mi.cols[static_cast<size_t>(fc[live_single])];
                    st.cur(gi, gj) = -c0 / c1;
                    free_mask &= ~bit(gi, gj);
                    forced = true;
                    break;
                }
            }
            if (!forced)
                break;
        }
        for (Index i = 0; i < m_; ++i)
            for (Index j = 0; j < n_; ++j)
                if (free_mask & bit(i, j))
                    st.free.push_back({i, j});
        if (st.free.empty())
            st.verdict = Feasibility::Feasible;
        return st;
    }

    bool rank_ok(const Matrix& cur, double feas_tol, double rank_tol) const
    {
        if (!cur.allFinite())
            return false;
        const Vector sv = singular_values(cur);
        if (r_ >= sv.size())
            return true;
        return sv(r_) <= feas_tol * sigma1_ && rank_from_singular_values(sv, rank_tol) <= r_;
    }

    // Levenberg-Marquardt on the vector of minors touching free entries.
    std::optional<Matrix> descend(Matrix cur, const std::vector<Entry>& free, const RigidityConfig& cfg,
                                  Rng& rng) const
    {
        std::vector<const MinorIndex*> active;
        std::uint64_t fm = 0;
        for (const auto& e : free)
            fm |= bit(e.i, e.j);
        for (const auto& mi : minors_)
            if (mi.mask & fm)
                active.push_back(&mi);
        const Index nv = static_cast<Index>(free.size());
        const Index nr = static_cast<Index>(active.size());
        const double normM = M_.norm();

        auto residual = [&](const Matrix& c, Vector& f) {
            f.resize(nr);
            for (Index q = 0; q < nr; ++q)
                f(q) = sub_det(c, *active[static_cast<size_t>(q)], k_, 0, 0);
        };

        for (int start = 0; start < std::max(1, cfg.restarts); ++start) {
            Matrix c = cur;
            if (start > 0)
                for (const auto& e : free)
                    c(e.i, e.j) = M_(e.i, e.j) + rng.normal() * normM;
            double lambda = 1e-3;
            Vector f;
            residual(c, f);
            double fn = f.squaredNorm();
            bool converged = false;
            bool blown = false;
            for (int it = 0; it < 300; ++it) {
                Matrix J(nr, nv);
                for (Index v = 0; v < nv; ++v) {
                    const Entry e = free[static_cast<size_t>(v)];
                    const double keep = c(e.i, e.j);
                    Matrix& cm = c;
                    cm(e.i, e.j) = keep + 1.0;
                    Vector fp;
                    residual(cm, fp);
                    cm(e.i, e.j) = keep;
                    J.col(v) = fp - f; // minors are affine in each entry
                }
                const Matrix A = J.transpose() * J;
                const Vector g = J.transpose() * f;
                bool stepped = false;
                while (lambda < 1e20) {
                    Matrix Ad = A;
                    for (Index v = 0; v < nv; ++v)
                        Ad(v, v) += lambda * (A(v, v) + 1e-12);
                    const Vector delta = -Ad.ldlt().solve(g);
                    Matrix trial = c;
                    for (Index v = 0; v < nv; ++v) {
                        const Entry e = free[static_cast<size_t>(v)];
                        trial(e.i, e.j) += delta(v);
                    }
                    Vector ft;
                    residual(trial, ft);
                    const double tn = ft.squaredNorm();
                    if (std::isfinite(tn) && tn < fn) {
                        double ynorm = 0.0;
                        for (const auto& e : free)
                            ynorm = std::max(ynorm, std::abs(trial(e.i, e.j)));
                        c = trial;
                        f = ft;
                        fn = tn;
                        lambda = std::max(lambda / 3.0, 1e-12);
                        stepped = true;
                        if (delta.norm() <= 1e-12 * (1.0 + ynorm))
                            converged = true;
                        if (ynorm > 1e8 * scale_)
                            blown = true;
                        break;
                    }
                    lambda *= 4.0;
                }
                if (!stepped) {
                    converged = true; // no descent direction left
                    break;
                }
                if (converged || blown || fn == 0.0)
                    break;
            }
            if (blown)
                continue;
            if ((converged || fn == 0.0) && rank_ok(c, cfg.feas_tol, cfg.rank_tol))
                return c;
        }
        return std::nullopt;
    }

    FeasibilityResult decide(const Support& support, const RigidityConfig& cfg, Rng& rng,
                             bool numerical = true) const
    {
        FeasibilityResult res;
        if (disjoint_certificate(mask_of(support))) {
            res.verdict = Feasibility::Infeasible;
            res.certified = true;
            return res;
        }
        Propagated st = propagate(support);
        if (st.verdict == Feasibility::Infeasible) {
            res.verdict = Feasibility::Infeasible;
            res.certified = true;
            return res;
        }
        if (st.verdict == Feasibility::Feasible) {
            if (rank_ok(st.cur, cfg.feas_tol, cfg.rank_tol)) {
                res.verdict = Feasibility::Feasible;
                res.certified = true;
                res.S = M_ - st.cur;
            } else {
                res.verdict = Feasibility::Unknown;
            }
            return res;
        }
        if (!numerical)
            return res;
        if (auto c = descend(st.cur, st.free, cfg, rng)) {
            res.verdict = Feasibility::Feasible;
            res.S = M_ - *c;
        } else {
            res.verdict = Feasibility::Unknown;
        }
        return res;
    }

private:
    void combos(int total, std::vector<std::vector<int>>& out) const
    {
        std::vector<int> c(static_cast<size_t>(k_));
        std::iota(c.begin(), c.end(), 0);
        if (k_ > total)
            return;
        for (;;) {
            out.push_back(c);
            int i = k_ - 1;
            while (i >= 0 && c[static_cast<size_t>(i)] == total - k_ + i)
                --i;
            if (i < 0)
                break;
            ++c[static_cast<size_t>(i)];
            for (int j = i + 1; j < k_; ++j)
                c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
        }
    }

    Matrix M_;
    Index r_;
    int k_;
    double det_rel_tol_;
    Index m_ = 0, n_ = 0;
    double scale_ = 1.0;
    double sigma1_ = 0.0;
    std::vector<MinorIndex> minors_;
    std::vector<std::uint64_t> nonzero_masks_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    Rng g(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
    return g.next_u64();
}

inline bool canonical(const Support& s, const std::vector<Symmetry>& group)
{
    Support img(s.size());
    for (const auto& g : group) {
        for (size_t t = 0; t < s.size(); ++t)
            img[t] = {g.row[static_cast<size_t>(s[t].i)], g.col[static_cast<size_t>(s[t].j)]};
        std::sort(img.begin(), img.end());
        if (img < s)
            return false;
    }
    return true;
}

// Valiant-style witness: restore rank r with the Schur complement of a pivot block.
inline Matrix valiant_witness(const Matrix& M, Index r)
{
    const Index m = M.rows(), n = M.cols();
    if (r == 0)
        return M;
    Eigen::FullPivLU<Matrix> lu(M);
    const Index take = std::min<Index>(r, lu.rank());
    if (take == 0)
        return M;
    std::vector<Index> I(static_cast<size_t>(take)), J(static_cast<size_t>(take));
    for (Index t = 0; t < take; ++t) {
        I[static_cast<size_t>(t)] = lu.permutationP().indices()(t);
        J[static_cast<size_t>(t)] = lu.permutationQ().indices()(t);
    }
    Matrix C(m, take), R(take, n), P(take, take);
    for (Index t = 0; t < take; ++t) {
        C.col(t) = M.col(J[static_cast<size_t>(t)]);
        R.row(t) = M.row(I[static_cast<size_t>(t)]);
    }
    for (Index a = 0; a < take; ++a)
        for (Index b = 0; b < take; ++b)
            P(a, b) = M(I[static_cast<size_t>(a)], J[static_cast<size_t>(b)]);
    const Matrix cur = C * P.fullPivLu().solve(R);
    Matrix W = M - cur;
    for (Index t = 0; t < take; ++t) {
        W.row(I[static_cast<size_t>(t)]).setZero();
        W.col(J[static_cast<size_t>(t)]).setZero();
    }
    const double cut = kL0AbsTol * std::max(1.0, M.cwiseAbs().maxCoeff());
    W = W.unaryExpr([cut](double x) { return std::abs(x) <= cut ? 0.0 : x; });
    return W;
}

} // namespace detail

/// True iff some (r+1)-minor avoiding the support has |det| > det_tol.
inline bool disjoint_minor_certificate(const Matrix& M, Index r, const Support& support, double det_tol)
{
    const Index m = M.rows(), n = M.cols();
    const Index k = r + 1;
    if (k > std::min(m, n))
        return false;
    std::vector<char> hit(static_cast<size_t>(m * n), 0);
    for (const auto& e : support) {
        if (e.i < 0 || e.i >= m || e.j < 0 || e.j >= n)
            throw DomainError("support index out of range");
        hit[static_cast<size_t>(e.i * n + e.j)] = 1;
    }
    std::vector<Index> rs(static_cast<size_t>(k)), cs(static_cast<size_t>(k));
    std::function<bool(Index, Index)> pick_cols;
    auto check = [&]() {
        for (Index a : rs)
            for (Index b : cs)
                if (hit[static_cast<size_t>(a * n + b)])
                    return false;
        Matrix sub(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                sub(a, b) = M(rs[static_cast<size_t>(a)], cs[static_cast<size_t>(b)]);
        return std::abs(sub.determinant()) > det_tol;
    };
    std::function<bool(Index, Index)> pick_rows = [&](Index pos, Index from) -> bool {
        if (pos == k)
            return pick_cols(0, 0);
        for (Index i = from; i < m; ++i) {
            rs[static_cast<size_t>(pos)] = i;
            if (pick_rows(pos + 1, i + 1))
                return true;
        }
        return false;
    };
    pick_cols = [&](Index pos, Index from) -> bool {
        if (pos == k)
            return check();
        for (Index j = from; j < n; ++j) {
            cs[static_cast<size_t>(pos)] = j;
            if (pick_cols(pos + 1, j + 1))
                return true;
        }
        return false;
    };
    return pick_rows(0, 0);
}

/// Can rank(M - S) <= r with S supported on `support`?
inline FeasibilityResult rank_le_feasible(const Matrix& M, Index r, const Support& support, double tol = 1e-7,
                                          int restarts = 20, std::uint64_t seed = 0)
{
    require_finite(M, "rank_le_feasible");
    if (restarts < 1)
        throw DomainError("rank_le_feasible: restarts must be >= 1");
    for (const auto& e : support)
        if (e.i < 0 || e.i >= M.rows() || e.j < 0 || e.j >= M.cols())
            throw DomainError("support index out of range");
    if (r >= std::min(M.rows(), M.cols()))
        return {Feasibility::Feasible, true, Matrix::Zero(M.rows(), M.cols())};
    RigidityConfig cfg;
    cfg.feas_tol = tol;
    cfg.restarts = restarts;
    detail::MinorSystem sys(M, r);
    Rng rng(seed);
    Support sorted = support;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sys.decide(sorted, cfg, rng);
}

inline RigidityCertificate rigidity(const Matrix& M, Index r, std::optional<Index> s_max = std::nullopt,
                                    const RigidityConfig& cfg = {})
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    require_finite(M, "rigidity");
    if (r < 0)
        throw DomainError("rigidity: r must be nonnegative");
    const Index m = M.rows(), n = M.cols();
    RigidityCertificate cert;
    cert.r = r;
    auto finish = [&]() {
        cert.elapsed_sec = std::chrono::duration<double>(clock::now() - t0).count();
        return cert;
    };

    if (r >= std::min(m, n) || numerical_rank(M, cfg.rank_tol) <= r) {
        cert.lower_bound = cert.numerical_lower_bound = cert.upper_bound = 0;
        cert.witness = Matrix::Zero(m, n);
        cert.status = RigidityStatus::Exact;
        cert.supports_examined = 1;
        return finish();
    }

    for (const auto& g : cfg.symmetries) {
        if (static_cast<Index>(g.row.size()) != m || static_cast<Index>(g.col.size()) != n)
            throw DomainError("symmetry has wrong dimensions");
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j)
                if (M(g.row[static_cast<size_t>(i)], g.col[static_cast<size_t>(j)]) != M(i, j))
                    throw DomainError("declared symmetry does not fix the matrix");
    }

    detail::MinorSystem sys(M, r, cfg.det_rel_tol);

    // constructive upper bounds
    {
        Matrix W = detail::valiant_witness(M, r);
        if (sys.rank_ok(M - W, cfg.feas_tol, cfg.rank_tol)) {
            cert.witness = W;
            cert.upper_bound = count_nonzero(W, 0.0);
        }
        if (cfg.witness_hint) {
            const Matrix& H = *cfg.witness_hint;
            if (H.rows() != m || H.cols() != n)
                throw DomainError("witness hint has wrong dimensions");
            const Index h = count_nonzero(H, 0.0);
            if (h < cert.upper_bound && sys.rank_ok(M - H, cfg.feas_tol, cfg.rank_tol)) {
                cert.witness = H;
                cert.upper_bound = h;
            }
        }
    }

    const Index total = m * n;
    Index last = cert.upper_bound == kNoUpperBound ? total : cert.upper_bound - 1;
    if (s_max)
        last = std::min(last, *s_max);

    bool budget_hit = false;
    const unsigned workers = std::max(1u, cfg.threads);
    constexpr size_t kBatch = 4096;

    for (Index c = 0; c <= last; ++c) {
        bool all_certified = true;
        std::optional<Matrix> found;
        std::vector<int> comb(static_cast<size_t>(c));
        std::iota(comb.begin(), comb.end(), 0);
        bool more = c <= total;
        std::uint64_t ordinal = 0;
        while (more && !found) {
            std::vector<Support> batch;
            std::vector<std::uint64_t> ords;
            while (more && batch.size() < kBatch &&
                   cert.supports_examined + static_cast<long long>(batch.size()) < cfg.max_supports) {
                Support s(static_cast<size_t>(c));
                for (Index t = 0; t < c; ++t)
                    s[static_cast<size_t>(t)] = {comb[static_cast<size_t>(t)] / n, comb[static_cast<size_t>(t)] % n};
                if (cfg.symmetries.empty() || detail::canonical(s, cfg.symmetries)) {
                    batch.push_back(std::move(s));
                    ords.push_back(ordinal);
                }
                ++ordinal;
                // next combination
                Index i = c - 1;
                while (i >= 0 && comb[static_cast<size_t>(i)] == total - c + i)
                    --i;
                if (i < 0) {
                    more = false;
                } else {
                    ++comb[static_cast<size_t>(i)];
                    for (Index j = i + 1; j < c; ++j)
                        comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
                }
            }
            std::vector<FeasibilityResult> results(batch.size());
            auto work = [&](size_t lo, size_t hi) {
                for (size_t q = lo; q < hi; ++q) {
                    Rng rng(detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(c), ords[q]));
                    results[q] = sys.decide(batch[q], cfg, rng);
                }
            };
            if (workers == 1 || batch.size() < 64) {
                work(0, batch.size());
            } else {
                std::vector<std::thread> pool;
                const size_t chunk = (batch.size() + workers - 1) / workers;
                for (unsigned w = 0; w < workers; ++w) {
                    const size_t lo = w * chunk, hi = std::min(batch.size(), lo + chunk);
                    if (lo < hi)
                        pool.emplace_back(work, lo, hi);
                }
                for (auto& th : pool)
                    th.join();
            }
            cert.supports_examined += static_cast<long long>(batch.size());
            for (auto& res : results) {
                if (res.verdict == Feasibility::Feasible) {
                    found = res.S;
                    break;
                }
                if (!(res.verdict == Feasibility::Infeasible && res.certified))
                    all_certified = false;
            }
            const double el = std::chrono::duration<double>(clock::now() - t0).count();
            if (!found && more && (cert.supports_examined >= cfg.max_supports || el >= cfg.budget_sec)) {
                budget_hit = true;
                break;
            }
        }
        if (found) {
            const Index u = count_nonzero(*found, 0.0);
            if (u < cert.upper_bound) {
                cert.upper_bound = u;
                cert.witness = *found;
            }
            cert.levels_completed = c;
            break;
        }
        if (budget_hit)
            break;
        // unresolved supports count as numerically rejected
        cert.levels_completed = c + 1;
        cert.numerical_lower_bound = c + 1;
        if (all_certified)
            cert.lower_bound = c + 1;
    }
    cert.numerical_lower_bound = std::max(cert.numerical_lower_bound, cert.lower_bound);
    if (cert.upper_bound != kNoUpperBound)
        cert.numerical_lower_bound = std::min(cert.numerical_lower_bound, cert.upper_bound);
    if (cert.lower_bound == cert.upper_bound)
        cert.status = RigidityStatus::Exact;
    else if (budget_hit)
        cert.status = RigidityStatus::BudgetExhausted;
    else
        cert.status = RigidityStatus::BoundsOnly;
    return finish();
}

enum class Membership { InSet, NotInSet, Unknown };

inline std::string membership_name(Membership m)
{
    switch (m) {
    case Membership::InSet: return "InSet";
    case Membership::NotInSet: return "NotInSet";
    case Membership::Unknown: return "Unknown";
    }
    return "unknown";
}

struct MembershipResult {
    Membership verdict = Membership::Unknown;
    RigidityCertificate certificate;
};

inline MembershipResult verify_membership(const Matrix& M, Index r, Index s, const RigidityConfig& cfg = {})
{
    MembershipResult out;
    out.certificate = rigidity(M, r, s, cfg);
    if (out.certificate.upper_bound <= s)
        out.verdict = Membership::InSet;
    else if (out.certificate.lower_bound > s)
        out.verdict = Membership::NotInSet;
    return out;
}

} // namespace lps

#endif

#ifndef LPS_RPCA_HPP
#define LPS_RPCA_HPP

#include "lps/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace lps {

enum class RpcaInit { SpectralDefault, Zero, Given };

struct RpcaConfig {
    Index r = 1;
    Index s = 1;
    long long max_iters = 10000;
    double res_tol = 1e-4;      // stop when ||M - L - S||_F <= res_tol ||M||_F
    double lambda = 3.23;       // convex weight, or FastGD sparse-estimator parameter
    double eta = 1.0 / 6.0;     // FastGD step
    double beta = 0.25;         // AltProj threshold control
    int godec_power_iters = 10;
    bool exact_low_rank = false; // GoDec: exact SVD instead of bilateral power projection
    bool sparse_step = true;     // FastGD: disable to fit a pure factorization
    RpcaInit init = RpcaInit::SpectralDefault;
    Matrix L0, S0;
    std::uint64_t seed = 0;
    double norm_cap = 1e8;      // stop once a component exceeds norm_cap ||M||_F
    double convex_tol = 1e-7;
    double ialm_rho = 1.5;
    double ialm_mu_cap = 1e7;   // IALM penalty ceiling as a multiple of mu_0
    double admm_mu = 1.0;
};

inline double default_convex_lambda(Index m, Index n)
{
    return 1.0 / std::sqrt(static_cast<double>(std::max(m, n)));
}

inline nlohmann::json to_json(const RpcaConfig& c)
{
    return {{"r", c.r},
            {"s", c.s},
            {"max_iters", c.max_iters},
            {"res_tol", c.res_tol},
            {"lambda", c.lambda},
            {"eta", c.eta},
            {"beta", c.beta},
            {"godec_power_iters", c.godec_power_iters},
            {"exact_low_rank", c.exact_low_rank},
            {"sparse_step", c.sparse_step},
            {"init", c.init == RpcaInit::SpectralDefault ? "spectral" : c.init == RpcaInit::Zero ? "zero" : "given"},
            {"seed", c.seed},
            {"norm_cap", c.norm_cap},
            {"convex_tol", c.convex_tol},
            {"ialm_rho", c.ialm_rho},
            {"ialm_mu_cap", c.ialm_mu_cap},
            {"admm_mu", c.admm_mu}};
}

namespace detail {

inline void check_rs(const Matrix& M, const RpcaConfig& cfg, bool need_rank_positive)
{
    require_finite(M, "rpca");
    if (M.size() == 0)
        throw DomainError("rpca: empty matrix");
    const Index k = std::min(M.rows(), M.cols());
    if (cfg.r < (need_rank_positive ? 1 : 0) || cfg.r > k)
        throw DomainError("rpca: r out of range");
    if (cfg.s < 0)
        throw DomainError("rpca: s must be nonnegative");
    if (cfg.max_iters < 1)
        throw DomainError("rpca: max_iters must be >= 1");
    if (!(cfg.res_tol > 0.0))
        throw DomainError("rpca: res_tol must be positive");
}

inline void initial_pair(const Matrix& M, const RpcaConfig& cfg, Index s, Matrix& L, Matrix& S)
{
    switch (cfg.init) {
    case RpcaInit::SpectralDefault:
        L = rank_trunc(M, cfg.r);
        S = hard_threshold(M - L, s);
        break;
    case RpcaInit::Zero:
        L = Matrix::Zero(M.rows(), M.cols());
        S = Matrix::Zero(M.rows(), M.cols());
        break;
    case RpcaInit::Given:
        if (cfg.L0.rows() != M.rows() || cfg.L0.cols() != M.cols() || cfg.S0.rows() != M.rows() ||
            cfg.S0.cols() != M.cols())
            throw DomainError("rpca: given initial L0/S0 have wrong shape");
        L = rank_trunc(cfg.L0, cfg.r);
        S = hard_threshold(cfg.S0, s);
        break;
    }
}

inline void assert_feasible(const TraceRecord& rec, Index r, Index s)
{
    if (rec.rank_L > r || rec.nnz_S > s)
        throw std::logic_error("iterate left the low-rank plus sparse constraint set");
}

// Bilateral random projection with power sweeps (GoDec's low-rank step).
inline Matrix godec_project(const Matrix& X, Index r, int power, Rng& rng)
{
    if (r == 0)
        return Matrix::Zero(X.rows(), X.cols());
    Matrix Y2 = rng.gaussian(X.cols(), r);
    Matrix Y1;
    for (int i = 0; i <= power; ++i) {
        Y1 = X * Y2;
        Y2 = X.transpose() * Y1;
    }
    Eigen::HouseholderQR<Matrix> qr(Y2);
    const Matrix Q = qr.householderQ() * Matrix::Identity(X.cols(), r);
    return (X * Q) * Q.transpose();
}

inline void balanced_factors(const Matrix& L, Index r, Matrix& U, Matrix& V)
{
    const SvdResult d = svd(L);
    const Vector root = d.singular_values.head(r).cwiseSqrt();
    U = d.U.leftCols(r) * root.asDiagonal();
    V = d.V.leftCols(r) * root.asDiagonal();
}

} // namespace detail

inline SolverTrace godec(const Matrix& M, const RpcaConfig& cfg)
{
    detail::check_rs(M, cfg, false);
    SolverTrace tr;
    tr.algo = "godec";
    tr.config_snapshot = to_json(cfg);
    tr.input_scale = M.norm();
    TraceRecorder rec(tr);
    Rng rng(cfg.seed);
    Matrix L, S;
    detail::initial_pair(M, cfg, cfg.s, L, S);
    rec.record(make_record(0, M, L, S));
    const double scale = tr.input_scale;
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        L = cfg.exact_low_rank ? rank_trunc(M - S, cfg.r)
                               : detail::godec_project(M - S, cfg.r, cfg.godec_power_iters, rng);
        S = hard_threshold(M - L, cfg.s);
        const TraceRecord r = make_record(t, M, L, S);
        detail::assert_feasible(r, cfg.r, cfg.s);
        rec.record(r);
        if (r.residual <= cfg.res_tol * scale) {
            reason = "res_tol";
            break;
        }
        if (std::max(r.norm_L, r.norm_S) > cfg.norm_cap * scale) {
            reason = "norm_cap";
            break;
        }
    }
    rec.finish(reason);
    return tr;
}

inline SolverTrace altmin(const Matrix& M, const RpcaConfig& cfg)
{
    detail::check_rs(M, cfg, true);
    SolverTrace tr;
    tr.algo = "altmin";
    tr.config_snapshot = to_json(cfg);
    tr.input_scale = M.norm();
    TraceRecorder rec(tr);
    Matrix L, S, U, V;
    detail::initial_pair(M, cfg, cfg.s, L, S);
    detail::balanced_factors(L, cfg.r, U, V);
    rec.record(make_record(0, M, L, S));
    const double scale = tr.input_scale;
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        const Matrix R = M - S;
        // min-norm least squares: V U^T = R^T, then U V^T = R
        U = lstsq_min_norm(V, R.transpose()).transpose();
        V = lstsq_min_norm(U, R).transpose();
        L = U * V.transpose();
        S = hard_threshold(M - L, cfg.s);
        const TraceRecord r = make_record(t, M, L, S);
        detail::assert_feasible(r, cfg.r, cfg.s);
        rec.record(r);
        if (r.residual <= cfg.res_tol * scale) {
            reason = "res_tol";
            break;
        }
        if (std::max(r.norm_L, r.norm_S) > cfg.norm_cap * scale) {
            reason = "norm_cap";
            break;
        }
    }
    rec.finish(reason);
    return tr;
}

/// Keeps entries with |x| > zeta; cfg.s > 0 additionally caps the count at s.
inline Matrix altproj_sparse(const Matrix& X, double zeta, Index cap)
{
    Matrix S = X.unaryExpr([zeta](double x) { return std::abs(x) > zeta ? x : 0.0; });
    if (cap > 0)
        S = hard_threshold(S, cap);
    return S;
}

inline SolverTrace altproj(const Matrix& M, Index r, double beta, const RpcaConfig& cfg_in)
{
    RpcaConfig cfg = cfg_in;
    cfg.r = r;
    cfg.beta = beta;
    detail::check_rs(M, cfg, true);
    if (!(beta > 0.0))
        throw DomainError("altproj: beta must be positive");
    SolverTrace tr;
    tr.algo = "altproj";
    tr.config_snapshot = to_json(cfg);
    tr.input_scale = M.norm();
    TraceRecorder rec(tr);
    const Index cap = cfg.s;
    const double scale = tr.input_scale;
    Matrix L, S;
    {
        RpcaConfig c1 = cfg;
        c1.r = 1;
        detail::initial_pair(M, c1, cap, L, S);
    }
    rec.record(make_record(0, M, L, S));
    std::string reason = "max_iters";
    long long t = 0;
    bool stop = false;
    for (Index k = 1; k <= r && t < cfg.max_iters && !stop; ++k) {
        // earlier stages get a short inner loop, the final stage runs to the budget
        const long long early = std::max<long long>(1, std::min<long long>(50, cfg.max_iters / (2 * r)));
        const long long inner = (k == r) ? cfg.max_iters : early;
        for (long long i = 0; i < inner && t < cfg.max_iters && !stop; ++i) {
            ++t;
            const Vector sig = singular_values(M - S);
            const double sk1 = k < sig.size() ? sig(k) : 0.0;
            const double zeta = beta * (sk1 + std::pow(0.5, static_cast<double>(i)) * sig(k - 1));
            L = rank_trunc(M - S, k);
            S = altproj_sparse(M - L, zeta, cap);
            const TraceRecord rr = make_record(t, M, L, S);
            rec.record(rr);
            if (k == r && rr.residual <= cfg.res_tol * scale) {
                reason = "res_tol";
                stop = true;
            } else if (std::max(rr.norm_L, rr.norm_S) > cfg.norm_cap * scale) {
                reason = "norm_cap";
                stop = true;
            }
        }
    }
    rec.finish(reason);
    return tr;
}

/// lambda -> (row keep, column keep, global cap) with fraction 1/lambda.
struct FastGdKeep {
    Index per_row = 0;
    Index per_col = 0;
    Index total = 0;
};

inline FastGdKeep fastgd_keep(double lambda, Index m, Index n)
{
    if (!(lambda > 0.0))
        throw DomainError("fastgd: lambda must be positive");
    const double alpha = std::min(1.0, 1.0 / lambda);
    FastGdKeep k;
    k.per_row = static_cast<Index>(std::ceil(alpha * static_cast<double>(n) - 1e-12));
    k.per_col = static_cast<Index>(std::ceil(alpha * static_cast<double>(m) - 1e-12));
    k.total = std::max<Index>(1, static_cast<Index>(std::llround(alpha * alpha * static_cast<double>(m * n))));
    return k;
}

/// Entries among the largest per_row of their row and per_col of their column, at most `total`.
inline Matrix fastgd_sparse(const Matrix& X, const FastGdKeep& keep)
{
    const Index m = X.rows(), n = X.cols();
    Matrix A = X.cwiseAbs();
    Matrix cand = Matrix::Zero(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            if (A(i, j) == 0.0)
                continue;
            Index above_row = 0, above_col = 0;
            for (Index b = 0; b < n; ++b)
                if (A(i, b) > A(i, j) || (A(i, b) == A(i, j) && b < j))
                    ++above_row;
            for (Index a = 0; a < m; ++a)
                if (A(a, j) > A(i, j) || (A(a, j) == A(i, j) && a < i))
                    ++above_col;
            if (above_row < keep.per_row && above_col < keep.per_col)
                cand(i, j) = X(i, j);
        }
    return hard_threshold(cand, keep.total);
}

struct FastGdGradient {
    Matrix gU, gV;
    double value = 0.0;
};

/// Smooth part 1/2||U V^T + S - M||^2 + 1/8||U^T U - V^T V||^2 and its gradient.
inline FastGdGradient fastgd_gradient(const Matrix& M, const Matrix& S, const Matrix& U, const Matrix& V)
{
    const Matrix E = U * V.transpose() + S - M;
    const Matrix D = U.transpose() * U - V.transpose() * V;
    FastGdGradient g;
    g.gU = E * V + 0.5 * U * D;
    g.gV = E.transpose() * U - 0.5 * V * D;
    g.value = 0.5 * E.squaredNorm() + 0.125 * D.squaredNorm();
    return g;
}

inline SolverTrace fastgd(const Matrix& M, const RpcaConfig& cfg)
{
    detail::check_rs(M, cfg, true);
    if (!(cfg.eta > 0.0))
        throw DomainError("fastgd: eta must be positive");
    const FastGdKeep keep = fastgd_keep(cfg.lambda, M.rows(), M.cols());
    SolverTrace tr;
    tr.algo = "fastgd";
    tr.config_snapshot = to_json(cfg);
    tr.config_snapshot["sparse_keep"] = {{"per_row", keep.per_row}, {"per_col", keep.per_col}, {"total", keep.total}};
    tr.input_scale = M.norm();
    TraceRecorder rec(tr);
    const double scale = tr.input_scale;
    Matrix L, S, U, V;
    detail::initial_pair(M, cfg, cfg.sparse_step ? keep.total : 0, L, S);
    if (!cfg.sparse_step)
        S.setZero();
    detail::balanced_factors(L, cfg.r, U, V);
    const double sigma1 = std::max(spectral_norm(L), std::numeric_limits<double>::min());
    const double step = cfg.eta / sigma1;
    rec.record(make_record(0, M, L, S));
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        if (cfg.sparse_step)
            S = fastgd_sparse(M - U * V.transpose(), keep);
        const FastGdGradient g = fastgd_gradient(M, S, U, V);
        U -= step * g.gU;
        V -= step * g.gV;
        L = U * V.transpose();
        if (!L.allFinite()) {
            reason = "overflow";
            break;
        }
        const TraceRecord r = make_record(t, M, L, S);
        rec.record(r);
        if (r.residual <= cfg.res_tol * scale) {
            reason = "res_tol";
            break;
        }
        if (std::max(r.norm_L, r.norm_S) > cfg.norm_cap * scale) {
            reason = "norm_cap";
            break;
        }
        if (!cfg.sparse_step && g.gU.norm() + g.gV.norm() == 0.0) {
            reason = "stationary";
            break;
        }
    }
    rec.finish(reason);
    return tr;
}

struct ConvexResult {
    Matrix L;
    Matrix S;
    SolverTrace trace;
    bool converged = false;
};

inline double convex_objective(const Matrix& L, const Matrix& S, double lambda)
{
    return nuclear_norm(L) + lambda * S.cwiseAbs().sum();
}

inline ConvexResult pcp_admm(const Matrix& M, double lambda, const RpcaConfig& cfg)
{
    require_finite(M, "pcp_admm");
    if (!(lambda > 0.0))
        throw DomainError("pcp_admm: lambda must be positive");
    ConvexResult out;
    out.trace.algo = "pcp";
    out.trace.config_snapshot = to_json(cfg);
    out.trace.config_snapshot["lambda"] = lambda;
    const double normM = M.norm();
    out.trace.input_scale = normM;
    TraceRecorder rec(out.trace);
    const double mu = cfg.admm_mu;
    Matrix L = Matrix::Zero(M.rows(), M.cols());
    Matrix S = L, Y = L;
    rec.record(make_record(0, M, L, S));
    std::string reason = "max_iters";
    if (normM == 0.0) {
        out.converged = true;
        reason = "zero_input";
    }
    for (long long t = 1; t <= cfg.max_iters && !out.converged; ++t) {
        L = sv_threshold(M - S + Y / mu, 1.0 / mu);
        const Matrix Sp = S;
        S = soft_threshold(M - L + Y / mu, lambda / mu);
        const Matrix Z = M - L - S;
        Y += mu * Z;
        rec.record(make_record(t, M, L, S));
        if (Z.norm() <= cfg.convex_tol * normM && mu * (S - Sp).norm() <= cfg.convex_tol * normM) {
            out.converged = true;
            reason = "converged";
        }
    }
    rec.finish(reason);
    out.L = L;
    out.S = S;
    return out;
}

inline ConvexResult ialm(const Matrix& M, double lambda, const RpcaConfig& cfg)
{
    require_finite(M, "ialm");
    if (!(lambda > 0.0))
        throw DomainError("ialm: lambda must be positive");
    ConvexResult out;
    out.trace.algo = "ialm";
    out.trace.config_snapshot = to_json(cfg);
    out.trace.config_snapshot["lambda"] = lambda;
    const double normM = M.norm();
    out.trace.input_scale = normM;
    TraceRecorder rec(out.trace);
    Matrix L = Matrix::Zero(M.rows(), M.cols());
    Matrix S = L;
    rec.record(make_record(0, M, L, S));
    std::string reason = "max_iters";
    if (normM == 0.0) {
        out.converged = true;
        rec.finish("zero_input");
        out.L = L;
        out.S = S;
        return out;
    }
    const double norm2 = spectral_norm(M);
    const double dual = std::max(norm2, M.cwiseAbs().maxCoeff() / lambda);
    Matrix Y = M / dual;
    double mu = 1.25 / norm2;
    const double mu_bar = mu * cfg.ialm_mu_cap;
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        S = soft_threshold(M - L + Y / mu, lambda / mu);
        L = sv_threshold(M - S + Y / mu, 1.0 / mu);
        const Matrix Z = M - L - S;
        Y += mu * Z;
        mu = std::min(mu * cfg.ialm_rho, mu_bar);
        if (!Y.allFinite()) {
            reason = "overflow";
            break;
        }
        rec.record(make_record(t, M, L, S));
        if (Z.norm() <= cfg.convex_tol * normM) {
            out.converged = true;
            reason = "converged";
            break;
        }
    }
    rec.finish(reason);
    out.L = L;
    out.S = S;
    return out;
}

enum class ConvexSolver { PCP, IALM };

struct SweepRow {
    double lambda = 0.0;
    Index rank_L = 0;
    Index nnz_S = 0;
    double nuclear_L = 0.0;
    double l1_S = 0.0;
    std::string error;
};

inline constexpr double kSweepRankTol = 1e-6;
inline constexpr double kSweepL0Tol = 1e-6;

inline SweepRow sweep_row(const Matrix& M, double lambda, ConvexSolver solver, const RpcaConfig& cfg)
{
    SweepRow row;
    row.lambda = lambda;
    try {
        const ConvexResult res = solver == ConvexSolver::PCP ? pcp_admm(M, lambda, cfg) : ialm(M, lambda, cfg);
        const double abs_tol = kSweepL0Tol * M.norm();
        row.rank_L = numerical_rank(res.L, kSweepRankTol, abs_tol);
        row.nnz_S = count_nonzero(res.S, abs_tol);
        row.nuclear_L = nuclear_norm(res.L);
        row.l1_S = res.S.cwiseAbs().sum();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

inline std::vector<SweepRow> lambda_sweep(const Matrix& M, const std::vector<double>& lambdas, ConvexSolver solver,
                                          const RpcaConfig& cfg, unsigned threads = 1)
{
    if (lambdas.empty())
        throw DomainError("lambda_sweep: empty grid");
    std::vector<SweepRow> rows(lambdas.size());
    auto work = [&](size_t lo, size_t hi) {
        for (size_t q = lo; q < hi; ++q)
            rows[q] = sweep_row(M, lambdas[q], solver, cfg);
    };
    const unsigned w = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(lambdas.size())));
    if (w == 1) {
        work(0, lambdas.size());
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (lambdas.size() + w - 1) / w;
        for (unsigned k = 0; k < w; ++k) {
            const size_t lo = k * chunk, hi = std::min(lambdas.size(), lo + chunk);
            if (lo < hi)
                pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool)
            th.join();
    }
    return rows;
}

/// a:b:step inclusive grid, values rounded to the step's decimal grid.
inline std::vector<double> parse_grid(const std::string& spec)
{
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw DomainError("grid must look like a:b:step");
    const double a = parse_real(spec.substr(0, c1));
    const double b = parse_real(spec.substr(c1 + 1, c2 - c1 - 1));
    const double h = parse_real(spec.substr(c2 + 1));
    if (!(h > 0.0) || !(b >= a) || !(a > 0.0))
        throw DomainError("grid needs 0 < a <= b and step > 0");
    const long long count = static_cast<long long>(std::floor((b - a) / h + 1e-9)) + 1;
    std::vector<double> out;
    char buf[64];
    for (long long q = 0; q < count; ++q) {
        // snap a + q h back onto the decimal grid (0.05 * 10 -> 0.5, not 0.5000000000000001)
        std::snprintf(buf, sizeof(buf), "%.12g", a + static_cast<double>(q) * h);
        out.push_back(parse_real(buf));
    }
    return out;
}

} // namespace lps

#endif

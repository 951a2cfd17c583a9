#ifndef LPS_COMPLETION_HPP
#define LPS_COMPLETION_HPP

#include "lps/trace.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lps {

struct ObservationMask {
    Index rows = 0;
    Index cols = 0;
    Matrix W; // 1 observed, 0 missing

    Index observed_count() const { return static_cast<Index>(W.sum()); }
    bool observed(Index i, Index j) const { return W(i, j) != 0.0; }
    Matrix project(const Matrix& X) const { return X.cwiseProduct(W); }
};

inline ObservationMask make_mask(Index rows, Index cols, const std::vector<Entry>& missing)
{
    if (rows < 1 || cols < 1)
        throw DomainError("make_mask: dimensions must be positive");
    ObservationMask m;
    m.rows = rows;
    m.cols = cols;
    m.W = Matrix::Ones(rows, cols);
    std::set<Entry> seen;
    for (const auto& e : missing) {
        if (e.i < 0 || e.i >= rows || e.j < 0 || e.j >= cols)
            throw DomainError("make_mask: index (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                              ") out of range");
        if (!seen.insert(e).second)
            throw DomainError("make_mask: duplicate missing index (" + std::to_string(e.i) + "," +
                              std::to_string(e.j) + ")");
        m.W(e.i, e.j) = 0.0;
    }
    return m;
}

/// "i,j;i,j;..." list of entries.
inline std::vector<Entry> parse_entries(const std::string& spec)
{
    std::vector<Entry> out;
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t end = spec.find(';', pos);
        if (end == std::string::npos)
            end = spec.size();
        const std::string item = spec.substr(pos, end - pos);
        if (!item.empty()) {
            const auto comma = item.find(',');
            if (comma == std::string::npos)
                throw DomainError("entry '" + item + "' must look like i,j");
            try {
                out.push_back({std::stoll(item.substr(0, comma)), std::stoll(item.substr(comma + 1))});
            } catch (const std::exception&) {
                throw DomainError("entry '" + item + "' must look like i,j");
            }
        }
        pos = end + 1;
    }
    return out;
}

enum class McInit { SpectralOfZeroFill, Given, RandomNonzeroCorner };

struct McConfig {
    Index r = 1;
    long long max_iters = 10000;
    double res_tol = 1e-4; // relative to ||P_Omega(M)||_F
    McInit init = McInit::RandomNonzeroCorner;
    Matrix X0;
    std::uint64_t seed = 0;
    double corner_value = 1.0;
    double corner_jitter = 1e-2; // relative to max |M_obs|, breaks ties in the zero-filled spectrum
    double omega_sor = 1.0;
    bool adapt_omega = true;
    double restart_angle = 0.7;
    bool restart_every_step = false;
    double norm_cap = 1e8; // relative to ||P_Omega(M)||_F
};

inline nlohmann::json to_json(const McConfig& c)
{
    return {{"r", c.r},
            {"max_iters", c.max_iters},
            {"res_tol", c.res_tol},
            {"init", c.init == McInit::RandomNonzeroCorner ? "corner" : c.init == McInit::Given ? "given" : "spectral"},
            {"seed", c.seed},
            {"corner_value", c.corner_value},
            {"corner_jitter", c.corner_jitter},
            {"omega_sor", c.omega_sor},
            {"adapt_omega", c.adapt_omega},
            {"restart_angle", c.restart_angle},
            {"restart_every_step", c.restart_every_step},
            {"norm_cap", c.norm_cap}};
}

namespace detail {

inline void check_mc(const Matrix& M, const ObservationMask& mask, const McConfig& cfg)
{
    require_finite(M, "completion");
    if (M.rows() != mask.rows || M.cols() != mask.cols)
        throw DomainError("completion: mask shape differs from matrix");
    if (mask.observed_count() == 0)
        throw DomainError("completion: at least one observed entry is required");
    if (cfg.r < 1 || cfg.r > std::min(M.rows(), M.cols()))
        throw DomainError("completion: r out of range");
    if (cfg.max_iters < 1)
        throw DomainError("completion: max_iters must be >= 1");
    if (!(cfg.omega_sor >= 1.0))
        throw DomainError("completion: omega_sor must be >= 1");
}

inline Matrix mc_initial(const Matrix& Mobs, const ObservationMask& mask, const McConfig& cfg)
{
    switch (cfg.init) {
    case McInit::SpectralOfZeroFill:
        return rank_trunc(mask.project(Mobs), cfg.r);
    case McInit::Given:
        if (cfg.X0.rows() != Mobs.rows() || cfg.X0.cols() != Mobs.cols())
            throw DomainError("completion: X0 has wrong shape");
        return rank_trunc(cfg.X0, cfg.r);
    case McInit::RandomNonzeroCorner: {
        Rng rng(cfg.seed);
        const Matrix Z = mask.project(Mobs);
        const double amp = cfg.corner_jitter * std::max(Z.cwiseAbs().maxCoeff(), 1e-300);
        Matrix X = rank_trunc(Z + amp * rng.gaussian(Z.rows(), Z.cols()), cfg.r);
        X(0, 0) = cfg.corner_value;
        return rank_trunc(X, cfg.r);
    }
    }
    return Matrix();
}

struct McRun {
    SolverTrace trace;
    TraceRecorder rec;
    Matrix Mo;
    const ObservationMask& mask;
    double scale;
    McRun(const std::string& algo, const Matrix& M, const ObservationMask& m, const McConfig& cfg)
        : rec(trace), Mo(m.project(M)), mask(m)
    {
        trace.algo = algo;
        trace.config_snapshot = to_json(cfg);
        scale = Mo.norm();
        trace.input_scale = scale;
    }

    TraceRecord observe(long long t, const Matrix& X)
    {
        TraceRecord r;
        r.iter = t;
        r.residual = (Mo - mask.project(X)).norm();
        r.norm_L = X.norm();
        r.norm_S = 0.0;
        r.rank_L = X.allFinite() ? numerical_rank(X) : 0;
        r.nnz_S = 0;
        return r;
    }

    // records and reports whether to stop
    bool step(long long t, const Matrix& X, const McConfig& cfg, std::string& reason)
    {
        if (!X.allFinite()) {
            reason = "overflow";
            return true;
        }
        const TraceRecord r = observe(t, X);
        if (r.rank_L > cfg.r)
            throw std::logic_error("completion iterate exceeded rank r");
        rec.record(r);
        if (r.residual <= cfg.res_tol * scale) {
            reason = "res_tol";
            return true;
        }
        if (r.norm_L > cfg.norm_cap * scale) {
            reason = "norm_cap";
            return true;
        }
        return false;
    }
};

inline void split_factors(const Matrix& X, Index r, Matrix& U, Matrix& Vt)
{
    const SvdResult d = svd(X);
    const Vector root = d.singular_values.head(r).cwiseSqrt();
    U = d.U.leftCols(r) * root.asDiagonal();
    Vt = (d.V.leftCols(r) * root.asDiagonal()).transpose();
}

} // namespace detail

/// Value and gradient of f(U, Vt) = 1/2 ||P_Omega(M - U Vt)||_F^2.
struct AsdGradient {
    double value = 0.0;
    Matrix gU, gVt;
};

inline AsdGradient asd_gradient(const Matrix& M, const ObservationMask& mask, const Matrix& U, const Matrix& Vt)
{
    const Matrix R = mask.project(M - U * Vt);
    return {0.5 * R.squaredNorm(), -R * Vt.transpose(), -U.transpose() * R};
}

inline SolverTrace asd(const Matrix& M_obs, const ObservationMask& mask, const McConfig& cfg)
{
    detail::check_mc(M_obs, mask, cfg);
    detail::McRun run("asd", M_obs, mask, cfg);
    Matrix U, Vt;
    detail::split_factors(detail::mc_initial(M_obs, mask, cfg), cfg.r, U, Vt);
    run.rec.record(run.observe(0, U * Vt));
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        Matrix R = mask.project(run.Mo - U * Vt);
        const Matrix gU = -R * Vt.transpose();
        const double nu = gU.squaredNorm();
        const double du = mask.project(gU * Vt).squaredNorm();
        if (nu == 0.0 || du == 0.0) {
            run.rec.finish("stalled");
            return std::move(run.trace);
        }
        U -= (nu / du) * gU;
        R = mask.project(run.Mo - U * Vt);
        const Matrix gV = -U.transpose() * R;
        const double nv = gV.squaredNorm();
        const double dv = mask.project(U * gV).squaredNorm();
        if (nv == 0.0 || dv == 0.0) {
            run.step(t, U * Vt, cfg, reason);
            run.rec.finish("stalled");
            return std::move(run.trace);
        }
        Vt -= (nv / dv) * gV;
        if (run.step(t, U * Vt, cfg, reason))
            break;
    }
    run.rec.finish(reason);
    return std::move(run.trace);
}

inline SolverTrace power_factorization(const Matrix& M_obs, const ObservationMask& mask, const McConfig& cfg)
{
    detail::check_mc(M_obs, mask, cfg);
    detail::McRun run("pf", M_obs, mask, cfg);
    const Index m = M_obs.rows(), n = M_obs.cols();
    Matrix U, Vt;
    detail::split_factors(detail::mc_initial(M_obs, mask, cfg), cfg.r, U, Vt);
    run.rec.record(run.observe(0, U * Vt));
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        for (Index i = 0; i < m; ++i) {
            std::vector<Index> cols;
            for (Index j = 0; j < n; ++j)
                if (mask.observed(i, j))
                    cols.push_back(j);
            if (cols.empty()) {
                U.row(i).setZero();
                continue;
            }
            Matrix A(static_cast<Index>(cols.size()), cfg.r);
            Vector b(static_cast<Index>(cols.size()));
            for (size_t q = 0; q < cols.size(); ++q) {
                A.row(static_cast<Index>(q)) = Vt.col(cols[q]).transpose();
                b(static_cast<Index>(q)) = M_obs(i, cols[q]);
            }
            U.row(i) = lstsq_min_norm(A, b).transpose();
        }
        for (Index j = 0; j < n; ++j) {
            std::vector<Index> rows;
            for (Index i = 0; i < m; ++i)
                if (mask.observed(i, j))
                    rows.push_back(i);
            if (rows.empty()) {
                Vt.col(j).setZero();
                continue;
            }
            Matrix A(static_cast<Index>(rows.size()), cfg.r);
            Vector b(static_cast<Index>(rows.size()));
            for (size_t q = 0; q < rows.size(); ++q) {
                A.row(static_cast<Index>(q)) = U.row(rows[q]);
                b(static_cast<Index>(q)) = M_obs(rows[q], j);
            }
            Vt.col(j) = lstsq_min_norm(A, b);
        }
        if (run.step(t, U * Vt, cfg, reason))
            break;
    }
    run.rec.finish(reason);
    return std::move(run.trace);
}

namespace detail {

inline Matrix orthonormal_columns(const Matrix& A)
{
    Eigen::HouseholderQR<Matrix> qr(A);
    return qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
}

} // namespace detail

inline SolverTrace lmafit(const Matrix& M_obs, const ObservationMask& mask, const McConfig& cfg)
{
    detail::check_mc(M_obs, mask, cfg);
    detail::McRun run("lmafit", M_obs, mask, cfg);
    Matrix X = detail::mc_initial(M_obs, mask, cfg);
    run.rec.record(run.observe(0, X));
    const Matrix Wc = Matrix::Ones(mask.rows, mask.cols) - mask.W;
    Matrix U, Vt;
    detail::split_factors(X, cfg.r, U, Vt);
    double res = (run.Mo - mask.project(X)).norm();
    double omega = cfg.omega_sor;
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        const Matrix Z = run.Mo + Wc.cwiseProduct(X);
        Matrix Un, Vn, Xn;
        double rn = 0.0;
        for (;;) {
            const Matrix Zw = omega * Z + (1.0 - omega) * X;
            Un = detail::orthonormal_columns(Zw * Vt.transpose());
            Vn = Un.transpose() * Zw;
            Xn = Un * Vn;
            rn = (run.Mo - mask.project(Xn)).norm();
            if (rn < res || omega == 1.0)
                break;
            omega = 1.0; // over-relaxation rejected, redo the plain step
        }
        const double ratio = res > 0.0 ? rn / res : 0.0;
        U = Un;
        Vt = Vn;
        X = Xn;
        res = rn;
        if (cfg.adapt_omega) {
            if (ratio < 1.0)
                omega += 0.1 * (omega - 1.0 + 0.25);
            else
                omega = 1.0;
        }
        if (run.step(t, X, cfg, reason))
            break;
    }
    run.trace.config_snapshot["final_omega"] = omega;
    run.rec.finish(reason);
    return std::move(run.trace);
}

namespace detail {

struct RankR {
    Matrix X;
    Matrix U, V; // leading singular vectors
};

inline RankR hard_rank(const Matrix& W, Index r)
{
    const SvdResult d = svd(W);
    return {d.U.leftCols(r) * d.singular_values.head(r).asDiagonal() * d.V.leftCols(r).transpose(),
            d.U.leftCols(r), d.V.leftCols(r)};
}

// projection onto the tangent space of the rank-r manifold at X = U S V^T
inline Matrix tangent(const RankR& x, const Matrix& Z)
{
    const Matrix UtZ = x.U.transpose() * Z;
    const Matrix ZV = Z * x.V;
    return x.U * UtZ + ZV * x.V.transpose() - x.U * (UtZ * x.V) * x.V.transpose();
}

inline double dot(const Matrix& A, const Matrix& B) { return A.cwiseProduct(B).sum(); }

} // namespace detail

/// Conjugate gradient iterative hard thresholding; directions live in the tangent space of the
/// current iterate and the CG recursion restarts when successive projected residuals stop being
/// near-orthogonal.
inline SolverTrace cgiht(const Matrix& M_obs, const ObservationMask& mask, const McConfig& cfg)
{
    detail::check_mc(M_obs, mask, cfg);
    detail::McRun run(cfg.restart_every_step ? "niht" : "cgiht", M_obs, mask, cfg);
    detail::RankR cur = detail::hard_rank(detail::mc_initial(M_obs, mask, cfg), cfg.r);
    run.rec.record(run.observe(0, cur.X));
    Matrix P, PR_prev;
    std::string reason = "max_iters";
    long long restarts = 0;
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        const Matrix R = run.Mo - mask.project(cur.X);
        const Matrix PR = detail::tangent(cur, R);
        if (PR.squaredNorm() == 0.0) {
            reason = "stalled";
            break;
        }
        bool restart = t == 1 || cfg.restart_every_step;
        if (!restart) {
            const double prev = detail::dot(PR_prev, PR_prev);
            restart = prev == 0.0 || std::abs(detail::dot(PR, PR_prev)) / prev > cfg.restart_angle;
        }
        if (restart) {
            ++restarts;
            P = R;
        } else {
            const Matrix q = mask.project(detail::tangent(cur, P));
            const double qq = detail::dot(q, q);
            const double beta = qq > 0.0 ? -detail::dot(mask.project(PR), q) / qq : 0.0;
            P = R + beta * P;
        }
        const Matrix PP = detail::tangent(cur, P);
        const Matrix WPP = mask.project(PP);
        const double den = detail::dot(WPP, WPP);
        const double alpha = den > 0.0 ? detail::dot(PR, PP) / den : 1.0;
        cur = detail::hard_rank(cur.X + alpha * PP, cfg.r);
        PR_prev = PR;
        if (run.step(t, cur.X, cfg, reason))
            break;
    }
    run.trace.config_snapshot["restarts"] = restarts;
    run.rec.finish(reason);
    return std::move(run.trace);
}

/// Normalized IHT written out directly; cgiht with restart_every_step must match it.
inline SolverTrace niht(const Matrix& M_obs, const ObservationMask& mask, const McConfig& cfg)
{
    detail::check_mc(M_obs, mask, cfg);
    detail::McRun run("niht", M_obs, mask, cfg);
    detail::RankR cur = detail::hard_rank(detail::mc_initial(M_obs, mask, cfg), cfg.r);
    run.rec.record(run.observe(0, cur.X));
    std::string reason = "max_iters";
    for (long long t = 1; t <= cfg.max_iters; ++t) {
        const Matrix R = run.Mo - mask.project(cur.X);
        const Matrix G = detail::tangent(cur, R);
        if (G.squaredNorm() == 0.0) {
            reason = "stalled";
            break;
        }
        const Matrix WG = mask.project(G);
        const double den = detail::dot(WG, WG);
        const double alpha = den > 0.0 ? detail::dot(G, G) / den : 1.0;
        cur = detail::hard_rank(cur.X + alpha * G, cfg.r);
        if (run.step(t, cur.X, cfg, reason))
            break;
    }
    run.rec.finish(reason);
    return std::move(run.trace);
}

} // namespace lps

#endif

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace lps;
using namespace lps::testing;

namespace {

using Solver = SolverTrace (*)(const Matrix&, const ObservationMask&, const McConfig&);

const std::vector<std::pair<std::string, Solver>>& solvers()
{
    static const std::vector<std::pair<std::string, Solver>> all = {
        {"asd", &asd}, {"pf", &power_factorization}, {"lmafit", &lmafit}, {"cgiht", &cgiht}, {"niht", &niht}};
    return all;
}

void random_mask_entries(Rng& rng, Index n, double frac, std::vector<Entry>& missing)
{
    missing.clear();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (rng.uniform() < frac)
                missing.push_back({i, j});
}

} // namespace

TEST(Mask, Examples)
{
    const ObservationMask m = make_mask(3, 3, {{0, 0}});
    EXPECT_EQ(m.observed_count(), 8);
    EXPECT_FALSE(m.observed(0, 0));
    EXPECT_EQ(make_mask(3, 3, {}).observed_count(), 9);
    EXPECT_THROW(make_mask(3, 3, {{3, 0}}), DomainError);
    EXPECT_THROW(make_mask(3, 3, {{0, 0}, {0, 0}}), DomainError);
}

TEST(Mask, AllMissingRejectedBySolvers)
{
    std::vector<Entry> all;
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
            all.push_back({i, j});
    const ObservationMask m = make_mask(2, 2, all);
    EXPECT_EQ(m.observed_count(), 0);
    McConfig cfg;
    for (const auto& [name, f] : solvers())
        EXPECT_THROW(f(Matrix::Ones(2, 2), m, cfg), DomainError) << name;
}

TEST(Mask, ParseEntries)
{
    const auto e = parse_entries("0,0;2,1");
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[1], (Entry{2, 1}));
    EXPECT_TRUE(parse_entries("").empty());
    EXPECT_THROW(parse_entries("0;1"), DomainError);
}

TEST(Completion, FullyObservedRankOne)
{
    Rng rng(1);
    const Matrix M = random_rank(rng, 4, 5, 1);
    const ObservationMask full = make_mask(4, 5, {});
    McConfig cfg;
    cfg.r = 1;
    cfg.init = McInit::SpectralOfZeroFill;
    cfg.res_tol = 1e-12;
    cfg.max_iters = 100;
    for (const auto& [name, f] : solvers()) {
        const SolverTrace t = f(M, full, cfg);
        EXPECT_LT(t.last().residual, 1e-10) << name;
    }
    cfg.init = McInit::RandomNonzeroCorner;
    EXPECT_LT(asd(M, full, cfg).last().residual, 1e-10);
}

TEST(Completion, FullyObservedConvergesToTruncation)
{
    Rng rng(2);
    for (int q = 0; q < 5; ++q) {
        const Matrix M = random_matrix(rng, 4, 4);
        const ObservationMask full = make_mask(4, 4, {});
        const double target = (M - rank_trunc(M, 1)).norm();
        McConfig cfg;
        cfg.r = 1;
        cfg.init = McInit::RandomNonzeroCorner;
        cfg.max_iters = 3000;
        for (const auto& [name, f] : solvers()) {
            const SolverTrace t = f(M, full, cfg);
            // residual to M equals the Eckart-Young error only at the truncation
            EXPECT_NEAR(t.last().residual, target, 1e-6) << name;
        }
    }
}

TEST(Completion, IteratesStayRankR)
{
    const Matrix M1 = demo_matrices().first;
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    McConfig cfg;
    cfg.max_iters = 500;
    for (const auto& [name, f] : solvers())
        for (const auto& rec : f(M1, mask, cfg).records)
            EXPECT_LE(rec.rank_L, 1) << name;
}

TEST(Completion, AsdAndLmafitResidualMonotone)
{
    Rng rng(3);
    for (int q = 0; q < 10; ++q) {
        const Matrix M = random_matrix(rng, 5, 5);
        std::vector<Entry> missing;
        random_mask_entries(rng, 5, 0.3, missing);
        const ObservationMask mask = make_mask(5, 5, missing);
        if (mask.observed_count() == 0)
            continue;
        McConfig cfg;
        cfg.r = 2;
        cfg.max_iters = 300;
        cfg.adapt_omega = false;
        cfg.omega_sor = 1.0;
        for (Solver f : {&asd, &lmafit}) {
            const SolverTrace t = f(M, mask, cfg);
            for (size_t k = 1; k < t.records.size(); ++k)
                EXPECT_LE(t.records[k].residual, t.records[k - 1].residual * (1 + 1e-10) + 1e-13);
        }
    }
}

TEST(Completion, AsdGradientMatchesFiniteDifferences)
{
    Rng rng(4);
    for (int q = 0; q < 20; ++q) {
        const Matrix M = rng.gaussian(4, 5);
        std::vector<Entry> missing;
        random_mask_entries(rng, 4, 0.3, missing);
        const ObservationMask mask = make_mask(4, 5, missing);
        const Matrix U = rng.gaussian(4, 2), Vt = rng.gaussian(2, 5);
        const AsdGradient g = asd_gradient(M, mask, U, Vt);
        const double h = 1e-6 * std::max(1.0, M.norm());
        Matrix fdU(4, 2), fdV(2, 5);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 2; ++j) {
                Matrix a = U, b = U;
                a(i, j) += h;
                b(i, j) -= h;
                fdU(i, j) = (asd_gradient(M, mask, a, Vt).value - asd_gradient(M, mask, b, Vt).value) / (2 * h);
            }
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 5; ++j) {
                Matrix a = Vt, b = Vt;
                a(i, j) += h;
                b(i, j) -= h;
                fdV(i, j) = (asd_gradient(M, mask, U, a).value - asd_gradient(M, mask, U, b).value) / (2 * h);
            }
        EXPECT_LE((fdU - g.gU).norm(), 1e-5 * g.gU.norm());
        EXPECT_LE((fdV - g.gVt).norm(), 1e-5 * g.gVt.norm());
    }
}

TEST(Completion, RandomRankOneAgreement)
{
    // 30% missing: pf and asd should both fit the observed entries of a rank-1 matrix
    Rng rng(5);
    int compared = 0;
    for (int q = 0; q < 10 && compared < 5; ++q) {
        const Matrix M = random_rank(rng, 5, 5, 1);
        std::vector<Entry> missing;
        random_mask_entries(rng, 5, 0.3, missing);
        const ObservationMask mask = make_mask(5, 5, missing);
        // need an observed entry in every row and column for a well-posed completion
        if ((mask.W.rowwise().sum().array() == 0).any() || (mask.W.colwise().sum().array() == 0).any())
            continue;
        McConfig cfg;
        cfg.max_iters = 5000;
        cfg.res_tol = 1e-10;
        const double a = asd(M, mask, cfg).last().residual;
        const double b = power_factorization(M, mask, cfg).last().residual;
        EXPECT_LT(a, 1e-8);
        EXPECT_LT(b, 1e-8);
        ++compared;
    }
    EXPECT_GE(compared, 3);
}

TEST(Completion, CgihtWithRestartEveryStepIsNiht)
{
    const Matrix M1 = demo_matrices().first;
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    McConfig cfg;
    cfg.max_iters = 400;
    cfg.restart_every_step = true;
    const SolverTrace a = cgiht(M1, mask, cfg);
    const SolverTrace b = niht(M1, mask, cfg);
    EXPECT_EQ(a.records, b.records);
    Rng rng(6);
    const Matrix R = random_matrix(rng, 5, 5);
    const ObservationMask m2 = make_mask(5, 5, {{0, 1}, {3, 3}, {4, 0}});
    cfg.r = 2;
    EXPECT_EQ(cgiht(R, m2, cfg).records, niht(R, m2, cfg).records);
}

TEST(Completion, LmafitOmegaOneIsPlainAls)
{
    // with omega pinned at 1 the update is U = orth(Z V^T), V = U^T Z
    Rng rng(7);
    const Matrix M = random_matrix(rng, 4, 4);
    const ObservationMask mask = make_mask(4, 4, {{0, 0}, {1, 2}});
    McConfig cfg;
    cfg.r = 1;
    cfg.max_iters = 1;
    cfg.adapt_omega = false;
    cfg.init = McInit::Given;
    cfg.X0 = rank_trunc(M, 1);
    const SolverTrace t = lmafit(M, mask, cfg);
    const Matrix X0 = cfg.X0;
    const Matrix Z = mask.project(M) + (Matrix::Ones(4, 4) - mask.W).cwiseProduct(X0);
    const SvdResult d = svd(X0);
    const Matrix Vt = (d.V.leftCols(1) * std::sqrt(d.singular_values(0))).transpose();
    Eigen::HouseholderQR<Matrix> qr(Z * Vt.transpose());
    const Matrix U = qr.householderQ() * Matrix::Identity(4, 1);
    const Matrix X1 = U * (U.transpose() * Z);
    EXPECT_NEAR(t.last().residual, (mask.project(M) - mask.project(X1)).norm(), 1e-12);
}

TEST(Completion, CornerInitHasNonzeroTopLeft)
{
    const Matrix M1 = demo_matrices().first;
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    McConfig cfg;
    const Matrix X0 = detail::mc_initial(M1, mask, cfg);
    EXPECT_GT(std::abs(X0(0, 0)), 0.1);
    EXPECT_EQ(numerical_rank(X0), 1);
}

TEST(Completion, Deterministic)
{
    const Matrix M1 = demo_matrices().first;
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    McConfig cfg;
    cfg.max_iters = 300;
    cfg.seed = 4;
    for (const auto& [name, f] : solvers())
        EXPECT_EQ(f(M1, mask, cfg).records, f(M1, mask, cfg).records) << name;
}

TEST(Completion, ConfigChecks)
{
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    McConfig cfg;
    cfg.r = 0;
    EXPECT_THROW(asd(Matrix::Ones(3, 3), mask, cfg), DomainError);
    cfg.r = 1;
    cfg.omega_sor = 0.5;
    EXPECT_THROW(lmafit(Matrix::Ones(3, 3), mask, cfg), DomainError);
    cfg.omega_sor = 1.0;
    EXPECT_THROW(asd(Matrix::Ones(3, 4), mask, cfg), DomainError);
}

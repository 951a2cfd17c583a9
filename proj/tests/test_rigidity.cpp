#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace lps;
using namespace lps::testing;

namespace {

void expect_sound(const Matrix& M, Index r, const RigidityCertificate& c)
{
    EXPECT_LE(c.lower_bound, c.upper_bound);
    EXPECT_LE(c.upper_bound, valiant_upper_bound(M.rows(), M.cols(), r));
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_EQ(count_nonzero(*c.witness, 0.0), c.upper_bound);
    EXPECT_LE(numerical_rank(M - *c.witness, 1e-7), r);
    EXPECT_EQ(c.status == RigidityStatus::Exact, c.lower_bound == c.upper_bound);
}

} // namespace

TEST(Valiant, Examples)
{
    EXPECT_EQ(valiant_upper_bound(3, 1), 4);
    EXPECT_EQ(valiant_upper_bound(5, 5), 0);
    EXPECT_EQ(valiant_upper_bound(6, 1), 25);
}

TEST(DisjointMinor, Examples)
{
    EXPECT_TRUE(disjoint_minor_certificate(Matrix::Identity(3, 3), 1, {{0, 0}}, 1e-8));
    // changing (0,0) cannot drop the rank, but every 2x2 minor avoiding it is singular
    EXPECT_FALSE(disjoint_minor_certificate(rpca_example(), 1, {{0, 0}}, 1e-8));
    EXPECT_TRUE(disjoint_minor_certificate(rpca_example(), 1, {{1, 0}}, 1e-8));
    Support full;
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            full.push_back({i, j});
    EXPECT_FALSE(disjoint_minor_certificate(rpca_example(), 1, full, 1e-8));
    // only the minor on rows {0,1}, cols {0,1} survives and it is [[0,1],[1,0]]
    EXPECT_TRUE(disjoint_minor_certificate(rpca_example(), 1, {{0, 2}, {2, 0}, {2, 1}, {2, 2}, {1, 2}}, 1e-8));
}

TEST(DisjointMinor, AgreesWithBruteForceScan)
{
    Rng rng(9);
    for (int q = 0; q < 200; ++q) {
        Matrix M = random_matrix(rng, 4, 4);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j)
                if (rng.uniform() < 0.3)
                    M(i, j) = 0.0;
        Support sup;
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j)
                if (rng.uniform() < 0.35)
                    sup.push_back({i, j});
        bool expect = false;
        for (int rm = 0; rm < 16 && !expect; ++rm)
            for (int cm = 0; cm < 16 && !expect; ++cm) {
                if (__builtin_popcount(rm) != 2 || __builtin_popcount(cm) != 2)
                    continue;
                bool clear = true;
                for (const auto& e : sup)
                    if ((rm >> e.i & 1) && (cm >> e.j & 1))
                        clear = false;
                if (!clear)
                    continue;
                Matrix sub(2, 2);
                int a = 0;
                for (int i = 0; i < 4; ++i) {
                    if (!(rm >> i & 1))
                        continue;
                    int b = 0;
                    for (int j = 0; j < 4; ++j)
                        if (cm >> j & 1)
                            sub(a, b++) = M(i, j);
                    ++a;
                }
                expect = std::abs(det_leibniz(sub)) > 1e-8;
            }
        EXPECT_EQ(disjoint_minor_certificate(M, 1, sup, 1e-8), expect);
    }
}

TEST(RankLeFeasible, Examples)
{
    const Matrix M = rpca_example();
    const FeasibilityResult two = rank_le_feasible(M, 1, {{0, 1}, {0, 2}});
    ASSERT_EQ(two.verdict, Feasibility::Feasible);
    ASSERT_TRUE(two.S.has_value());
    EXPECT_LE(numerical_rank(M - *two.S, 1e-7), 1);
    EXPECT_NEAR((*two.S)(0, 1), 1.0, 1e-9);
    EXPECT_NEAR((*two.S)(0, 2), 1.0, 1e-9);

    const FeasibilityResult one = rank_le_feasible(M, 1, {{0, 0}});
    EXPECT_EQ(one.verdict, Feasibility::Infeasible);
    EXPECT_TRUE(one.certified);

    const Matrix M1 = demo_matrices().first;
    const FeasibilityResult none = rank_le_feasible(M1, 2, {});
    EXPECT_EQ(none.verdict, Feasibility::Feasible);
    EXPECT_EQ(*none.S, Matrix::Zero(3, 3));
}

TEST(RankLeFeasible, GenericDenseSupportNeedsDescent)
{
    // rank-2 plus a diagonal: the diagonal support hits every 3x3 minor yet the system is solvable
    Rng rng(12);
    Matrix M = random_rank(rng, 4, 4, 2);
    for (Index i = 0; i < 4; ++i)
        M(i, i) += rng.uniform(0.5, 1.5);
    const Support sup = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    EXPECT_FALSE(disjoint_minor_certificate(M, 2, sup, 1e-8));
    const FeasibilityResult res = rank_le_feasible(M, 2, sup, 1e-7, 20, 3);
    ASSERT_EQ(res.verdict, Feasibility::Feasible);
    EXPECT_LE(numerical_rank(M - *res.S, 1e-7), 2);
    // cross-check with alternating projections
    EXPECT_LT(ap_feasible(M, 2, sup, 20000).ratio, 1e-6);
}

TEST(Rigidity, RpcaExample)
{
    const Matrix M = rpca_example();
    const RigidityCertificate c = rigidity(M, 1);
    EXPECT_EQ(c.status, RigidityStatus::Exact);
    EXPECT_EQ(c.lower_bound, 2);
    expect_sound(M, 1, c);
    EXPECT_EQ(ap_rigidity(M, 1, 3), 2);
}

TEST(Rigidity, FirstDemoMatrixWitness)
{
    const Matrix M1 = demo_matrices().first;
    const RigidityCertificate c = rigidity(M1, 1);
    EXPECT_EQ(c.status, RigidityStatus::Exact);
    EXPECT_EQ(c.lower_bound, 2);
    EXPECT_EQ(c.upper_bound, 2);
    expect_sound(M1, 1, c);
    Matrix expect = Matrix::Zero(3, 3);
    expect(0, 1) = expect(0, 2) = -1.0;
    EXPECT_LE((*c.witness - expect).norm(), 1e-9);
    EXPECT_EQ(ap_rigidity(M1, 1, 3), 2);
}

TEST(Rigidity, SecondDemoMatrix)
{
    const Matrix M2 = demo_matrices().second;
    const RigidityCertificate c = rigidity(M2, 1);
    EXPECT_EQ(c.status, RigidityStatus::Exact);
    EXPECT_EQ(c.lower_bound, 2);
    EXPECT_EQ(ap_rigidity(M2, 1, 3), 2);
}

TEST(Rigidity, RankAtLeastTargetIsZero)
{
    Rng rng(1);
    const Matrix M = random_rank(rng, 4, 4, 2);
    const RigidityCertificate c = rigidity(M, 2);
    EXPECT_EQ(c.lower_bound, 0);
    EXPECT_EQ(c.upper_bound, 0);
    EXPECT_EQ(c.status, RigidityStatus::Exact);
}

TEST(Rigidity, MaximallyRigidAndItsFamily)
{
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        const ConstructionOutput lim = maximally_rigid3(seed, 1e-3);
        const RigidityCertificate c = rigidity(lim.M_limit, 1);
        EXPECT_EQ(c.status, RigidityStatus::Exact) << seed;
        EXPECT_EQ(c.lower_bound, 4) << seed;
        expect_sound(lim.M_limit, 1, c);
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const ConstructionOutput o = maximally_rigid3(seed, eps);
            const RigidityCertificate ce = rigidity(o.M_eps, 1);
            EXPECT_EQ(ce.status, RigidityStatus::Exact) << seed << " " << eps;
            EXPECT_EQ(ce.lower_bound, 3) << seed << " " << eps;
        }
    }
}

TEST(Rigidity, ExactLevelBelowHasNoFeasibleSupport)
{
    // independent re-check of an Exact certificate by alternating projections
    for (const Matrix& M : {rpca_example(), demo_matrices().first, maximally_rigid3(0, 0.1).M_limit}) {
        const RigidityCertificate c = rigidity(M, 1);
        ASSERT_EQ(c.status, RigidityStatus::Exact);
        const Index below = c.lower_bound - 1;
        std::vector<char> pick(9, 0);
        std::fill(pick.end() - below, pick.end(), 1);
        do {
            Support s;
            for (int k = 0; k < 9; ++k)
                if (pick[static_cast<size_t>(k)])
                    s.push_back({k / 3, k % 3});
            const FeasibilityResult f = rank_le_feasible(M, 1, s);
            EXPECT_NE(f.verdict, Feasibility::Feasible);
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
}

TEST(Rigidity, MonotoneInRank)
{
    Rng rng(21);
    std::vector<Matrix> mats = {rpca_example(), demo_matrices().first, maximally_rigid3(3, 0.1).M_limit,
                                random_matrix(rng, 3, 3), lemma2_pair(1, 1, 0, 0.1).M_limit};
    for (const Matrix& M : mats) {
        Index prev = std::numeric_limits<Index>::max();
        for (Index r = 0; r <= 3; ++r) {
            const RigidityCertificate c = rigidity(M, r);
            ASSERT_EQ(c.status, RigidityStatus::Exact);
            EXPECT_LE(c.lower_bound, prev);
            prev = c.lower_bound;
        }
    }
}

TEST(Rigidity, PaddingInvariance)
{
    for (const ConstructionOutput& o : {simple3(0.1), demo_pair(1, 0.1), maximally_rigid3(1, 0.1)}) {
        const RigidityCertificate a = rigidity(o.M_limit, 1);
        const RigidityCertificate b = rigidity(pad_to(o, 4).M_limit, 1);
        EXPECT_EQ(a.lower_bound, b.lower_bound);
        EXPECT_EQ(a.upper_bound, b.upper_bound);
        EXPECT_EQ(b.status, RigidityStatus::Exact);
    }
}

TEST(Rigidity, ThreadCountDoesNotChangeResult)
{
    const Matrix M = lemma2_pair(1, 2, 0, 0.1).M_limit;
    RigidityConfig one, two;
    two.threads = 2;
    const RigidityCertificate a = rigidity(M, 1, 3, one);
    const RigidityCertificate b = rigidity(M, 1, 3, two);
    EXPECT_EQ(a.lower_bound, b.lower_bound);
    EXPECT_EQ(a.numerical_lower_bound, b.numerical_lower_bound);
    EXPECT_EQ(a.upper_bound, b.upper_bound);
    EXPECT_EQ(a.supports_examined, b.supports_examined);
    EXPECT_EQ(a.witness.has_value(), b.witness.has_value());
    if (a.witness && b.witness)
        EXPECT_EQ(*a.witness, *b.witness);
}

TEST(Rigidity, SmallConstructionsExceedS)
{
    const ConstructionOutput l11 = lemma2_pair(1, 1, 0, 0.1);
    EXPECT_GT(rigidity(l11.M_limit, 1).lower_bound, 1);
    const ConstructionOutput l12 = lemma2_pair(1, 2, 0, 0.1);
    EXPECT_GT(rigidity(l12.M_limit, 1, 2).lower_bound, 2);
    const ConstructionOutput l21 = lemma3_pair(2, 1, 0, 0.1);
    EXPECT_GT(rigidity(l21.M_limit, 2, 1).lower_bound, 1);
    EXPECT_GT(rigidity(simple3(0.1).M_limit, 1).lower_bound, 1);
}

TEST(Rigidity, BlockGridLowerBound)
{
    const ConstructionOutput K = lemma4_pair(1, 2, 0, 1e-3);
    RigidityConfig cfg;
    cfg.symmetries = block_grid_symmetries(2, 3);
    const RigidityCertificate c = rigidity(K.M_limit, 1, 4, cfg);
    EXPECT_GE(c.lower_bound, 5);
}

TEST(Rigidity, BudgetExhaustion)
{
    RigidityConfig cfg;
    cfg.max_supports = 5;
    const RigidityCertificate c = rigidity(demo_matrices().first, 1, std::nullopt, cfg);
    EXPECT_EQ(c.status, RigidityStatus::BudgetExhausted);
    EXPECT_LE(c.lower_bound, 2);
}

TEST(Membership, Examples)
{
    const Matrix M = rpca_example();
    EXPECT_EQ(verify_membership(M, 1, 1).verdict, Membership::NotInSet);
    EXPECT_EQ(verify_membership(M, 1, 2).verdict, Membership::InSet);
    EXPECT_EQ(verify_membership(simple3(0.1).M_eps, 1, 1).verdict, Membership::InSet);
}

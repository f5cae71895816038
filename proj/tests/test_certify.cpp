#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bgpc/certify.hpp"
#include "bgpc/construct.hpp"
#include "bgpc/model.hpp"
#include "oracles.hpp"

using namespace bgpc;

TEST(DBlock, SingleColumnExpansion) {
  const Complex x1{0.5, -1.0}, x2{2.0, 0.25};
  ComplexMatrix a(1, 1), X(1, 2);
  a << 1.0;
  X << x1, x2;
  const ComplexMatrix D = build_D_block(a, X);
  ASSERT_EQ(D.rows(), 1);
  ASSERT_EQ(D.cols(), 2);
  EXPECT_EQ(D(0, 0), -x2);
  EXPECT_EQ(D(0, 1), x1);
}

TEST(DBlock, MatchesElementFormula) {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Generator gen(trial);
    const ComplexMatrix a = gen.complex_normal(1, 4);
    const ComplexMatrix X = gen.complex_normal(4, 3);
    EXPECT_LT((build_D_block(a, X) - oracle::D_block_elementwise(a, X)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(DBlock, AnnihilatesVecX0) {
  std::mt19937_64 dims(3);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Index m = 1 + static_cast<Index>(dims() % 6);
    const Index N = 2 + static_cast<Index>(dims() % 5);
    Generator gen(500 + trial);
    const ComplexMatrix a = gen.complex_normal(1, m);
    const ComplexMatrix X = gen.complex_normal(m, N);
    const ComplexMatrix D = build_D_block(a, X);
    ASSERT_EQ(D.rows(), N - 1);
    ASSERT_EQ(D.cols(), m * N);
    EXPECT_LT((D * vec(X)).norm(), 1e-12 * (1.0 + X.squaredNorm() * a.squaredNorm()));
  }
}

TEST(DBlock, ConstructedRowHasDftCoefficients) {
  // For the witness, row k (one-based) of the left factor holds
  // -alpha^(j(k-1)) and 1, alpha = exp(-2 pi i / n).
  const ConstructedInstance ci = construct_claim1(10, 5, 3);
  const Complex alpha = std::polar(1.0, -2.0 * std::numbers::pi / 10.0);
  for (Index k = 0; k < 10; ++k) {
    ComplexMatrix left = ComplexMatrix::Zero(2, 3);
    for (Index j = 1; j <= 2; ++j) {
      left(j - 1, 0) = -std::pow(alpha, static_cast<double>(j * k));
      left(j - 1, j) = 1.0;
    }
    const ComplexMatrix expected = kronecker(left, ci.A.row(k));
    EXPECT_LT((build_D_block(ci.A.row(k), ci.X0) - expected).cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST(DBlock, RejectsSingleSnapshot) {
  EXPECT_THROW(build_D_block(ComplexMatrix::Ones(1, 2), ComplexMatrix::Ones(2, 1)), UnsupportedError);
  EXPECT_THROW(build_D_block(ComplexMatrix::Ones(1, 3), ComplexMatrix::Ones(2, 2)), DimensionError);
}

TEST(Stacked, ShapeAndOrthogonality) {
  const Instance inst = random_instance(8, 4, 2, 5);
  const ComplexMatrix S = build_stacked(inst.A, inst.X0);
  ASSERT_EQ(S.rows(), 9);
  ASSERT_EQ(S.cols(), 8);
  const ComplexVector v = vec(inst.X0);
  EXPECT_NEAR(std::abs(Complex(S.row(0) * v) - inst.X0.squaredNorm()), 0.0, 1e-12);
  for (Index r = 1; r < S.rows(); ++r) EXPECT_LT(std::abs(Complex(S.row(r) * v)), 1e-12);
  EXPECT_LT((S - oracle::stacked_elementwise(inst.A, inst.X0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stacked, Restricted) {
  const Instance inst = random_instance(10, 5, 3, 8);
  const std::vector<std::size_t> all{0, 1, 2, 3, 4};
  EXPECT_EQ(build_stacked_restricted(inst.A, inst.X0, all), build_stacked(inst.A, inst.X0));

  const std::vector<std::size_t> J{1, 3};
  const ComplexMatrix S = build_stacked_restricted(inst.A, inst.X0, J);
  EXPECT_EQ(S.rows(), 1 + 10 * 2);
  EXPECT_EQ(S.cols(), 2 * 3);
  const ComplexVector v = vec(select_rows(inst.X0, J));
  EXPECT_LT((S.bottomRows(S.rows() - 1) * v).norm(), 1e-12);
  EXPECT_THROW(build_stacked_restricted(inst.A, inst.X0, {}), InputError);
}

TEST(CertifySubspace, AboveThresholdIsIdentifiable) {
  const Instance inst = random_instance(8, 4, 2, 1);
  const CertificateReport r = certify_subspace(inst);
  EXPECT_EQ(r.verdict, Verdict::IdentifiableUpToScaling);
  EXPECT_TRUE(r.condition1_rank_full);
  EXPECT_TRUE(r.condition2_lambda_unique);
  EXPECT_EQ(r.stacked_rank, 8u);
  EXPECT_EQ(r.required_rank, 8u);
  EXPECT_EQ(r.mode, Mode::Subspace);
  EXPECT_FALSE(r.support_cells_checked.has_value());
}

TEST(CertifySubspace, BelowThresholdIsNotCertified) {
  const Instance inst = random_instance(8, 6, 2, 1);
  const CertificateReport r = certify_subspace(inst);
  EXPECT_EQ(r.verdict, Verdict::NotCertified);
  EXPECT_FALSE(r.condition1_rank_full);
  EXPECT_LE(r.stacked_rank, 9u);
  EXPECT_EQ(r.required_rank, 12u);
}

TEST(CertifySubspace, ZeroGainFailsConditionTwo) {
  Instance inst = random_instance(8, 4, 2, 1);
  inst.lambda0(3) = 0.0;
  const CertificateReport r = certify_subspace(inst);
  EXPECT_FALSE(r.condition2_lambda_unique);
  EXPECT_TRUE(r.condition1_rank_full);
  EXPECT_EQ(r.verdict, Verdict::NotCertified);
}

TEST(CertifySubspace, ZeroRowOfAX0FailsConditionTwo) {
  Instance inst = random_instance(8, 4, 2, 1);
  inst.A.row(2).setZero();
  EXPECT_FALSE(certify_subspace(inst).condition2_lambda_unique);
}

TEST(CertifySubspace, Preconditions) {
  const Instance one = random_instance(8, 4, 1, 1);
  EXPECT_THROW(certify_subspace(one), UnsupportedError);
  Generator gen(1);
  EXPECT_THROW(certify_subspace(gen.complex_normal(4, 4), gen.complex_normal(4, 2),
                                gen.complex_normal(4, 1)),
               InputError);
}

TEST(CertifySubspace, AgreesWithIndependentRank) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = random_instance(9, 5, 2, seed);
    const auto r = certify_subspace(inst);
    EXPECT_EQ(static_cast<long>(r.stacked_rank),
              oracle::jacobi_rank(oracle::stacked_elementwise(inst.A, inst.X0)));
  }
}

TEST(CertifySubspace, VerdictIsScaleInvariant) {
  std::mt19937_64 dims(17);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + dims() % 9;
    const std::size_t m = 1 + dims() % (n - 1);
    const std::size_t N = 2 + dims() % 4;
    const Instance inst = random_instance(n, m, N, 7000 + trial);
    Generator gen(8000 + trial);
    const Complex sigma = gen.complex_normal();
    const auto base = certify_subspace(inst);
    const auto scaled = certify_subspace(inst.A, sigma * inst.X0, inst.lambda0 / sigma);
    EXPECT_EQ(base.condition1_rank_full, scaled.condition1_rank_full);
    EXPECT_EQ(base.verdict, scaled.verdict);
  }
}

TEST(CertifySubspace, RowBudgetNecessity) {
  std::mt19937_64 dims(23);
  int checked = 0;
  for (std::uint64_t trial = 0; checked < 100; ++trial) {
    const std::size_t n = 3 + dims() % 14;
    const std::size_t m = 1 + dims() % (n - 1);
    const std::size_t N = 2 + dims() % 6;
    if (1 + n * (N - 1) >= m * N) continue;
    ++checked;
    const auto r = certify_subspace(random_instance(n, m, N, trial));
    EXPECT_FALSE(r.condition1_rank_full);
    EXPECT_LT(N, min_samples_subspace(n, m));
  }
}

TEST(CertifyJointSparse, AboveThresholdIsIdentifiable) {
  const Instance inst = random_instance(16, 8, 2, 3, 3);
  const CertificateReport r = certify_joint_sparse(inst, 3);
  EXPECT_EQ(r.mode, Mode::JointSparse);
  EXPECT_EQ(r.verdict, Verdict::IdentifiableUpToScaling);
  ASSERT_TRUE(r.support_cells_checked.has_value());
  EXPECT_EQ(*r.support_cells_checked, 56u);
  EXPECT_FALSE(r.failing_support.has_value());
  EXPECT_EQ(r.required_rank, 12u);  // largest union, l = 2s = 6
  EXPECT_LE(r.stacked_rank, r.required_rank);
}

TEST(CertifyJointSparse, Preconditions) {
  const Instance one = random_instance(16, 8, 1, 3, 3);
  EXPECT_THROW(certify_joint_sparse(one, 3), UnsupportedError);
  const Instance wide = random_instance(8, 10, 2, 3, 4);
  EXPECT_THROW(certify_joint_sparse(wide, 4), InputError);  // n <= 2s
  const Instance inst = random_instance(16, 8, 2, 3, 3);
  EXPECT_THROW(certify_joint_sparse(inst, 2), InputError);  // support size mismatch
  JointSparseOptions tight;
  tight.max_cells = 10;
  EXPECT_THROW(certify_joint_sparse(inst, 3, tight), BudgetError);
}

TEST(CertifyJointSparse, SupportEqualToJ0ReducesToSubspace) {
  const Instance inst = random_instance(16, 8, 2, 9, 3);
  const auto& J0 = inst.sparsity->support;
  const auto restricted = numeric_rank(build_stacked_restricted(inst.A, inst.X0, J0));
  const auto sub = certify_subspace(select_columns(inst.A, J0), select_rows(inst.X0, J0), inst.lambda0);
  EXPECT_EQ(restricted.numeric_rank, sub.stacked_rank);
  EXPECT_EQ(sub.verdict, Verdict::IdentifiableUpToScaling);
}

TEST(CertifyJointSparse, FullSupportMatchesSubspace) {
  // s = m: a single cell whose union is every column.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(9, 3, 2, seed, 3);
    const auto js = certify_joint_sparse(inst, 3);
    const auto sub = certify_subspace(inst.A, inst.X0, inst.lambda0);
    EXPECT_EQ(*js.support_cells_checked, 1u);
    EXPECT_EQ(js.verdict, sub.verdict);
    EXPECT_EQ(js.stacked_rank, sub.stacked_rank);
    EXPECT_EQ(js.required_rank, sub.required_rank);
  }
}

TEST(CertifyJointSparse, ReportsFirstFailingSupportIndependentOfThreads) {
  Instance inst = random_instance(16, 8, 2, 4, 3);
  // Force support {0,1,2} and duplicate two columns outside it: every cell
  // whose union holds both duplicates loses rank.
  inst.X0.setZero();
  Generator gen(4);
  inst.X0.topRows(3) = gen.complex_normal(3, 2);
  inst.A.col(7) = inst.A.col(6);
  JointSparseOptions serial;
  JointSparseOptions parallel;
  parallel.threads = 4;
  const auto a = certify_joint_sparse(inst.A, inst.X0, inst.lambda0, 3, serial);
  const auto b = certify_joint_sparse(inst.A, inst.X0, inst.lambda0, 3, parallel);
  EXPECT_EQ(a.verdict, Verdict::NotCertified);
  EXPECT_FALSE(a.condition1_rank_full);
  ASSERT_TRUE(a.failing_support.has_value());
  // Lexicographically first 3-subset containing both 6 and 7 is {0, 6, 7}.
  EXPECT_EQ(*a.failing_support, (std::vector<std::size_t>{0, 6, 7}));
  EXPECT_EQ(a.failing_support, b.failing_support);
  EXPECT_EQ(a.support_cells_checked, b.support_cells_checked);
  // Index of {0,6,7} in lexicographic order is C(7,2) - 1 = 20, so 21 checked.
  EXPECT_EQ(*a.support_cells_checked, 21u);
}

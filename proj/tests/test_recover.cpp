#include <cmath>

#include <gtest/gtest.h>

#include "bgpc/certify.hpp"
#include "bgpc/model.hpp"
#include "bgpc/recover.hpp"

using namespace bgpc;

TEST(RecoverySystem, SingleEquation) {
  const Complex a{2.0, -1.0}, y{0.5, 3.0};
  ComplexMatrix A(1, 1), Y(1, 1);
  A << a;
  Y << y;
  const ComplexMatrix L = build_recovery_system(Y, A);
  ASSERT_EQ(L.rows(), 1);
  ASSERT_EQ(L.cols(), 2);
  EXPECT_EQ(L(0, 0), a);
  EXPECT_EQ(L(0, 1), -y);
}

TEST(RecoverySystem, ShapeAndTrueSolution) {
  const Instance inst = random_instance(8, 4, 2, 3);
  const ComplexMatrix L = build_recovery_system(forward(inst), inst.A);
  ASSERT_EQ(L.rows(), 16);
  ASSERT_EQ(L.cols(), 16);
  ComplexVector truth(16);
  truth << vec(inst.X0), inst.lambda0.cwiseInverse();
  EXPECT_LT((L * truth).norm(), 1e-9);
  EXPECT_THROW(build_recovery_system(ComplexMatrix::Ones(3, 2), ComplexMatrix::Ones(4, 2)), DimensionError);
}

TEST(Recover, IdentifiableInstanceIsRecoveredUpToScale) {
  const Instance inst = random_instance(8, 4, 2, 11);
  const RecoveryResult r = recover(forward(inst), inst.A);
  ASSERT_EQ(r.status, RecoveryStatus::Unique);
  EXPECT_EQ(r.null_dim, 1u);
  const auto ax = align_scale(r.X, inst.X0);
  const auto al = align_scale(r.lambda, inst.lambda0);
  EXPECT_LE(ax.relative_error, 1e-8);
  EXPECT_LE(al.relative_error, 1e-8);
  EXPECT_LT(std::abs(ax.sigma * al.sigma - 1.0), 1e-6);
  for (Index k = 0; k < r.gamma.size(); ++k) EXPECT_LT(std::abs(r.lambda(k) * r.gamma(k) - 1.0), 1e-8);
}

TEST(Recover, BelowThresholdIsAmbiguous) {
  // 20 unknowns, 16 equations: null space has dimension at least 4.
  const Instance inst = random_instance(8, 6, 2, 2);
  const RecoveryResult r = recover(forward(inst), inst.A);
  EXPECT_EQ(r.status, RecoveryStatus::Ambiguous);
  EXPECT_GE(r.null_dim, 4u);
}

TEST(Recover, ZeroGainIsNeverUnique) {
  Instance inst = random_instance(8, 4, 2, 6);
  inst.lambda0(5) = 0.0;
  const RecoveryResult r = recover(forward(inst), inst.A);
  EXPECT_NE(r.status, RecoveryStatus::Unique);
}

TEST(Recover, InconsistentMeasurementsThrowUnlessAllowed) {
  const Instance inst = random_instance(10, 3, 3, 6);
  ComplexMatrix Y = forward(inst);
  Generator gen(1);
  Y += 1e-3 * gen.complex_normal(Y.rows(), Y.cols());
  EXPECT_THROW(recover(Y, inst.A), InconsistentError);
  RecoverOptions opts;
  opts.allow_inconsistent = true;
  const RecoveryResult r = recover(Y, inst.A, opts);
  EXPECT_FALSE(r.consistent);
  EXPECT_EQ(r.null_dim, 0u);
}

TEST(Recover, ReproducesMeasurements) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = random_instance(10, 4, 2, 300 + seed);
    const ComplexMatrix Y = forward(inst);
    const RecoveryResult r = recover(Y, inst.A);
    ASSERT_EQ(r.status, RecoveryStatus::Unique);
    EXPECT_LE((forward(r.lambda, inst.A, r.X) - Y).norm() / Y.norm(), 1e-8);
  }
}

TEST(Recover, OracleAgreementWithCertificate) {
  // Both sides of the threshold: m = 5 (threshold 2) and m = 9 (threshold 4).
  int unique = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const std::size_t m = trial % 2 == 0 ? 5 : 9;
    const Instance inst = random_instance(12, m, 2, 10'000 + trial);
    const auto cert = certify_subspace(inst);
    const auto rec = recover(forward(inst), inst.A);
    const bool certified = cert.verdict == Verdict::IdentifiableUpToScaling;
    EXPECT_EQ(certified, rec.status == RecoveryStatus::Unique) << trial;
    EXPECT_EQ(certified, rec.null_dim == 1) << trial;
    unique += certified ? 1 : 0;
  }
  EXPECT_EQ(unique, 100);
}

TEST(RecoverJointSparse, RecoversPlantedSupport) {
  const Instance inst = random_instance(16, 8, 2, 5, 3);
  const RecoveryResult r = recover_joint_sparse(forward(inst), inst.A, 3);
  ASSERT_EQ(r.status, RecoveryStatus::Unique);
  ASSERT_TRUE(r.support.has_value());
  EXPECT_EQ(*r.support, inst.sparsity->support);
  EXPECT_LE(align_scale(r.X, inst.X0).relative_error, 1e-8);
  EXPECT_LE(align_scale(r.lambda, inst.lambda0).relative_error, 1e-8);
}

TEST(RecoverJointSparse, FullSupportMatchesRecover) {
  const Instance inst = random_instance(9, 3, 2, 8, 3);
  const ComplexMatrix Y = forward(inst);
  const RecoveryResult a = recover_joint_sparse(Y, inst.A, 3);
  const RecoveryResult b = recover(Y, inst.A);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.null_dim, b.null_dim);
  EXPECT_LT((a.X - b.X).norm(), 1e-10);
  EXPECT_LT((a.lambda - b.lambda).norm(), 1e-10 * b.lambda.norm());
}

TEST(RecoverJointSparse, EquationDeficitIsAmbiguous) {
  // n = 9, s = 4 needs N >= 8. With N = 1 every support has 9 equations in
  // 4 + 9 unknowns.
  const Instance inst = random_instance(9, 6, 1, 2, 4);
  const RecoveryResult r = recover_joint_sparse(forward(inst), inst.A, 4);
  EXPECT_EQ(r.status, RecoveryStatus::Ambiguous);
  EXPECT_GE(r.null_dim, 4u);
}

TEST(RecoverJointSparse, Budget) {
  const Instance inst = random_instance(16, 8, 2, 5, 3);
  RecoverOptions opts;
  opts.max_cells = 3;
  EXPECT_THROW(recover_joint_sparse(forward(inst), inst.A, 3, opts), BudgetError);
  EXPECT_THROW(recover_joint_sparse(forward(inst), inst.A, 8), InputError);
}

TEST(RecoverJointSparse, ThreadCountDoesNotChangeTheAnswer) {
  const Instance inst = random_instance(14, 7, 2, 15, 3);
  RecoverOptions many;
  many.threads = 4;
  const auto a = recover_joint_sparse(forward(inst), inst.A, 3);
  const auto b = recover_joint_sparse(forward(inst), inst.A, 3, many);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.support, b.support);
  EXPECT_EQ(a.X, b.X);
}

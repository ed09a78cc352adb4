#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "photsub/errors.hpp"
#include "photsub/fock.hpp"

using namespace photsub;

namespace {

QuantumState bell(int cutoff) {
  FockSpace space(cutoff, 2);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  const int a[] = {0, 1};
  const int b[] = {1, 0};
  v(static_cast<Eigen::Index>(space.index(a))) = 1.0 / std::sqrt(2.0);
  v(static_cast<Eigen::Index>(space.index(b))) = 1.0 / std::sqrt(2.0);
  return QuantumState::pure(space, v);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(FockSpace, DimensionAndIndexRoundTrip) {
  FockSpace s(3, 4);
  EXPECT_EQ(s.dimension(), 81u);
  EXPECT_TRUE(s.uniform());
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    EXPECT_EQ(s.index(s.occupations(i)), i);
  }
  // mode 0 slowest
  const int occ[] = {1, 0, 0, 0};
  EXPECT_EQ(s.index(occ), 27u);
}

TEST(FockSpace, PerModeCutoffs) {
  FockSpace s(std::vector<int>{4, 2, 3});
  EXPECT_EQ(s.dimension(), 24u);
  EXPECT_EQ(s.cutoff(), 4);
  EXPECT_FALSE(s.uniform());
  EXPECT_EQ(s.occupation(s.index(std::vector<int>{3, 1, 2}), 2), 2);
}

TEST(FockSpace, RejectsBadCutoff) {
  EXPECT_THROW(FockSpace(1, 2), Error);
  EXPECT_THROW(FockSpace(3, 0), Error);
}

TEST(Ladder, MatrixElements) {
  const Matrix a2 = destroy(2);
  Vector one = Vector::Zero(2);
  one(1) = 1;
  EXPECT_NEAR(std::abs((a2 * one)(0) - 1.0), 0.0, 1e-15);

  const Matrix a4 = destroy(4);
  Vector vac = Vector::Zero(4);
  vac(0) = 1;
  EXPECT_LT((a4 * vac).norm(), 1e-15);
  EXPECT_NEAR(a4(2, 3).real(), std::sqrt(3.0), 1e-15);
  EXPECT_LT(max_abs(create(4) - a4.adjoint()), 1e-15);
  EXPECT_LT(max_abs(number(4) - create(4) * a4), 1e-14);
}

TEST(Embed, IdentityAndSingleModeAction) {
  FockSpace s(3, 2);
  EXPECT_LT(max_abs(embed(Matrix::Identity(3, 3), {0}, s).dense() - Matrix::Identity(9, 9)), 1e-15);

  const auto ket = QuantumState::basis(s, std::vector<int>{0, 1});
  const Vector out1 = embed(destroy(3), {1}, s).apply(ket.amplitudes());
  EXPECT_NEAR(std::abs(out1(static_cast<Eigen::Index>(s.index(std::vector<int>{0, 0})))), 1.0, 1e-15);
  EXPECT_NEAR(out1.norm(), 1.0, 1e-15);

  const Vector out0 = embed(destroy(3), {0}, s).apply(ket.amplitudes());
  EXPECT_LT(out0.norm(), 1e-15);
}

TEST(Embed, MatchesKron) {
  FockSpace s(3, 3);
  const Matrix a = destroy(3);
  const Matrix expected = kron(kron(Matrix::Identity(3, 3), a), Matrix::Identity(3, 3));
  EXPECT_LT(max_abs(embed(a, {1}, s).dense() - expected), 1e-15);
}

TEST(Expm, ZeroAndPhase) {
  EXPECT_LT(max_abs(expm_unitary(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)), 1e-14);
  const Matrix u = expm_unitary(Complex(0, M_PI) * number(4));
  EXPECT_NEAR(u(1, 1).real(), -1.0, 1e-12);
  EXPECT_NEAR(u(1, 1).imag(), 0.0, 1e-12);
}

TEST(Expm, SqueezedVacuumPhotonNumber) {
  const int d = 24;
  const Matrix a = destroy(d);
  const double r = 0.2;
  const Matrix g = 0.5 * r * (a * a - a.adjoint() * a.adjoint());
  const Matrix u = expm_unitary(g);
  EXPECT_LT(max_abs(u.adjoint() * u - Matrix::Identity(d, d)), 1e-10);
  Vector vac = Vector::Zero(d);
  vac(0) = 1;
  const Vector psi = u * vac;
  const double n = (psi.adjoint() * number(d) * psi)(0).real();
  EXPECT_NEAR(n, std::sinh(r) * std::sinh(r), 1e-10);
}

TEST(QuantumState, NormalizesAndRecordsWeight) {
  FockSpace s(3, 1);
  Vector v = Vector::Zero(3);
  v(0) = 2.0;
  const auto st = QuantumState::pure(s, v);
  EXPECT_NEAR(st.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_NEAR(st.weight(), 4.0, 1e-15);
  EXPECT_THROW(QuantumState::pure(s, Vector::Zero(4)), Error);
}

TEST(PartialTrace, VacuumProductAndBell) {
  FockSpace s(3, 2);
  const int keep0[] = {0};
  const auto vac = partial_trace(QuantumState::vacuum(s), keep0);
  EXPECT_NEAR(vac.density()(0, 0).real(), 1.0, 1e-15);

  const auto b = partial_trace(bell(3), keep0);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 0.5;
  EXPECT_LT(max_abs(b.density() - expected), 1e-15);

  Matrix ra(2, 2), rb(2, 2);
  ra << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  rb << 0.4, 0.1, 0.1, 0.6;
  const auto prod = QuantumState::mixed(FockSpace(2, 2), kron(ra, rb));
  EXPECT_LT(max_abs(partial_trace(prod, keep0).density() - ra), 1e-15);
}

TEST(PartialTranspose, BellSpectrum) {
  const auto b = bell(2);
  const int t0[] = {0};
  const RealVector ev = hermitian_eigenvalues(partial_transpose(b, t0));
  ASSERT_EQ(ev.size(), 4);
  EXPECT_NEAR(ev(0), -0.5, 1e-14);
  EXPECT_NEAR(ev(1), 0.5, 1e-14);
  EXPECT_NEAR(ev(3), 0.5, 1e-14);
  EXPECT_NEAR(ev.sum(), 1.0, 1e-12);
}

TEST(PartialTranspose, ProductStaysPositive) {
  Matrix ra(2, 2), rb(2, 2);
  ra << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  rb << 0.4, Complex(0, 0.1), Complex(0, -0.1), 0.6;
  const auto prod = QuantumState::mixed(FockSpace(2, 2), kron(ra, rb));
  const int t0[] = {0};
  const Matrix pt = partial_transpose(prod, t0);
  EXPECT_LT(max_abs(pt - kron(ra.transpose(), rb)), 1e-15);
  EXPECT_GE(hermitian_eigenvalues(pt).minCoeff(), -1e-10);
}

TEST(Eigen, IdentityAndDiagonal) {
  const RealVector e1 = hermitian_eigenvalues(Matrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e1(i), 1.0, 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = 0.3;
  const RealVector e2 = hermitian_eigenvalues(d);
  EXPECT_NEAR(e2(0), 0.3, 1e-15);
  EXPECT_NEAR(e2(1), 0.7, 1e-15);
}

TEST(Cutoffs, RestrictThenExtendIsIdentityOnLowLevels) {
  FockSpace big(std::vector<int>{5, 4});
  FockSpace small(std::vector<int>{3, 2});
  Vector v = Vector::Zero(20);
  v(big.index(std::vector<int>{0, 0})) = 0.8;
  v(big.index(std::vector<int>{2, 1})) = 0.6;
  const auto st = QuantumState::pure(big, v);
  const auto down = restrict_cutoffs(st, small);
  EXPECT_NEAR(down.weight(), 1.0, 1e-15);
  const auto up = extend_cutoffs(down, big);
  EXPECT_NEAR(fidelity(up, st), 1.0, 1e-14);

  Vector w = v;
  w(big.index(std::vector<int>{4, 0})) = 0.1;
  const auto lossy = restrict_cutoffs(QuantumState::pure(big, w), small);
  EXPECT_NEAR(lossy.weight(), 1.0 / 1.01, 1e-14);
}

TEST(QuantumState, TailMass) {
  FockSpace s(6, 1);
  Vector v = Vector::Zero(6);
  v(0) = std::sqrt(0.9);
  v(4) = std::sqrt(0.1);
  const auto st = QuantumState::pure(s, v);
  EXPECT_NEAR(st.tail_mass(), 0.1, 1e-14);
  EXPECT_NEAR(st.mean_photons(0), 0.4, 1e-14);
}

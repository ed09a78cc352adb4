#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "photsub/errors.hpp"
#include "photsub/ghz.hpp"
#include "photsub/optics.hpp"

using namespace photsub;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double expect_number(const QuantumState& st, int mode) { return st.mean_photons(mode); }

}  // namespace

TEST(SqueezeParam, WrapsPhase) {
  const auto z = SqueezeParam::real(-0.3);
  EXPECT_NEAR(z.r, 0.3, 1e-15);
  EXPECT_NEAR(z.theta, M_PI, 1e-15);
  EXPECT_NEAR(SqueezeParam(0.1, -M_PI / 2).theta, 1.5 * M_PI, 1e-15);
}

TEST(LossSpec, AngleAndRange) {
  EXPECT_NEAR(std::pow(std::sin(LossSpec(0.3, {0}).angle()), 2), 0.3, 1e-15);
  EXPECT_THROW(LossSpec(1.2, {0}), Error);
}

TEST(BeamSplitter, UnitaryAndHeisenbergMatrix) {
  FockSpace s(5, 2);
  for (double t : {0.0, 0.3, M_PI / 4, M_PI / 2}) {
    const auto u = beam_splitter(t, 0, 1, s);
    EXPECT_LT(u.unitarity_defect(), 1e-9);
    const Matrix ud = u.dense();
    const Matrix a0 = embed(destroy(5), {0}, s).dense();
    const Matrix a1 = embed(destroy(5), {1}, s).dense();
    const Eigen::Matrix2d m = coupler_mode_matrix(t);
    // compare on the single-photon sector, which the truncation keeps exact
    const auto one = QuantumState::basis(s, std::vector<int>{1, 0});
    const Vector lhs = ud.adjoint() * a0 * ud * one.amplitudes();
    const Vector rhs = (m(0, 0) * a0 + m(0, 1) * a1) * one.amplitudes();
    EXPECT_LT((lhs - rhs).norm(), 1e-12) << "theta " << t;
  }
  const Eigen::Matrix2d m = coupler_mode_matrix(M_PI / 2);
  EXPECT_NEAR(m(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(m(1, 1), -1.0, 1e-15);
  EXPECT_NEAR(m(0, 1), 0.0, 1e-15);
}

TEST(BeamSplitter, ConservesPhotonNumber) {
  FockSpace s(4, 2);
  const auto in = QuantumState::basis(s, std::vector<int>{1, 0});
  for (double t : {0.1, 0.7, 1.3}) {
    const auto out = beam_splitter(t, 0, 1, s).apply(in);
    EXPECT_NEAR(expect_number(out, 0) + expect_number(out, 1), 1.0, 1e-12);
  }
}

TEST(Squeeze, SingleModeClosedForm) {
  FockSpace s(20, 1);
  EXPECT_LT(max_abs(squeeze_single(SqueezeParam(0.0), 0, s).dense() - Matrix::Identity(20, 20)), 1e-14);
  const auto u = squeeze_single(SqueezeParam(0.2), 0, s);
  EXPECT_LT(u.unitarity_defect(), 1e-9);
  const auto st = u.apply(QuantumState::vacuum(s));
  EXPECT_NEAR(expect_number(st, 0), std::sinh(0.2) * std::sinh(0.2), 1e-10);

  const Matrix plus = squeeze_single(SqueezeParam::real(0.2), 0, s).dense();
  const Matrix minus = squeeze_single(SqueezeParam::real(-0.2), 0, s).dense();
  EXPECT_LT(max_abs(minus - plus.adjoint()), 1e-12);
}

TEST(Squeeze, TwoModeCorrelations) {
  FockSpace s(14, 2);
  EXPECT_LT(max_abs(squeeze_two(SqueezeParam(0.0), 0, 1, s).dense() - Matrix::Identity(196, 196)), 1e-14);
  const auto u = squeeze_two(SqueezeParam(0.2), 0, 1, s);
  EXPECT_LT(u.unitarity_defect(), 1e-9);
  const auto st = u.apply(QuantumState::vacuum(s));
  const double sh2 = std::sinh(0.2) * std::sinh(0.2);
  EXPECT_NEAR(expect_number(st, 0), sh2, 1e-10);
  EXPECT_NEAR(expect_number(st, 1), sh2, 1e-10);
}

TEST(Splitter, ModeMatrixRows) {
  const Eigen::MatrixXd m = splitter_mode_matrix(4);
  const Eigen::MatrixXd mt = m.transpose();
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(mt(0, j), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(mt(1, 0)), 3.0 / std::sqrt(12.0), 1e-14);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(mt(1, j) / mt(1, 0), -1.0 / 3.0, 1e-14);
  EXPECT_LT((m * m.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Splitter, SmallCases) {
  FockSpace s1(4, 1);
  EXPECT_LT(max_abs(symmetric_splitter(1, s1).dense() - Matrix::Identity(4, 4)), 1e-14);
  FockSpace s2(4, 2);
  EXPECT_LT(max_abs(symmetric_splitter(2, s2).dense() - beam_splitter(M_PI / 4, 0, 1, s2).dense()), 1e-12);
}

TEST(Splitter, UnitaryOnThreeModes) {
  FockSpace s(4, 3);
  EXPECT_LT(symmetric_splitter(3, s).unitarity_defect(), 1e-9);
}

TEST(Loss, TracePreservingAndLimits) {
  for (double l : {0.0, 0.2, 0.7, 1.0}) {
    const auto ks = loss_kraus(l, 6);
    Matrix sum = Matrix::Zero(6, 6);
    for (const auto& k : ks) sum += k.adjoint() * k;
    EXPECT_LT(max_abs(sum - Matrix::Identity(6, 6)), 1e-10) << "l " << l;
  }
  FockSpace s(5, 2);
  const auto st = squeeze_two(SqueezeParam(0.3), 0, 1, s).apply(QuantumState::vacuum(s));
  const auto same = loss_channel(st, LossSpec(0.0, {0, 1}));
  EXPECT_LT(max_abs(same.density_matrix() - st.density_matrix()), 1e-12);

  const auto gone = loss_channel(st, LossSpec(1.0, {0, 1}));
  EXPECT_NEAR(gone.density_matrix()(0, 0).real(), 1.0, 1e-12);

  const auto half = loss_channel(st, LossSpec(0.4, {1}));
  EXPECT_NEAR(half.density_matrix().trace().real(), 1.0, 1e-10);
  EXPECT_NEAR(half.mean_photons(1), 0.6 * st.mean_photons(1), 1e-10);
}

TEST(Loss, SinglePhoton) {
  FockSpace s(3, 1);
  const auto out = loss_channel(QuantumState::basis(s, std::vector<int>{1}), LossSpec(0.3, {0}));
  EXPECT_NEAR(out.density()(1, 1).real(), 0.7, 1e-14);
  EXPECT_NEAR(out.density()(0, 0).real(), 0.3, 1e-14);
  EXPECT_NEAR(std::abs(out.density()(0, 1)), 0.0, 1e-14);
}

TEST(Subtraction, BasisAndVacuum) {
  FockSpace s(3, 1);
  const auto r = subtract_photon(QuantumState::basis(s, std::vector<int>{1}), 0);
  EXPECT_NEAR(std::abs(r.state.amplitudes()(0)), 1.0, 1e-15);
  EXPECT_NEAR(r.success_weight, 1.0, 1e-15);
  try {
    subtract_photon(QuantumState::vacuum(s), 0);
    FAIL() << "expected NoPhoton";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoPhoton);
  }
}

TEST(Subtraction, WeakTmsvGivesBell) {
  FockSpace s(8, 2);
  const auto psi = prepare_psi0_direct(2, SqueezeParam(0.01), s);
  const auto out = subtract_photon(psi, 0).state;
  Vector bell = Vector::Zero(64);
  bell(s.index(std::vector<int>{1, 0})) = 1 / std::sqrt(2.0);
  bell(s.index(std::vector<int>{0, 1})) = 1 / std::sqrt(2.0);
  // global phase is irrelevant; relative sign depends on the coupler
  const double f_plus = fidelity(out, QuantumState::pure(s, bell));
  bell(s.index(std::vector<int>{0, 1})) *= -1.0;
  const double f_minus = fidelity(out, QuantumState::pure(s, bell));
  EXPECT_GT(std::max(f_plus, f_minus), 1.0 - 1e-3);
}

TEST(Subtraction, MixedInput) {
  FockSpace s(4, 1);
  Matrix rho = Matrix::Zero(4, 4);
  rho(1, 1) = 0.5;
  rho(2, 2) = 0.5;
  const auto r = subtract_photon(QuantumState::mixed(s, rho), 0);
  EXPECT_NEAR(r.success_weight, 1.5, 1e-14);
  EXPECT_NEAR(r.state.density()(0, 0).real(), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(r.state.density()(1, 1).real(), 2.0 / 3.0, 1e-14);
}

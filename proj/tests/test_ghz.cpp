#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "photsub/entanglement.hpp"
#include "photsub/errors.hpp"
#include "photsub/ghz.hpp"

using namespace photsub;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SplittingSpec split(std::vector<int> a, std::vector<int> b, std::vector<int> traced = {}) {
  return {std::move(a), std::move(b), std::move(traced), ""};
}

}  // namespace

TEST(GhzParams, SourceSplit) {
  const GhzParams p{4, 0.2, 0.82};
  EXPECT_NEAR(p.r1() + p.r2(), 0.2, 1e-15);
  EXPECT_NEAR(p.r2() / p.r1(), 0.82, 1e-14);
  const auto q = GhzParams::from_sources(4, p.r1(), p.r2());
  EXPECT_NEAR(q.k, 0.82, 1e-14);
  EXPECT_NEAR(q.r, 0.2, 1e-15);
  EXPECT_THROW((GhzParams{1, 0.2, 0.0}.validate()), Error);
  EXPECT_THROW((GhzParams{2, 0.2, -1.0}.validate()), Error);
}

TEST(Grouping, Validation) {
  EXPECT_NO_THROW((CompositeGrouping{1, 2, 0}.validate(4)));
  EXPECT_THROW((CompositeGrouping{1, 0, 2}.validate()), Error);
  EXPECT_THROW((CompositeGrouping{1, 1, 0}.validate(4)), Error);
  const CompositeGrouping g{1, 2, 1};
  EXPECT_EQ(g.physical_modes(Composite::C), (std::vector<int>{2, 3}));
  EXPECT_EQ(g.physical_modes(Composite::D), (std::vector<int>{4}));
}

TEST(Psi0, VacuumAndSmallSqueezingExpansion) {
  FockSpace s(6, 2);
  const auto vac = prepare_psi0_direct(2, SqueezeParam(0.0), s);
  EXPECT_NEAR(std::abs(vac.amplitudes()(0)), 1.0, 1e-14);

  const double z = 1e-3;
  const auto psi = prepare_psi0_direct(2, SqueezeParam(z), s);
  const Complex c00 = psi.amplitudes()(0);
  const Complex c11 = psi.amplitudes()(s.index(std::vector<int>{1, 1}));
  const Complex c20 = psi.amplitudes()(s.index(std::vector<int>{2, 0}));
  EXPECT_NEAR(std::abs(c11 / c00), z / 2, 1e-8);
  EXPECT_NEAR(std::abs(c20 / c00), z / (2 * std::sqrt(2.0)), 1e-8);
}

TEST(Psi0, ExchangeSymmetryThreeModes) {
  FockSpace s(8, 3);
  const auto psi = prepare_psi0_direct(3, SqueezeParam(0.2), s, 1e-4);
  const Vector& v = psi.amplitudes();
  const int perms[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : perms) {
    Vector w(v.size());
    for (std::size_t i = 0; i < s.dimension(); ++i) {
      auto occ = s.occupations(i);
      std::swap(occ[pr[0]], occ[pr[1]]);
      w(s.index(occ)) = v(i);
    }
    EXPECT_NEAR(std::abs(v.dot(w)), 1.0, 1e-10);
  }
}

TEST(Psi0, TailGuard) {
  FockSpace s(4, 2);
  try {
    prepare_psi0_direct(2, SqueezeParam(1.0), s);
    FAIL() << "expected CutoffTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CutoffTooSmall);
  }
}

TEST(Phi0, KZeroMatchesPsi0) {
  FockSpace s(20, 2);
  const auto a = prepare_phi0_direct({2, 0.2, 0.0}, s);
  const auto b = prepare_psi0_direct(2, SqueezeParam::real(-0.2), s);
  EXPECT_NEAR(fidelity(a, b), 1.0, 1e-12);
}

TEST(Phi0, TwoModeBalancedSourcesIsTmsv) {
  // two oppositely squeezed inputs on a balanced coupler give a TMSV; the
  // per-input squeezing is r/2 for k = 1
  FockSpace s(16, 2);
  const auto phi = prepare_phi0_direct({2, 0.2, 1.0}, s);
  const auto tmsv = squeeze_two(SqueezeParam(0.1), 0, 1, s).apply(QuantumState::vacuum(s));
  EXPECT_NEAR(log_negativity(phi, split({0}, {1})), log_negativity(tmsv, split({0}, {1})), 1e-8);
}

TEST(Phi0, LocalEquivalence) {
  FockSpace s(16, 2);
  const GhzParams p{2, 0.2, 1.0};
  EXPECT_LT(max_abs(local_equiv_unitary({2, 0.2, 0.0}, s).dense() - Matrix::Identity(256, 256)), 1e-14);
  const auto psi = prepare_psi0_direct(2, SqueezeParam::real(-0.2), s);
  const auto phi = prepare_phi0_direct(p, s);
  EXPECT_NEAR(fidelity(local_equiv_unitary(p, s).apply(psi), phi), 1.0, 1e-9);
}

TEST(Phi0, LogNegativityIndependentOfK) {
  // gate-by-gate truncation converges slowly, hence the large cutoff
  FockSpace s(30, 2);
  const auto psi = prepare_psi0_direct(2, SqueezeParam::real(-0.2), s);
  for (double k : {0.5, 2.0}) {
    const auto phi = prepare_phi0_direct({2, 0.2, k}, s);
    for (const auto& sp : enumerate_splittings(2, 0)) {
      EXPECT_NEAR(log_negativity(phi, sp), log_negativity(psi, sp), 1e-8) << sp.label << " k " << k;
    }
  }
}

TEST(Generators, PiecesCommute) {
  FockSpace s(5, 3);
  const Matrix x = local_square_generator(3, 0.3, s);
  const Matrix y = pair_product_generator(3, 0.2, s);
  // check on low-occupation vectors, away from the truncation edge
  Vector v = Vector::Zero(static_cast<Eigen::Index>(s.dimension()));
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const auto occ = s.occupations(i);
    if (occ[0] + occ[1] + occ[2] <= 1) v(i) = Complex(std::cos(1.0 + i), std::sin(2.0 * i));
  }
  v.normalize();
  EXPECT_LT(((x * y - y * x) * v).norm(), 1e-9);
}

TEST(GaussianExpansion, MatchesMatrixExponential) {
  const GhzParams p{4, 0.2, 0.82};
  const CompositeGrouping g{0, 3, 0};
  for (Frame f : {Frame::Rotated, Frame::Physical}) {
    FockSpace s(12, 2);
    FockSpace big(32, 2);
    const auto series = gaussian_pure_state(composite_squeezing_matrix(p, g, f), s);
    const Vector expm_state = expm_unitary(composite_generator(p, g, f, big)).col(0);
    const auto expm = restrict_cutoffs(QuantumState::pure(big, expm_state), s);
    EXPECT_NEAR(fidelity(series, expm), 1.0, 1e-8);
  }
}

TEST(GaussianExpansion, RetainedWeightBelowOne) {
  Eigen::MatrixXd z(1, 1);
  z << 0.5;
  const auto st = gaussian_pure_state(z, FockSpace(4, 1));
  EXPECT_LT(st.weight(), 1.0);
  const auto full = gaussian_pure_state(z, FockSpace(40, 1));
  EXPECT_NEAR(full.weight(), 1.0, 1e-12);
}

TEST(Composite, TwoModeIsPhysical) {
  const GhzParams p{2, 0.2, 0.0};
  const auto c = prepare_composite(p, CompositeGrouping{0, 1, 0}, 14);
  const auto d = prepare_psi0_direct(2, SqueezeParam::real(-0.2), FockSpace(14, 2));
  EXPECT_NEAR(fidelity(c.state, d), 1.0, 1e-10);
}

TEST(Composite, AdaptiveCutoffPassesGuard) {
  const auto c = prepare_composite({4, 0.2, 0.82}, CompositeGrouping{1, 2, 0}, CutoffPolicy{}, Frame::Physical);
  EXPECT_LE(c.state.tail_mass(), 1e-10);
  EXPECT_TRUE(c.has(Composite::B));
  EXPECT_FALSE(c.has(Composite::D));
  try {
    prepare_composite({4, 3.0, 0.0}, CompositeGrouping{1, 2, 0}, CutoffPolicy{8, 2, 10, 1e-10});
    FAIL() << "expected CutoffTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CutoffTooSmall);
  }
}

TEST(Composite, SubtractionAtKZeroIsAnnihilation) {
  const GhzParams p{4, 0.2, 0.0};
  const auto c = prepare_composite(p, CompositeGrouping{1, 2, 0}, 16);
  const auto sub = subtract_composite(c);
  const auto plain = subtract_photon(c.state, c.mode_of(Composite::A));
  EXPECT_NEAR(sub.success_weight, plain.success_weight, 1e-12);
  const auto padded = extend_cutoffs(plain.state, sub.state.state.space());
  EXPECT_NEAR(fidelity(sub.state.state, padded), 1.0, 1e-12);
}

TEST(Composite, SmallSqueezingGivesWState) {
  const GhzParams p{4, 1e-3, 0.0};
  const auto c = prepare_composite(p, CompositeGrouping{1, 2, 0}, 6);
  const auto sub = subtract_composite(c);
  // single excitation shared over all four modes: A, B, C weights 1/4, 1/4, 1/2
  const auto& st = sub.state.state;
  EXPECT_NEAR(st.mean_photons(c.mode_of(Composite::A)), 0.25, 1e-5);
  EXPECT_NEAR(st.mean_photons(c.mode_of(Composite::C)), 0.5, 1e-5);
  EXPECT_LT(sub.success_weight, 1e-5);
}

TEST(Composite, LossLimits) {
  const GhzParams p{4, 0.2, 0.0};
  const auto c = prepare_composite(p, CompositeGrouping{1, 2, 0}, 8, Frame::Physical, 1e-6);
  const auto same = loss_composite(c, 0.0);
  EXPECT_LT(max_abs(same.state.density_matrix() - c.state.density_matrix()), 1e-12);
  const auto gone = loss_composite(c, 1.0);
  EXPECT_NEAR(gone.state.density_matrix()(0, 0).real(), 1.0, 1e-12);
  const auto rotated = prepare_composite({4, 0.2, 0.5}, CompositeGrouping{1, 2, 0}, 8, Frame::Rotated, 1e-6);
  EXPECT_THROW(loss_composite(rotated, 0.2), Error);
}

#include "photsub/ghz.hpp"

#include <cmath>
#include <string>

namespace photsub {

namespace {

void check_tail(const QuantumState& state, double tolerance, const char* what) {
  const double tail = state.tail_mass();
  if (tail > tolerance) {
    throw Error(ErrorKind::CutoffTooSmall, std::string(what) + ": tail mass " + std::to_string(tail) +
                                               " exceeds " + std::to_string(tolerance));
  }
}

// a^dag on one mode of a ket, dropping the top level.
void add_raised(const Vector& in, int mode, const FockSpace& space, const std::vector<int>& occ,
                Complex coeff, Vector& out) {
  const auto stride = static_cast<Eigen::Index>(space.stride(mode));
  const int top = space.cutoff(mode) - 1;
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    const int n = occ[static_cast<std::size_t>(i)];
    if (n < top && in(i) != 0.0) out(i + stride) += coeff * std::sqrt(static_cast<double>(n + 1)) * in(i);
  }
}

}  // namespace

GhzParams GhzParams::from_sources(int modes, double r1, double r2) {
  if (!(r1 > 0.0)) throw Error(ErrorKind::Parameter, "r1 must be positive to define k = r2/r1");
  GhzParams p{modes, r1 + r2, r2 / r1};
  p.validate();
  return p;
}

void GhzParams::validate() const {
  if (modes < 2) throw Error(ErrorKind::Parameter, "modes must be >= 2, got " + std::to_string(modes));
  if (!std::isfinite(r) || r < 0.0) throw Error(ErrorKind::Parameter, "r must be finite and >= 0");
  if (!std::isfinite(k) || k < 0.0) throw Error(ErrorKind::Parameter, "k must be finite and >= 0");
}

char composite_name(Composite c) { return "ABCD"[static_cast<int>(c)]; }

int CompositeGrouping::size(Composite c) const {
  switch (c) {
    case Composite::A: return 1;
    case Composite::B: return n;
    case Composite::C: return m;
    case Composite::D: return p;
  }
  return 0;
}

void CompositeGrouping::validate() const {
  if (n < 0 || m < 0 || p < 0) throw Error(ErrorKind::Parameter, "group sizes must be >= 0");
  if (m < 1) throw Error(ErrorKind::Parameter, "composite C must hold at least one mode");
}

void CompositeGrouping::validate(int modes) const {
  validate();
  if (total_modes() != modes) {
    throw Error(ErrorKind::Parameter, "grouping n+m+p+1=" + std::to_string(total_modes()) +
                                          " does not match N=" + std::to_string(modes));
  }
}

std::vector<int> CompositeGrouping::physical_modes(Composite c) const {
  int start = 0;
  switch (c) {
    case Composite::A: return {0};
    case Composite::B: start = 1; break;
    case Composite::C: start = 1 + n; break;
    case Composite::D: start = 1 + n + m; break;
  }
  std::vector<int> out;
  for (int i = 0; i < size(c); ++i) out.push_back(start + i);
  return out;
}

std::vector<Composite> CompositeState::present() const {
  std::vector<Composite> out;
  for (Composite c : {Composite::A, Composite::B, Composite::C, Composite::D}) {
    if (has(c)) out.push_back(c);
  }
  return out;
}

QuantumState gaussian_pure_state(const Eigen::MatrixXd& squeezing, const FockSpace& space) {
  const auto k = squeezing.rows();
  if (squeezing.cols() != k || k != space.num_modes()) {
    throw Error(ErrorKind::Shape, "squeezing matrix does not match mode count");
  }
  if ((squeezing - squeezing.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw Error(ErrorKind::ContractViolation, "squeezing matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(squeezing);
  const Eigen::VectorXd w = es.eigenvalues();
  const Eigen::MatrixXd t = es.eigenvectors() * w.array().tanh().matrix().asDiagonal() *
                            es.eigenvectors().transpose();
  double prefactor = 1.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) prefactor /= std::sqrt(std::cosh(w(i)));

  const auto dim = static_cast<Eigen::Index>(space.dimension());
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(dim)));
  for (int mode = 0; mode < k; ++mode) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      occ[static_cast<std::size_t>(mode)][static_cast<std::size_t>(i)] = space.occupation(static_cast<std::size_t>(i), mode);
    }
  }
  // Series of Q^j/j! |vac> with Q = -1/2 sum_ij T_ij b_i^dag b_j^dag; every
  // term adds two photons, so it terminates once the truncation is full.
  Vector term = Vector::Zero(dim);
  term(0) = 1.0;
  Vector total = term;
  Vector once(dim);
  for (int j = 1; term.squaredNorm() > 0.0; ++j) {
    Vector next = Vector::Zero(dim);
    for (int a = 0; a < k; ++a) {
      once.setZero();
      add_raised(term, a, space, occ[static_cast<std::size_t>(a)], 1.0, once);
      for (int b = a; b < k; ++b) {
        const double coeff = (a == b ? -0.5 : -1.0) * t(a, b);
        if (coeff == 0.0) continue;
        add_raised(once, b, space, occ[static_cast<std::size_t>(b)], coeff, next);
      }
    }
    term = next / static_cast<double>(j);
    total += term;
  }
  return QuantumState::pure(space, prefactor * total);
}

QuantumState prepare_psi0_direct(int modes, SqueezeParam zeta, const FockSpace& space, double tail_tolerance) {
  if (modes > 5) throw Error(ErrorKind::Shape, "direct construction is limited to N <= 5");
  if (modes > space.num_modes()) throw Error(ErrorKind::Shape, "space has fewer modes than N");
  const ModeOperator circuit = symmetric_splitter(modes, space) * squeeze_single(zeta, 0, space);
  QuantumState out = circuit.apply(QuantumState::vacuum(space));
  check_tail(out, tail_tolerance, "psi0");
  return out;
}

QuantumState prepare_phi0_direct(const GhzParams& params, const FockSpace& space, double tail_tolerance) {
  params.validate();
  if (params.modes > 5) throw Error(ErrorKind::Shape, "direct construction is limited to N <= 5");
  if (params.modes > space.num_modes()) throw Error(ErrorKind::Shape, "space has fewer modes than N");
  ModeOperator sources = squeeze_single(SqueezeParam::real(-params.r1()), 0, space);
  for (int l = 1; l < params.modes; ++l) {
    sources = squeeze_single(SqueezeParam::real(params.r2()), l, space) * sources;
  }
  const ModeOperator circuit = symmetric_splitter(params.modes, space) * sources;
  QuantumState out = circuit.apply(QuantumState::vacuum(space));
  check_tail(out, tail_tolerance, "phi0");
  return out;
}

ModeOperator local_equiv_unitary(const GhzParams& params, const FockSpace& space) {
  params.validate();
  if (params.modes > space.num_modes()) throw Error(ErrorKind::Shape, "space has fewer modes than N");
  ModeOperator u(space);
  for (int l = 0; l < params.modes; ++l) {
    u = squeeze_single(SqueezeParam::real(params.local_squeezing()), l, space) * u;
  }
  return u;
}

namespace {

Matrix dense_destroy(int mode, const FockSpace& space) {
  return embed(destroy(space.cutoff(mode)), {mode}, space).dense();
}

}  // namespace

Matrix local_square_generator(int modes, double x, const FockSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix g = Matrix::Zero(d, d);
  for (int i = 0; i < modes; ++i) {
    const Matrix a = dense_destroy(i, space);
    g += x * a * a;
  }
  return g - g.adjoint();
}

Matrix pair_product_generator(int modes, double y, const FockSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix g = Matrix::Zero(d, d);
  for (int i = 0; i < modes; ++i) {
    const Matrix ai = dense_destroy(i, space);
    for (int j = 0; j < i; ++j) g += y * ai * dense_destroy(j, space);
  }
  return g - g.adjoint();
}

Eigen::MatrixXd composite_squeezing_matrix(const GhzParams& params, const CompositeGrouping& grouping,
                                           Frame frame) {
  params.validate();
  grouping.validate(params.modes);
  std::vector<double> weights;
  for (Composite c : {Composite::A, Composite::B, Composite::C, Composite::D}) {
    if (grouping.size(c) > 0) weights.push_back(std::sqrt(grouping.size(c) / static_cast<double>(params.modes)));
  }
  const Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  // psi0(N, -r): S(-r) on the collective mode sum_X c_X b_X.
  Eigen::MatrixXd z = -params.r * c * c.transpose();
  if (frame == Frame::Physical) {
    z += params.local_squeezing() * Eigen::MatrixXd::Identity(c.size(), c.size());
  }
  return z;
}

Matrix composite_generator(const GhzParams& params, const CompositeGrouping& grouping, Frame frame,
                           const FockSpace& space) {
  const Eigen::MatrixXd z = composite_squeezing_matrix(params, grouping, frame);
  if (z.rows() != space.num_modes()) throw Error(ErrorKind::Shape, "space does not match present composites");
  const auto d = static_cast<Eigen::Index>(space.dimension());
  Matrix g = Matrix::Zero(d, d);
  for (int i = 0; i < z.rows(); ++i) {
    const Matrix ai = dense_destroy(i, space);
    for (int j = 0; j < z.cols(); ++j) g += 0.5 * z(i, j) * ai * dense_destroy(j, space);
  }
  return g - g.adjoint();
}

CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping,
                                 const std::vector<int>& cutoffs, Frame frame, double tail_tolerance) {
  const Eigen::MatrixXd z = composite_squeezing_matrix(params, grouping, frame);
  if (static_cast<Eigen::Index>(cutoffs.size()) != z.rows()) {
    throw Error(ErrorKind::Shape, "need one cutoff per non-empty composite (" + std::to_string(z.rows()) + ")");
  }
  CompositeState out{gaussian_pure_state(z, FockSpace(cutoffs)), params, grouping, frame, {-1, -1, -1, -1}};
  int next = 0;
  for (Composite c : {Composite::A, Composite::B, Composite::C, Composite::D}) {
    if (grouping.size(c) > 0) out.slot[static_cast<std::size_t>(c)] = next++;
  }
  check_tail(out.state, tail_tolerance, "composite state");
  return out;
}

CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping, int cutoff,
                                 Frame frame, double tail_tolerance) {
  const auto present = composite_squeezing_matrix(params, grouping, frame).rows();
  return prepare_composite(params, grouping, std::vector<int>(static_cast<std::size_t>(present), cutoff), frame,
                           tail_tolerance);
}

CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping,
                                 const CutoffPolicy& policy, Frame frame) {
  const auto present = composite_squeezing_matrix(params, grouping, frame).rows();
  std::vector<int> cutoffs(static_cast<std::size_t>(present), policy.initial);
  for (;;) {
    CompositeState trial = prepare_composite(params, grouping, cutoffs, frame, 1.0);
    bool ok = true;
    for (int mode = 0; mode < present; ++mode) {
      if (trial.state.tail_mass(mode) > policy.tail_tolerance) {
        ok = false;
        cutoffs[static_cast<std::size_t>(mode)] += policy.step;
        if (cutoffs[static_cast<std::size_t>(mode)] > policy.ceiling) {
          throw Error(ErrorKind::CutoffTooSmall, "composite mode " + std::to_string(mode) +
                                                     " needs a cutoff above the ceiling " +
                                                     std::to_string(policy.ceiling));
        }
      }
    }
    if (ok) return trial;
  }
}

Subtracted apply_rotated_subtraction(const QuantumState& state, int mode, double s) {
  const int modes[] = {mode};
  state.space().check_modes(modes);
  if (s == 0.0) return subtract_photon(state, mode);
  std::vector<int> cutoffs = state.space().cutoffs();
  const int d = ++cutoffs[static_cast<std::size_t>(mode)];
  const QuantumState padded = extend_cutoffs(state, FockSpace(cutoffs));
  return apply_mode_operator(padded, std::cosh(s) * destroy(d) - std::sinh(s) * create(d), mode);
}

CompositeSubtracted subtract_composite(const CompositeState& state, double tail_tolerance) {
  const int a_mode = state.mode_of(Composite::A);
  Subtracted sub = state.frame == Frame::Rotated
                       ? apply_rotated_subtraction(state.state, a_mode, state.params.local_squeezing())
                       : subtract_photon(state.state, a_mode);
  check_tail(sub.state, tail_tolerance, "subtracted composite state");
  CompositeState out = state;
  out.state = std::move(sub.state);
  return {std::move(out), sub.success_weight};
}

CompositeState loss_composite(const CompositeState& state, double l) {
  if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::Parameter, "loss l=" + std::to_string(l) + " outside [0,1]");
  if (l > 0.0 && state.frame == Frame::Rotated && state.params.local_squeezing() != 0.0) {
    throw Error(ErrorKind::ContractViolation,
                "loss does not commute with the local squeezers; prepare the state in the physical frame");
  }
  std::vector<int> modes;
  for (int i = 0; i < state.state.space().num_modes(); ++i) modes.push_back(i);
  CompositeState out = state;
  out.state = loss_channel(state.state, LossSpec(l, modes));
  return out;
}

}  // namespace photsub

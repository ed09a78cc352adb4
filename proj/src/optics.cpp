#include "photsub/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace photsub {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNoPhotonWeight = 1e-14;

void check_pair(int i, int j, const FockSpace& space, const char* what) {
  if (i == j) throw Error(ErrorKind::InvalidWiring, std::string(what) + " needs two distinct modes");
  const int modes[] = {i, j};
  space.check_modes(modes);
}

// Annihilators of the first and second mode of a two-mode local space.
std::pair<Matrix, Matrix> pair_destroy(int di, int dj) {
  return {kron(destroy(di), Matrix::Identity(dj, dj)), kron(Matrix::Identity(di, di), destroy(dj))};
}

}  // namespace

SqueezeParam::SqueezeParam(double magnitude, double phase) : r(magnitude), theta(phase) {
  if (!std::isfinite(r) || !std::isfinite(theta)) throw Error(ErrorKind::Parameter, "squeezing must be finite");
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
}

SqueezeParam SqueezeParam::real(double value) {
  return value < 0.0 ? SqueezeParam(-value, kPi) : SqueezeParam(value, 0.0);
}

Complex SqueezeParam::zeta() const { return std::polar(r, theta); }

LossSpec::LossSpec(double loss, std::vector<int> modes) : l(loss), applies_to(std::move(modes)) {
  if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::Parameter, "loss l=" + std::to_string(l) + " outside [0,1]");
}

double LossSpec::angle() const { return std::asin(std::sqrt(l)); }

Eigen::Matrix2d coupler_mode_matrix(double theta) {
  Eigen::Matrix2d m;
  m << std::sin(theta), std::cos(theta), std::cos(theta), -std::sin(theta);
  return m;
}

ModeOperator beam_splitter(double theta, int i, int j, const FockSpace& space) {
  check_pair(i, j, space, "beam splitter");
  const int di = space.cutoff(i);
  const int dj = space.cutoff(j);
  const auto [ai, aj] = pair_destroy(di, dj);
  // exp[(pi/2 - theta)(a_i^dag a_j - a_i a_j^dag)] rotates (a_i, a_j) by
  // [[sin, cos], [-cos, sin]]; the pi phase on j flips the second row.
  const Matrix generator = (kPi / 2.0 - theta) * (ai.adjoint() * aj - ai * aj.adjoint());
  Matrix parity = Matrix::Zero(dj, dj);
  for (int n = 0; n < dj; ++n) parity(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  const Matrix u = kron(Matrix::Identity(di, di), parity) * expm_unitary(generator);
  return ModeOperator(space, LocalFactor{{i, j}, u}, true);
}

ModeOperator squeeze_single(SqueezeParam zeta, int k, const FockSpace& space) {
  const int modes[] = {k};
  space.check_modes(modes);
  const Matrix a = destroy(space.cutoff(k));
  const Complex z = zeta.zeta();
  const Matrix generator = 0.5 * (std::conj(z) * a * a - z * a.adjoint() * a.adjoint());
  return ModeOperator(space, LocalFactor{{k}, expm_unitary(generator)}, true);
}

ModeOperator squeeze_two(SqueezeParam zeta, int m, int n, const FockSpace& space) {
  check_pair(m, n, space, "two-mode squeezer");
  const auto [am, an] = pair_destroy(space.cutoff(m), space.cutoff(n));
  const Complex z = zeta.zeta();
  const Matrix generator = std::conj(z) * am * an - z * am.adjoint() * an.adjoint();
  return ModeOperator(space, LocalFactor{{m, n}, expm_unitary(generator)}, true);
}

ModeOperator symmetric_splitter(int num_modes, const FockSpace& space) {
  if (num_modes < 1) throw Error(ErrorKind::Shape, "splitter needs at least one mode");
  if (num_modes > space.num_modes()) {
    throw Error(ErrorKind::Shape, "splitter over " + std::to_string(num_modes) + " modes exceeds space with " +
                                      std::to_string(space.num_modes()));
  }
  ModeOperator u(space);
  // Left-multiplying builds B_{N-1,N} ... B_{1,2} with B_{1,2} acting first.
  for (int l = 1; l < num_modes; ++l) {
    const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(num_modes - l + 1)));
    u = beam_splitter(theta, l - 1, l, space) * u;
  }
  return u;
}

Eigen::MatrixXd splitter_mode_matrix(int num_modes) {
  if (num_modes < 1) throw Error(ErrorKind::Shape, "splitter needs at least one mode");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(num_modes, num_modes);
  for (int l = 1; l < num_modes; ++l) {
    const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(num_modes - l + 1)));
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(num_modes, num_modes);
    b.block<2, 2>(l - 1, l - 1) = coupler_mode_matrix(theta);
    m = b * m;
  }
  return m;
}

std::vector<Matrix> loss_kraus(double l, int cutoff) {
  const LossSpec spec(l, {});
  // The mode keeps amplitude sqrt(1-l): sin(theta') = cos(loss angle).
  const FockSpace pair(cutoff, 2);
  const ModeOperator u = beam_splitter(kPi / 2.0 - spec.angle(), 0, 1, pair);
  const Matrix& um = u.factors().front().matrix;
  std::vector<Matrix> kraus;
  for (int j = 0; j < cutoff; ++j) {
    Matrix k = Matrix::Zero(cutoff, cutoff);
    for (int out = 0; out < cutoff; ++out) {
      for (int in = 0; in < cutoff; ++in) k(out, in) = um(out * cutoff + j, in * cutoff);
    }
    kraus.push_back(std::move(k));
  }
  return kraus;
}

QuantumState loss_channel(const QuantumState& state, const LossSpec& spec) {
  const FockSpace& space = state.space();
  space.check_modes(spec.applies_to, true);
  if (spec.l == 0.0) return state;
  Matrix rho = state.density_matrix();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  for (int mode : spec.applies_to) {
    const int d = space.cutoff(mode);
    const auto stride = static_cast<Eigen::Index>(space.stride(mode));
    // Loss conserves total photon number with the ancilla, so K_j only maps
    // |n> to |n-j>; coeff(j, n) = <n-j|K_j|n>.
    const auto kraus = loss_kraus(spec.l, d);
    Matrix coeff = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      for (int n = j; n < d; ++n) coeff(j, n) = kraus[static_cast<std::size_t>(j)](n - j, n);
    }
    Matrix out = Matrix::Zero(dim, dim);
    std::vector<int> occ(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) occ[static_cast<std::size_t>(i)] = space.occupation(static_cast<std::size_t>(i), mode);
    for (Eigen::Index c = 0; c < dim; ++c) {
      const int nc = occ[static_cast<std::size_t>(c)];
      for (Eigen::Index r = 0; r < dim; ++r) {
        const int nr = occ[static_cast<std::size_t>(r)];
        Complex acc = 0.0;
        for (int j = 0; nr + j < d && nc + j < d; ++j) {
          acc += coeff(j, nr + j) * std::conj(coeff(j, nc + j)) * rho(r + j * stride, c + j * stride);
        }
        out(r, c) = acc;
      }
    }
    rho = std::move(out);
  }
  return QuantumState::mixed(space, std::move(rho));
}

Subtracted apply_mode_operator(const QuantumState& state, const Matrix& op, int mode) {
  const FockSpace& space = state.space();
  const int modes[] = {mode};
  space.check_modes(modes);
  if (state.is_pure()) {
    Vector v = apply_local(op, modes, space, state.amplitudes());
    const double w = v.squaredNorm();
    if (w < kNoPhotonWeight) {
      throw Error(ErrorKind::NoPhoton, "mode " + std::to_string(mode) + " carries no photons to subtract");
    }
    return {QuantumState::pure(space, std::move(v)), w};
  }
  Matrix left = apply_local_rows(op, modes, space, state.density());
  Matrix rho = apply_local_rows(op, modes, space, left.adjoint()).adjoint();
  const double w = rho.trace().real();
  if (w < kNoPhotonWeight) {
    throw Error(ErrorKind::NoPhoton, "mode " + std::to_string(mode) + " carries no photons to subtract");
  }
  return {QuantumState::mixed(space, std::move(rho)), w};
}

Subtracted subtract_photon(const QuantumState& state, int mode) {
  const int modes[] = {mode};
  state.space().check_modes(modes);
  return apply_mode_operator(state, destroy(state.space().cutoff(mode)), mode);
}

}  // namespace photsub

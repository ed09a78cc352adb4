#include "photsub/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace photsub {

namespace {

std::string modes_str(std::span<const int> modes) {
  std::string s = "[";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(modes[i]);
  }
  return s + "]";
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

// ---------------------------------------------------------------- FockSpace

FockSpace::FockSpace(int cutoff, int num_modes) {
  if (num_modes < 1) throw Error(ErrorKind::InvalidSpace, "num_modes must be positive");
  cutoffs_.assign(static_cast<std::size_t>(num_modes), cutoff);
  init();
}

FockSpace::FockSpace(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.empty()) throw Error(ErrorKind::InvalidSpace, "num_modes must be positive");
  init();
}

void FockSpace::init() {
  for (int c : cutoffs_) {
    if (c < 2) throw Error(ErrorKind::InvalidSpace, "cutoff must be >= 2, got " + std::to_string(c));
  }
  strides_.assign(cutoffs_.size(), 1);
  for (int k = static_cast<int>(cutoffs_.size()) - 2; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    strides_[ku] = strides_[ku + 1] * static_cast<std::size_t>(cutoffs_[ku + 1]);
  }
  dimension_ = strides_[0] * static_cast<std::size_t>(cutoffs_[0]);
}

int FockSpace::cutoff() const { return *std::max_element(cutoffs_.begin(), cutoffs_.end()); }

bool FockSpace::uniform() const {
  return std::all_of(cutoffs_.begin(), cutoffs_.end(), [&](int c) { return c == cutoffs_[0]; });
}

std::size_t FockSpace::index(std::span<const int> occupations) const {
  if (occupations.size() != cutoffs_.size()) {
    throw Error(ErrorKind::Shape, "occupation list has wrong length");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] >= cutoffs_[k]) {
      throw Error(ErrorKind::Shape, "occupation outside truncation on mode " + std::to_string(k));
    }
    idx += static_cast<std::size_t>(occupations[k]) * strides_[k];
  }
  return idx;
}

std::vector<int> FockSpace::occupations(std::size_t index) const {
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    occ[k] = static_cast<int>((index / strides_[k]) % static_cast<std::size_t>(cutoffs_[k]));
  }
  return occ;
}

void FockSpace::check_modes(std::span<const int> modes, bool allow_empty) const {
  if (modes.empty() && !allow_empty) throw Error(ErrorKind::InvalidPartition, "empty mode list");
  std::vector<int> sorted(modes.begin(), modes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::InvalidPartition, "repeated mode in " + modes_str(modes));
  }
  for (int m : modes) {
    if (m < 0 || m >= num_modes()) {
      throw Error(ErrorKind::InvalidPartition,
                  "mode " + std::to_string(m) + " out of range for " + std::to_string(num_modes()) +
                      " modes");
    }
  }
}

FockSpace FockSpace::subspace(std::span<const int> modes) const {
  check_modes(modes);
  std::vector<int> cut;
  cut.reserve(modes.size());
  for (int m : modes) cut.push_back(cutoff(m));
  return FockSpace(std::move(cut));
}

std::vector<std::size_t> FockSpace::offsets(std::span<const int> modes) const {
  std::vector<std::size_t> out{0};
  // Build with the first listed mode slowest.
  for (int m : modes) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(cutoff(m)));
    for (std::size_t base : out) {
      for (int n = 0; n < cutoff(m); ++n) next.push_back(base + static_cast<std::size_t>(n) * stride(m));
    }
    out = std::move(next);
  }
  return out;
}

std::vector<int> FockSpace::complement(std::span<const int> modes) const {
  std::vector<int> out;
  for (int k = 0; k < num_modes(); ++k) {
    if (std::find(modes.begin(), modes.end(), k) == modes.end()) out.push_back(k);
  }
  return out;
}

// ------------------------------------------------------------- QuantumState

QuantumState::QuantumState(FockSpace space, std::variant<Vector, Matrix> payload, double weight)
    : space_(std::move(space)), payload_(std::move(payload)), weight_(weight) {}

QuantumState QuantumState::pure(FockSpace space, Vector amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != space.dimension()) {
    throw Error(ErrorKind::Shape, "amplitude vector does not match space dimension");
  }
  const double w = amplitudes.squaredNorm();
  if (!(w > 0.0)) throw Error(ErrorKind::ContractViolation, "cannot normalize a zero vector");
  amplitudes /= std::sqrt(w);
  return QuantumState(std::move(space), std::move(amplitudes), w);
}

QuantumState QuantumState::mixed(FockSpace space, Matrix density) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  if (density.rows() != d || density.cols() != d) {
    throw Error(ErrorKind::Shape, "density matrix does not match space dimension");
  }
  const double tr = density.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorKind::ContractViolation, "density operator has non-positive trace");
  if (hermiticity_defect(density) > 1e-10 * std::max(1.0, tr)) {
    throw Error(ErrorKind::ContractViolation, "density operator is not Hermitian");
  }
  density /= tr;
  // Symmetrize away round-off so downstream eigensolvers see an exact Hermitian.
  density = (0.5 * (density + density.adjoint())).eval();
  return QuantumState(std::move(space), std::move(density), tr);
}

QuantumState QuantumState::vacuum(const FockSpace& space) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  v(0) = 1.0;
  return pure(space, std::move(v));
}

QuantumState QuantumState::basis(const FockSpace& space, std::span<const int> occupations) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
  v(static_cast<Eigen::Index>(space.index(occupations))) = 1.0;
  return pure(space, std::move(v));
}

const Vector& QuantumState::amplitudes() const {
  if (!is_pure()) throw Error(ErrorKind::ContractViolation, "state is mixed");
  return std::get<Vector>(payload_);
}

const Matrix& QuantumState::density() const {
  if (is_pure()) throw Error(ErrorKind::ContractViolation, "state is pure");
  return std::get<Matrix>(payload_);
}

Matrix QuantumState::density_matrix() const {
  if (is_pure()) {
    const Vector& v = amplitudes();
    return v * v.adjoint();
  }
  return density();
}

RealVector QuantumState::populations(int mode) const {
  space_.check_modes(std::span<const int>(&mode, 1));
  RealVector p = RealVector::Zero(space_.cutoff(mode));
  const auto d = space_.dimension();
  if (is_pure()) {
    const Vector& v = amplitudes();
    for (std::size_t i = 0; i < d; ++i) p(space_.occupation(i, mode)) += std::norm(v(static_cast<Eigen::Index>(i)));
  } else {
    const Matrix& rho = density();
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      p(space_.occupation(i, mode)) += rho(ii, ii).real();
    }
  }
  return p;
}

double QuantumState::mean_photons(int mode) const {
  const RealVector p = populations(mode);
  double n = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) n += static_cast<double>(k) * p(k);
  return n;
}

double QuantumState::tail_mass(int mode) const {
  const RealVector p = populations(mode);
  const auto c = p.size();
  return c >= 4 ? p(c - 1) + p(c - 2) : p(c - 1);
}

double QuantumState::tail_mass() const {
  double worst = 0.0;
  for (int m = 0; m < space_.num_modes(); ++m) worst = std::max(worst, tail_mass(m));
  return worst;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (!(a.space() == b.space())) throw Error(ErrorKind::Shape, "fidelity between different spaces");
  if (a.is_pure() && b.is_pure()) return std::norm(a.amplitudes().dot(b.amplitudes()));
  if (a.is_pure()) return (a.amplitudes().adjoint() * b.density() * a.amplitudes())(0).real();
  if (b.is_pure()) return (b.amplitudes().adjoint() * a.density() * b.amplitudes())(0).real();
  throw Error(ErrorKind::ContractViolation, "mixed-mixed fidelity is not supported");
}

// ------------------------------------------------------------ local algebra

Matrix destroy(int cutoff) {
  if (cutoff < 2) throw Error(ErrorKind::InvalidSpace, "cutoff must be >= 2, got " + std::to_string(cutoff));
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix create(int cutoff) { return destroy(cutoff).adjoint(); }

Matrix number(int cutoff) {
  Matrix n = Matrix::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

namespace {

void check_local(const Matrix& local, std::span<const int> modes, const FockSpace& space) {
  space.check_modes(modes);
  std::size_t l = 1;
  for (int m : modes) l *= static_cast<std::size_t>(space.cutoff(m));
  if (local.rows() != local.cols() || static_cast<std::size_t>(local.rows()) != l) {
    throw Error(ErrorKind::Shape, "operator dimension " + std::to_string(local.rows()) + "x" +
                                      std::to_string(local.cols()) + " does not match modes " +
                                      modes_str(modes) + " (expected " + std::to_string(l) + ")");
  }
}

}  // namespace

Vector apply_local(const Matrix& local, std::span<const int> modes, const FockSpace& space,
                   const Vector& ket) {
  const auto offs = space.offsets(modes);
  const auto rest = space.complement(modes);
  const auto bases = space.offsets(rest);
  const auto l = static_cast<Eigen::Index>(offs.size());
  const auto r = static_cast<Eigen::Index>(bases.size());
  Matrix gathered(l, r);
  for (Eigen::Index b = 0; b < r; ++b) {
    for (Eigen::Index i = 0; i < l; ++i) gathered(i, b) = ket(static_cast<Eigen::Index>(bases[b] + offs[i]));
  }
  const Matrix out = local * gathered;
  Vector result(ket.size());
  for (Eigen::Index b = 0; b < r; ++b) {
    for (Eigen::Index i = 0; i < l; ++i) result(static_cast<Eigen::Index>(bases[b] + offs[i])) = out(i, b);
  }
  return result;
}

Matrix apply_local_rows(const Matrix& local, std::span<const int> modes, const FockSpace& space,
                        const Matrix& m) {
  const auto offs = space.offsets(modes);
  const auto bases = space.offsets(space.complement(modes));
  const auto l = static_cast<Eigen::Index>(offs.size());
  Matrix result(m.rows(), m.cols());
  Matrix block(l, m.cols());
  for (std::size_t base : bases) {
    for (Eigen::Index i = 0; i < l; ++i) block.row(i) = m.row(static_cast<Eigen::Index>(base + offs[i]));
    const Matrix out = local * block;
    for (Eigen::Index i = 0; i < l; ++i) result.row(static_cast<Eigen::Index>(base + offs[i])) = out.row(i);
  }
  return result;
}

// ------------------------------------------------------------- ModeOperator

ModeOperator::ModeOperator(FockSpace space) : space_(std::move(space)), unitary_(true) {}

ModeOperator::ModeOperator(FockSpace space, LocalFactor factor, bool unitary)
    : space_(std::move(space)), unitary_(unitary) {
  check_local(factor.matrix, factor.modes, space_);
  factors_.push_back(std::move(factor));
}

Matrix ModeOperator::dense() const {
  const auto d = static_cast<Eigen::Index>(space_.dimension());
  Matrix out = Matrix::Identity(d, d);
  // out = F_0 F_1 ... F_{k-1}; build from the right.
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    out = apply_local_rows(it->matrix, it->modes, space_, out);
  }
  return out;
}

ModeOperator ModeOperator::adjoint() const {
  ModeOperator out(space_);
  out.unitary_ = unitary_;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    out.factors_.push_back({it->modes, it->matrix.adjoint()});
  }
  return out;
}

Vector ModeOperator::apply(const Vector& ket) const {
  if (static_cast<std::size_t>(ket.size()) != space_.dimension()) {
    throw Error(ErrorKind::Shape, "ket does not match operator space");
  }
  Vector out = ket;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    out = apply_local(it->matrix, it->modes, space_, out);
  }
  return out;
}

Matrix ModeOperator::conjugate(const Matrix& rho) const {
  Matrix left = rho;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    left = apply_local_rows(it->matrix, it->modes, space_, left);
  }
  Matrix right = left.adjoint();
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    right = apply_local_rows(it->matrix, it->modes, space_, right);
  }
  return right.adjoint();
}

QuantumState ModeOperator::apply(const QuantumState& state) const {
  if (!(state.space() == space_)) throw Error(ErrorKind::Shape, "state does not match operator space");
  if (state.is_pure()) return QuantumState::pure(space_, apply(state.amplitudes()));
  return QuantumState::mixed(space_, conjugate(state.density()));
}

double ModeOperator::unitarity_defect() const {
  double worst = 0.0;
  for (const auto& f : factors_) {
    const Matrix g = f.matrix.adjoint() * f.matrix - Matrix::Identity(f.matrix.rows(), f.matrix.cols());
    worst = std::max(worst, max_abs(g));
  }
  return worst;
}

ModeOperator operator*(const ModeOperator& a, const ModeOperator& b) {
  if (!(a.space_ == b.space_)) throw Error(ErrorKind::Shape, "operator product across different spaces");
  ModeOperator out(a.space_);
  out.unitary_ = a.unitary_ && b.unitary_;
  out.factors_ = a.factors_;
  out.factors_.insert(out.factors_.end(), b.factors_.begin(), b.factors_.end());
  return out;
}

ModeOperator embed(const Matrix& op, std::span<const int> target_modes, const FockSpace& space) {
  return ModeOperator(space, LocalFactor{{target_modes.begin(), target_modes.end()}, op});
}

ModeOperator embed(const Matrix& op, std::initializer_list<int> target_modes, const FockSpace& space) {
  return embed(op, std::span<const int>(target_modes.begin(), target_modes.size()), space);
}

// --------------------------------------------------------- exponentials/eig

Matrix expm_unitary(const Matrix& generator) {
  if (generator.rows() != generator.cols()) throw Error(ErrorKind::Shape, "generator must be square");
  const double scale = std::max(1.0, max_abs(generator));
  if (max_abs(generator + generator.adjoint()) > 1e-10 * scale) {
    throw Error(ErrorKind::ContractViolation, "generator is not anti-Hermitian");
  }
  const Complex i(0.0, 1.0);
  Matrix h = i * generator;
  h = (0.5 * (h + h.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector phases = (-i * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ModeOperator expm_unitary(const ModeOperator& generator) {
  if (generator.factors().size() != 1) {
    throw Error(ErrorKind::ContractViolation, "generator must be a single local factor");
  }
  const auto& f = generator.factors().front();
  return ModeOperator(generator.space(), LocalFactor{f.modes, expm_unitary(f.matrix)}, true);
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::Shape, "matrix must be square");
  const double scale = std::max(1.0, max_abs(m));
  if (hermiticity_defect(m) > 1e-10 * scale) {
    throw Error(ErrorKind::ContractViolation, "matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ContractViolation, "eigensolver did not converge");
  return es.eigenvalues();
}

// ------------------------------------------------------ traces / transposes

Matrix partial_trace(const Matrix& rho, const FockSpace& space, std::span<const int> keep_modes) {
  space.check_modes(keep_modes);
  const auto koff = space.offsets(keep_modes);
  const auto toff = space.offsets(space.complement(keep_modes));
  const auto k = static_cast<Eigen::Index>(koff.size());
  Matrix out = Matrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      Complex acc = 0.0;
      for (std::size_t t : toff) {
        acc += rho(static_cast<Eigen::Index>(koff[i] + t), static_cast<Eigen::Index>(koff[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

QuantumState partial_trace(const QuantumState& state, std::span<const int> keep_modes) {
  const FockSpace& space = state.space();
  space.check_modes(keep_modes);
  FockSpace kept = space.subspace(keep_modes);
  if (!state.is_pure()) return QuantumState::mixed(kept, partial_trace(state.density(), space, keep_modes));
  const auto koff = space.offsets(keep_modes);
  const auto toff = space.offsets(space.complement(keep_modes));
  Matrix m(static_cast<Eigen::Index>(koff.size()), static_cast<Eigen::Index>(toff.size()));
  const Vector& v = state.amplitudes();
  for (std::size_t t = 0; t < toff.size(); ++t) {
    for (std::size_t i = 0; i < koff.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = v(static_cast<Eigen::Index>(koff[i] + toff[t]));
    }
  }
  return QuantumState::mixed(kept, m * m.adjoint());
}

Matrix partial_transpose(const Matrix& rho, const FockSpace& space, std::span<const int> transpose_modes) {
  space.check_modes(transpose_modes);
  if (static_cast<int>(transpose_modes.size()) >= space.num_modes()) {
    throw Error(ErrorKind::InvalidPartition, "partial transpose needs a proper subset of modes");
  }
  const auto toff = space.offsets(transpose_modes);
  const auto aoff = space.offsets(space.complement(transpose_modes));
  Matrix out(rho.rows(), rho.cols());
  for (std::size_t ja = 0; ja < aoff.size(); ++ja) {
    for (std::size_t jt = 0; jt < toff.size(); ++jt) {
      const auto col = static_cast<Eigen::Index>(aoff[ja] + toff[jt]);
      for (std::size_t ia = 0; ia < aoff.size(); ++ia) {
        for (std::size_t it = 0; it < toff.size(); ++it) {
          out(static_cast<Eigen::Index>(aoff[ia] + toff[jt]), static_cast<Eigen::Index>(aoff[ja] + toff[it])) =
              rho(static_cast<Eigen::Index>(aoff[ia] + toff[it]), col);
        }
      }
    }
  }
  return out;
}

Matrix partial_transpose(const QuantumState& state, std::span<const int> transpose_modes) {
  return partial_transpose(state.density_matrix(), state.space(), transpose_modes);
}

QuantumState restrict_cutoffs(const QuantumState& state, const FockSpace& target) {
  const FockSpace& src = state.space();
  if (target.num_modes() != src.num_modes()) throw Error(ErrorKind::Shape, "mode count mismatch");
  for (int m = 0; m < src.num_modes(); ++m) {
    if (target.cutoff(m) > src.cutoff(m)) throw Error(ErrorKind::Shape, "target cutoff exceeds source");
  }
  std::vector<Eigen::Index> map(target.dimension());
  for (std::size_t i = 0; i < target.dimension(); ++i) {
    map[i] = static_cast<Eigen::Index>(src.index(target.occupations(i)));
  }
  const auto d = static_cast<Eigen::Index>(target.dimension());
  if (state.is_pure()) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = state.amplitudes()(map[static_cast<std::size_t>(i)]);
    return QuantumState::pure(target, std::move(v));
  }
  Matrix rho(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      rho(i, j) = state.density()(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
    }
  }
  return QuantumState::mixed(target, std::move(rho));
}

QuantumState extend_cutoffs(const QuantumState& state, const FockSpace& target) {
  const FockSpace& src = state.space();
  if (target.num_modes() != src.num_modes()) throw Error(ErrorKind::Shape, "mode count mismatch");
  for (int m = 0; m < src.num_modes(); ++m) {
    if (target.cutoff(m) < src.cutoff(m)) throw Error(ErrorKind::Shape, "target cutoff below source");
  }
  std::vector<Eigen::Index> map(src.dimension());
  for (std::size_t i = 0; i < src.dimension(); ++i) {
    map[i] = static_cast<Eigen::Index>(target.index(src.occupations(i)));
  }
  const auto d = static_cast<Eigen::Index>(target.dimension());
  const auto n = static_cast<Eigen::Index>(src.dimension());
  if (state.is_pure()) {
    Vector v = Vector::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) v(map[static_cast<std::size_t>(i)]) = state.amplitudes()(i);
    return QuantumState::pure(target, std::move(v));
  }
  Matrix rho = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      rho(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = state.density()(i, j);
    }
  }
  return QuantumState::mixed(target, std::move(rho));
}

}  // namespace photsub

#pragma once

// Truncated Fock-space linear algebra.
//
// Mode ordering: mode 0 is the slowest-varying tensor factor. A basis state
// |n_0, n_1, ..., n_{M-1}> has flat index sum_k n_k * stride(k) with
// stride(M-1) = 1. Every routine in the library uses this convention.

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "photsub/errors.hpp"

namespace photsub {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

class FockSpace {
 public:
  // Uniform truncation: every mode keeps levels 0..cutoff-1.
  FockSpace(int cutoff, int num_modes);
  // Per-mode truncation; used by the composite-mode pipeline where the modes
  // carry very different photon numbers.
  explicit FockSpace(std::vector<int> cutoffs);

  int num_modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
  // Largest per-mode cutoff (equal to the cutoff when uniform).
  int cutoff() const;
  bool uniform() const;
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }

  std::size_t index(std::span<const int> occupations) const;
  std::vector<int> occupations(std::size_t index) const;
  int occupation(std::size_t index, int mode) const {
    return static_cast<int>((index / strides_[static_cast<std::size_t>(mode)]) %
                            static_cast<std::size_t>(cutoffs_[static_cast<std::size_t>(mode)]));
  }

  // Space over a subset of modes, in the order given.
  FockSpace subspace(std::span<const int> modes) const;
  // Flat offsets (in this space) of every basis state of `modes`, ordered as
  // subspace(modes) orders them.
  std::vector<std::size_t> offsets(std::span<const int> modes) const;
  // Modes not listed, in increasing order.
  std::vector<int> complement(std::span<const int> modes) const;
  // Throws InvalidPartition unless the list is nonempty, distinct and in range.
  void check_modes(std::span<const int> modes, bool allow_empty = false) const;

  friend bool operator==(const FockSpace& a, const FockSpace& b) { return a.cutoffs_ == b.cutoffs_; }

 private:
  void init();

  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 0;
};

// Pure amplitude vector or density operator. Construction normalizes the
// payload and records the pre-normalization weight (squared norm or trace).
class QuantumState {
 public:
  static QuantumState pure(FockSpace space, Vector amplitudes);
  static QuantumState mixed(FockSpace space, Matrix density);
  static QuantumState vacuum(const FockSpace& space);
  static QuantumState basis(const FockSpace& space, std::span<const int> occupations);

  const FockSpace& space() const { return space_; }
  bool is_pure() const { return std::holds_alternative<Vector>(payload_); }
  const Vector& amplitudes() const;
  const Matrix& density() const;
  // Density operator regardless of representation.
  Matrix density_matrix() const;
  double weight() const { return weight_; }

  // Photon-number distribution of one mode.
  RealVector populations(int mode) const;
  double mean_photons(int mode) const;
  // Largest per-mode population held in the top two Fock levels (top level
  // only when cutoff < 4). Two levels so that parity-restricted states cannot
  // hide mass behind an empty odd/even top level.
  double tail_mass() const;
  double tail_mass(int mode) const;

 private:
  QuantumState(FockSpace space, std::variant<Vector, Matrix> payload, double weight);

  FockSpace space_;
  std::variant<Vector, Matrix> payload_;
  double weight_ = 1.0;
};

// Fidelity |<a|b>|^2 between pure states, Tr(rho sigma) if either is mixed
// and the other pure; mixed-mixed is not needed and throws.
double fidelity(const QuantumState& a, const QuantumState& b);

// One factor of a ModeOperator: a dense matrix acting on `modes` (first
// listed mode slowest), identity elsewhere.
struct LocalFactor {
  std::vector<int> modes;
  Matrix matrix;
};

// Operator on a FockSpace stored as a product of local factors. The product
// reads left to right like matrix multiplication: factors().back() acts first
// on a ket. Gates stay local so circuits on 4-6 modes never materialize a
// full D x D matrix unless dense() is asked for.
class ModeOperator {
 public:
  explicit ModeOperator(FockSpace space);  // identity
  ModeOperator(FockSpace space, LocalFactor factor, bool unitary = false);

  const FockSpace& space() const { return space_; }
  const std::vector<LocalFactor>& factors() const { return factors_; }
  bool tagged_unitary() const { return unitary_; }

  Matrix dense() const;
  ModeOperator adjoint() const;
  Vector apply(const Vector& ket) const;
  // O rho O^dagger.
  Matrix conjugate(const Matrix& rho) const;
  // O |psi> or O rho O^dagger, renormalized; the weight of the result is the
  // squared norm (trace) after the operator acted.
  QuantumState apply(const QuantumState& state) const;

  // max |U^dagger U - I| over the factors.
  double unitarity_defect() const;

  friend ModeOperator operator*(const ModeOperator& a, const ModeOperator& b);

 private:
  FockSpace space_;
  std::vector<LocalFactor> factors_;
  bool unitary_ = false;
};

// Single-mode lowering operator, <n-1|a|n> = sqrt(n).
Matrix destroy(int cutoff);
Matrix create(int cutoff);
Matrix number(int cutoff);

// Kronecker product, left factor slowest.
Matrix kron(const Matrix& a, const Matrix& b);

ModeOperator embed(const Matrix& op, std::span<const int> target_modes, const FockSpace& space);
ModeOperator embed(const Matrix& op, std::initializer_list<int> target_modes, const FockSpace& space);

// exp(G) for anti-Hermitian G through the Hermitian eigendecomposition of iG:
// U = V exp(-i diag) V^dagger. Unitary to round-off.
Matrix expm_unitary(const Matrix& generator);
ModeOperator expm_unitary(const ModeOperator& generator);

// Apply a local matrix to the given modes of a ket (or to the row index of a
// matrix, column by column).
Vector apply_local(const Matrix& local, std::span<const int> modes, const FockSpace& space,
                   const Vector& ket);
Matrix apply_local_rows(const Matrix& local, std::span<const int> modes, const FockSpace& space,
                        const Matrix& m);

QuantumState partial_trace(const QuantumState& state, std::span<const int> keep_modes);
Matrix partial_trace(const Matrix& rho, const FockSpace& space, std::span<const int> keep_modes);

Matrix partial_transpose(const QuantumState& state, std::span<const int> transpose_modes);
Matrix partial_transpose(const Matrix& rho, const FockSpace& space,
                         std::span<const int> transpose_modes);

// All eigenvalues of a Hermitian matrix, ascending.
RealVector hermitian_eigenvalues(const Matrix& m);

// Project every mode onto a smaller cutoff and renormalize.
QuantumState restrict_cutoffs(const QuantumState& state, const FockSpace& target);
// Zero-pad every mode up to a larger cutoff.
QuantumState extend_cutoffs(const QuantumState& state, const FockSpace& target);

double hermiticity_defect(const Matrix& m);

}  // namespace photsub

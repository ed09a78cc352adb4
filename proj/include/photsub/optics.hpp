#pragma once

// Gates and channels on truncated Fock spaces: directional coupler, single-
// and two-mode squeezers, the N-mode symmetric splitter, pure loss and
// single-photon subtraction.

#include <utility>
#include <vector>

#include "photsub/fock.hpp"

namespace photsub {

// zeta = r * exp(i*theta); theta is kept in [0, 2*pi).
struct SqueezeParam {
  double r = 0.0;
  double theta = 0.0;

  SqueezeParam() = default;
  SqueezeParam(double magnitude, double phase = 0.0);
  // Real squeezing value; negative values map to theta = pi.
  static SqueezeParam real(double value);
  Complex zeta() const;
};

// Uniform pure loss on the listed modes; l is the photon loss probability.
struct LossSpec {
  double l = 0.0;
  std::vector<int> applies_to;

  LossSpec(double loss, std::vector<int> modes);
  // Coupler angle with l = sin^2(angle).
  double angle() const;
};

// 2x2 Heisenberg matrix of the directional coupler,
//   (b_i, b_j)^T = [[sin t, cos t], [cos t, -sin t]] (a_i, a_j)^T.
Eigen::Matrix2d coupler_mode_matrix(double theta);

// Directional coupler on modes i, j. The unitary is the passive exponential
// followed by a pi phase on mode j, so that U^dagger a U reproduces
// coupler_mode_matrix(theta) exactly (determinant -1).
ModeOperator beam_splitter(double theta, int i, int j, const FockSpace& space);

// exp((zeta* a^2 - zeta a^dagger^2) / 2) on mode k.
ModeOperator squeeze_single(SqueezeParam zeta, int k, const FockSpace& space);

// exp(zeta* a_m a_n - zeta a_m^dagger a_n^dagger).
ModeOperator squeeze_two(SqueezeParam zeta, int m, int n, const FockSpace& space);

// Coupler cascade B_{N-1,N}(asin(1/sqrt 2)) ... B_{1,2}(asin(1/sqrt N)) on
// modes 0..N-1 (B_{1,2} acts first).
ModeOperator symmetric_splitter(int num_modes, const FockSpace& space);

// Real orthogonal N x N matrix M with U^dagger a U = M a for the splitter
// above. Row k of M^T expresses input mode k through the output modes; the
// first row of M^T is uniform 1/sqrt(N).
Eigen::MatrixXd splitter_mode_matrix(int num_modes);

// Kraus operators of single-mode pure loss at cutoff d, read off from a
// coupler between the mode and a vacuum ancilla: K_j = <j|_anc U |0>_anc.
std::vector<Matrix> loss_kraus(double l, int cutoff);

// Couple each listed mode to a fresh vacuum ancilla through a coupler with
// loss probability l and trace the ancilla. Output is mixed.
QuantumState loss_channel(const QuantumState& state, const LossSpec& spec);

struct Subtracted {
  QuantumState state;
  // <b^dagger b> of the (normalized) input, proportional to the click
  // probability of a weak tap.
  double success_weight;
};

// b |psi> (or b rho b^dagger), renormalized.
Subtracted subtract_photon(const QuantumState& state, int mode);

// Apply a single-mode matrix to one mode of a state, renormalizing; the
// returned weight is the squared norm (trace) of the unnormalized result.
Subtracted apply_mode_operator(const QuantumState& state, const Matrix& op, int mode);

}  // namespace photsub

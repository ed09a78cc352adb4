#pragma once

// CV GHZ state families and their composite-mode reduction.
//
// Direct constructions live on N physical modes (mode 0 is the subtracted
// mode A). The composite construction groups the N-1 remaining modes into
// B (n modes, same side as A), C (m modes) and D (p modes), and represents
// each group by its normalized uniform superposition. Because the state is
// symmetric, the orthogonal complement of every group stays in vacuum, and a
// rotation inside one group is local to one side of any splitting that keeps
// the group together; partial traces and transposes over composite modes
// therefore give the same spectra as over the physical modes they stand for.

#include <array>
#include <optional>
#include <vector>

#include "photsub/fock.hpp"
#include "photsub/optics.hpp"

namespace photsub {

// (N, r, k): r1 = r/(k+1) squeezes input mode 0 as S(-r1); r2 = k r/(k+1)
// squeezes every other input mode as S(+r2).
struct GhzParams {
  int modes = 2;
  double r = 0.0;
  double k = 0.0;

  double r1() const { return r / (k + 1.0); }
  double r2() const { return k * r / (k + 1.0); }
  // Local squeezing that maps psi0(N, -r) onto phi0(N, r1, r2).
  double local_squeezing() const { return r2(); }

  static GhzParams from_sources(int modes, double r1, double r2);
  void validate() const;
};

enum class Composite { A = 0, B = 1, C = 2, D = 3 };

char composite_name(Composite c);

// Group sizes excluding A: N = n + m + p + 1.
struct CompositeGrouping {
  int n = 0;
  int m = 1;
  int p = 0;

  int total_modes() const { return n + m + p + 1; }
  int size(Composite c) const;
  void validate() const;
  void validate(int modes) const;
  // Physical mode indices represented by a composite: A = {0}, then B, C, D
  // in consecutive blocks.
  std::vector<int> physical_modes(Composite c) const;

  friend bool operator==(const CompositeGrouping&, const CompositeGrouping&) = default;
};

// Rotated: the state is psi0(N, -r) and the local squeezers of phi0 are folded
// into the subtraction operator. Physical: the local squeezers are applied
// to the state itself (needed once loss acts, since loss does not commute
// with squeezing).
enum class Frame { Rotated, Physical };

struct CompositeState {
  QuantumState state;
  GhzParams params;
  CompositeGrouping grouping;
  Frame frame = Frame::Rotated;
  // Mode index of A, B, C, D inside `state`, -1 for empty groups.
  std::array<int, 4> slot{-1, -1, -1, -1};

  int mode_of(Composite c) const { return slot[static_cast<std::size_t>(c)]; }
  bool has(Composite c) const { return mode_of(c) >= 0; }
  std::vector<Composite> present() const;
};

struct CutoffPolicy {
  int initial = 8;
  int step = 2;
  int ceiling = 40;
  double tail_tolerance = 1e-10;
};

// exp(1/2 sum_ij Z_ij (b_i b_j - b_i^dag b_j^dag)) |vac> for real symmetric Z,
// evaluated in normal-ordered form det(cosh Z)^(-1/2) exp(-1/2 b^dag tanh(Z) b^dag)|vac>.
// Only raising operators appear, so the retained amplitudes are the exact
// projection of the untruncated state; weight() is the retained probability.
QuantumState gaussian_pure_state(const Eigen::MatrixXd& squeezing, const FockSpace& space);

// U(N) S_1(zeta) |vac>, gate by gate. Throws CutoffTooSmall when the tail
// mass exceeds `tail_tolerance`.
QuantumState prepare_psi0_direct(int modes, SqueezeParam zeta, const FockSpace& space,
                                 double tail_tolerance = 1e-10);

// U(N) S_1(-r1) S_2(r2) ... S_N(r2) |vac>, gate by gate.
QuantumState prepare_phi0_direct(const GhzParams& params, const FockSpace& space,
                                 double tail_tolerance = 1e-10);

// prod_l S_l(k r/(k+1)) over the N physical modes.
ModeOperator local_equiv_unitary(const GhzParams& params, const FockSpace& space);

// The two pieces whose commutation isolates the local squeezers:
// x sum_i (b_i^2 - h.c.) and y sum_{i>j} (b_i b_j - h.c.), on modes 0..N-1.
Matrix local_square_generator(int modes, double x, const FockSpace& space);
Matrix pair_product_generator(int modes, double y, const FockSpace& space);

// Real symmetric squeezing matrix of the composite state, one row per
// present composite (A, B, C, D order, empty groups dropped).
Eigen::MatrixXd composite_squeezing_matrix(const GhzParams& params, const CompositeGrouping& grouping,
                                           Frame frame);

// Dense anti-Hermitian generator of the same state, for cross-checks
// against expm_unitary on small spaces.
Matrix composite_generator(const GhzParams& params, const CompositeGrouping& grouping, Frame frame,
                           const FockSpace& space);

// Composite state with explicit per-composite cutoffs (one per present group).
CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping,
                                 const std::vector<int>& cutoffs, Frame frame = Frame::Rotated,
                                 double tail_tolerance = 1e-10);
// Uniform cutoff.
CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping, int cutoff,
                                 Frame frame = Frame::Rotated, double tail_tolerance = 1e-10);
// Per-composite cutoffs raised by policy.step until every mode passes the
// tail guard; CutoffTooSmall once a cutoff would pass policy.ceiling.
CompositeState prepare_composite(const GhzParams& params, const CompositeGrouping& grouping,
                                 const CutoffPolicy& policy, Frame frame = Frame::Rotated);

struct CompositeSubtracted {
  CompositeState state;
  double success_weight;
};

// cosh(s) b - sinh(s) b^dag on one mode. The mode is first padded by one
// level so that b^dag does not drop the image of the top retained level.
Subtracted apply_rotated_subtraction(const QuantumState& state, int mode, double s);

// Rotated frame: applies cosh(s) b_A - sinh(s) b_A^dag with s = k r/(k+1).
// Physical frame: plain b_A. The tail guard is re-checked on the result.
CompositeSubtracted subtract_composite(const CompositeState& state, double tail_tolerance = 1e-10);

// Uniform loss l on every composite mode. Requires the physical frame unless
// the local squeezing vanishes.
CompositeState loss_composite(const CompositeState& state, double l);

}  // namespace photsub

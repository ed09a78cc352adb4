#pragma once

// Logarithmic negativity, gain and bipartite splittings.

#include <string>
#include <vector>

#include "photsub/fock.hpp"
#include "photsub/ghz.hpp"

namespace photsub {

// Mode indices refer to the state's own space. side_a, side_b and traced are
// disjoint and together cover every mode.
struct SplittingSpec {
  std::vector<int> side_a;
  std::vector<int> side_b;
  std::vector<int> traced;
  std::string label;

  // Throws InvalidPartition.
  void validate(int num_modes) const;
};

// Symmetry class of a splitting of a mode-symmetric state in which mode 0
// (A) is singled out. Normally A and n further modes (B) face m modes (C)
// with p modes (D) traced out. With a_traced set, A and B are traced and C
// faces D.
struct SplittingClass {
  int n = 0;
  int m = 1;
  int p = 0;
  bool a_traced = false;

  int total_modes() const { return n + m + p + 1; }
  CompositeGrouping grouping() const { return {n, m, p}; }
  // e.g. "(AB)_{1/2}-C_{1/2}", "Tr(D_{1/4})(AB)_{1/4}-C_{1/2}",
  // "Tr((AB)_{1/2})C_{1/4}-D_{1/4}".
  std::string label() const;
  void validate() const;

  friend bool operator==(const SplittingClass&, const SplittingClass&) = default;
};

// Class representative on physical modes: A = 0, then B, C, D blocks.
SplittingSpec physical_splitting(const SplittingClass& cls);
// The same splitting on the modes of a composite state with cls.grouping().
SplittingSpec composite_splitting(const SplittingClass& cls, const CompositeState& state);
SplittingClass classify(const SplittingSpec& spec, int num_modes);

// Classes tracked in sweeps. N divisible by 4: the eight four-party classes
// (quarter and half splittings, one or two quarters traced). Other even N:
// the half splitting. Odd N: the two near-half splittings.
std::vector<SplittingClass> canonical_classes(int num_modes);

// log2 of the trace norm of the partial transpose after tracing `traced`.
// Pure states with nothing traced go through the Schmidt coefficients.
// Results in [-1e-9, 0) are clamped to 0.
double log_negativity(const QuantumState& state, const SplittingSpec& splitting);
// Always the partial-transpose eigenvalue route; not clamped.
double log_negativity_eigen(const QuantumState& state, const SplittingSpec& splitting);
// 2 log2(sum of Schmidt coefficients); pure states, nothing traced.
double log_negativity_schmidt(const QuantumState& state, const SplittingSpec& splitting);

struct Gain {
  double value = 0.0;
  bool defined = false;
};

// (e_after - e_before) / e_before; undefined when e_before <= 1e-12.
Gain gain(double e_after, double e_before);

struct EntanglementReport {
  SplittingSpec splitting;
  double e_before = 0.0;
  double e_after = 0.0;
  Gain gain;
  GhzParams params;
  double loss = 0.0;
  double success_weight = 0.0;
};

EntanglementReport make_report(SplittingSpec splitting, double e_before, double e_after, const GhzParams& params,
                               double loss, double success_weight);

// All bipartitions of 0..N-1 with up to max_traced modes traced. Labels are
// 1-based, e.g. "12-34", "Tr(1)2-34". With reduce_symmetry, one
// representative per SplittingClass, labelled by the class.
std::vector<SplittingSpec> enumerate_splittings(int num_modes, int max_traced, bool reduce_symmetry = false);

struct HierarchyViolation {
  std::string outer;
  std::string inner;
  // "before" or "after".
  std::string stage;
  double outer_value = 0.0;
  double inner_value = 0.0;
};

// For every pair where `inner` traces exactly one more mode than `outer` and
// otherwise keeps its sides, checks E(outer) >= E(inner) - slack on both
// e_before and e_after.
std::vector<HierarchyViolation> hierarchy_check(const std::vector<EntanglementReport>& reports,
                                                double slack = 1e-8);

}  // namespace photsub

#pragma once

// Sweep drivers over (k, N, l, r), the composite and direct evaluation
// pipelines behind them, and optimum / threshold post-processing.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "photsub/entanglement.hpp"
#include "photsub/ghz.hpp"

namespace photsub {

inline constexpr const char* kVersion = "0.1.0";

// One (params, splitting, loss) point.
struct Evaluation {
  double e_before = 0.0;
  double e_after = 0.0;
  Gain gain;
  double success_weight = 0.0;
  // Largest per-mode cutoff used.
  int cutoff = 0;
};

// Composite-mode pipeline. The physical frame is the default: at equal tail
// mass it converges much faster in the cutoff of A than the rotated frame.
// The rotated frame is accepted for lossless points. Modes traced by the splitting
// (other than A) are traced before loss, loss is applied to every remaining
// composite mode, then the photon is subtracted from A. Cutoffs start at
// policy.initial and grow per mode until the prepared and the subtracted
// state both pass the tail guard; CutoffTooSmall past policy.ceiling.
// Lossless e_before is taken from the k = 0 state, which differs from the
// physical one by local squeezers only.
Evaluation evaluate_composite(const GhzParams& params, const SplittingClass& cls, double loss,
                              const CutoffPolicy& policy = {}, Frame frame = Frame::Physical);

struct DirectOptions {
  // Uniform cutoff for the gate-by-gate preparation. Mode 0 carries the full
  // squeezing before the splitter, so this must be well above the analysis
  // cutoffs.
  int working_cutoff = 26;
  double tail_tolerance = 1e-10;
  // Lossy points keep a dense density matrix on the untraced modes. When its
  // dimension would pass this budget, the untraced modes other than 0 are
  // cut back one level at a time (largest first, not below `floor_cutoff`),
  // then mode 0. This relaxes the tail guard for those points only.
  std::size_t mixed_budget = 5200;
  int floor_cutoff = 8;
};

// Full-tensor oracle on N <= 4 physical modes: prepare_phi0_direct at the
// working cutoff, project each mode onto the smallest cutoff that passes the
// tail guard (before and after subtraction), then trace, loss on the kept
// modes, subtract_photon on mode 0, and measure.
Evaluation evaluate_direct(const GhzParams& params, const SplittingSpec& splitting, double loss,
                           const DirectOptions& options = {});
// The two halves of the above, so one preparation can serve many splittings.
QuantumState prepare_direct_state(const GhzParams& params, const DirectOptions& options = {});
Evaluation evaluate_direct(const QuantumState& prepared, const SplittingSpec& splitting, double loss,
                           const DirectOptions& options = {});

enum class SweepFamily { K, N, Loss, R };

const char* family_name(SweepFamily family);
SweepFamily parse_family(const std::string& name);

struct SweepConfig {
  SweepFamily family = SweepFamily::K;
  GhzParams params{4, 0.2, 0.0};
  // Values of the swept parameter: k, N, l or r. Strictly increasing.
  std::vector<double> grid;
  // Secondary k values for N, loss and r sweeps; empty means {params.k}.
  std::vector<double> k_values;
  // Fixed loss for k, N and r sweeps.
  double loss = 0.0;
  // Splitting class labels or "A+B:n|C:m|trace:p" forms; empty means every
  // canonical class of each N.
  std::vector<std::string> splittings;
  CutoffPolicy policy;
  int jobs = 1;

  void validate() const;
};

struct SweepRow {
  std::string grid_param;
  double grid_value = 0.0;
  double k = 0.0;
  std::string splitting;
  bool available = true;
  std::string note;
  Evaluation eval;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
};

// Default grids.
std::vector<double> linear_grid(double start, double stop, double step);
std::vector<double> default_grid(SweepFamily family);

// Splitting text to class at a given N. Accepts class labels such as
// "(AB)_{1/2}-C_{1/2}" and the count form "A+B:n|C:m|trace:p" (D traced) or
// "trace:A+B:n|C:m|D:p" (A and B traced).
SplittingClass parse_splitting_class(const std::string& text, int num_modes);
// Explicit index form "1,2:3,4" (1-based; unlisted modes are traced).
SplittingSpec parse_splitting_indices(const std::string& text, int num_modes);

std::vector<SplittingClass> resolve_classes(const std::vector<std::string>& splittings, int num_modes);

SweepResult run_k_sweep(const SweepConfig& config);
// Grid holds N; every requested class must exist at every N.
SweepResult run_n_sweep(const SweepConfig& config);
SweepResult run_loss_sweep(const SweepConfig& config);
// Points whose cutoff would pass the ceiling become unavailable rows.
SweepResult run_r_sweep(const SweepConfig& config);
SweepResult run_sweep(const SweepConfig& config);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SplittingOptimum {
  std::string splitting;
  double k = 0.0;
  double argmax = 0.0;
  double max_gain = 0.0;
};

struct BeatK0 {
  std::string splitting;
  std::vector<Interval> intervals;
};

enum class OptimumCriterion { MaxGain, AllBeatK0 };

struct OptimumReport {
  OptimumCriterion criterion = OptimumCriterion::MaxGain;
  std::vector<SplittingOptimum> max_gain;
  // Per splitting: k ranges where gain exceeds the k = 0 gain.
  std::vector<BeatK0> beat_k0;
  // Where every splitting does; empty when there is no such k.
  std::vector<Interval> all_beat_k0;
};

// k-sweep post-processing. Interval edges are linear zero crossings of
// gain(k) - gain(0) between adjacent grid points.
OptimumReport locate_optima(const SweepResult& result, OptimumCriterion criterion);

struct Threshold {
  double k = 0.0;
  // Splitting label, or "all" for the pointwise minimum over splittings.
  std::string splitting;
  // First loss at which the gain stops being positive; empty if it never
  // does on the grid.
  std::optional<double> loss;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

std::vector<Threshold> loss_thresholds(const SweepResult& result);

inline constexpr const char* kCsvHeader =
    "grid_param,grid_value,splitting,e_before,e_after,gain,success_weight,cutoff";

void write_csv(const SweepResult& result, std::ostream& out);
std::string to_csv(const SweepResult& result);
// JSON document: config echo, provenance and the rows.
std::string to_json(const SweepResult& result, const std::string& timestamp);

// One comparison of the composite pipeline against the direct oracle.
struct OracleCheck {
  int modes = 0;
  double k = 0.0;
  double loss = 0.0;
  std::string splitting;
  double composite_before = 0.0;
  double direct_before = 0.0;
  double composite_after = 0.0;
  double direct_after = 0.0;
  double max_error = 0.0;
  bool pass = false;
};

// Every splitting class of N in `modes` (up to N-2 traced), every k, every
// loss. r is fixed.
std::vector<OracleCheck> run_oracle_suite(const std::vector<int>& modes, const std::vector<double>& ks,
                                          const std::vector<double>& losses, double r = 0.2,
                                          double tolerance = 1e-6);

}  // namespace photsub

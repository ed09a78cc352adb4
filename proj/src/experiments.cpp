#include "photsub/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace photsub {

namespace {

using Json = nlohmann::ordered_json;

void check_loss(double l) {
  if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::Parameter, "loss l=" + std::to_string(l) + " outside [0,1]");
}

int index_in(const std::vector<int>& v, int x) {
  return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
}

std::vector<int> remap(const std::vector<int>& modes, const std::vector<int>& keep) {
  std::vector<int> out;
  for (int m : modes) {
    if (std::find(keep.begin(), keep.end(), m) != keep.end()) out.push_back(index_in(keep, m));
  }
  return out;
}

struct Reduced {
  QuantumState state;
  SplittingSpec splitting;
  int a_mode;
  std::vector<int> keep;
};

// Trace every traced mode except A (tracing commutes with loss elsewhere and
// with the subtraction on A), then apply the loss.
Reduced reduce_and_lose(const QuantumState& state, const SplittingSpec& split, int a_mode, double loss) {
  std::vector<int> keep;
  for (int mode = 0; mode < state.space().num_modes(); ++mode) {
    const bool traced = std::find(split.traced.begin(), split.traced.end(), mode) != split.traced.end();
    if (mode == a_mode || !traced) keep.push_back(mode);
  }
  QuantumState rho = static_cast<int>(keep.size()) == state.space().num_modes() ? state : partial_trace(state, keep);
  SplittingSpec local{remap(split.side_a, keep), remap(split.side_b, keep), remap(split.traced, keep), split.label};
  if (loss > 0.0) {
    std::vector<int> all(keep.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    rho = loss_channel(rho, LossSpec(loss, all));
  }
  return {std::move(rho), std::move(local), index_in(keep, a_mode), std::move(keep)};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_k(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", k);
  return buf;
}

struct WorkItem {
  std::string grid_param;
  double grid_value;
  GhzParams params;
  SplittingClass cls;
  double loss;
};

std::vector<SweepRow> evaluate_all(const std::vector<WorkItem>& items, const CutoffPolicy& policy, int jobs) {
  std::vector<SweepRow> rows(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const WorkItem& item = items[i];
      SweepRow& row = rows[i];
      row.grid_param = item.grid_param;
      row.grid_value = item.grid_value;
      row.k = item.params.k;
      row.splitting = item.cls.label();
      try {
        row.eval = evaluate_composite(item.params, item.cls, item.loss, policy);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CutoffTooSmall && e.kind() != ErrorKind::NoPhoton) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
        row.available = false;
        row.note = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<double> k_list(const SweepConfig& config) {
  return config.k_values.empty() ? std::vector<double>{config.params.k} : config.k_values;
}

void expect_family(const SweepConfig& config, SweepFamily family) {
  config.validate();
  if (config.family != family) {
    throw Error(ErrorKind::Parameter, std::string("expected a ") + family_name(family) + " config, got " +
                                          family_name(config.family));
  }
}

double lerp_zero(double x0, double y0, double x1, double y1) {
  if (y0 == y1) return x0;
  return x0 + (x1 - x0) * y0 / (y0 - y1);
}

// Maximal runs where y > 0, with interpolated edges.
std::vector<Interval> positive_runs(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<Interval> out;
  bool open = false;
  double lo = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool pos = y[i] > 0.0;
    if (pos && !open) {
      lo = i == 0 ? x[0] : lerp_zero(x[i - 1], y[i - 1], x[i], y[i]);
      open = true;
    } else if (!pos && open) {
      out.push_back({lo, lerp_zero(x[i - 1], y[i - 1], x[i], y[i])});
      open = false;
    }
  }
  if (open) out.push_back({lo, x.back()});
  return out;
}

Json config_json(const SweepConfig& c) {
  Json j;
  j["family"] = family_name(c.family);
  j["modes"] = c.params.modes;
  j["r"] = c.params.r;
  j["k"] = c.params.k;
  j["grid"] = c.grid;
  j["k_values"] = c.k_values;
  j["loss"] = c.loss;
  j["splittings"] = c.splittings;
  j["cutoff_policy"] = {{"initial", c.policy.initial},
                        {"step", c.policy.step},
                        {"ceiling", c.policy.ceiling},
                        {"tail_tolerance", c.policy.tail_tolerance}};
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace

namespace {

// with_after = false stops after e_before (gain and success weight unset).
Evaluation composite_pipeline(const GhzParams& params, const SplittingClass& cls, double loss,
                              const CutoffPolicy& policy, Frame frame, bool with_after) {
  params.validate();
  cls.validate();
  check_loss(loss);
  if (cls.total_modes() != params.modes) {
    throw Error(ErrorKind::InvalidPartition, "splitting " + cls.label() + " covers " +
                                                 std::to_string(cls.total_modes()) + " modes, N=" +
                                                 std::to_string(params.modes));
  }
  if (frame == Frame::Rotated && loss > 0.0 && params.local_squeezing() > 0.0) {
    throw Error(ErrorKind::ContractViolation, "lossy points need the physical frame when k > 0");
  }
  const auto present = static_cast<std::size_t>(composite_squeezing_matrix(params, cls.grouping(), frame).rows());
  std::vector<int> cutoffs(present, policy.initial);
  const auto raise = [&](int mode) {
    int& c = cutoffs[static_cast<std::size_t>(mode)];
    c += policy.step;
    if (c > policy.ceiling) {
      throw Error(ErrorKind::CutoffTooSmall, "composite mode " + std::to_string(mode) + " of " + cls.label() +
                                                 " needs a cutoff above " + std::to_string(policy.ceiling) +
                                                 " (r=" + std::to_string(params.r) + ")");
    }
  };
  for (;;) {
    const CompositeState st = prepare_composite(params, cls.grouping(), cutoffs, frame, 1.0);
    bool retry = false;
    for (int mode = 0; mode < static_cast<int>(present); ++mode) {
      if (st.state.tail_mass(mode) > policy.tail_tolerance) {
        raise(mode);
        retry = true;
      }
    }
    if (retry) continue;

    const int a = st.mode_of(Composite::A);
    Reduced red = reduce_and_lose(st.state, composite_splitting(cls, st), a, loss);
    const double e_before = log_negativity(red.state, red.splitting);
    if (!with_after) return {e_before, 0.0, {}, 0.0, *std::max_element(cutoffs.begin(), cutoffs.end())};

    const Subtracted sub = frame == Frame::Rotated
                               ? apply_rotated_subtraction(red.state, red.a_mode, params.local_squeezing())
                               : subtract_photon(red.state, red.a_mode);
    for (std::size_t i = 0; i < red.keep.size(); ++i) {
      if (sub.state.tail_mass(static_cast<int>(i)) > policy.tail_tolerance) {
        raise(red.keep[i]);
        retry = true;
      }
    }
    if (retry) continue;

    const double e_after = log_negativity(sub.state, red.splitting);
    return {e_before, e_after, gain(e_after, e_before), sub.success_weight,
            *std::max_element(cutoffs.begin(), cutoffs.end())};
  }
}

}  // namespace

Evaluation evaluate_composite(const GhzParams& params, const SplittingClass& cls, double loss,
                              const CutoffPolicy& policy, Frame frame) {
  Evaluation out = composite_pipeline(params, cls, loss, policy, frame, true);
  if (loss == 0.0 && frame == Frame::Physical) {
    // Without loss the state before subtraction is psi0(N, -r) up to local
    // squeezers. Measuring it there keeps the k-dependent truncation error of
    // the physical frame out of e_before.
    const GhzParams bare{params.modes, params.r, 0.0};
    out.e_before = composite_pipeline(bare, cls, 0.0, policy, Frame::Rotated, false).e_before;
    out.gain = gain(out.e_after, out.e_before);
  }
  return out;
}

QuantumState prepare_direct_state(const GhzParams& params, const DirectOptions& options) {
  params.validate();
  if (params.modes > 4) throw Error(ErrorKind::Shape, "direct pipeline is limited to N <= 4");
  const int n = params.modes;
  const FockSpace work(options.working_cutoff, n);
  const QuantumState phi = prepare_phi0_direct(params, work, options.tail_tolerance);
  const Subtracted probe = subtract_photon(phi, 0);
  std::vector<int> cutoffs(static_cast<std::size_t>(n));
  for (int mode = 0; mode < n; ++mode) {
    const RealVector p0 = phi.populations(mode);
    const RealVector p1 = probe.state.populations(mode);
    int c = 2;
    for (; c < options.working_cutoff; ++c) {
      const auto count = p0.size() - static_cast<Eigen::Index>(c - 2);
      if (std::max(p0.tail(count).sum(), p1.tail(count).sum()) <= options.tail_tolerance) break;
    }
    cutoffs[static_cast<std::size_t>(mode)] = c;
  }
  return restrict_cutoffs(phi, FockSpace(cutoffs));
}

Evaluation evaluate_direct(const QuantumState& prepared, const SplittingSpec& splitting, double loss,
                           const DirectOptions& options) {
  check_loss(loss);
  splitting.validate(prepared.space().num_modes());
  QuantumState state = prepared;
  if (loss > 0.0) {
    std::vector<int> cutoffs = prepared.space().cutoffs();
    const auto kept = [&](int mode) {
      return mode == 0 || std::find(splitting.traced.begin(), splitting.traced.end(), mode) == splitting.traced.end();
    };
    const auto kept_dim = [&] {
      std::size_t d = 1;
      for (int mode = 0; mode < static_cast<int>(cutoffs.size()); ++mode) {
        if (kept(mode)) d *= static_cast<std::size_t>(cutoffs[static_cast<std::size_t>(mode)]);
      }
      return d;
    };
    while (kept_dim() > options.mixed_budget) {
      int pick = -1;
      for (int mode = 1; mode < static_cast<int>(cutoffs.size()); ++mode) {
        const int c = cutoffs[static_cast<std::size_t>(mode)];
        if (kept(mode) && c > options.floor_cutoff && (pick < 0 || c > cutoffs[static_cast<std::size_t>(pick)])) {
          pick = mode;
        }
      }
      if (pick < 0 && cutoffs[0] > options.floor_cutoff) pick = 0;
      if (pick < 0) break;
      --cutoffs[static_cast<std::size_t>(pick)];
    }
    if (cutoffs != prepared.space().cutoffs()) state = restrict_cutoffs(prepared, FockSpace(cutoffs));
  }
  Reduced red = reduce_and_lose(state, splitting, 0, loss);
  const double e_before = log_negativity(red.state, red.splitting);
  const Subtracted sub = subtract_photon(red.state, red.a_mode);
  const double e_after = log_negativity(sub.state, red.splitting);
  return {e_before, e_after, gain(e_after, e_before), sub.success_weight, state.space().cutoff()};
}

Evaluation evaluate_direct(const GhzParams& params, const SplittingSpec& splitting, double loss,
                           const DirectOptions& options) {
  splitting.validate(params.modes);
  return evaluate_direct(prepare_direct_state(params, options), splitting, loss, options);
}

const char* family_name(SweepFamily family) {
  switch (family) {
    case SweepFamily::K: return "k_sweep";
    case SweepFamily::N: return "n_sweep";
    case SweepFamily::Loss: return "loss_sweep";
    case SweepFamily::R: return "r_sweep";
  }
  return "?";
}

SweepFamily parse_family(const std::string& name) {
  for (SweepFamily f : {SweepFamily::K, SweepFamily::N, SweepFamily::Loss, SweepFamily::R}) {
    if (name == family_name(f)) return f;
  }
  throw Error(ErrorKind::Parameter, "unknown sweep family '" + name + "'");
}

void SweepConfig::validate() const {
  params.validate();
  if (grid.empty()) throw Error(ErrorKind::Grid, "grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::Grid, "grid must be strictly increasing");
  }
  check_loss(loss);
  for (double k : k_values) {
    if (!std::isfinite(k) || k < 0.0) throw Error(ErrorKind::Parameter, "k values must be >= 0");
  }
  if (jobs < 1) throw Error(ErrorKind::Parameter, "jobs must be >= 1");
  if (policy.initial < 2 || policy.step < 1 || policy.ceiling < policy.initial) {
    throw Error(ErrorKind::Parameter, "invalid cutoff policy");
  }
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw Error(ErrorKind::Grid, "need step > 0 and stop >= start");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    // Round to the step's decimal grid so repeated runs print the same values.
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e10) / 1e10);
  }
  return out;
}

std::vector<double> default_grid(SweepFamily family) {
  switch (family) {
    case SweepFamily::K: {
      auto g = linear_grid(0.0, 2.0, 0.02);
      for (double extra : {5.0, 10.0, 50.0, 100.0}) g.push_back(extra);
      return g;
    }
    case SweepFamily::N: return {4, 8, 12, 16};
    case SweepFamily::Loss: return linear_grid(0.0, 0.95, 0.01);
    case SweepFamily::R: return linear_grid(0.01, 0.5, 0.01);
  }
  return {};
}

SplittingClass parse_splitting_class(const std::string& text, int num_modes) {
  const auto fail = [&](const std::string& why) {
    return Error(ErrorKind::InvalidPartition, "splitting '" + text + "': " + why);
  };
  SplittingClass cls;
  if (text.rfind("(AB)", 0) == 0 || text.rfind("Tr(", 0) == 0) {
    static const std::regex frac(R"(_\{(\d+)/(\d+)\})");
    std::vector<int> parts;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), frac); it != std::sregex_iterator(); ++it) {
      const int num = std::stoi((*it)[1]);
      const int den = std::stoi((*it)[2]);
      if (den == 0 || (num * num_modes) % den != 0) {
        throw Error(ErrorKind::Grid, "splitting " + text + " does not exist at N=" + std::to_string(num_modes));
      }
      parts.push_back(num * num_modes / den);
    }
    static const std::regex plain(R"(\(AB\)_\{\d+/\d+\}-C_\{\d+/\d+\})");
    static const std::regex traced_d(R"(Tr\(D_\{\d+/\d+\}\)\(AB\)_\{\d+/\d+\}-C_\{\d+/\d+\})");
    static const std::regex traced_ab(R"(Tr\(\(AB\)_\{\d+/\d+\}\)C_\{\d+/\d+\}-D_\{\d+/\d+\})");
    if (std::regex_match(text, plain)) {
      cls = {parts[0] - 1, parts[1], num_modes - parts[0] - parts[1], false};
      if (cls.p != 0) throw fail("fractions do not sum to one");
    } else if (std::regex_match(text, traced_d)) {
      cls = {parts[1] - 1, parts[2], parts[0], false};
    } else if (std::regex_match(text, traced_ab)) {
      cls = {parts[0] - 1, std::min(parts[1], parts[2]), std::max(parts[1], parts[2]), true};
    } else {
      throw fail("unrecognized label");
    }
  } else {
    cls = {-1, -1, 0, false};
    std::stringstream in(text);
    std::string tok;
    const auto count = [&](const std::string& t, std::size_t at) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(t.substr(at), &used);
        if (at + used != t.size() || v < 0) throw fail("bad count in '" + t + "'");
        return v;
      } catch (const std::logic_error&) {
        throw fail("bad count in '" + t + "'");
      }
    };
    while (std::getline(in, tok, '|')) {
      if (tok == "A" || tok == "trace:A") {
        cls.n = 0;
        cls.a_traced = tok != "A";
      } else if (tok.rfind("A+B:", 0) == 0) {
        cls.n = count(tok, 4);
      } else if (tok.rfind("trace:A+B:", 0) == 0) {
        cls.n = count(tok, 10);
        cls.a_traced = true;
      } else if (tok.rfind("C:", 0) == 0) {
        cls.m = count(tok, 2);
      } else if (tok.rfind("trace:", 0) == 0 || tok.rfind("D:", 0) == 0) {
        cls.p = count(tok, tok[0] == 'D' ? 2 : 6);
      } else {
        throw fail("unknown part '" + tok + "'");
      }
    }
    if (cls.n < 0 || cls.m < 0) throw fail("needs an A part and a C part");
    if (cls.a_traced && cls.m > cls.p) std::swap(cls.m, cls.p);
  }
  cls.validate();
  if (cls.total_modes() != num_modes) {
    throw fail("covers " + std::to_string(cls.total_modes()) + " modes, N=" + std::to_string(num_modes));
  }
  return cls;
}

SplittingSpec parse_splitting_indices(const std::string& text, int num_modes) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos) {
    throw Error(ErrorKind::InvalidPartition, "splitting '" + text + "' must look like 1,2:3,4");
  }
  const auto parse_side = [&](const std::string& part) {
    std::vector<int> modes;
    std::stringstream in(part);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        if (v < 1 || v > num_modes) {
          throw Error(ErrorKind::InvalidPartition, "mode " + tok + " in splitting '" + text + "' is outside 1.." +
                                                       std::to_string(num_modes));
        }
        modes.push_back(v - 1);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidPartition, "bad mode '" + tok + "' in splitting '" + text + "'");
      }
    }
    return modes;
  };
  SplittingSpec spec{parse_side(text.substr(0, colon)), parse_side(text.substr(colon + 1)), {}, text};
  for (int mode = 0; mode < num_modes; ++mode) {
    if (std::find(spec.side_a.begin(), spec.side_a.end(), mode) == spec.side_a.end() &&
        std::find(spec.side_b.begin(), spec.side_b.end(), mode) == spec.side_b.end()) {
      spec.traced.push_back(mode);
    }
  }
  spec.validate(num_modes);
  return spec;
}

std::vector<SplittingClass> resolve_classes(const std::vector<std::string>& splittings, int num_modes) {
  if (splittings.empty()) return canonical_classes(num_modes);
  std::vector<SplittingClass> out;
  for (const auto& s : splittings) out.push_back(parse_splitting_class(s, num_modes));
  return out;
}

SweepResult run_k_sweep(const SweepConfig& config) {
  expect_family(config, SweepFamily::K);
  const auto classes = resolve_classes(config.splittings, config.params.modes);
  std::vector<WorkItem> items;
  for (double k : config.grid) {
    GhzParams p = config.params;
    p.k = k;
    for (const auto& cls : classes) items.push_back({"k", k, p, cls, config.loss});
  }
  return {config, evaluate_all(items, config.policy, config.jobs)};
}

SweepResult run_n_sweep(const SweepConfig& config) {
  expect_family(config, SweepFamily::N);
  std::vector<WorkItem> items;
  for (double k : k_list(config)) {
    for (double nv : config.grid) {
      const int n = static_cast<int>(nv);
      if (nv != n || n < 2) throw Error(ErrorKind::Grid, "N grid values must be integers >= 2");
      GhzParams p = config.params;
      p.modes = n;
      p.k = k;
      for (const auto& cls : resolve_classes(config.splittings, n)) {
        items.push_back({"N|k=" + format_k(k), nv, p, cls, config.loss});
      }
    }
  }
  return {config, evaluate_all(items, config.policy, config.jobs)};
}

SweepResult run_loss_sweep(const SweepConfig& config) {
  expect_family(config, SweepFamily::Loss);
  for (double l : config.grid) check_loss(l);
  const auto classes = resolve_classes(config.splittings, config.params.modes);
  std::vector<WorkItem> items;
  for (double k : k_list(config)) {
    GhzParams p = config.params;
    p.k = k;
    for (double l : config.grid) {
      for (const auto& cls : classes) items.push_back({"l|k=" + format_k(k), l, p, cls, l});
    }
  }
  return {config, evaluate_all(items, config.policy, config.jobs)};
}

SweepResult run_r_sweep(const SweepConfig& config) {
  expect_family(config, SweepFamily::R);
  const auto classes = resolve_classes(config.splittings, config.params.modes);
  std::vector<WorkItem> items;
  for (double k : k_list(config)) {
    for (double r : config.grid) {
      if (!(r > 0.0)) throw Error(ErrorKind::Grid, "r grid values must be positive");
      GhzParams p = config.params;
      p.k = k;
      p.r = r;
      for (const auto& cls : classes) items.push_back({"r|k=" + format_k(k), r, p, cls, config.loss});
    }
  }
  return {config, evaluate_all(items, config.policy, config.jobs)};
}

SweepResult run_sweep(const SweepConfig& config) {
  switch (config.family) {
    case SweepFamily::K: return run_k_sweep(config);
    case SweepFamily::N: return run_n_sweep(config);
    case SweepFamily::Loss: return run_loss_sweep(config);
    case SweepFamily::R: return run_r_sweep(config);
  }
  throw Error(ErrorKind::Parameter, "unknown sweep family");
}

OptimumReport locate_optima(const SweepResult& result, OptimumCriterion criterion) {
  if (result.config.family != SweepFamily::K) throw Error(ErrorKind::Parameter, "optima need a k sweep");
  std::vector<std::string> labels;
  for (const auto& row : result.rows) {
    if (std::find(labels.begin(), labels.end(), row.splitting) == labels.end()) labels.push_back(row.splitting);
  }
  OptimumReport report;
  report.criterion = criterion;
  // Series per splitting over rows with a defined gain, in grid order.
  std::vector<std::vector<double>> xs, ys;
  for (const auto& label : labels) {
    std::vector<double> x, y;
    for (const auto& row : result.rows) {
      if (row.splitting == label && row.available && row.eval.gain.defined) {
        x.push_back(row.grid_value);
        y.push_back(row.eval.gain.value);
      }
    }
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (xs[s].empty()) continue;
    const auto best = static_cast<std::size_t>(std::max_element(ys[s].begin(), ys[s].end()) - ys[s].begin());
    report.max_gain.push_back({labels[s], result.config.params.k, xs[s][best], ys[s][best]});
  }
  if (criterion == OptimumCriterion::MaxGain) return report;
  std::vector<double> common;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (xs[s].empty() || xs[s].front() != 0.0) {
      throw Error(ErrorKind::Grid, "all-splittings-beat-k0 needs a k=0 point for " + labels[s]);
    }
    std::vector<double> diff(ys[s].size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ys[s][i] - ys[s][0];
    report.beat_k0.push_back({labels[s], positive_runs(xs[s], diff)});
  }
  // Pointwise minimum over splittings on the grid points they share.
  std::vector<double> grid = xs.empty() ? std::vector<double>{} : xs[0];
  std::vector<double> worst;
  std::vector<double> kept;
  for (double k : grid) {
    double m = INFINITY;
    bool everywhere = true;
    for (std::size_t s = 0; s < labels.size(); ++s) {
      const auto it = std::find(xs[s].begin(), xs[s].end(), k);
      if (it == xs[s].end()) {
        everywhere = false;
        break;
      }
      m = std::min(m, ys[s][static_cast<std::size_t>(it - xs[s].begin())] - ys[s][0]);
    }
    if (everywhere) {
      kept.push_back(k);
      worst.push_back(m);
    }
  }
  report.all_beat_k0 = positive_runs(kept, worst);
  return report;
}

std::vector<Threshold> loss_thresholds(const SweepResult& result) {
  if (result.config.family != SweepFamily::Loss) throw Error(ErrorKind::Parameter, "thresholds need a loss sweep");
  std::vector<Threshold> out;
  const auto first_drop = [](double k, const std::string& label, const std::vector<double>& x,
                             const std::vector<double>& y) {
    Threshold t{k, label, std::nullopt, 0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (y[i] > 0.0) continue;
      if (i == 0) {
        t.loss = x[0];
        t.bracket_lo = t.bracket_hi = x[0];
      } else {
        t.loss = lerp_zero(x[i - 1], y[i - 1], x[i], y[i]);
        t.bracket_lo = x[i - 1];
        t.bracket_hi = x[i];
      }
      break;
    }
    return t;
  };
  for (double k : k_list(result.config)) {
    std::vector<std::string> labels;
    for (const auto& row : result.rows) {
      if (row.k == k && std::find(labels.begin(), labels.end(), row.splitting) == labels.end()) {
        labels.push_back(row.splitting);
      }
    }
    std::vector<double> grid;
    std::vector<double> worst;
    for (double l : result.config.grid) {
      double m = INFINITY;
      bool complete = true;
      for (const auto& row : result.rows) {
        if (row.k != k || row.grid_value != l) continue;
        if (!row.available || !row.eval.gain.defined) complete = false;
        else m = std::min(m, row.eval.gain.value);
      }
      if (complete) {
        grid.push_back(l);
        worst.push_back(m);
      }
    }
    for (const auto& label : labels) {
      std::vector<double> x, y;
      for (const auto& row : result.rows) {
        if (row.k == k && row.splitting == label && row.available && row.eval.gain.defined) {
          x.push_back(row.grid_value);
          y.push_back(row.eval.gain.value);
        }
      }
      out.push_back(first_drop(k, label, x, y));
    }
    out.push_back(first_drop(k, "all", grid, worst));
  }
  return out;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& row : result.rows) {
    out << row.grid_param << ',' << format_number(row.grid_value) << ",\"" << row.splitting << "\",";
    if (!row.available) {
      out << "NA,NA,NA,NA,NA\n";
      continue;
    }
    const Evaluation& e = row.eval;
    out << format_number(e.e_before) << ',' << format_number(e.e_after) << ','
        << (e.gain.defined ? format_number(e.gain.value) : std::string("NA")) << ','
        << format_number(e.success_weight) << ',' << e.cutoff << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  write_csv(result, out);
  return out.str();
}

std::string to_json(const SweepResult& result, const std::string& timestamp) {
  Json doc;
  doc["config"] = config_json(result.config);
  doc["provenance"] = {{"version", kVersion}, {"generated", timestamp}};
  Json rows = Json::array();
  for (const auto& row : result.rows) {
    Json r;
    r["grid_param"] = row.grid_param;
    r["grid_value"] = row.grid_value;
    r["k"] = row.k;
    r["splitting"] = row.splitting;
    r["available"] = row.available;
    if (row.available) {
      r["e_before"] = row.eval.e_before;
      r["e_after"] = row.eval.e_after;
      r["gain"] = row.eval.gain.defined ? Json(row.eval.gain.value) : Json(nullptr);
      r["success_weight"] = row.eval.success_weight;
      r["cutoff"] = row.eval.cutoff;
    } else {
      r["note"] = row.note;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2);
}

std::vector<OracleCheck> run_oracle_suite(const std::vector<int>& modes, const std::vector<double>& ks,
                                          const std::vector<double>& losses, double r, double tolerance) {
  std::vector<OracleCheck> out;
  for (int n : modes) {
    for (double k : ks) {
      const GhzParams p{n, r, k};
      const QuantumState prepared = prepare_direct_state(p);
      for (const auto& spec : enumerate_splittings(n, n - 2, true)) {
        const SplittingClass cls = classify(spec, n);
        for (double l : losses) {
          const Evaluation c = evaluate_composite(p, cls, l);
          const Evaluation d = evaluate_direct(prepared, spec, l);
          OracleCheck check{n, k, l, cls.label(), c.e_before, d.e_before, c.e_after, d.e_after, 0.0, false};
          check.max_error = std::max(std::abs(c.e_before - d.e_before), std::abs(c.e_after - d.e_after));
          check.pass = check.max_error <= tolerance;
          out.push_back(check);
        }
      }
    }
  }
  return out;
}

}  // namespace photsub

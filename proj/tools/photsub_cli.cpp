// photsub: sweeps and one-off entanglement queries for photon-subtracted
// CV GHZ states.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.
// Precedence: command-line flag > --config file > built-in default.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "photsub/experiments.hpp"

namespace {

using namespace photsub;
using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a sweep-style subcommand can be told on the command line.
struct SweepFlags {
  std::string config_path;
  int modes = 4;
  double r = 0.2;
  std::vector<double> k;
  double loss = 0.0;
  std::vector<std::string> splittings;
  std::vector<double> grid;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  int jobs = 1;
  int cutoff_initial = 8;
  int cutoff_step = 2;
  int cutoff_ceiling = 40;
  double tail_tolerance = 1e-10;
  std::string out;
  std::string json_out;
  bool plot_script = false;
  bool seedless = false;
  std::string criterion = "max-gain";
};

struct Sub {
  CLI::App* app = nullptr;
  SweepFlags flags;
};

void add_sweep_options(Sub& sub, const std::string& lo_name, const std::string& hi_name) {
  CLI::App& a = *sub.app;
  SweepFlags& f = sub.flags;
  a.add_option("--config", f.config_path, "JSON config file (fields as in SweepConfig)");
  a.add_option("--modes,-N", f.modes, "number of modes N");
  a.add_option("--r", f.r, "total squeezing r");
  a.add_option("--k", f.k, "squeezing ratio k (list for sweep-n, sweep-loss, sweep-r)")->delimiter(',');
  a.add_option("--loss", f.loss, "uniform loss l for k, N and r sweeps");
  a.add_option("--splitting", f.splittings,
               "splitting class, e.g. \"(AB)_{1/2}-C_{1/2}\" or \"A+B:1|C:2\" (repeatable; default: canonical set)");
  a.add_option("--grid", f.grid, "explicit grid values (comma separated)")->delimiter(',');
  if (!lo_name.empty()) {
    a.add_option(lo_name, f.lo, "grid start");
    a.add_option(hi_name, f.hi, "grid end");
    a.add_option("--step", f.step, "grid step");
  }
  a.add_option("--jobs,-j", f.jobs, "worker threads");
  a.add_option("--cutoff-initial", f.cutoff_initial, "initial composite cutoff");
  a.add_option("--cutoff-step", f.cutoff_step, "cutoff escalation step");
  a.add_option("--cutoff-ceiling", f.cutoff_ceiling, "largest composite cutoff before a point is unavailable");
  a.add_option("--tail-tol", f.tail_tolerance, "tail-mass guard");
  a.add_option("--out,-o", f.out, "CSV output path (stdout when omitted)");
  a.add_option("--json", f.json_out, "JSON output path (default: next to the CSV)");
  a.add_flag("--emit-plot-script", f.plot_script, "write a matplotlib script next to the CSV");
  a.add_flag("--seedless", f.seedless, "leave the timestamp out of the JSON provenance");
}

bool given(const CLI::App& app, const std::string& name) { return app.count(name) > 0; }

SweepConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  SweepConfig c;
  try {
    if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("modes")) c.params.modes = j.at("modes").get<int>();
    if (j.contains("r")) c.params.r = j.at("r").get<double>();
    if (j.contains("k")) c.params.k = j.at("k").get<double>();
    if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("k_values")) c.k_values = j.at("k_values").get<std::vector<double>>();
    if (j.contains("loss")) c.loss = j.at("loss").get<double>();
    if (j.contains("splittings")) c.splittings = j.at("splittings").get<std::vector<std::string>>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("cutoff_policy")) {
      const Json& p = j.at("cutoff_policy");
      c.policy.initial = p.value("initial", c.policy.initial);
      c.policy.step = p.value("step", c.policy.step);
      c.policy.ceiling = p.value("ceiling", c.policy.ceiling);
      c.policy.tail_tolerance = p.value("tail_tolerance", c.policy.tail_tolerance);
    }
  } catch (const Json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  return c;
}

SweepConfig resolve(const Sub& sub, SweepFamily family, const std::string& lo_name, const std::string& hi_name) {
  const CLI::App& a = *sub.app;
  const SweepFlags& f = sub.flags;
  SweepConfig c;
  bool grid_from_file = false;
  if (!f.config_path.empty()) {
    c = config_from_file(f.config_path);
    if (c.family != family) {
      throw UsageError(std::string("config file is for ") + family_name(c.family) + ", not " + family_name(family));
    }
    grid_from_file = !c.grid.empty();
  }
  c.family = family;
  if (given(a, "--modes")) c.params.modes = f.modes;
  if (given(a, "--r")) c.params.r = f.r;
  if (given(a, "--loss")) c.loss = f.loss;
  if (given(a, "--splitting")) c.splittings = f.splittings;
  if (given(a, "--jobs")) c.jobs = f.jobs;
  if (given(a, "--cutoff-initial")) c.policy.initial = f.cutoff_initial;
  if (given(a, "--cutoff-step")) c.policy.step = f.cutoff_step;
  if (given(a, "--cutoff-ceiling")) c.policy.ceiling = f.cutoff_ceiling;
  if (given(a, "--tail-tol")) c.policy.tail_tolerance = f.tail_tolerance;
  if (given(a, "--k")) {
    if (family == SweepFamily::K) {
      if (f.k.size() != 1) throw UsageError("sweep-k takes a single --k (the base value is ignored by the sweep)");
      c.params.k = f.k.front();
    } else {
      c.k_values = f.k;
    }
  }
  if (given(a, "--grid")) {
    c.grid = f.grid;
  } else if (!lo_name.empty() && (given(a, lo_name) || given(a, hi_name) || given(a, "--step"))) {
    if (!(given(a, lo_name) && given(a, hi_name) && given(a, "--step"))) {
      throw UsageError(lo_name + ", " + hi_name + " and --step go together");
    }
    c.grid = linear_grid(f.lo, f.hi, f.step);
  } else if (!grid_from_file) {
    c.grid = default_grid(family);
  }
  if (family == SweepFamily::Loss && c.k_values.empty()) c.k_values = {0.0, 0.82};
  if (family == SweepFamily::N && c.k_values.empty()) c.k_values = {0.0, 0.24, 0.82};
  if (family == SweepFamily::R && c.k_values.empty()) c.k_values = {0.0, 0.24, 0.82};
  c.validate();
  return c;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

const char* kPlotScript = R"PY(import sys
import pandas as pd
import matplotlib.pyplot as plt

csv = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
df = pd.read_csv(csv, na_values=["NA"])
fig, ax = plt.subplots()
for (param, label), g in df.groupby(["grid_param", "splitting"], sort=False):
    ax.plot(g["grid_value"], g["gain"], marker=".", label=f"{label} [{param}]")
ax.set_xlabel(df["grid_param"].iloc[0].split("|")[0])
ax.set_ylabel("gain")
ax.legend(fontsize="small")
fig.savefig(csv.rsplit(".", 1)[0] + ".png", dpi=150)
)PY";

void write_outputs(const SweepResult& result, const SweepFlags& f) {
  const std::string csv = to_csv(result);
  const std::string json = to_json(result, f.seedless ? "" : timestamp());
  if (f.out.empty()) {
    std::cout << csv;
    if (!f.json_out.empty()) std::ofstream(f.json_out) << json << '\n';
    return;
  }
  std::ofstream(f.out) << csv;
  const std::filesystem::path base(f.out);
  const std::string json_path =
      f.json_out.empty() ? std::filesystem::path(base).replace_extension(".json").string() : f.json_out;
  std::ofstream(json_path) << json << '\n';
  if (f.plot_script) {
    std::string script = kPlotScript;
    script.replace(script.find("{csv}"), 5, base.filename().string());
    const auto plot = std::filesystem::path(base).replace_extension("").string() + "_plot.py";
    std::ofstream(plot) << script;
  }
  std::cerr << "wrote " << f.out << " and " << json_path << '\n';
}

void print_optima(const OptimumReport& report) {
  for (const auto& o : report.max_gain) {
    std::printf("max-gain  %-36s k=%-6g gain=%.6f\n", o.splitting.c_str(), o.argmax, o.max_gain);
  }
  for (const auto& b : report.beat_k0) {
    std::printf("beat-k0   %-36s", b.splitting.c_str());
    if (b.intervals.empty()) std::printf(" none");
    for (const auto& i : b.intervals) std::printf(" [%.4f, %.4f]", i.lo, i.hi);
    std::printf("\n");
  }
  if (report.criterion == OptimumCriterion::AllBeatK0) {
    std::printf("all-beat-k0                                   ");
    if (report.all_beat_k0.empty()) std::printf(" empty");
    for (const auto& i : report.all_beat_k0) std::printf(" [%.4f, %.4f]", i.lo, i.hi);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-subtraction entanglement enhancement on CV GHZ states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Sub sk{app.add_subcommand("sweep-k", "gain against the squeezing ratio k"), {}};
  add_sweep_options(sk, "--k-min", "--k-max");
  Sub sn{app.add_subcommand("sweep-n", "gain against the number of modes N"), {}};
  add_sweep_options(sn, "", "");
  Sub sl{app.add_subcommand("sweep-loss", "gain against uniform loss l, with zero-crossing thresholds"), {}};
  add_sweep_options(sl, "--l-min", "--l-max");
  Sub sr{app.add_subcommand("sweep-r", "entanglement before and after subtraction against r"), {}};
  add_sweep_options(sr, "--r-min", "--r-max");
  Sub so{app.add_subcommand("optima", "k sweep followed by optimum location"), {}};
  add_sweep_options(so, "--k-min", "--k-max");
  so.app->add_option("--criterion", so.flags.criterion, "max-gain or all-beat-k0")
      ->check(CLI::IsMember({"max-gain", "all-beat-k0"}));

  struct {
    int modes = 2;
    double r = 0.2;
    double k = 0.0;
    double loss = 0.0;
    bool subtract = false;
    std::string splitting;
    std::string method = "auto";
    double tail_tolerance = 1e-14;
  } ln;
  CLI::App* lg = app.add_subcommand("logneg", "log-negativity of one state across one splitting");
  lg->add_option("--modes,-N", ln.modes, "number of modes N");
  lg->add_option("--r", ln.r, "total squeezing r");
  lg->add_option("--k", ln.k, "squeezing ratio k");
  lg->add_option("--loss", ln.loss, "uniform loss l");
  lg->add_flag("--subtract", ln.subtract, "subtract one photon from mode 1 first");
  lg->add_option("--splitting", ln.splitting, "\"1,2:3,4\" (unlisted modes traced) or a class form")->required();
  lg->add_option("--method", ln.method, "auto, direct (N <= 4) or composite")
      ->check(CLI::IsMember({"auto", "direct", "composite"}));
  lg->add_option("--tail-tol", ln.tail_tolerance, "tail-mass guard (tighter than the sweep default)");

  std::vector<int> val_modes{2, 3, 4};
  std::vector<double> val_k{0.0, 0.5, 1.0};
  std::vector<double> val_loss{0.0, 0.2};
  double val_r = 0.2;
  double val_tol = 1e-6;
  CLI::App* va = app.add_subcommand("validate", "composite pipeline against the full-tensor pipeline");
  va->add_option("--modes", val_modes, "mode counts (<= 4)")->delimiter(',');
  va->add_option("--k", val_k, "k values")->delimiter(',');
  va->add_option("--loss", val_loss, "loss values")->delimiter(',');
  va->add_option("--r", val_r, "squeezing r");
  va->add_option("--tol", val_tol, "pass tolerance on log-negativity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sk.app) {
      const SweepResult res = run_k_sweep(resolve(sk, SweepFamily::K, "--k-min", "--k-max"));
      write_outputs(res, sk.flags);
      print_optima(locate_optima(res, OptimumCriterion::MaxGain));
    } else if (*sn.app) {
      write_outputs(run_n_sweep(resolve(sn, SweepFamily::N, "", "")), sn.flags);
    } else if (*sl.app) {
      const SweepResult res = run_loss_sweep(resolve(sl, SweepFamily::Loss, "--l-min", "--l-max"));
      write_outputs(res, sl.flags);
      for (const auto& t : loss_thresholds(res)) {
        if (t.loss) {
          std::printf("threshold k=%-6g %-36s l=%.4f  (between %g and %g)\n", t.k, t.splitting.c_str(), *t.loss,
                      t.bracket_lo, t.bracket_hi);
        } else {
          std::printf("threshold k=%-6g %-36s none on grid\n", t.k, t.splitting.c_str());
        }
      }
    } else if (*sr.app) {
      write_outputs(run_r_sweep(resolve(sr, SweepFamily::R, "--r-min", "--r-max")), sr.flags);
    } else if (*so.app) {
      const SweepConfig c = resolve(so, SweepFamily::K, "--k-min", "--k-max");
      const auto criterion =
          so.flags.criterion == "max-gain" ? OptimumCriterion::MaxGain : OptimumCriterion::AllBeatK0;
      const SweepResult res = run_k_sweep(c);
      if (!so.flags.out.empty()) write_outputs(res, so.flags);
      print_optima(locate_optima(res, criterion));
    } else if (*lg) {
      const GhzParams p{ln.modes, ln.r, ln.k};
      p.validate();
      const bool indices = ln.splitting.find(':') != std::string::npos && ln.splitting.find('|') == std::string::npos &&
                           ln.splitting.find('(') == std::string::npos && ln.splitting.find("C:") == std::string::npos;
      const bool direct = ln.method == "direct" || (ln.method == "auto" && indices && ln.modes <= 4);
      Evaluation e;
      if (direct) {
        if (!indices) throw UsageError("--method direct needs the \"1,2:3,4\" splitting form");
        DirectOptions options;
        options.tail_tolerance = ln.tail_tolerance;
        e = evaluate_direct(p, parse_splitting_indices(ln.splitting, ln.modes), ln.loss, options);
      } else {
        const SplittingClass cls = indices ? classify(parse_splitting_indices(ln.splitting, ln.modes), ln.modes)
                                           : parse_splitting_class(ln.splitting, ln.modes);
        CutoffPolicy policy;
        policy.tail_tolerance = ln.tail_tolerance;
        e = evaluate_composite(p, cls, ln.loss, policy);
      }
      std::printf("%.10f\n", ln.subtract ? e.e_after : e.e_before);
    } else if (*va) {
      for (int n : val_modes) {
        if (n < 2 || n > 4) throw UsageError("validate supports N in 2..4");
      }
      int failed = 0;
      for (const auto& c : run_oracle_suite(val_modes, val_k, val_loss, val_r, val_tol)) {
        std::printf("%s N=%d k=%-4g l=%-4g %-36s before %.10f/%.10f after %.10f/%.10f err %.2e\n",
                    c.pass ? "PASS" : "FAIL", c.modes, c.k, c.loss, c.splitting.c_str(), c.composite_before,
                    c.direct_before, c.composite_after, c.direct_after, c.max_error);
        failed += c.pass ? 0 : 1;
      }
      std::printf("%s\n", failed == 0 ? "all checks passed" : (std::to_string(failed) + " checks failed").c_str());
      return failed == 0 ? kExitOk : kExitNumeric;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Parameter:
      case ErrorKind::InvalidPartition:
      case ErrorKind::Grid:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  }
  return kExitOk;
}

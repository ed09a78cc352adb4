#include "photsub/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

namespace photsub {

namespace {

constexpr double kClamp = 1e-9;
constexpr double kUndefinedBelow = 1e-12;

std::string fraction(int part, int whole) {
  const int g = std::gcd(part, whole);
  return "_{" + std::to_string(part / g) + "/" + std::to_string(whole / g) + "}";
}

std::vector<int> range(int start, int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), start);
  return out;
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string mode_list(const std::vector<int>& modes) {
  std::string out;
  for (int m : sorted(modes)) out += std::to_string(m + 1);
  return out;
}

std::string physical_label(const SplittingSpec& s) {
  std::string out;
  if (!s.traced.empty()) out = "Tr(" + mode_list(s.traced) + ")";
  return out + mode_list(s.side_a) + "-" + mode_list(s.side_b);
}

// Sum of |eigenvalues| of a Hermitian matrix. Every state in the pipeline
// commutes with total photon parity (squeezers, couplers, loss and
// subtraction all respect it, and so does the partial transpose), so the
// matrix usually splits into an even and an odd block; real blocks go to the
// real solver. Falls back to the full complex problem when either shortcut
// does not apply.
double trace_norm_graded(const Matrix& m, const FockSpace& space) {
  const auto dim = m.rows();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> block[2];
  for (Eigen::Index i = 0; i < dim; ++i) {
    int parity = 0;
    for (int mode = 0; mode < space.num_modes(); ++mode) parity += space.occupation(static_cast<std::size_t>(i), mode);
    block[parity & 1].push_back(i);
  }
  double off = 0.0;
  for (Eigen::Index c : block[0]) {
    for (Eigen::Index r : block[1]) off = std::max(off, std::abs(m(r, c)));
  }
  const bool real = m.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale;
  const auto norm_of = [real](const Matrix& sub) {
    if (real) {
      const Eigen::MatrixXd re = sub.real();
      if ((re - re.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(re.cwiseAbs().maxCoeff(), 1e-300)) {
        throw Error(ErrorKind::ContractViolation, "matrix is not Hermitian");
      }
      return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(re, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().sum();
    }
    return hermitian_eigenvalues(sub).cwiseAbs().sum();
  };
  if (off > 1e-14 * scale || block[0].empty() || block[1].empty()) return norm_of(m);
  double total = 0.0;
  for (const auto& idx : block) total += norm_of(m(idx, idx));
  return total;
}

double log2_trace_norm_pt(const QuantumState& state, const SplittingSpec& splitting) {
  std::vector<int> keep = sorted([&] {
    std::vector<int> k = splitting.side_a;
    k.insert(k.end(), splitting.side_b.begin(), splitting.side_b.end());
    return k;
  }());
  const QuantumState reduced = splitting.traced.empty() ? state : partial_trace(state, keep);
  std::vector<int> transpose;
  for (int mode : splitting.side_a) {
    transpose.push_back(static_cast<int>(std::find(keep.begin(), keep.end(), mode) - keep.begin()));
  }
  return std::log2(trace_norm_graded(partial_transpose(reduced, transpose), reduced.space()));
}

}  // namespace

void SplittingSpec::validate(int num_modes) const {
  if (side_a.empty() || side_b.empty()) throw Error(ErrorKind::InvalidPartition, "both sides must be nonempty");
  std::vector<int> seen(static_cast<std::size_t>(std::max(num_modes, 0)), 0);
  for (const auto* list : {&side_a, &side_b, &traced}) {
    for (int mode : *list) {
      if (mode < 0 || mode >= num_modes) {
        throw Error(ErrorKind::InvalidPartition, "mode " + std::to_string(mode) + " out of range for " +
                                                     std::to_string(num_modes) + " modes");
      }
      if (seen[static_cast<std::size_t>(mode)]++) {
        throw Error(ErrorKind::InvalidPartition, "mode " + std::to_string(mode) + " listed twice");
      }
    }
  }
  for (int mode = 0; mode < num_modes; ++mode) {
    if (!seen[static_cast<std::size_t>(mode)]) {
      throw Error(ErrorKind::InvalidPartition, "mode " + std::to_string(mode) + " is not assigned");
    }
  }
}

std::string SplittingClass::label() const {
  const int total = total_modes();
  const std::string ab = "(AB)" + fraction(n + 1, total);
  if (a_traced) return "Tr(" + ab + ")C" + fraction(m, total) + "-D" + fraction(p, total);
  std::string out = ab + "-C" + fraction(m, total);
  if (p > 0) out = "Tr(D" + fraction(p, total) + ")" + out;
  return out;
}

void SplittingClass::validate() const {
  grouping().validate();
  if (a_traced && p < 1) throw Error(ErrorKind::InvalidPartition, "tracing A and B needs a nonempty D side");
}

SplittingSpec physical_splitting(const SplittingClass& cls) {
  cls.validate();
  std::vector<int> ab = range(0, cls.n + 1);
  std::vector<int> c = range(cls.n + 1, cls.m);
  std::vector<int> d = range(cls.n + 1 + cls.m, cls.p);
  if (cls.a_traced) return {std::move(c), std::move(d), std::move(ab), cls.label()};
  return {std::move(ab), std::move(c), std::move(d), cls.label()};
}

SplittingSpec composite_splitting(const SplittingClass& cls, const CompositeState& state) {
  cls.validate();
  if (!(cls.grouping() == state.grouping)) {
    throw Error(ErrorKind::InvalidPartition, "splitting class does not match the composite grouping");
  }
  std::vector<int> ab{state.mode_of(Composite::A)};
  if (state.has(Composite::B)) ab.push_back(state.mode_of(Composite::B));
  std::vector<int> c{state.mode_of(Composite::C)};
  std::vector<int> d;
  if (state.has(Composite::D)) d.push_back(state.mode_of(Composite::D));
  if (cls.a_traced) return {std::move(c), std::move(d), std::move(ab), cls.label()};
  return {std::move(ab), std::move(c), std::move(d), cls.label()};
}

SplittingClass classify(const SplittingSpec& spec, int num_modes) {
  spec.validate(num_modes);
  const auto holds_a = [](const std::vector<int>& v) { return std::find(v.begin(), v.end(), 0) != v.end(); };
  const int na = static_cast<int>(spec.side_a.size());
  const int nb = static_cast<int>(spec.side_b.size());
  const int nt = static_cast<int>(spec.traced.size());
  if (holds_a(spec.traced)) return {nt - 1, std::min(na, nb), std::max(na, nb), true};
  if (holds_a(spec.side_a)) return {na - 1, nb, nt, false};
  return {nb - 1, na, nt, false};
}

std::vector<SplittingClass> canonical_classes(int num_modes) {
  if (num_modes < 2) throw Error(ErrorKind::Parameter, "need at least two modes");
  const int n = num_modes;
  if (n % 4 == 0) {
    const int q = n / 4;
    return {
        {q - 1, 3 * q, 0, false},     {2 * q - 1, 2 * q, 0, false}, {3 * q - 1, q, 0, false},
        {q - 1, 2 * q, q, false},     {2 * q - 1, q, q, false},     {q - 1, q, 2 * q, false},
        {q - 1, q, 2 * q, true},      {2 * q - 1, q, q, true},
    };
  }
  if (n % 2 == 0) return {{n / 2 - 1, n / 2, 0, false}};
  const int h = n / 2;
  return {{h, h, 0, false}, {h - 1, h + 1, 0, false}};
}

double log_negativity_schmidt(const QuantumState& state, const SplittingSpec& splitting) {
  const FockSpace& space = state.space();
  splitting.validate(space.num_modes());
  if (!state.is_pure() || !splitting.traced.empty()) {
    throw Error(ErrorKind::ContractViolation, "Schmidt route needs a pure state and no traced modes");
  }
  const auto rows = space.offsets(splitting.side_a);
  const auto cols = space.offsets(splitting.side_b);
  const Vector& amp = state.amplitudes();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = amp(static_cast<Eigen::Index>(rows[i] + cols[j]));
    }
  }
  const Eigen::BDCSVD<Matrix> svd(m);
  return 2.0 * std::log2(svd.singularValues().sum());
}

double log_negativity_eigen(const QuantumState& state, const SplittingSpec& splitting) {
  splitting.validate(state.space().num_modes());
  return log2_trace_norm_pt(state, splitting);
}

double log_negativity(const QuantumState& state, const SplittingSpec& splitting) {
  const double raw = state.is_pure() && splitting.traced.empty() ? log_negativity_schmidt(state, splitting)
                                                                 : log_negativity_eigen(state, splitting);
  return (raw < 0.0 && raw >= -kClamp) ? 0.0 : raw;
}

Gain gain(double e_after, double e_before) {
  if (!(e_before > kUndefinedBelow)) return {};
  return {(e_after - e_before) / e_before, true};
}

EntanglementReport make_report(SplittingSpec splitting, double e_before, double e_after, const GhzParams& params,
                               double loss, double success_weight) {
  const auto clamp = [](double e) { return (e < 0.0 && e >= -kClamp) ? 0.0 : e; };
  e_before = clamp(e_before);
  e_after = clamp(e_after);
  return {std::move(splitting), e_before, e_after, gain(e_after, e_before), params, loss, success_weight};
}

std::vector<SplittingSpec> enumerate_splittings(int num_modes, int max_traced, bool reduce_symmetry) {
  if (num_modes < 2) throw Error(ErrorKind::Parameter, "need at least two modes");
  if (num_modes > 20) throw Error(ErrorKind::Parameter, "enumeration is limited to 20 modes");
  std::vector<SplittingSpec> out;
  const unsigned full = (1u << num_modes) - 1u;
  for (int t = 0; t <= std::min(max_traced, num_modes - 2); ++t) {
    for (unsigned traced = 0; traced <= full; ++traced) {
      if (std::popcount(traced) != t) continue;
      const unsigned rest = full & ~traced;
      const unsigned lowest = rest & (~rest + 1u);
      // Side A always holds the lowest kept mode, so each bipartition appears once.
      for (unsigned a = rest; a != 0; a = (a - 1) & rest) {
        if (!(a & lowest) || a == rest) continue;
        SplittingSpec s;
        for (int mode = 0; mode < num_modes; ++mode) {
          const unsigned bit = 1u << mode;
          if (traced & bit) s.traced.push_back(mode);
          else if (a & bit) s.side_a.push_back(mode);
          else s.side_b.push_back(mode);
        }
        s.label = physical_label(s);
        out.push_back(std::move(s));
      }
    }
  }
  // Stable order: by traced count, then by label.
  std::stable_sort(out.begin(), out.end(), [](const SplittingSpec& x, const SplittingSpec& y) {
    if (x.traced.size() != y.traced.size()) return x.traced.size() < y.traced.size();
    return x.label < y.label;
  });
  if (!reduce_symmetry) return out;
  std::vector<SplittingSpec> reduced;
  std::vector<SplittingClass> seen;
  for (const auto& s : out) {
    const SplittingClass cls = classify(s, num_modes);
    if (std::find(seen.begin(), seen.end(), cls) != seen.end()) continue;
    seen.push_back(cls);
    reduced.push_back(physical_splitting(cls));
  }
  return reduced;
}

std::vector<HierarchyViolation> hierarchy_check(const std::vector<EntanglementReport>& reports, double slack) {
  using Set = std::set<int>;
  const auto as_set = [](const std::vector<int>& v) { return Set(v.begin(), v.end()); };
  std::vector<HierarchyViolation> violations;
  for (const auto& outer : reports) {
    const Set oa = as_set(outer.splitting.side_a);
    const Set ob = as_set(outer.splitting.side_b);
    const Set ot = as_set(outer.splitting.traced);
    for (const auto& inner : reports) {
      const Set ia = as_set(inner.splitting.side_a);
      const Set ib = as_set(inner.splitting.side_b);
      const Set it = as_set(inner.splitting.traced);
      if (it.size() != ot.size() + 1 || !std::includes(it.begin(), it.end(), ot.begin(), ot.end())) continue;
      int extra = -1;
      for (int mode : it) {
        if (!ot.count(mode)) extra = mode;
      }
      const auto minus = [extra](Set s) {
        s.erase(extra);
        return s;
      };
      const bool nested = (minus(oa) == ia && ob == ib) || (minus(oa) == ib && ob == ia) ||
                          (minus(ob) == ib && oa == ia) || (minus(ob) == ia && oa == ib);
      if (!nested) continue;
      if (outer.e_before < inner.e_before - slack) {
        violations.push_back({outer.splitting.label, inner.splitting.label, "before", outer.e_before, inner.e_before});
      }
      if (outer.e_after < inner.e_after - slack) {
        violations.push_back({outer.splitting.label, inner.splitting.label, "after", outer.e_after, inner.e_after});
      }
    }
  }
  return violations;
}

}  // namespace photsub

#pragma once

// Brute-force checks of the transformation on small universes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "axf/evaluator.hpp"
#include "axf/logic.hpp"
#include "axf/transformer.hpp"

namespace axf {

enum class Check : std::uint8_t { theorem1, theorem2, equivalence, merge_equivalence, polarity_lint, aux_equivalence };

inline constexpr Check kAllChecks[] = {Check::theorem1,          Check::theorem2,      Check::equivalence,
                                       Check::merge_equivalence, Check::polarity_lint, Check::aux_equivalence};

inline const char* to_string(Check c) {
  switch (c) {
    case Check::theorem1: return "theorem1";
    case Check::theorem2: return "theorem2";
    case Check::equivalence: return "equivalence";
    case Check::merge_equivalence: return "merge_equivalence";
    case Check::polarity_lint: return "polarity_lint";
    case Check::aux_equivalence: return "aux_equivalence";
  }
  return "?";
}

inline std::optional<Check> parse_check(std::string_view s) {
  for (Check c : kAllChecks)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

enum class EnumerationMode : std::uint8_t { exhaustive, sampled };

struct VerificationPlan {
  std::vector<std::size_t> universe_sizes{1, 2, 3};
  EnumerationMode mode = EnumerationMode::exhaustive;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::vector<Check> checks{std::begin(kAllChecks), std::end(kAllChecks)};
  std::size_t threads = 0;  // 0: AXF_THREADS or hardware concurrency
  std::size_t max_exhaustive_atoms = 24;
};

/// Raised when a plan exceeds the enumeration budget.
class BudgetError : public Error {
 public:
  BudgetError(std::string message, std::size_t required_atoms)
      : Error("budget", std::move(message)), required_atoms_(required_atoms) {}
  std::size_t required_atoms() const { return required_atoms_; }

 private:
  std::size_t required_atoms_;
};

// ---------------------------------------------------------------------------
// State enumeration

/// splitmix64 step; used to derive sampled states from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// The ground basic atoms of a program over a universe, in signature and
/// tuple order. State k of the exhaustive enumeration sets atom t iff bit t
/// of k is set.
class StateSpace {
 public:
  StateSpace(const AxiomProgram& program, const Universe& universe)
      : signature_(std::make_shared<const Signature>(program.signature)),
        universe_(std::make_shared<const Universe>(universe)) {
    for (std::size_t p = 0; p < signature_->size(); ++p) {
      if ((*signature_)[p].derived()) continue;
      const std::size_t n = universe.tuple_count((*signature_)[p].arity);
      for (std::size_t c = 0; c < n; ++c) atoms_.emplace_back(p, c);
    }
  }

  std::size_t atom_count() const { return atoms_.size(); }
  const Universe& universe() const { return *universe_; }

  TruthAssignment exhaustive(std::uint64_t index) const {
    TruthAssignment s = blank();
    for (std::size_t t = 0; t < atoms_.size(); ++t)
      if ((index >> t) & 1U) s.set(atoms_[t].first, atoms_[t].second);
    return s;
  }

  TruthAssignment sampled(std::uint64_t seed, std::uint64_t index) const {
    std::uint64_t key = seed;
    std::uint64_t state = splitmix64(key) ^ (index * 0xD1B54A32D192ED03ULL);
    TruthAssignment s = blank();
    std::uint64_t word = 0;
    for (std::size_t t = 0; t < atoms_.size(); ++t) {
      if (t % 64 == 0) word = splitmix64(state);
      if ((word >> (t % 64)) & 1U) s.set(atoms_[t].first, atoms_[t].second);
    }
    return s;
  }

 private:
  TruthAssignment blank() const {
    TruthAssignment s(signature_, universe_);
    s.cover_kind(PredicateKind::basic);
    return s;
  }

  std::shared_ptr<const Signature> signature_;
  std::shared_ptr<const Universe> universe_;
  std::vector<std::pair<std::size_t, std::size_t>> atoms_;
};

inline std::set<std::string> program_constants(const AxiomProgram& program) {
  std::set<std::string> out;
  for (const auto& stratum : program.strata)
    for (const auto& ax : stratum)
      for_each_atom(ax.body, [&](const Formula& a, const std::vector<std::size_t>&, Polarity) {
        for (const auto& t : a.terms())
          if (!t.is_variable()) out.insert(t.name);
      });
  return out;
}

/// A universe of exactly `n` objects: the first declared objects, padded
/// with o1, o2, ... when the program declares fewer. Every constant the
/// program mentions must be included.
inline Universe verification_universe(const AxiomProgram& program, std::size_t n) {
  if (n == 0) throw Error("universe", "universe size must be at least 1");
  std::vector<std::string> declared(program.objects.begin(),
                                    program.objects.begin() + static_cast<std::ptrdiff_t>(std::min(n, program.objects.size())));
  Universe u = Universe::padded(declared, n);
  for (const auto& c : program_constants(program))
    if (!u.index_of(c))
      throw Error("universe", "universe of size " + std::to_string(n) + " does not contain constant '" + c + "'");
  return u;
}

inline std::size_t default_thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AXF_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = std::min<std::size_t>(n, v);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Results

struct Counterexample {
  Check check = Check::equivalence;
  std::size_t universe_size = 0;
  std::uint64_t state_index = 0;
  std::optional<std::uint64_t> seed;  // set for sampled states
  std::vector<std::string> basic_state;  // true basic atoms
  std::string atom;                     // atom or relation tuple that disagrees
  bool expected = false;
  bool actual = false;
  std::string detail;
};

struct CheckResult {
  Check check = Check::equivalence;
  std::size_t states_tested = 0;
  bool ok = true;
  std::optional<Counterexample> counterexample;
  double wall_time = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> results;

  bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.ok; });
  }
  const CheckResult* find(Check c) const {
    for (const auto& r : results)
      if (r.check == c) return &r;
    return nullptr;
  }
};

/// A program and the output of the transformation under test.
struct VerificationSubject {
  AxiomProgram original;
  AxiomProgram transformed;
  std::vector<StagePredicateFamily> families;

  static VerificationSubject from_original(const AxiomProgram& original, bool optimize_aux = false) {
    TransformResult r = eliminate_negative_occurrences(original, optimize_aux);
    return {original, std::move(r.program), std::move(r.report.families)};
  }

  static VerificationSubject from_pair(const AxiomProgram& original, const AxiomProgram& transformed) {
    return {original, transformed, recover_families(original, transformed)};
  }

  bool optimize_aux() const {
    return std::any_of(families.begin(), families.end(), [](const auto& f) { return f.none_aux.has_value(); });
  }
};

namespace detail {

struct Mismatch {
  std::string atom;
  bool expected = false;
  bool actual = false;
  std::string detail;
};

inline std::size_t index_in(const Signature& sig, const std::string& name) {
  for (std::size_t i = 0; i < sig.size(); ++i)
    if (sig[i].name == name) return i;
  throw Error("undeclared-predicate", "predicate '" + name + "' is missing from the program under test");
}

/// First disagreement between two extended states on the predicates named
/// in `names`.
inline std::optional<Mismatch> compare_predicates(const TruthAssignment& expected, const TruthAssignment& actual,
                                                  const std::vector<std::string>& names) {
  for (const auto& name : names) {
    const std::size_t pe = index_in(expected.signature(), name);
    const std::size_t pa = index_in(actual.signature(), name);
    const auto& be = expected.bits(pe);
    const auto& ba = actual.bits(pa);
    for (std::size_t c = 0; c < be.size(); ++c)
      if (be[c] != ba.at(c)) return Mismatch{expected.atom_name(pe, c), be[c] != 0, ba[c] != 0, {}};
  }
  return std::nullopt;
}

/// Everything a single basic state contributes to all checks.
class StateChecker {
 public:
  StateChecker(const VerificationSubject& subject, const Universe& universe, const std::vector<Check>& checks)
      : subject_(subject), universe_(universe), checks_(checks.begin(), checks.end()),
        original_(subject.original, universe), transformed_(subject.transformed, universe) {
    for (const auto& p : subject.original.signature)
      if (p.derived()) original_derived_.push_back(p.name);
    if (wants(Check::merge_equivalence)) {
      try {
        merged_.emplace(merge_to_single_stratum(subject.transformed), universe);
      } catch (const MergeRefused& e) {
        merge_error_ = e.what();
      }
    }
    if (wants(Check::aux_equivalence)) {
      other_ = VerificationSubject::from_original(subject.original, !subject.optimize_aux());
      other_compiled_.emplace(other_->transformed, universe);
      if (other_->families.size() != subject.families.size())
        aux_error_ = "the two generation modes produced different numbers of stage families";
    }
  }

  bool wants(Check c) const { return checks_.contains(c); }
  const std::optional<std::string>& merge_error() const { return merge_error_; }
  const std::optional<std::string>& aux_error() const { return aux_error_; }

  std::map<Check, Mismatch> run(const TruthAssignment& basic) const {
    std::map<Check, Mismatch> out;
    std::vector<StageTable> tables;
    const TruthAssignment orig =
        wants(Check::theorem1) ? original_.extend_in_stages(basic, &tables) : original_.extend(basic);
    const TruthAssignment trans = transformed_.extend(basic);

    if (wants(Check::theorem1))
      if (auto m = theorem1(tables, trans)) out.emplace(Check::theorem1, *m);
    if (wants(Check::theorem2))
      if (auto m = theorem2(basic, trans)) out.emplace(Check::theorem2, *m);
    if (wants(Check::equivalence))
      if (auto m = compare_predicates(orig, trans, original_derived_)) out.emplace(Check::equivalence, *m);
    if (wants(Check::merge_equivalence) && merged_)
      if (auto m = compare_predicates(orig, merged_->extend(basic), original_derived_))
        out.emplace(Check::merge_equivalence, *m);
    if (wants(Check::aux_equivalence) && !aux_error_)
      if (auto m = aux_equivalence(basic, trans)) out.emplace(Check::aux_equivalence, *m);
    return out;
  }

 private:
  std::optional<Mismatch> theorem1(const std::vector<StageTable>& tables, const TruthAssignment& trans) const {
    const Signature& sig = subject_.original.signature;
    for (const auto& fam : subject_.families) {
      const StageTable& table = tables.at(fam.stratum);
      const StageRelations rel = stage_relations(table, sig, universe_);
      std::vector<std::size_t> pos;
      for (const auto& name : fam.predicates) {
        const std::size_t p = index_in(sig, name);
        auto it = std::find(table.predicates.begin(), table.predicates.end(), p);
        if (it == table.predicates.end()) throw InternalError("stage table lacks predicate '" + name + "'");
        pos.push_back(static_cast<std::size_t>(it - table.predicates.begin()));
      }
      for (StageRelation r : kStageRelations)
        for (std::size_t i = 0; i < fam.size(); ++i)
          for (std::size_t j = 0; j < fam.size(); ++j) {
            const auto& want = rel.get(r, pos[i], pos[j]);
            const std::size_t p = index_in(trans.signature(), fam.name(r, i, j));
            const auto& got = trans.bits(p);
            for (std::size_t c = 0; c < want.size(); ++c)
              if (want[c] != got.at(c))
                return Mismatch{trans.atom_name(p, c), want[c] != 0, got[c] != 0,
                                "stage relation " + std::string(to_string(r)) + " of stratum " +
                                    std::to_string(fam.stratum + 1) + " (f = " + std::to_string(table.fixpoint) + ")"};
          }
    }
    return std::nullopt;
  }

  static std::optional<Mismatch> diagonal(const TruthAssignment& s, const StagePredicateFamily& fam,
                                          const std::string& where) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const std::size_t p = index_in(s.signature(), fam.predicates[i]);
      const std::size_t q = index_in(s.signature(), fam.name(StageRelation::nleq, i, i));
      const std::size_t count = s.universe().tuple_count(fam.arities[i]);
      for (std::size_t a = 0; a < count; ++a) {
        const bool holds = s.get(p, a);
        const bool nleq = s.get(q, a * count + a);
        if (holds == nleq)
          return Mismatch{s.atom_name(p, a), !nleq, holds, "compared with " + s.atom_name(q, a * count + a) + where};
      }
    }
    return std::nullopt;
  }

  std::optional<Mismatch> theorem2(const TruthAssignment& basic, const TruthAssignment& trans) const {
    for (const auto& fam : subject_.families)
      if (auto m = diagonal(trans, fam, "")) return m;
    if (subject_.transformed.strata.size() == subject_.original.strata.size()) {
      for (const auto& fam : subject_.families) {
        const TruthAssignment prefix = transformed_.extend(basic, std::nullopt, fam.stratum + 1);
        if (auto m = diagonal(prefix, fam, " in the program restricted to strata 1.." + std::to_string(fam.stratum + 1)))
          return m;
      }
    }
    return std::nullopt;
  }

  std::optional<Mismatch> aux_equivalence(const TruthAssignment& basic, const TruthAssignment& trans) const {
    const TruthAssignment other = other_compiled_->extend(basic);
    if (auto m = compare_predicates(trans, other, original_derived_)) return m;
    for (std::size_t k = 0; k < subject_.families.size(); ++k) {
      const auto& a = subject_.families[k];
      const auto& b = other_->families[k];
      for (std::size_t t = 0; t < a.names.size(); ++t) {
        const std::size_t pa = index_in(trans.signature(), a.names[t]);
        const std::size_t pb = index_in(other.signature(), b.names.at(t));
        const auto& ba = trans.bits(pa);
        const auto& bb = other.bits(pb);
        for (std::size_t c = 0; c < ba.size(); ++c)
          if (ba[c] != bb.at(c))
            return Mismatch{trans.atom_name(pa, c), bb[c] != 0, ba[c] != 0, "compared with " + other.atom_name(pb, c)};
      }
    }
    return std::nullopt;
  }

  const VerificationSubject& subject_;
  const Universe& universe_;
  std::set<Check> checks_;
  CompiledProgram original_;
  CompiledProgram transformed_;
  std::vector<std::string> original_derived_;
  std::optional<CompiledProgram> merged_;
  std::optional<std::string> merge_error_;
  std::optional<VerificationSubject> other_;
  std::optional<CompiledProgram> other_compiled_;
  std::optional<std::string> aux_error_;
};

}  // namespace detail

/// Static part of the checks: no derived predicate occurs negatively and
/// the program, and its merged form, are stratified.
inline std::optional<std::string> polarity_lint(const AxiomProgram& program) {
  auto negs = negative_occurrences(program, program.derived_predicates());
  if (!negs.empty()) {
    const auto& o = negs.front();
    return "derived predicate '" + o.predicate + "' occurs negatively in stratum " + std::to_string(o.stratum + 1) +
           ", axiom " + std::to_string(o.axiom + 1);
  }
  auto v = check_stratified(program);
  if (!v.empty()) return "not stratified: " + v.front().message;
  auto merged = merge_to_single_stratum(program);
  v = check_stratified(merged);
  if (!v.empty()) return "merged program not stratified: " + v.front().message;
  return std::nullopt;
}

/// Number of ground basic atoms over a universe of size n.
inline std::size_t basic_atom_count(const AxiomProgram& program, std::size_t n) {
  std::size_t count = 0;
  for (const auto& p : program.signature)
    if (!p.derived()) {
      std::size_t t = 1;
      for (std::size_t k = 0; k < p.arity; ++k) t *= n;
      count += t;
    }
  return count;
}

/// Throws BudgetError or Error when `plan` cannot run on `program`.
inline void check_plan(const AxiomProgram& program, const VerificationPlan& plan) {
  if (plan.universe_sizes.empty()) throw Error("plan", "no universe sizes given");
  if (plan.mode == EnumerationMode::sampled && !plan.seed) throw Error("plan", "sampled verification requires a seed");
  if (plan.mode == EnumerationMode::sampled && plan.samples == 0) throw Error("plan", "sample count must be positive");
  if (plan.mode == EnumerationMode::exhaustive) {
    for (std::size_t n : plan.universe_sizes) {
      const std::size_t k = basic_atom_count(program, n);
      if (k > plan.max_exhaustive_atoms)
        throw BudgetError("exhaustive verification over " + std::to_string(n) + " objects needs 2^" + std::to_string(k) +
                              " states; the budget is 2^" + std::to_string(plan.max_exhaustive_atoms),
                          k);
    }
  }
}

inline VerificationReport verify(const VerificationSubject& subject, const VerificationPlan& plan) {
  check_plan(subject.original, plan);
  using clock = std::chrono::steady_clock;
  std::map<Check, CheckResult> results;
  std::map<Check, double> seconds;
  for (Check c : plan.checks) results[c].check = c;

  if (results.contains(Check::polarity_lint)) {
    const auto t0 = clock::now();
    CheckResult& r = results[Check::polarity_lint];
    std::optional<std::string> problem;
    try {
      problem = polarity_lint(subject.transformed);
    } catch (const MergeRefused& e) {
      problem = e.what();
    }
    if (problem) {
      r.ok = false;
      Counterexample cx;
      cx.check = Check::polarity_lint;
      cx.detail = *problem;
      r.counterexample = cx;
    }
    r.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
  }

  std::vector<Check> dynamic;
  for (Check c : plan.checks)
    if (c != Check::polarity_lint) dynamic.push_back(c);
  if (std::find(dynamic.begin(), dynamic.end(), Check::theorem1) != dynamic.end() ||
      std::find(dynamic.begin(), dynamic.end(), Check::theorem2) != dynamic.end()) {
    std::set<std::string> negated;
    for (const auto& o : negative_occurrences(subject.original, subject.original.derived_predicates()))
      negated.insert(o.predicate);
    for (std::size_t l = 0; l < subject.original.strata.size(); ++l) {
      const auto preds = affected_predicates(subject.original.strata[l]);
      const bool needed = std::any_of(preds.begin(), preds.end(), [&](const auto& p) { return negated.contains(p); });
      const bool present = std::any_of(subject.families.begin(), subject.families.end(),
                                       [&](const auto& f) { return f.stratum == l; });
      if (needed && !present)
        throw Error("family", "the transformed program has no stage predicates for stratum " + std::to_string(l + 1));
    }
  }

  if (!dynamic.empty()) {
    const auto t0 = clock::now();
    for (std::size_t n : plan.universe_sizes) {
      const Universe universe = verification_universe(subject.original, n);
      const StateSpace space(subject.original, universe);
      const detail::StateChecker checker(subject, universe, dynamic);
      if (checker.merge_error() && results.contains(Check::merge_equivalence)) {
        CheckResult& r = results[Check::merge_equivalence];
        if (r.ok) {
          r.ok = false;
          Counterexample cx;
          cx.check = Check::merge_equivalence;
          cx.universe_size = n;
          cx.detail = *checker.merge_error();
          r.counterexample = cx;
        }
      }
      if (checker.aux_error() && results.contains(Check::aux_equivalence)) {
        CheckResult& r = results[Check::aux_equivalence];
        if (r.ok) {
          r.ok = false;
          Counterexample cx;
          cx.check = Check::aux_equivalence;
          cx.universe_size = n;
          cx.detail = *checker.aux_error();
          r.counterexample = cx;
        }
      }
      const std::uint64_t total = plan.mode == EnumerationMode::exhaustive
                                      ? (std::uint64_t{1} << space.atom_count())
                                      : static_cast<std::uint64_t>(plan.samples);
      const auto state_at = [&](std::uint64_t k) {
        return plan.mode == EnumerationMode::exhaustive ? space.exhaustive(k) : space.sampled(*plan.seed, k);
      };

      std::map<Check, std::pair<std::uint64_t, detail::Mismatch>> first;
      std::mutex mu;
      std::exception_ptr failure;
      std::atomic<std::uint64_t> next{0};
      const std::size_t threads =
          std::max<std::size_t>(1, std::min<std::uint64_t>(plan.threads ? plan.threads : default_thread_count(), total));
      auto worker = [&] {
        try {
          for (;;) {
            const std::uint64_t k = next.fetch_add(1);
            if (k >= total) return;
            auto found = checker.run(state_at(k));
            if (found.empty()) continue;
            std::lock_guard lock(mu);
            for (auto& [c, m] : found) {
              auto it = first.find(c);
              if (it == first.end() || k < it->second.first) first[c] = {k, m};
            }
          }
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      };
      std::vector<std::thread> pool;
      for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);

      for (Check c : dynamic) {
        CheckResult& r = results[c];
        r.states_tested += total;
        auto it = first.find(c);
        if (it == first.end() || !r.ok) continue;
        r.ok = false;
        Counterexample cx;
        cx.check = c;
        cx.universe_size = n;
        cx.state_index = it->second.first;
        if (plan.mode == EnumerationMode::sampled) cx.seed = plan.seed;
        cx.basic_state = state_at(it->second.first).true_atoms();
        cx.atom = it->second.second.atom;
        cx.expected = it->second.second.expected;
        cx.actual = it->second.second.actual;
        cx.detail = it->second.second.detail;
        r.counterexample = cx;
      }
    }
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    for (Check c : dynamic) results[c].wall_time = elapsed;
  }

  VerificationReport report;
  for (Check c : plan.checks) report.results.push_back(results[c]);
  return report;
}

// ---------------------------------------------------------------------------
// Random programs

struct ProgramProfile {
  std::size_t strata = 2;
  std::size_t predicates_per_stratum = 1;
  std::size_t basic_predicates = 2;
  std::size_t max_arity = 2;
  std::size_t body_depth = 3;
  double negation_rate = 0.3;
  std::size_t max_axioms_per_predicate = 2;
};

namespace detail {

/// Bounded draws on top of the raw engine, so that a seed yields the same
/// program with every standard library.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

class ProgramGenerator {
 public:
  ProgramGenerator(const ProgramProfile& profile, std::uint64_t seed) : profile_(profile), draw_(seed) {}

  AxiomProgram run() {
    AxiomProgram p;
    for (std::size_t b = 0; b < profile_.basic_predicates; ++b) {
      const std::size_t arity = b == 0 ? std::max<std::size_t>(1, profile_.max_arity) : draw_.below(profile_.max_arity + 1);
      p.signature.push_back({"b" + std::to_string(b + 1), arity, PredicateKind::basic});
    }
    for (std::size_t s = 0; s < profile_.strata; ++s)
      for (std::size_t k = 0; k < profile_.predicates_per_stratum; ++k) {
        Predicate d{"d" + std::to_string(s + 1) + "_" + std::to_string(k + 1), draw_.below(profile_.max_arity + 1),
                    PredicateKind::derived};
        p.signature.push_back(d);
        stratum_of_[d.name] = s;
      }
    signature_ = p.signature;
    p.strata.resize(profile_.strata);
    for (std::size_t s = 0; s < profile_.strata; ++s) {
      current_ = s;
      for (const auto& d : signature_) {
        if (!d.derived() || stratum_of_.at(d.name) != s) continue;
        const std::size_t axioms = 1 + draw_.below(std::max<std::size_t>(1, profile_.max_axioms_per_predicate));
        for (std::size_t a = 0; a < axioms; ++a) p.strata[s].push_back(axiom(d));
      }
    }
    p.sort_signature();
    return p;
  }

 private:
  Axiom axiom(const Predicate& head) {
    fresh_ = 0;
    std::vector<std::string> vars;
    for (std::size_t t = 0; t < head.arity; ++t) vars.push_back("x" + std::to_string(t + 1));
    Formula body = formula(profile_.body_depth, vars, Polarity::positive);
    const auto free = free_variables(body);
    std::vector<Formula> parts{body};
    for (const auto& v : vars)
      if (!free.contains(v)) parts.push_back(cover(v));
    return {{head.name, variables_as_terms(vars)}, Formula::conjunction(std::move(parts)), {}};
  }

  Formula cover(const std::string& v) {
    std::vector<const Predicate*> unary;
    for (const auto& p : signature_)
      if (!p.derived() && p.arity >= 1) unary.push_back(&p);
    const Predicate& p = *unary[draw_.below(unary.size())];
    return Formula::atom(p.name, std::vector<Term>(p.arity, Term::var(v)));
  }

  Formula formula(std::size_t depth, std::vector<std::string>& scope, Polarity pol) {
    if (depth == 0 || draw_.chance(0.3)) return atom(scope, pol);
    if (draw_.chance(profile_.negation_rate)) return Formula::negation(formula(depth - 1, scope, flip(pol)));
    switch (draw_.below(4)) {
      case 0:
        return Formula::conjunction({formula(depth - 1, scope, pol), formula(depth - 1, scope, pol)});
      case 1:
        return Formula::disjunction({formula(depth - 1, scope, pol), formula(depth - 1, scope, pol)});
      default: {
        const std::string v = "z" + std::to_string(++fresh_);
        scope.push_back(v);
        Formula sub = formula(depth - 1, scope, pol);
        scope.pop_back();
        return draw_.below(2) == 0 ? Formula::exists({v}, std::move(sub)) : Formula::forall({v}, std::move(sub));
      }
    }
  }

  Formula atom(const std::vector<std::string>& scope, Polarity pol) {
    std::vector<const Predicate*> options;
    for (const auto& p : signature_) {
      if (p.arity > 0 && scope.empty()) continue;
      if (p.derived()) {
        const std::size_t s = stratum_of_.at(p.name);
        if (s > current_ || (s == current_ && pol == Polarity::negative)) continue;
      }
      options.push_back(&p);
    }
    if (options.empty()) return pol == Polarity::positive ? Formula::top() : Formula::bottom();
    std::vector<const Predicate*> derived;
    for (const Predicate* p : options)
      if (p->derived()) derived.push_back(p);
    if (!derived.empty() && derived.size() < options.size() && draw_.chance(0.5)) options = std::move(derived);
    const Predicate& p = *options[draw_.below(options.size())];
    std::vector<Term> args;
    for (std::size_t t = 0; t < p.arity; ++t) args.push_back(Term::var(scope[draw_.below(scope.size())]));
    return Formula::atom(p.name, std::move(args));
  }

  ProgramProfile profile_;
  Draw draw_;
  Signature signature_;
  std::map<std::string, std::size_t> stratum_of_;
  std::size_t current_ = 0;
  std::size_t fresh_ = 0;
};

}  // namespace detail

/// Deterministic random stratified program. Negative occurrences of derived
/// predicates only refer to strictly earlier strata.
inline AxiomProgram generate_random_program(const ProgramProfile& profile, std::uint64_t seed) {
  if (profile.strata > 4) throw Error("profile", "at most 4 strata are supported");
  if (profile.max_arity > 2) throw Error("profile", "arity is limited to 2");
  if (profile.predicates_per_stratum == 0 && profile.strata > 0) throw Error("profile", "strata need at least one predicate");
  if (profile.negation_rate < 0.0 || profile.negation_rate > 1.0) throw Error("profile", "negation rate must lie in [0, 1]");
  if (profile.basic_predicates == 0 && profile.max_arity > 0)
    throw Error("profile", "head variables cannot be bound without a basic predicate");
  if (profile.basic_predicates == 0 && profile.negation_rate > 0.0 && profile.strata <= 1)
    throw Error("profile", "negation needs a basic predicate or an earlier stratum");
  return detail::ProgramGenerator(profile, seed).run();
}

}  // namespace axf

#pragma once

// Fixed-point semantics of stratified axiom programs over a finite universe.
//
// Formulas are compiled once per (program, universe) into a flat node array
// with variable slots; ground atoms are looked up in dense per-predicate bit
// vectors (see TruthAssignment).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "axf/logic.hpp"
#include "axf/state.hpp"

namespace axf {

/// A formula compiled against a signature and universe.
class CompiledFormula {
 public:
  CompiledFormula() = default;

  /// `slots` maps variable names to environment positions; names not yet in
  /// the map receive new slots.
  CompiledFormula(const Formula& phi, const std::unordered_map<std::string, std::size_t>& predicates,
                  const Universe& universe, std::map<std::string, std::size_t>& slots)
      : n_(universe.size()) {
    root_ = compile(phi, predicates, universe, slots);
  }

  bool eval(const TruthAssignment& s, std::size_t* env) const { return eval_node(root_, s, env); }

 private:
  struct Node {
    FormulaKind kind = FormulaKind::top;
    std::uint32_t pred = 0;
    std::vector<std::int64_t> args;  // >= 0: slot; < 0: -(object + 1)
    std::vector<std::uint32_t> kids;
    std::vector<std::uint32_t> slots;
  };

  std::uint32_t compile(const Formula& phi, const std::unordered_map<std::string, std::size_t>& predicates,
                        const Universe& universe, std::map<std::string, std::size_t>& slots) {
    Node node;
    node.kind = phi.kind();
    auto slot_of = [&](const std::string& v) {
      auto [it, inserted] = slots.emplace(v, slots.size());
      return it->second;
    };
    if (phi.is(FormulaKind::atom)) {
      auto it = predicates.find(phi.predicate());
      if (it == predicates.end()) throw Error("undeclared-predicate", "predicate '" + phi.predicate() + "' is not declared");
      node.pred = static_cast<std::uint32_t>(it->second);
      for (const auto& t : phi.terms()) {
        if (t.is_variable()) {
          node.args.push_back(static_cast<std::int64_t>(slot_of(t.name)));
        } else {
          auto o = universe.index_of(t.name);
          if (!o) throw Error("unknown-object", "object '" + t.name + "' is not in the universe");
          node.args.push_back(-static_cast<std::int64_t>(*o) - 1);
        }
      }
    }
    for (const auto& v : phi.variables()) node.slots.push_back(static_cast<std::uint32_t>(slot_of(v)));
    for (const auto& c : phi.children()) node.kids.push_back(compile(c, predicates, universe, slots));
    nodes_.push_back(std::move(node));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  bool eval_node(std::uint32_t id, const TruthAssignment& s, std::size_t* env) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case FormulaKind::atom: {
        std::size_t code = 0;
        for (std::int64_t a : n.args) code = code * n_ + (a >= 0 ? env[a] : static_cast<std::size_t>(-a - 1));
        return s.get(n.pred, code);
      }
      case FormulaKind::top:
        return true;
      case FormulaKind::bottom:
        return false;
      case FormulaKind::negation:
        return !eval_node(n.kids[0], s, env);
      case FormulaKind::conjunction:
        for (auto k : n.kids)
          if (!eval_node(k, s, env)) return false;
        return true;
      case FormulaKind::disjunction:
        for (auto k : n.kids)
          if (eval_node(k, s, env)) return true;
        return false;
      case FormulaKind::exists:
      case FormulaKind::forall: {
        const bool want = n.kind == FormulaKind::exists;
        for (auto sl : n.slots) env[sl] = 0;
        for (;;) {
          if (eval_node(n.kids[0], s, env) == want) return want;
          std::size_t i = n.slots.size();
          while (i > 0) {
            --i;
            if (++env[n.slots[i]] < n_) break;
            env[n.slots[i]] = 0;
            if (i == 0) return !want;
          }
          if (n.slots.empty()) return !want;
        }
      }
    }
    return false;
  }

  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  std::size_t n_ = 0;
};

inline std::unordered_map<std::string, std::size_t> predicate_indices(const Signature& sig) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < sig.size(); ++i) out.emplace(sig[i].name, i);
  return out;
}

/// Evaluates `phi` under `s` with free variables bound by `env` (variable name
/// to object name). Quantifiers range over the assignment's universe.
inline bool eval_formula(const Formula& phi, const TruthAssignment& s, const std::map<std::string, std::string>& env) {
  for (const auto& v : free_variables(phi))
    if (!env.contains(v)) throw Error("unbound-variable", "free variable ?" + v + " is not bound");
  for_each_atom(phi, [&](const Formula& a, const std::vector<std::size_t>&, Polarity) {
    auto p = s.predicate_index(a.predicate());
    if (!p) throw Error("undeclared-predicate", "predicate '" + a.predicate() + "' is not declared");
    if (!s.covers(*p)) throw Error("state", "predicate '" + a.predicate() + "' is not covered by the state");
    if (s.signature()[*p].arity != a.terms().size()) throw Error("arity", "wrong arity for '" + a.predicate() + "'");
  });
  std::map<std::string, std::size_t> slots;
  for (const auto& [v, _] : env) slots.emplace(v, slots.size());
  CompiledFormula c(phi, predicate_indices(s.signature()), s.universe(), slots);
  std::vector<std::size_t> values(slots.size() + 1, 0);
  for (const auto& [v, obj] : env) {
    auto o = s.universe().index_of(obj);
    if (!o) throw Error("unknown-object", "object '" + obj + "' is not in the universe");
    values[slots.at(v)] = *o;
  }
  return c.eval(s, values.data());
}

/// Stage numbers of the ground atoms derived by one stratum. An atom first
/// true in snapshot l has stage l (l >= 1); atoms never derived have the
/// implicit stage f + 1 where f is the fixed-point stage.
struct StageTable {
  std::size_t stratum = 0;
  std::size_t fixpoint = 0;
  std::vector<std::size_t> predicates;  // signature indices, in stratum order
  std::map<std::size_t, std::vector<std::size_t>> stages;  // 0 = not derived

  std::size_t stage(std::size_t pred, std::size_t code) const {
    auto it = stages.find(pred);
    if (it == stages.end()) throw Error("stage", "predicate is not affected by this stratum");
    const std::size_t s = it->second.at(code);
    return s == 0 ? fixpoint + 1 : s;
  }

  bool derived(std::size_t pred, std::size_t code) const { return stages.at(pred).at(code) != 0; }

  std::size_t explicit_entries() const {
    std::size_t n = 0;
    for (const auto& [p, v] : stages) n += static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](auto x) { return x != 0; }));
    return n;
  }
};

/// Program compiled against a universe. Immutable; evaluation methods are
/// const and can run concurrently on distinct states.
class CompiledProgram {
 public:
  CompiledProgram(const AxiomProgram& program, const Universe& universe)
      : signature_(std::make_shared<const Signature>(program.signature)),
        universe_(std::make_shared<const Universe>(universe)) {
    const auto preds = predicate_indices(*signature_);
    for (const auto& stratum : program.strata) {
      std::vector<CompiledAxiom> compiled;
      std::vector<std::size_t> affected;
      for (const auto& ax : stratum) {
        CompiledAxiom c;
        auto it = preds.find(ax.head.predicate);
        if (it == preds.end()) throw Error("undeclared-predicate", "predicate '" + ax.head.predicate + "' is not declared");
        c.head = it->second;
        c.arity = ax.head.terms.size();
        std::map<std::string, std::size_t> slots;
        for (const auto& t : ax.head.terms) {
          if (!t.is_variable() || !slots.emplace(t.name, slots.size()).second)
            throw Error("head", "axiom heads need pairwise distinct variables");
        }
        c.body = CompiledFormula(ax.body, preds, *universe_, slots);
        c.slots = slots.size();
        compiled.push_back(std::move(c));
        if (std::find(affected.begin(), affected.end(), it->second) == affected.end()) affected.push_back(it->second);
      }
      strata_.push_back(std::move(compiled));
      affected_.push_back(std::move(affected));
    }
  }

  const Signature& signature() const { return *signature_; }
  const Universe& universe() const { return *universe_; }
  std::size_t strata_count() const { return strata_.size(); }
  const std::vector<std::size_t>& affected(std::size_t stratum) const { return affected_.at(stratum); }

  /// Extended-state skeleton: basic atoms copied from `basic` (matched by
  /// predicate name), every derived atom false.
  TruthAssignment initial_state(const TruthAssignment& basic) const {
    TruthAssignment s(signature_, universe_);
    for (std::size_t p = 0; p < signature_->size(); ++p) {
      s.cover(p);
      const Predicate& pred = (*signature_)[p];
      if (pred.derived()) continue;
      auto q = basic.predicate_index(pred.name);
      if (!q || !basic.covers(*q)) throw Error("state", "basic state does not cover '" + pred.name + "'");
      if (basic.signature()[*q].arity != pred.arity) throw Error("arity", "basic state disagrees on arity of '" + pred.name + "'");
      if (!(basic.universe() == *universe_)) throw Error("universe", "basic state uses a different universe");
      s.bits(p) = basic.bits(*q);
    }
    return s;
  }

  /// Fires axioms of `stratum` in place until nothing changes. With `rng`,
  /// every pass visits axioms and substitutions in a random order.
  void extend_stratum(std::size_t stratum, TruthAssignment& s, std::mt19937_64* rng = nullptr) const {
    const auto& axioms = strata_.at(stratum);
    std::vector<std::size_t> env(max_slots(stratum) + 1);
    std::vector<std::size_t> order(axioms.size());
    std::vector<std::size_t> subs;
    for (bool changed = true; changed;) {
      changed = false;
      std::iota(order.begin(), order.end(), std::size_t{0});
      if (rng) std::shuffle(order.begin(), order.end(), *rng);
      for (std::size_t a : order) {
        const CompiledAxiom& ax = axioms[a];
        const std::size_t count = universe_->tuple_count(ax.arity);
        subs.resize(count);
        std::iota(subs.begin(), subs.end(), std::size_t{0});
        if (rng) std::shuffle(subs.begin(), subs.end(), *rng);
        for (std::size_t code : subs) {
          if (s.get(ax.head, code)) continue;
          bind_head(ax, code, env.data());
          if (ax.body.eval(s, env.data())) {
            s.set(ax.head, code);
            changed = true;
          }
        }
      }
    }
  }

  /// Staged evaluation: in every stage all bodies are evaluated against a
  /// snapshot taken at the start of the stage. Produces the same final
  /// assignment as extend_stratum and records each new atom's stage.
  StageTable extend_stratum_in_stages(std::size_t stratum, TruthAssignment& s) const {
    const auto& axioms = strata_.at(stratum);
    StageTable table;
    table.stratum = stratum;
    table.predicates = affected_.at(stratum);
    for (std::size_t p : table.predicates) table.stages[p].assign(universe_->tuple_count((*signature_)[p].arity), 0);
    std::vector<std::size_t> env(max_slots(stratum) + 1);
    for (std::size_t j = 0;; ++j) {
      const TruthAssignment snapshot = s;
      bool changed = false;
      for (const CompiledAxiom& ax : axioms) {
        const std::size_t count = universe_->tuple_count(ax.arity);
        for (std::size_t code = 0; code < count; ++code) {
          if (s.get(ax.head, code)) continue;
          bind_head(ax, code, env.data());
          if (ax.body.eval(snapshot, env.data())) {
            s.set(ax.head, code);
            table.stages[ax.head][code] = j + 1;
            changed = true;
          }
        }
      }
      if (!changed) {
        table.fixpoint = j;
        return table;
      }
    }
  }

  /// Extension of a basic state: all derived atoms start false, then every
  /// stratum is run to its fixed point in order. `strata` limits evaluation
  /// to a prefix; `order_seed` randomizes the firing order.
  TruthAssignment extend(const TruthAssignment& basic, std::optional<std::uint64_t> order_seed = std::nullopt,
                         std::optional<std::size_t> strata = std::nullopt) const {
    TruthAssignment s = initial_state(basic);
    std::optional<std::mt19937_64> rng;
    if (order_seed) rng.emplace(*order_seed);
    const std::size_t n = std::min(strata.value_or(strata_.size()), strata_.size());
    for (std::size_t i = 0; i < n; ++i) extend_stratum(i, s, rng ? &*rng : nullptr);
    return s;
  }

  /// As extend, but every stratum is evaluated in stages; the stage table of
  /// each stratum is appended to `tables` when given.
  TruthAssignment extend_in_stages(const TruthAssignment& basic, std::vector<StageTable>* tables = nullptr) const {
    TruthAssignment s = initial_state(basic);
    for (std::size_t i = 0; i < strata_.size(); ++i) {
      StageTable t = extend_stratum_in_stages(i, s);
      if (tables) tables->push_back(std::move(t));
    }
    return s;
  }

 private:
  struct CompiledAxiom {
    std::size_t head = 0;
    std::size_t arity = 0;
    std::size_t slots = 0;
    CompiledFormula body;
  };

  std::size_t max_slots(std::size_t stratum) const {
    std::size_t m = 0;
    for (const auto& ax : strata_.at(stratum)) m = std::max(m, ax.slots);
    return m;
  }

  void bind_head(const CompiledAxiom& ax, std::size_t code, std::size_t* env) const {
    for (std::size_t i = ax.arity; i-- > 0;) {
      env[i] = code % universe_->size();
      code /= universe_->size();
    }
  }

  std::shared_ptr<const Signature> signature_;
  std::shared_ptr<const Universe> universe_;
  std::vector<std::vector<CompiledAxiom>> strata_;
  std::vector<std::vector<std::size_t>> affected_;
};

inline TruthAssignment extend(const AxiomProgram& program, const Universe& universe, const TruthAssignment& basic) {
  return CompiledProgram(program, universe).extend(basic);
}

// ---------------------------------------------------------------------------
// Stage relations

enum class StageRelation : std::uint8_t { lt, leq, nlt, nleq, tri };

inline constexpr std::size_t kStageRelationCount = 5;
inline constexpr StageRelation kStageRelations[] = {StageRelation::lt, StageRelation::leq, StageRelation::nlt,
                                                    StageRelation::nleq, StageRelation::tri};

inline const char* to_string(StageRelation r) {
  switch (r) {
    case StageRelation::lt: return "lt";
    case StageRelation::leq: return "leq";
    case StageRelation::nlt: return "nlt";
    case StageRelation::nleq: return "nleq";
    case StageRelation::tri: return "tri";
  }
  return "?";
}

/// Extensional stage relations between the atoms of P_i and P_j for all
/// i, j. Pair (a, b) is stored at code(a) * n^arity(P_j) + code(b), which is
/// the tuple code of the concatenated argument list.
class StageRelations {
 public:
  StageRelations(std::size_t m, std::size_t relation_sets) : m_(m), sets_(relation_sets) {}

  std::size_t size() const { return m_; }

  const std::vector<std::uint8_t>& get(StageRelation r, std::size_t i, std::size_t j) const {
    if (i >= m_ || j >= m_) throw Error("range", "stage relation index out of range");
    return sets_[(static_cast<std::size_t>(r) * m_ + i) * m_ + j];
  }
  std::vector<std::uint8_t>& get(StageRelation r, std::size_t i, std::size_t j) {
    if (i >= m_ || j >= m_) throw Error("range", "stage relation index out of range");
    return sets_[(static_cast<std::size_t>(r) * m_ + i) * m_ + j];
  }

 private:
  std::size_t m_;
  std::vector<std::vector<std::uint8_t>> sets_;
};

/// Computes the five relations directly from stage numbers.
inline StageRelations stage_relations(const StageTable& table, const Signature& signature, const Universe& universe) {
  const std::size_t m = table.predicates.size();
  const std::size_t f = table.fixpoint;
  StageRelations rel(m, kStageRelationCount * m * m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t pi = table.predicates[i];
    const std::size_t ni = universe.tuple_count(signature[pi].arity);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t pj = table.predicates[j];
      const std::size_t nj = universe.tuple_count(signature[pj].arity);
      for (StageRelation r : kStageRelations) rel.get(r, i, j).assign(ni * nj, 0);
      for (std::size_t a = 0; a < ni; ++a) {
        const std::size_t sa = table.stage(pi, a);
        for (std::size_t b = 0; b < nj; ++b) {
          const std::size_t sb = table.stage(pj, b);
          const std::size_t code = a * nj + b;
          rel.get(StageRelation::lt, i, j)[code] = sa < sb;
          rel.get(StageRelation::leq, i, j)[code] = sa <= sb && sa <= f;
          rel.get(StageRelation::nlt, i, j)[code] = sa >= sb;
          rel.get(StageRelation::nleq, i, j)[code] = sa > sb || sa == f + 1;
          rel.get(StageRelation::tri, i, j)[code] = sa + 1 == sb;
        }
      }
    }
  }
  return rel;
}

}  // namespace axf

#pragma once

// Elimination of negative occurrences of derived predicates.
//
// For a stratum with derived predicates P_1..P_m (bodies phi_1..phi_m after
// normalization) five families of stage predicates are generated, one per
// ordered pair (i, j):
//
//   lt   x <_ij y     stage(x, i) <  stage(y, j)
//   leq  x <=_ij y    stage(x, i) <= stage(y, j) and stage(x, i) <= f
//   nlt  x !<_ij y    stage(x, i) >= stage(y, j)
//   nleq x !<=_ij y   stage(x, i) >  stage(y, j) or stage(x, i) = f + 1
//   tri  x <|_ij y    stage(x, i) + 1 = stage(y, j)
//
// with defining axioms in which every derived predicate occurs positively:
//
//   lt_ij(x,y)   <- OR_k EX z (leq_ik(x,z) & tri_kj(z,y))
//   leq_ij(x,y)  <- phi_i(x)[lt_j y]
//   nlt_ij(x,y)  <- phi_j(y)[false] | OR_k EX z (nleq_ik(x,z) & tri_kj(z,y))
//                   | AND_k ALL z ~phi_k(z)[false]
//   nleq_ij(x,y) <- ~phi_i(x)[~nlt_j y]
//   tri_ij(x,y)  <- phi_i(x)[lt_i x] & ~phi_j(y)[~nlt_i x]
//                   & (phi_j(y)[leq_i x] | AND_k ALL z (~phi_k(z)[~nleq_i x] | phi_k(z)[lt_i x]))
//
// where phi[rel_j y] replaces every atom P_k(z) of the stratum by rel_kj(z, y).
// P_i(a) holds iff nleq_ii(a, a) does not, so a negative occurrence P_i(t)
// in a later stratum can be replaced by ~nleq_ii(t, t).

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "axf/evaluator.hpp"
#include "axf/logic.hpp"

namespace axf {

/// One body per derived predicate of a stratum, over canonical head
/// variables v1..vr; bound variables are renamed apart across all bodies.
struct NormalizedStratum {
  Stratum original;
  std::vector<std::string> predicates;
  std::vector<std::size_t> arities;
  std::vector<Formula> bodies;

  std::size_t size() const { return predicates.size(); }

  std::optional<std::size_t> index_of(const std::string& pred) const {
    auto it = std::find(predicates.begin(), predicates.end(), pred);
    if (it == predicates.end()) return std::nullopt;
    return static_cast<std::size_t>(it - predicates.begin());
  }

  static std::vector<std::string> canonical_variables(std::size_t arity) {
    std::vector<std::string> v;
    for (std::size_t t = 1; t <= arity; ++t) v.push_back("v" + std::to_string(t));
    return v;
  }

  /// The merged axioms P_i(v1..vr) <- phi_i.
  Stratum as_stratum() const {
    Stratum out;
    for (std::size_t i = 0; i < size(); ++i)
      out.push_back({{predicates[i], variables_as_terms(canonical_variables(arities[i]))}, bodies[i], {}});
    return out;
  }
};

inline NormalizedStratum normalize_stratum(const Stratum& stratum) {
  NormalizedStratum norm;
  norm.original = stratum;
  norm.predicates = affected_predicates(stratum);
  NameSupply bound;
  for (const auto& pred : norm.predicates) {
    std::vector<Formula> disjuncts;
    std::size_t arity = 0;
    for (const auto& ax : stratum) {
      if (ax.head.predicate != pred) continue;
      arity = ax.head.terms.size();
      const auto canon = NormalizedStratum::canonical_variables(arity);
      Binding to_canonical;
      for (std::size_t t = 0; t < arity; ++t) to_canonical[ax.head.terms[t].name] = Term::var(canon[t]);
      disjuncts.push_back(substitute(freshen_bound(ax.body, bound, "b"), to_canonical));
    }
    norm.arities.push_back(arity);
    norm.bodies.push_back(Formula::disjunction(std::move(disjuncts)));
  }
  return norm;
}

/// Names of the 5m^2 stage predicates generated for one stratum, plus the
/// optional auxiliary predicates.
struct StagePredicateFamily {
  std::size_t stratum = 0;
  std::size_t round = 0;
  std::vector<std::string> predicates;
  std::vector<std::size_t> arities;
  std::vector<std::string> names;       // index (rel * m + i) * m + j
  std::optional<std::string> none_aux;  // nullary: nothing is derivable
  std::vector<std::string> final_aux;   // per i: the fixed point is reached at stage(x, i)

  std::size_t size() const { return predicates.size(); }

  const std::string& name(StageRelation r, std::size_t i, std::size_t j) const {
    const std::size_t m = size();
    if (i >= m || j >= m) throw Error("range", "stage predicate index out of range");
    return names[(static_cast<std::size_t>(r) * m + i) * m + j];
  }

  std::optional<std::size_t> index_of(const std::string& pred) const {
    auto it = std::find(predicates.begin(), predicates.end(), pred);
    if (it == predicates.end()) return std::nullopt;
    return static_cast<std::size_t>(it - predicates.begin());
  }

  std::vector<Predicate> declarations() const {
    std::vector<Predicate> out;
    const std::size_t m = size();
    for (StageRelation r : kStageRelations)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out.push_back({name(r, i, j), arities[i] + arities[j], PredicateKind::derived});
    if (none_aux) out.push_back({*none_aux, 0, PredicateKind::derived});
    for (std::size_t i = 0; i < final_aux.size(); ++i) out.push_back({final_aux[i], arities[i], PredicateKind::derived});
    return out;
  }

  std::size_t stage_predicate_count() const { return names.size(); }
  std::size_t auxiliary_count() const { return (none_aux ? 1 : 0) + final_aux.size(); }
};

inline std::string stage_predicate_name(StageRelation r, const std::string& pi, const std::string& pj,
                                        std::size_t round) {
  return std::string(to_string(r)) + "__" + pi + "__" + pj + "__r" + std::to_string(round);
}

/// Builds a family whose names do not clash with `program`'s signature; the
/// round number is bumped until every name is fresh.
inline StagePredicateFamily make_stage_family(const NormalizedStratum& norm, std::size_t stratum,
                                              const AxiomProgram& program, bool optimize_aux,
                                              std::size_t first_round = 1) {
  for (std::size_t round = std::max<std::size_t>(first_round, 1);; ++round) {
    StagePredicateFamily fam;
    fam.stratum = stratum;
    fam.round = round;
    fam.predicates = norm.predicates;
    fam.arities = norm.arities;
    const std::size_t m = norm.size();
    for (StageRelation r : kStageRelations)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          fam.names.push_back(stage_predicate_name(r, norm.predicates[i], norm.predicates[j], round));
    if (optimize_aux) {
      fam.none_aux = "none__r" + std::to_string(round);
      for (std::size_t i = 0; i < m; ++i) fam.final_aux.push_back("fin__" + norm.predicates[i] + "__r" + std::to_string(round));
    }
    bool fresh = true;
    std::set<std::string> seen;
    for (const auto& d : fam.declarations())
      if (program.find_predicate(d.name) != nullptr || !seen.insert(d.name).second) fresh = false;
    if (fresh) return fam;
  }
}

enum class StageMode : std::uint8_t { lt, leq, not_nlt, not_nleq, bottom };

/// phi[mode_j target]: every atom P_k(z) over a predicate of the family is
/// replaced by lt_kj(z,target), leq_kj(z,target), ~nlt_kj(z,target),
/// ~nleq_kj(z,target) or false. Other atoms are left alone.
inline Formula substitute_stage(const Formula& phi, StageMode mode, std::size_t j, const std::vector<Term>& target,
                                const StagePredicateFamily& family) {
  if (mode != StageMode::bottom) {
    if (j >= family.size()) throw Error("range", "stage substitution index out of range");
    if (target.size() != family.arities[j])
      throw Error("arity", "stage substitution target has " + std::to_string(target.size()) + " terms, expected " +
                               std::to_string(family.arities[j]));
  }
  return map_atoms(phi, [&](const Formula& atom, Polarity) {
    auto k = family.index_of(atom.predicate());
    if (!k) return atom;
    if (mode == StageMode::bottom) return Formula::bottom();
    std::vector<Term> args = atom.terms();
    args.insert(args.end(), target.begin(), target.end());
    switch (mode) {
      case StageMode::lt:
        return Formula::atom(family.name(StageRelation::lt, *k, j), std::move(args));
      case StageMode::leq:
        return Formula::atom(family.name(StageRelation::leq, *k, j), std::move(args));
      case StageMode::not_nlt:
        return Formula::negation(Formula::atom(family.name(StageRelation::nlt, *k, j), std::move(args)));
      case StageMode::not_nleq:
        return Formula::negation(Formula::atom(family.name(StageRelation::nleq, *k, j), std::move(args)));
      case StageMode::bottom:
        break;
    }
    return Formula::bottom();
  });
}

/// Constructs the individual stage axioms of one family.
class StageAxiomBuilder {
 public:
  StageAxiomBuilder(const NormalizedStratum& norm, const StagePredicateFamily& family)
      : norm_(norm), family_(family) {}

  /// The defining axiom of rel_ij. With `use_aux` the shared subformulas are
  /// replaced by the family's auxiliary predicates.
  Axiom stage_axiom(StageRelation rel, std::size_t i, std::size_t j, bool use_aux) const {
    NameSupply names;
    const auto x = fresh_tuple(names, "x", norm_.arities.at(i));
    const auto y = fresh_tuple(names, "y", norm_.arities.at(j));
    const std::size_t m = norm_.size();
    Formula body;
    switch (rel) {
      case StageRelation::lt: {
        std::vector<Formula> alts;
        for (std::size_t k = 0; k < m; ++k) {
          auto w = fresh_names(names, "w", norm_.arities[k]);
          auto wt = variables_as_terms(w);
          alts.push_back(Formula::exists(
              w, Formula::conjunction({stage_atom(StageRelation::leq, i, k, x, wt), stage_atom(StageRelation::tri, k, j, wt, y)})));
        }
        body = Formula::disjunction(std::move(alts));
        break;
      }
      case StageRelation::leq:
        body = substitute_stage(phi(i, x, names), StageMode::lt, j, y, family_);
        break;
      case StageRelation::nlt: {
        std::vector<Formula> alts;
        for (std::size_t k = 0; k < m; ++k) {
          auto w = fresh_names(names, "w", norm_.arities[k]);
          auto wt = variables_as_terms(w);
          alts.push_back(Formula::exists(
              w, Formula::conjunction({stage_atom(StageRelation::nleq, i, k, x, wt), stage_atom(StageRelation::tri, k, j, wt, y)})));
        }
        body = Formula::disjunction({substitute_stage(phi(j, y, names), StageMode::bottom, j, y, family_),
                                     Formula::disjunction(std::move(alts)),
                                     use_aux ? Formula::atom(*family_.none_aux, {}) : nothing_derivable(names)});
        break;
      }
      case StageRelation::nleq:
        body = Formula::negation(substitute_stage(phi(i, x, names), StageMode::not_nlt, j, y, family_));
        break;
      case StageRelation::tri:
        body = Formula::conjunction(
            {substitute_stage(phi(i, x, names), StageMode::lt, i, x, family_),
             Formula::negation(substitute_stage(phi(j, y, names), StageMode::not_nlt, i, x, family_)),
             Formula::disjunction({substitute_stage(phi(j, y, names), StageMode::leq, i, x, family_),
                                   use_aux ? Formula::atom(family_.final_aux.at(i), x) : fixpoint_at(i, x, names)})});
        break;
    }
    std::vector<Term> head = x;
    head.insert(head.end(), y.begin(), y.end());
    return {{family_.name(rel, i, j), std::move(head)}, std::move(body), {}};
  }

  /// none() <- AND_k ALL z ~phi_k(z)[false]
  Axiom none_axiom() const {
    NameSupply names;
    return {{family_.none_aux.value(), {}}, nothing_derivable(names), {}};
  }

  /// fin_i(x) <- AND_k ALL z (~phi_k(z)[~nleq_i x] | phi_k(z)[lt_i x])
  Axiom final_axiom(std::size_t i) const {
    NameSupply names;
    const auto x = fresh_tuple(names, "x", norm_.arities.at(i));
    return {{family_.final_aux.at(i), x}, fixpoint_at(i, x, names), {}};
  }

  /// phi_k with fresh bound variables and its head variables replaced by
  /// `args`.
  Formula phi(std::size_t k, const std::vector<Term>& args, NameSupply& names) const {
    const auto canon = NormalizedStratum::canonical_variables(norm_.arities.at(k));
    Binding b;
    for (std::size_t t = 0; t < canon.size(); ++t) b[canon[t]] = args.at(t);
    return substitute(freshen_bound(norm_.bodies[k], names, "z"), b);
  }

  Formula stage_atom(StageRelation r, std::size_t i, std::size_t j, const std::vector<Term>& a,
                     const std::vector<Term>& b) const {
    std::vector<Term> args = a;
    args.insert(args.end(), b.begin(), b.end());
    return Formula::atom(family_.name(r, i, j), std::move(args));
  }

  static std::vector<std::string> fresh_names(NameSupply& names, const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t t = 0; t < n; ++t) out.push_back(names.fresh(prefix));
    return out;
  }

  static std::vector<Term> fresh_tuple(NameSupply& names, const std::string& prefix, std::size_t n) {
    return variables_as_terms(fresh_names(names, prefix, n));
  }

 private:
  Formula nothing_derivable(NameSupply& names) const {
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < norm_.size(); ++k) {
      auto w = fresh_names(names, "w", norm_.arities[k]);
      auto wt = variables_as_terms(w);
      parts.push_back(Formula::forall(
          w, Formula::negation(substitute_stage(phi(k, wt, names), StageMode::bottom, k, wt, family_))));
    }
    return Formula::conjunction(std::move(parts));
  }

  Formula fixpoint_at(std::size_t i, const std::vector<Term>& x, NameSupply& names) const {
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < norm_.size(); ++k) {
      auto w = fresh_names(names, "w", norm_.arities[k]);
      auto wt = variables_as_terms(w);
      parts.push_back(Formula::forall(
          w, Formula::disjunction(
                 {Formula::negation(substitute_stage(phi(k, wt, names), StageMode::not_nleq, i, x, family_)),
                  substitute_stage(phi(k, wt, names), StageMode::lt, i, x, family_)})));
    }
    return Formula::conjunction(std::move(parts));
  }

  const NormalizedStratum& norm_;
  const StagePredicateFamily& family_;
};

/// All stage axioms of a family: grouped by relation (lt, leq, nlt, nleq,
/// tri), then by i and j; the auxiliary axioms follow when `optimize_aux`.
inline Stratum generate_stage_axioms(const NormalizedStratum& norm, const StagePredicateFamily& family,
                                     bool optimize_aux) {
  if (optimize_aux && (!family.none_aux || family.final_aux.size() != norm.size()))
    throw Error("family", "stage family was generated without auxiliary predicates");
  StageAxiomBuilder builder(norm, family);
  Stratum out;
  for (StageRelation r : kStageRelations)
    for (std::size_t i = 0; i < norm.size(); ++i)
      for (std::size_t j = 0; j < norm.size(); ++j) out.push_back(builder.stage_axiom(r, i, j, optimize_aux));
  if (optimize_aux) {
    out.push_back(builder.none_axiom());
    for (std::size_t i = 0; i < norm.size(); ++i) out.push_back(builder.final_axiom(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Size metrics

inline bool is_generated_predicate(const std::string& name) {
  static const std::regex stage(R"(^(lt|leq|nlt|nleq|tri)__.+__r[0-9]+$)");
  static const std::regex aux(R"(^(none__r[0-9]+|fin__.+__r[0-9]+)$)");
  return std::regex_match(name, stage) || std::regex_match(name, aux);
}

inline bool is_stage_predicate(const std::string& name) {
  static const std::regex stage(R"(^(lt|leq|nlt|nleq|tri)__.+__r[0-9]+$)");
  return std::regex_match(name, stage);
}

struct StratumMetrics {
  std::size_t m = 0;  // predicates affected by the stratum
  std::size_t r = 0;  // their maximal arity
  std::size_t R = 0;  // sum of their arities
  std::size_t o = 0;  // occurrences of those predicates in the stratum's bodies
  std::size_t q = 0;  // node count of all heads and bodies
  std::size_t stage_predicates = 0;
  std::size_t stage_axiom_size = 0;  // share of q taken by stage and auxiliary axioms
};

struct SizeMetrics {
  std::vector<StratumMetrics> strata;
  std::size_t signature_size = 0;
  std::size_t Q = 0;
  std::size_t stage_predicates = 0;
};

inline SizeMetrics compute_metrics(const AxiomProgram& program) {
  SizeMetrics out;
  out.signature_size = program.signature.size();
  out.Q = out.signature_size;
  for (const auto& p : program.signature)
    if (is_stage_predicate(p.name)) ++out.stage_predicates;
  for (const auto& stratum : program.strata) {
    StratumMetrics sm;
    const auto affected = affected_predicates(stratum);
    const std::set<std::string> own(affected.begin(), affected.end());
    sm.m = affected.size();
    for (const auto& name : affected) {
      const Predicate* p = program.find_predicate(name);
      const std::size_t a = p ? p->arity : 0;
      sm.r = std::max(sm.r, a);
      sm.R += a;
      if (is_stage_predicate(name)) ++sm.stage_predicates;
    }
    for (const auto& ax : stratum) {
      const std::size_t size = node_count(ax.head) + node_count(ax.body);
      sm.q += size;
      if (is_generated_predicate(ax.head.predicate)) sm.stage_axiom_size += size;
      for_each_atom(ax.body, [&](const Formula& a, const std::vector<std::size_t>&, Polarity) {
        if (own.contains(a.predicate())) ++sm.o;
      });
    }
    out.Q += sm.q;
    out.strata.push_back(sm);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simplification

/// Folds true/false through connectives and quantifiers (universes are
/// never empty). Double negations are kept.
inline Formula fold_constants(const Formula& phi) {
  switch (phi.kind()) {
    case FormulaKind::atom:
    case FormulaKind::top:
    case FormulaKind::bottom:
      return phi;
    case FormulaKind::negation: {
      Formula c = fold_constants(phi.child(0));
      if (c.is(FormulaKind::top)) return Formula::bottom();
      if (c.is(FormulaKind::bottom)) return Formula::top();
      return Formula::negation(std::move(c));
    }
    case FormulaKind::conjunction:
    case FormulaKind::disjunction: {
      const bool conj = phi.is(FormulaKind::conjunction);
      std::vector<Formula> kids;
      for (const auto& c : phi.children()) {
        Formula f = fold_constants(c);
        if (f.is(conj ? FormulaKind::bottom : FormulaKind::top)) return f;
        if (f.is(conj ? FormulaKind::top : FormulaKind::bottom)) continue;
        kids.push_back(std::move(f));
      }
      return conj ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
    }
    case FormulaKind::exists:
    case FormulaKind::forall: {
      Formula c = fold_constants(phi.child(0));
      if (c.is(FormulaKind::top) || c.is(FormulaKind::bottom)) return c;
      return rebuild(phi, {std::move(c)});
    }
  }
  return phi;
}

/// fold_constants plus removal of double negations.
inline Formula simplify(const Formula& phi) {
  Formula f = fold_constants(phi);
  auto rec = [](auto& self, const Formula& g) -> Formula {
    if (g.is(FormulaKind::negation) && g.child(0).is(FormulaKind::negation)) return self(self, g.child(0).child(0));
    if (g.children().empty()) return g;
    std::vector<Formula> kids;
    for (const auto& c : g.children()) kids.push_back(self(self, c));
    return rebuild(g, std::move(kids));
  };
  return rec(rec, f);
}

inline AxiomProgram simplify_program(AxiomProgram program) {
  for (auto& stratum : program.strata)
    for (auto& ax : stratum) ax.body = simplify(ax.body);
  return program;
}

// ---------------------------------------------------------------------------
// Elimination and merging

struct Replacement {
  OccurrenceRef occurrence;
  std::string replacement;  // predicate substituted for the occurrence ("false" for undefined predicates)
};

struct TransformReport {
  std::vector<Replacement> replacements;
  std::vector<StagePredicateFamily> families;
  SizeMetrics before;
  SizeMetrics after;
  std::size_t passes = 0;
  bool optimize_aux = false;
  bool merged = false;
  bool simplified = false;

  const StagePredicateFamily* family_for(std::size_t stratum) const {
    for (const auto& f : families)
      if (f.stratum == stratum) return &f;
    return nullptr;
  }
};

struct TransformResult {
  AxiomProgram program;
  TransformReport report;
};

class MergeRefused : public Error {
 public:
  explicit MergeRefused(std::vector<OccurrenceRef> occurrences)
      : Error("merge", describe(occurrences)), occurrences_(std::move(occurrences)) {}

  const std::vector<OccurrenceRef>& occurrences() const { return occurrences_; }

 private:
  static std::string describe(const std::vector<OccurrenceRef>& occ) {
    std::string s = "cannot merge strata: derived predicates occur negatively";
    for (const auto& o : occ)
      s += "\n  '" + o.predicate + "' in stratum " + std::to_string(o.stratum + 1) + ", axiom " +
           std::to_string(o.axiom + 1);
    return s;
  }

  std::vector<OccurrenceRef> occurrences_;
};

/// Repeatedly picks the latest stratum whose predicates occur negatively,
/// gives it stage axioms, and replaces every negative occurrence P_i(t) in
/// later strata by ~nleq_ii(t, t). Stage axioms negate stratum bodies and may
/// create new negative occurrences of earlier predicates only, so the picked
/// stratum moves strictly towards the front and is still unmodified when its
/// stage axioms are generated.
inline TransformResult eliminate_negative_occurrences(const AxiomProgram& input, bool optimize_aux = false) {
  validate_program(input);
  TransformResult result{input, {}};
  AxiomProgram& p = result.program;
  TransformReport& report = result.report;
  report.optimize_aux = optimize_aux;
  report.before = compute_metrics(input);
  std::size_t next_round = 1;
  const std::size_t pass_limit = 4 * (p.strata.size() + 1) * (p.strata.size() + 1) + 16;

  for (;;) {
    const auto home = defining_strata(p);
    const auto negs = negative_occurrences(p, p.derived_predicates());
    if (negs.empty()) break;
    if (++report.passes > pass_limit) throw InternalError("elimination did not terminate");

    // Predicates without axioms are constantly false.
    bool undefined = false;
    for (const auto& occ : negs) {
      if (home.contains(occ.predicate)) continue;
      undefined = true;
      Axiom& ax = p.strata[occ.stratum][occ.axiom];
      ax.body = replace_at(ax.body, occ.path, Formula::bottom());
      report.replacements.push_back({occ, "false"});
      break;
    }
    if (undefined) continue;

    std::size_t target = 0;
    for (const auto& occ : negs) target = std::max(target, home.at(occ.predicate));

    const StagePredicateFamily* family = report.family_for(target);
    if (family == nullptr) {
      NormalizedStratum norm = normalize_stratum(p.strata[target]);
      StagePredicateFamily fam = make_stage_family(norm, target, p, optimize_aux, next_round);
      next_round = fam.round + 1;
      for (auto& ax : generate_stage_axioms(norm, fam, optimize_aux)) p.strata[target].push_back(std::move(ax));
      for (auto& d : fam.declarations()) p.signature.push_back(std::move(d));
      p.sort_signature();
      report.families.push_back(std::move(fam));
      family = &report.families.back();
    }

    const std::set<std::string> own(family->predicates.begin(), family->predicates.end());
    std::size_t replaced = 0;
    for (const auto& occ : negs) {
      if (!own.contains(occ.predicate)) continue;
      if (occ.stratum <= target) throw InternalError("negative occurrence of '" + occ.predicate + "' in its own stratum");
      report.replacements.push_back({occ, family->name(StageRelation::nleq, *family->index_of(occ.predicate),
                                                       *family->index_of(occ.predicate))});
      ++replaced;
    }
    for (std::size_t s = target + 1; s < p.strata.size(); ++s) {
      for (auto& ax : p.strata[s]) {
        ax.body = map_atoms(ax.body, [&](const Formula& atom, Polarity pol) {
          if (pol != Polarity::negative) return atom;
          auto i = family->index_of(atom.predicate());
          if (!i) return atom;
          std::vector<Term> args = atom.terms();
          args.insert(args.end(), atom.terms().begin(), atom.terms().end());
          return Formula::negation(Formula::atom(family->name(StageRelation::nleq, *i, *i), std::move(args)));
        });
      }
    }
    if (replaced == 0) throw InternalError("elimination step made no progress");
  }
  report.after = compute_metrics(p);
  return result;
}

/// Combines all strata into one. Requires that no derived predicate occurs
/// negatively.
inline AxiomProgram merge_to_single_stratum(const AxiomProgram& program) {
  auto negs = negative_occurrences(program, program.derived_predicates());
  if (!negs.empty()) throw MergeRefused(std::move(negs));
  if (program.strata.size() <= 1) return program;
  AxiomProgram out = program;
  out.strata.assign(1, {});
  for (const auto& stratum : program.strata)
    for (const auto& ax : stratum) out.strata.front().push_back(ax);
  return out;
}

/// Re-identifies the stage families of `transformed`, a program produced
/// from `original` by eliminate_negative_occurrences, from predicate names.
inline std::vector<StagePredicateFamily> recover_families(const AxiomProgram& original,
                                                          const AxiomProgram& transformed) {
  std::vector<StagePredicateFamily> out;
  for (std::size_t l = 0; l < original.strata.size(); ++l) {
    const auto preds = affected_predicates(original.strata[l]);
    if (preds.empty()) continue;
    const std::string prefix = "nleq__" + preds.front() + "__" + preds.front() + "__r";
    std::set<std::size_t> rounds;
    for (const auto& p : transformed.signature) {
      if (p.name.rfind(prefix, 0) != 0) continue;
      const std::string tail = p.name.substr(prefix.size());
      if (!tail.empty() && tail.size() < 10 && std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; }))
        rounds.insert(std::stoul(tail));
    }
    for (std::size_t round : rounds) {
      StagePredicateFamily fam;
      fam.stratum = l;
      fam.round = round;
      fam.predicates = preds;
      bool complete = true;
      for (const auto& name : preds) {
        const Predicate* p = original.find_predicate(name);
        fam.arities.push_back(p ? p->arity : 0);
      }
      for (StageRelation r : kStageRelations)
        for (std::size_t i = 0; i < preds.size(); ++i)
          for (std::size_t j = 0; j < preds.size(); ++j) {
            fam.names.push_back(stage_predicate_name(r, preds[i], preds[j], round));
            const Predicate* p = transformed.find_predicate(fam.names.back());
            if (p == nullptr || p->arity != fam.arities[i] + fam.arities[j]) complete = false;
          }
      if (!complete) continue;
      const std::string none = "none__r" + std::to_string(round);
      if (transformed.find_predicate(none) != nullptr) {
        fam.none_aux = none;
        for (const auto& name : preds) fam.final_aux.push_back("fin__" + name + "__r" + std::to_string(round));
      }
      out.push_back(std::move(fam));
      break;
    }
  }
  return out;
}

struct TransformOptions {
  bool optimize_aux = false;
  bool merge = false;
  bool simplify = false;
};

/// Elimination followed by the optional simplification and merge passes.
inline TransformResult transform(const AxiomProgram& input, const TransformOptions& options) {
  TransformResult r = eliminate_negative_occurrences(input, options.optimize_aux);
  if (options.simplify) {
    r.program = simplify_program(std::move(r.program));
    r.report.simplified = true;
  }
  if (options.merge) {
    r.program = merge_to_single_stratum(r.program);
    r.report.merged = true;
  }
  r.report.after = compute_metrics(r.program);
  return r;
}

}  // namespace axf

#pragma once

// Relational vocabulary, first-order formulas, axioms and stratified axiom
// programs, together with the purely syntactic analyses on them: polarity,
// substitution, well-formedness and the stratification check.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axf/diagnostics.hpp"

namespace axf {

enum class PredicateKind : std::uint8_t { basic, derived };

struct Predicate {
  std::string name;
  std::size_t arity = 0;
  PredicateKind kind = PredicateKind::basic;

  bool derived() const { return kind == PredicateKind::derived; }
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Term {
  enum class Kind : std::uint8_t { variable, constant };

  Kind kind = Kind::variable;
  std::string name;  // without the `?` sigil for variables

  static Term var(std::string n) { return {Kind::variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::constant, std::move(n)}; }
  bool is_variable() const { return kind == Kind::variable; }

  friend auto operator<=>(const Term&, const Term&) = default;
};

inline std::vector<Term> variables_as_terms(const std::vector<std::string>& names) {
  std::vector<Term> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(Term::var(n));
  return out;
}

enum class FormulaKind : std::uint8_t { atom, top, bottom, negation, conjunction, disjunction, exists, forall };

enum class Polarity : std::uint8_t { positive, negative };

inline Polarity flip(Polarity p) { return p == Polarity::positive ? Polarity::negative : Polarity::positive; }
inline const char* to_string(Polarity p) { return p == Polarity::positive ? "positive" : "negative"; }

/// Immutable first-order formula. Copies share structure; all constructors
/// are static factories. `conjunction`/`disjunction` collapse the unary case
/// to the child (and the empty case to true/false), quantifiers with an empty
/// variable list collapse to their body.
class Formula {
 public:
  Formula();  // true

  static Formula atom(std::string predicate, std::vector<Term> terms, SourceSpan span = {});
  static Formula top();
  static Formula bottom();
  static Formula negation(Formula sub);
  static Formula conjunction(std::vector<Formula> subs);
  static Formula disjunction(std::vector<Formula> subs);
  static Formula exists(std::vector<std::string> vars, Formula sub);
  static Formula forall(std::vector<std::string> vars, Formula sub);

  FormulaKind kind() const;
  bool is(FormulaKind k) const { return kind() == k; }
  bool is_quantifier() const { return is(FormulaKind::exists) || is(FormulaKind::forall); }

  const std::string& predicate() const;
  const std::vector<Term>& terms() const;
  const std::vector<Formula>& children() const;
  const Formula& child(std::size_t i) const { return children().at(i); }
  const std::vector<std::string>& variables() const;
  const SourceSpan& span() const;

  Formula with_span(SourceSpan span) const;

  /// Structural equality (spans are ignored).
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(FormulaKind kind, std::string predicate, std::vector<Term> terms,
                      std::vector<Formula> children, std::vector<std::string> vars, SourceSpan span);

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  FormulaKind kind = FormulaKind::top;
  std::string predicate;
  std::vector<Term> terms;
  std::vector<Formula> children;
  std::vector<std::string> variables;
  SourceSpan span;
};

inline Formula Formula::make(FormulaKind kind, std::string predicate, std::vector<Term> terms,
                             std::vector<Formula> children, std::vector<std::string> vars, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->predicate = std::move(predicate);
  n->terms = std::move(terms);
  n->children = std::move(children);
  n->variables = std::move(vars);
  n->span = std::move(span);
  return Formula(std::move(n));
}

inline Formula::Formula() : Formula(top()) {}

inline Formula Formula::atom(std::string predicate, std::vector<Term> terms, SourceSpan span) {
  return make(FormulaKind::atom, std::move(predicate), std::move(terms), {}, {}, std::move(span));
}

inline Formula Formula::top() {
  static const Formula t = make(FormulaKind::top, {}, {}, {}, {}, {});
  return t;
}

inline Formula Formula::bottom() {
  static const Formula b = make(FormulaKind::bottom, {}, {}, {}, {}, {});
  return b;
}

inline Formula Formula::negation(Formula sub) {
  return make(FormulaKind::negation, {}, {}, {std::move(sub)}, {}, {});
}

inline Formula Formula::conjunction(std::vector<Formula> subs) {
  if (subs.empty()) return top();
  if (subs.size() == 1) return std::move(subs.front());
  return make(FormulaKind::conjunction, {}, {}, std::move(subs), {}, {});
}

inline Formula Formula::disjunction(std::vector<Formula> subs) {
  if (subs.empty()) return bottom();
  if (subs.size() == 1) return std::move(subs.front());
  return make(FormulaKind::disjunction, {}, {}, std::move(subs), {}, {});
}

inline Formula Formula::exists(std::vector<std::string> vars, Formula sub) {
  if (vars.empty()) return sub;
  return make(FormulaKind::exists, {}, {}, {std::move(sub)}, std::move(vars), {});
}

inline Formula Formula::forall(std::vector<std::string> vars, Formula sub) {
  if (vars.empty()) return sub;
  return make(FormulaKind::forall, {}, {}, {std::move(sub)}, std::move(vars), {});
}

inline FormulaKind Formula::kind() const { return node_->kind; }
inline const std::string& Formula::predicate() const { return node_->predicate; }
inline const std::vector<Term>& Formula::terms() const { return node_->terms; }
inline const std::vector<Formula>& Formula::children() const { return node_->children; }
inline const std::vector<std::string>& Formula::variables() const { return node_->variables; }
inline const SourceSpan& Formula::span() const { return node_->span; }

inline Formula Formula::with_span(SourceSpan span) const {
  auto n = std::make_shared<Node>(*node_);
  n->span = std::move(span);
  return Formula(std::move(n));
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.predicate == y.predicate && x.terms == y.terms && x.variables == y.variables &&
         x.children == y.children;
}

struct Atom {
  std::string predicate;
  std::vector<Term> terms;

  Formula as_formula() const { return Formula::atom(predicate, terms); }
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Axiom {
  Atom head;
  Formula body;
  SourceSpan span;

  friend bool operator==(const Axiom& a, const Axiom& b) { return a.head == b.head && a.body == b.body; }
};

using Stratum = std::vector<Axiom>;

/// A sequence of strata over a declared signature. `objects` is the declared
/// universe (possibly empty when the program uses no constants).
struct AxiomProgram {
  std::vector<std::string> objects;
  std::vector<Predicate> signature;
  std::vector<Stratum> strata;

  const Predicate* find_predicate(std::string_view name) const {
    for (const auto& p : signature)
      if (p.name == name) return &p;
    return nullptr;
  }

  std::optional<std::size_t> predicate_index(std::string_view name) const {
    for (std::size_t i = 0; i < signature.size(); ++i)
      if (signature[i].name == name) return i;
    return std::nullopt;
  }

  std::set<std::string> derived_predicates() const {
    std::set<std::string> out;
    for (const auto& p : signature)
      if (p.derived()) out.insert(p.name);
    return out;
  }

  /// Canonical signature order: basic before derived, then by name.
  void sort_signature() {
    std::stable_sort(signature.begin(), signature.end(), [](const Predicate& a, const Predicate& b) {
      if (a.kind != b.kind) return a.kind == PredicateKind::basic;
      return a.name < b.name;
    });
  }

  friend bool operator==(const AxiomProgram&, const AxiomProgram&) = default;
};

/// Names of the predicates affected (defined) by a stratum, in order of first
/// appearance as a head.
inline std::vector<std::string> affected_predicates(const Stratum& stratum) {
  std::vector<std::string> out;
  for (const auto& ax : stratum)
    if (std::find(out.begin(), out.end(), ax.head.predicate) == out.end()) out.push_back(ax.head.predicate);
  return out;
}

/// Maps each derived predicate with at least one axiom to the (first) stratum
/// whose axioms affect it.
inline std::map<std::string, std::size_t> defining_strata(const AxiomProgram& program) {
  std::map<std::string, std::size_t> out;
  for (std::size_t s = 0; s < program.strata.size(); ++s)
    for (const auto& ax : program.strata[s]) out.emplace(ax.head.predicate, s);
  return out;
}

// ---------------------------------------------------------------------------
// Traversal

/// Calls `f(atom, path, polarity)` for every atom in preorder.
template <class F>
void for_each_atom(const Formula& phi, F&& f) {
  std::vector<std::size_t> path;
  auto rec = [&](auto& self, const Formula& g, Polarity pol) -> void {
    switch (g.kind()) {
      case FormulaKind::atom:
        f(g, static_cast<const std::vector<std::size_t>&>(path), pol);
        return;
      case FormulaKind::top:
      case FormulaKind::bottom:
        return;
      case FormulaKind::negation:
        pol = flip(pol);
        break;
      default:
        break;
    }
    for (std::size_t i = 0; i < g.children().size(); ++i) {
      path.push_back(i);
      self(self, g.child(i), pol);
      path.pop_back();
    }
  };
  rec(rec, phi, Polarity::positive);
}

inline const Formula& subformula_at(const Formula& phi, std::span<const std::size_t> path) {
  const Formula* cur = &phi;
  for (std::size_t idx : path) {
    if (idx >= cur->children().size()) throw Error("path", "occurrence path does not resolve to a subformula");
    cur = &cur->child(idx);
  }
  return *cur;
}

/// Polarity of the atom occurrence at `path`: negative iff it lies under an
/// odd number of negations.
inline Polarity polarity_of(const Formula& body, std::span<const std::size_t> path) {
  const Formula* cur = &body;
  Polarity pol = Polarity::positive;
  for (std::size_t idx : path) {
    if (idx >= cur->children().size()) throw Error("path", "occurrence path does not resolve to a subformula");
    if (cur->is(FormulaKind::negation)) pol = flip(pol);
    cur = &cur->child(idx);
  }
  if (!cur->is(FormulaKind::atom)) throw Error("path", "occurrence path does not end at an atom");
  return pol;
}

/// Rebuilds `phi` with the node at `path` replaced.
inline Formula replace_at(const Formula& phi, std::span<const std::size_t> path, const Formula& replacement) {
  if (path.empty()) return replacement;
  if (path.front() >= phi.children().size()) throw Error("path", "occurrence path does not resolve to a subformula");
  std::vector<Formula> kids = phi.children();
  kids[path.front()] = replace_at(kids[path.front()], path.subspan(1), replacement);
  switch (phi.kind()) {
    case FormulaKind::negation:
      return Formula::negation(std::move(kids.front()));
    case FormulaKind::conjunction:
      return Formula::conjunction(std::move(kids));
    case FormulaKind::disjunction:
      return Formula::disjunction(std::move(kids));
    case FormulaKind::exists:
      return Formula::exists(phi.variables(), std::move(kids.front()));
    case FormulaKind::forall:
      return Formula::forall(phi.variables(), std::move(kids.front()));
    default:
      throw Error("path", "occurrence path does not resolve to a subformula");
  }
}

/// Rebuilds a non-atomic node with new children, keeping kind and variables.
inline Formula rebuild(const Formula& phi, std::vector<Formula> kids) {
  switch (phi.kind()) {
    case FormulaKind::negation:
      return Formula::negation(std::move(kids.at(0)));
    case FormulaKind::conjunction:
      return Formula::conjunction(std::move(kids));
    case FormulaKind::disjunction:
      return Formula::disjunction(std::move(kids));
    case FormulaKind::exists:
      return Formula::exists(phi.variables(), std::move(kids.at(0)));
    case FormulaKind::forall:
      return Formula::forall(phi.variables(), std::move(kids.at(0)));
    default:
      return phi;
  }
}

/// Bottom-up rewrite of every atom: `f(atom, polarity)` returns the
/// replacement (or the atom itself).
template <class F>
Formula map_atoms(const Formula& phi, F&& f, Polarity pol = Polarity::positive) {
  switch (phi.kind()) {
    case FormulaKind::atom:
      return f(phi, pol);
    case FormulaKind::top:
    case FormulaKind::bottom:
      return phi;
    default:
      break;
  }
  const Polarity inner = phi.is(FormulaKind::negation) ? flip(pol) : pol;
  std::vector<Formula> kids;
  kids.reserve(phi.children().size());
  bool changed = false;
  for (const auto& c : phi.children()) {
    kids.push_back(map_atoms(c, f, inner));
    changed = changed || !(kids.back() == c);
  }
  return changed ? rebuild(phi, std::move(kids)) : phi;
}

inline std::set<std::string> free_variables(const Formula& phi) {
  std::set<std::string> out;
  std::multiset<std::string> bound;
  auto rec = [&](auto& self, const Formula& g) -> void {
    if (g.is(FormulaKind::atom)) {
      for (const auto& t : g.terms())
        if (t.is_variable() && !bound.contains(t.name)) out.insert(t.name);
      return;
    }
    for (const auto& v : g.variables()) bound.insert(v);
    for (const auto& c : g.children()) self(self, c);
    for (const auto& v : g.variables()) bound.erase(bound.find(v));
  };
  rec(rec, phi);
  return out;
}

/// Representation size: every predicate, term, connective, quantifier and
/// quantified variable counts as one node.
inline std::size_t node_count(const Formula& phi) {
  std::size_t n = 1;
  if (phi.is(FormulaKind::atom)) return n + phi.terms().size();
  n += phi.variables().size();
  for (const auto& c : phi.children()) n += node_count(c);
  return n;
}

inline std::size_t node_count(const Atom& a) { return 1 + a.terms.size(); }

// ---------------------------------------------------------------------------
// Substitution

using Binding = std::map<std::string, Term>;

/// Replaces free variables according to `binding`. Quantified variables are
/// fresh (no quantifier rebinds a variable visible at that point), so no
/// capture can occur.
inline Formula substitute(const Formula& phi, const Binding& binding) {
  if (binding.empty()) return phi;
  switch (phi.kind()) {
    case FormulaKind::atom: {
      std::vector<Term> terms = phi.terms();
      bool changed = false;
      for (auto& t : terms) {
        if (!t.is_variable()) continue;
        if (auto it = binding.find(t.name); it != binding.end()) {
          t = it->second;
          changed = true;
        }
      }
      return changed ? Formula::atom(phi.predicate(), std::move(terms), phi.span()) : phi;
    }
    case FormulaKind::top:
    case FormulaKind::bottom:
      return phi;
    case FormulaKind::exists:
    case FormulaKind::forall: {
      Binding inner = binding;
      for (const auto& v : phi.variables()) inner.erase(v);
      return rebuild(phi, {substitute(phi.child(0), inner)});
    }
    default: {
      std::vector<Formula> kids;
      for (const auto& c : phi.children()) kids.push_back(substitute(c, binding));
      return rebuild(phi, std::move(kids));
    }
  }
}

/// As above, but rejects bindings to constants that are not in `objects`.
inline Formula substitute(const Formula& phi, const Binding& binding, std::span<const std::string> objects) {
  for (const auto& [var, term] : binding) {
    if (term.is_variable()) continue;
    if (std::find(objects.begin(), objects.end(), term.name) == objects.end())
      throw Error("object", "substitution binds ?" + var + " to undeclared object '" + term.name + "'");
  }
  return substitute(phi, binding);
}

/// Supplies variable names that are unused so far.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> taken) : taken_(std::move(taken)) {}

  void reserve(const std::string& name) { taken_.insert(name); }
  bool taken(const std::string& name) const { return taken_.contains(name); }

  std::string fresh(const std::string& prefix) {
    for (;;) {
      std::string candidate = prefix + std::to_string(++counters_[prefix]);
      if (taken_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::set<std::string> taken_;
  std::map<std::string, std::size_t> counters_;
};

/// Renames every quantified variable to a fresh name drawn from `names` with
/// the given prefix. Free variables are untouched.
inline Formula freshen_bound(const Formula& phi, NameSupply& names, const std::string& prefix, Binding scope = {}) {
  switch (phi.kind()) {
    case FormulaKind::atom:
      return substitute(phi, scope);
    case FormulaKind::top:
    case FormulaKind::bottom:
      return phi;
    case FormulaKind::exists:
    case FormulaKind::forall: {
      std::vector<std::string> vars;
      for (const auto& v : phi.variables()) {
        vars.push_back(names.fresh(prefix));
        scope[v] = Term::var(vars.back());
      }
      Formula body = freshen_bound(phi.child(0), names, prefix, scope);
      return phi.is(FormulaKind::exists) ? Formula::exists(std::move(vars), std::move(body))
                                         : Formula::forall(std::move(vars), std::move(body));
    }
    default: {
      std::vector<Formula> kids;
      for (const auto& c : phi.children()) kids.push_back(freshen_bound(c, names, prefix, scope));
      return rebuild(phi, std::move(kids));
    }
  }
}

inline void collect_variable_names(const Formula& phi, std::set<std::string>& out) {
  if (phi.is(FormulaKind::atom)) {
    for (const auto& t : phi.terms())
      if (t.is_variable()) out.insert(t.name);
    return;
  }
  out.insert(phi.variables().begin(), phi.variables().end());
  for (const auto& c : phi.children()) collect_variable_names(c, out);
}

/// Equality up to consistent renaming of variables: head variables are
/// matched positionally, quantified variables by binding position.
inline bool alpha_equivalent(const Axiom& a, const Axiom& b) {
  if (a.head.predicate != b.head.predicate || a.head.terms.size() != b.head.terms.size()) return false;
  std::map<std::string, std::string> fwd;
  std::map<std::string, std::string> bwd;
  for (std::size_t i = 0; i < a.head.terms.size(); ++i) {
    const Term& x = a.head.terms[i];
    const Term& y = b.head.terms[i];
    if (x.kind != y.kind) return false;
    if (!x.is_variable()) {
      if (x.name != y.name) return false;
      continue;
    }
    fwd[x.name] = y.name;
    bwd[y.name] = x.name;
  }
  auto rec = [](auto& self, const Formula& f, const Formula& g, std::map<std::string, std::string> fm,
                std::map<std::string, std::string> bm) -> bool {
    if (f.kind() != g.kind()) return false;
    switch (f.kind()) {
      case FormulaKind::atom: {
        if (f.predicate() != g.predicate() || f.terms().size() != g.terms().size()) return false;
        for (std::size_t i = 0; i < f.terms().size(); ++i) {
          const Term& x = f.terms()[i];
          const Term& y = g.terms()[i];
          if (x.kind != y.kind) return false;
          if (!x.is_variable()) {
            if (x.name != y.name) return false;
            continue;
          }
          auto fx = fm.find(x.name);
          auto by = bm.find(y.name);
          if (fx == fm.end() && by == bm.end()) {
            if (x.name != y.name) return false;  // both free and unmapped
            continue;
          }
          if (fx == fm.end() || by == bm.end() || fx->second != y.name || by->second != x.name) return false;
        }
        return true;
      }
      case FormulaKind::top:
      case FormulaKind::bottom:
        return true;
      default:
        break;
    }
    if (f.children().size() != g.children().size() || f.variables().size() != g.variables().size()) return false;
    for (std::size_t i = 0; i < f.variables().size(); ++i) {
      fm[f.variables()[i]] = g.variables()[i];
      bm[g.variables()[i]] = f.variables()[i];
    }
    for (std::size_t i = 0; i < f.children().size(); ++i)
      if (!self(self, f.child(i), g.child(i), fm, bm)) return false;
    return true;
  };
  return rec(rec, a.body, b.body, fwd, bwd);
}

// ---------------------------------------------------------------------------
// Occurrences and polarity

struct OccurrenceRef {
  std::size_t stratum = 0;
  std::size_t axiom = 0;
  std::vector<std::size_t> path;
  Polarity polarity = Polarity::positive;
  std::string predicate;
  SourceSpan span;
};

/// All occurrences of `preds` in axiom bodies, in (stratum, axiom, preorder)
/// order.
inline std::vector<OccurrenceRef> occurrences(const AxiomProgram& program, const std::set<std::string>& preds) {
  std::vector<OccurrenceRef> out;
  for (std::size_t s = 0; s < program.strata.size(); ++s) {
    for (std::size_t a = 0; a < program.strata[s].size(); ++a) {
      const Axiom& ax = program.strata[s][a];
      for_each_atom(ax.body, [&](const Formula& atom, const std::vector<std::size_t>& path, Polarity pol) {
        if (preds.contains(atom.predicate()))
          out.push_back({s, a, path, pol, atom.predicate(), atom.span().known() ? atom.span() : ax.span});
      });
    }
  }
  return out;
}

inline std::vector<OccurrenceRef> negative_occurrences(const AxiomProgram& program,
                                                       const std::set<std::string>& preds) {
  auto all = occurrences(program, preds);
  std::erase_if(all, [](const OccurrenceRef& o) { return o.polarity != Polarity::negative; });
  return all;
}

// ---------------------------------------------------------------------------
// Well-formedness and stratification

/// Structural problems other than stratification: declarations, arities,
/// heads, constants, free variables and quantifier freshness.
inline std::vector<Diagnostic> well_formedness_diagnostics(const AxiomProgram& program) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const auto& p : program.signature)
    if (!seen.insert(p.name).second) out.push_back({"duplicate-predicate", "predicate '" + p.name + "' declared twice", {}});
  std::set<std::string> objs;
  for (const auto& o : program.objects)
    if (!objs.insert(o).second) out.push_back({"duplicate-object", "object '" + o + "' declared twice", {}});

  auto check_terms = [&](const std::string& pred, const std::vector<Term>& terms, const SourceSpan& span) {
    const Predicate* p = program.find_predicate(pred);
    if (p == nullptr) {
      out.push_back({"undeclared-predicate", "predicate '" + pred + "' is not declared", span});
      return;
    }
    if (p->arity != terms.size())
      out.push_back({"arity", "predicate '" + pred + "' has arity " + std::to_string(p->arity) + " but is used with " +
                                  std::to_string(terms.size()) + " arguments",
                     span});
    for (const auto& t : terms)
      if (!t.is_variable() && !objs.contains(t.name))
        out.push_back({"unknown-object", "object '" + t.name + "' is not declared", span});
  };

  for (const auto& stratum : program.strata) {
    for (const auto& ax : stratum) {
      check_terms(ax.head.predicate, ax.head.terms, ax.span);
      if (const Predicate* p = program.find_predicate(ax.head.predicate); p != nullptr && !p->derived())
        out.push_back({"basic-head", "axiom head uses basic predicate '" + p->name + "'", ax.span});
      std::set<std::string> head_vars;
      for (const auto& t : ax.head.terms) {
        if (!t.is_variable())
          out.push_back({"head-constant", "axiom head '" + ax.head.predicate + "' has a constant argument", ax.span});
        else if (!head_vars.insert(t.name).second)
          out.push_back({"head-repeated-variable", "axiom head '" + ax.head.predicate + "' repeats ?" + t.name, ax.span});
      }
      for_each_atom(ax.body, [&](const Formula& atom, const std::vector<std::size_t>&, Polarity) {
        check_terms(atom.predicate(), atom.terms(), atom.span().known() ? atom.span() : ax.span);
      });
      for (const auto& v : free_variables(ax.body))
        if (!head_vars.contains(v))
          out.push_back({"free-variable", "body of '" + ax.head.predicate + "' has free variable ?" + v +
                                              " that is not in the head",
                         ax.span});
      // No quantifier may rebind a visible variable.
      auto rec = [&](auto& self, const Formula& g, std::set<std::string> visible) -> void {
        for (const auto& v : g.variables())
          if (!visible.insert(v).second)
            out.push_back({"shadowing", "quantifier rebinds ?" + v + " in axiom for '" + ax.head.predicate + "'", ax.span});
        for (const auto& c : g.children()) self(self, c, visible);
      };
      rec(rec, ax.body, head_vars);
    }
  }
  return out;
}

struct StratificationViolation {
  char rule = 'a';  // which condition of the stratification definition fails
  std::string predicate;
  std::size_t stratum = 0;
  std::size_t axiom = 0;
  std::optional<OccurrenceRef> occurrence;
  std::string message;
  SourceSpan span;
};

/// Checks the four stratification conditions:
///  (a) each derived predicate is affected by a single stratum;
///  (b) a predicate affected in stratum i does not occur in strata k < i;
///  (c) positive derived occurrences in stratum i are defined in strata <= i;
///  (d) negative derived occurrences in stratum i are defined in strata < i.
/// Undeclared predicates raise an Error with code "undeclared-predicate".
inline std::vector<StratificationViolation> check_stratified(const AxiomProgram& program) {
  std::vector<StratificationViolation> out;
  for (const auto& stratum : program.strata)
    for (const auto& ax : stratum) {
      if (program.find_predicate(ax.head.predicate) == nullptr)
        throw Error("undeclared-predicate", "predicate '" + ax.head.predicate + "' is not declared", ax.span);
      for_each_atom(ax.body, [&](const Formula& atom, const std::vector<std::size_t>&, Polarity) {
        if (program.find_predicate(atom.predicate()) == nullptr)
          throw Error("undeclared-predicate", "predicate '" + atom.predicate() + "' is not declared",
                      atom.span().known() ? atom.span() : ax.span);
      });
    }

  std::map<std::string, std::size_t> home = defining_strata(program);
  for (std::size_t s = 0; s < program.strata.size(); ++s) {
    for (std::size_t a = 0; a < program.strata[s].size(); ++a) {
      const Axiom& ax = program.strata[s][a];
      const std::size_t h = home.at(ax.head.predicate);
      if (h != s)
        out.push_back({'a', ax.head.predicate, s, a, std::nullopt,
                       "'" + ax.head.predicate + "' is affected by strata " + std::to_string(h + 1) + " and " +
                           std::to_string(s + 1),
                       ax.span});
    }
  }
  for (const auto& occ : occurrences(program, program.derived_predicates())) {
    auto it = home.find(occ.predicate);
    if (it == home.end()) continue;  // never defined: always false, no constraint
    const std::size_t def = it->second;
    const std::string where = "stratum " + std::to_string(occ.stratum + 1);
    if (def > occ.stratum)
      out.push_back({'b', occ.predicate, occ.stratum, occ.axiom, occ,
                     "'" + occ.predicate + "' occurs in " + where + " before its defining stratum " +
                         std::to_string(def + 1),
                     occ.span});
    if (occ.polarity == Polarity::positive && def > occ.stratum)
      out.push_back({'c', occ.predicate, occ.stratum, occ.axiom, occ,
                     "positive occurrence of '" + occ.predicate + "' in " + where + " is defined in a later stratum",
                     occ.span});
    if (occ.polarity == Polarity::negative && def >= occ.stratum)
      out.push_back({'d', occ.predicate, occ.stratum, occ.axiom, occ,
                     "negative occurrence of '" + occ.predicate + "' in " + where +
                         " is not defined in a strictly earlier stratum",
                     occ.span});
  }
  return out;
}

inline bool is_stratified(const AxiomProgram& program) { return check_stratified(program).empty(); }

/// Throws InputError unless the program is well formed and stratified.
inline void validate_program(const AxiomProgram& program) {
  auto diags = well_formedness_diagnostics(program);
  if (diags.empty()) {
    for (const auto& v : check_stratified(program))
      diags.push_back({"stratification", std::string("(") + v.rule + ") " + v.message, v.span});
  }
  if (!diags.empty()) throw InputError(std::move(diags));
}

}  // namespace axf

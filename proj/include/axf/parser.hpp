#pragma once

// Concrete S-expression syntax for axiom programs and basic states.
//
//   program  := "(" "program" objects basics deriveds stratum* ")"
//   objects  := "(" "objects" NAME* ")"
//   basics   := "(" "basic"   decl* ")"
//   deriveds := "(" "derived" decl* ")"
//   decl     := "(" NAME ARITY ")"
//   stratum  := "(" "stratum" axiom* ")"
//   axiom    := "(" "axiom" atomhead formula ")"
//   atomhead := "(" NAME VAR* ")"
//   formula  := atom | "(" "not" formula ")" | "(" "and" formula formula+ ")"
//             | "(" "or" formula formula+ ")" | "(" "imply" formula formula ")"
//             | "(" "exists" "(" VAR+ ")" formula ")"
//             | "(" "forall" "(" VAR+ ")" formula ")" | "true" | "false"
//   atom     := "(" NAME term* ")"      term := VAR | NAME      VAR := "?" NAME
//   state    := "(" "state" groundatom* ")"
//
// `;` starts a comment that runs to the end of the line.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axf/diagnostics.hpp"
#include "axf/logic.hpp"
#include "axf/state.hpp"

namespace axf {

namespace detail {

struct SExpr {
  bool is_list = false;
  std::string text;  // symbol text when !is_list
  std::vector<SExpr> items;
  SourceSpan span;

  bool is_symbol(std::string_view s) const { return !is_list && text == s; }
  bool head_is(std::string_view s) const { return is_list && !items.empty() && items.front().is_symbol(s); }
};

inline bool is_symbol_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '?' || c == '.';
}

class SExprReader {
 public:
  SExprReader(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  /// Reads every top-level expression.
  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return out;
      out.push_back(read(0));
    }
  }

 private:
  static constexpr std::size_t kMaxDepth = 2000;

  SourceSpan span_from(std::size_t start, std::size_t line, std::size_t col) const {
    return {file_, start, pos_, line, col};
  }

  [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
    throw InputError({{code, msg, {file_, pos_, std::min(pos_ + 1, text_.size()), line_, col_}}});
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read(std::size_t depth) {
    if (depth > kMaxDepth) fail("syntax", "expression nesting is too deep");
    skip_space();
    if (pos_ >= text_.size()) fail("syntax", "unexpected end of input");
    const std::size_t start = pos_, line = line_, col = col_;
    const char c = text_[pos_];
    if (c == ')') fail("syntax", "unexpected ')'");
    SExpr e;
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) {
          throw InputError({{"syntax", "unclosed '('", {file_, start, start + 1, line, col}}});
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read(depth + 1));
      }
    } else {
      while (pos_ < text_.size() && is_symbol_char(static_cast<unsigned char>(text_[pos_]))) advance();
      if (pos_ == start) fail("lexical", std::string("unexpected character '") + printable(c) + "'");
      if (pos_ < text_.size()) {
        const char n = text_[pos_];
        if (n != '(' && n != ')' && n != ';' && !std::isspace(static_cast<unsigned char>(n)))
          fail("lexical", std::string("unexpected character '") + printable(n) + "'");
      }
      e.text = std::string(text_.substr(start, pos_ - start));
    }
    e.span = span_from(start, line, col);
    return e;
  }

  static std::string printable(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) return std::string(1, c);
    std::ostringstream s;
    s << "\\x" << std::hex << static_cast<int>(u);
    return s.str();
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {"program", "objects", "basic", "derived", "stratum", "axiom",
                                                       "not",     "and",     "or",    "imply",   "exists",  "forall",
                                                       "true",    "false",   "state"};
  return k;
}

inline bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

class ProgramBuilder {
 public:
  [[noreturn]] static void fail(const std::string& code, const std::string& msg, const SourceSpan& span) {
    throw InputError({{code, msg, span}});
  }

  std::string name(const SExpr& e, const char* what) {
    if (e.is_list || !valid_name(e.text)) fail("syntax", std::string("expected ") + what, e.span);
    return e.text;
  }

  std::string predicate_name(const SExpr& e) {
    std::string n = name(e, "a predicate name");
    if (keywords().contains(n)) fail("syntax", "'" + n + "' is a keyword and cannot name a predicate", e.span);
    return n;
  }

  std::string variable(const SExpr& e) {
    if (e.is_list || e.text.size() < 2 || e.text[0] != '?' || !valid_name(std::string_view(e.text).substr(1)))
      fail("syntax", "expected a variable (?name)", e.span);
    return e.text.substr(1);
  }

  Term term(const SExpr& e) {
    if (!e.is_list && !e.text.empty() && e.text[0] == '?') return Term::var(variable(e));
    return Term::constant(name(e, "a term"));
  }

  std::vector<std::string> variable_list(const SExpr& e) {
    if (!e.is_list || e.items.empty()) fail("syntax", "expected a non-empty variable list", e.span);
    std::vector<std::string> vars;
    for (const auto& v : e.items) {
      vars.push_back(variable(v));
      for (std::size_t i = 0; i + 1 < vars.size(); ++i)
        if (vars[i] == vars.back()) fail("duplicate-variable", "variable ?" + vars.back() + " listed twice", v.span);
    }
    return vars;
  }

  Formula formula(const SExpr& e) {
    if (!e.is_list) {
      if (e.text == "true") return Formula::top();
      if (e.text == "false") return Formula::bottom();
      fail("syntax", "expected a formula", e.span);
    }
    if (e.items.empty()) fail("syntax", "empty formula", e.span);
    const SExpr& head = e.items.front();
    if (!head.is_list) {
      const std::string& op = head.text;
      if (op == "not") {
        if (e.items.size() != 2) fail("syntax", "'not' takes exactly one formula", e.span);
        return Formula::negation(formula(e.items[1]));
      }
      if (op == "and" || op == "or") {
        if (e.items.size() < 3) fail("syntax", "'" + op + "' takes at least two formulas", e.span);
        std::vector<Formula> subs;
        for (std::size_t i = 1; i < e.items.size(); ++i) subs.push_back(formula(e.items[i]));
        return op == "and" ? Formula::conjunction(std::move(subs)) : Formula::disjunction(std::move(subs));
      }
      if (op == "imply") {
        if (e.items.size() != 3) fail("syntax", "'imply' takes exactly two formulas", e.span);
        return Formula::disjunction({Formula::negation(formula(e.items[1])), formula(e.items[2])});
      }
      if (op == "exists" || op == "forall") {
        if (e.items.size() != 3) fail("syntax", "'" + op + "' takes a variable list and a formula", e.span);
        auto vars = variable_list(e.items[1]);
        Formula sub = formula(e.items[2]);
        return op == "exists" ? Formula::exists(std::move(vars), std::move(sub))
                              : Formula::forall(std::move(vars), std::move(sub));
      }
    }
    return atom(e);
  }

  Formula atom(const SExpr& e) {
    std::string pred = predicate_name(e.items.front());
    std::vector<Term> terms;
    for (std::size_t i = 1; i < e.items.size(); ++i) terms.push_back(term(e.items[i]));
    return Formula::atom(std::move(pred), std::move(terms), e.span);
  }

  std::vector<Predicate> declarations(const SExpr& e, const char* keyword, PredicateKind kind) {
    if (!e.head_is(keyword)) fail("syntax", std::string("expected (") + keyword + " ...)", e.span);
    std::vector<Predicate> out;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const SExpr& d = e.items[i];
      if (!d.is_list || d.items.size() != 2) fail("syntax", "expected a declaration (NAME ARITY)", d.span);
      std::string n = predicate_name(d.items[0]);
      const SExpr& a = d.items[1];
      if (a.is_list || a.text.empty() || a.text.size() > 3 ||
          !std::all_of(a.text.begin(), a.text.end(), [](unsigned char c) { return std::isdigit(c); }))
        fail("syntax", "expected an arity (a small non-negative integer)", a.span);
      out.push_back({std::move(n), static_cast<std::size_t>(std::stoul(a.text)), kind});
    }
    return out;
  }

  Axiom axiom(const SExpr& e) {
    if (!e.head_is("axiom") || e.items.size() != 3) fail("syntax", "expected (axiom HEAD FORMULA)", e.span);
    const SExpr& h = e.items[1];
    if (!h.is_list || h.items.empty()) fail("syntax", "expected an atom as axiom head", h.span);
    Axiom ax;
    ax.head.predicate = predicate_name(h.items[0]);
    for (std::size_t i = 1; i < h.items.size(); ++i) ax.head.terms.push_back(term(h.items[i]));
    ax.body = formula(e.items[2]);
    ax.span = e.span;
    freshen(ax);
    return ax;
  }

  /// Renames quantified variables that rebind a visible variable to
  /// `name__k`, so that no quantifier shadows an enclosing binding.
  static void freshen(Axiom& ax) {
    std::set<std::string> all;
    collect_variable_names(ax.body, all);
    for (const auto& t : ax.head.terms)
      if (t.is_variable()) all.insert(t.name);
    std::set<std::string> visible;
    for (const auto& t : ax.head.terms)
      if (t.is_variable()) visible.insert(t.name);
    auto rec = [&](auto& self, const Formula& g, std::set<std::string> vis, Binding scope) -> Formula {
      switch (g.kind()) {
        case FormulaKind::atom:
          return substitute(g, scope);
        case FormulaKind::top:
        case FormulaKind::bottom:
          return g;
        case FormulaKind::exists:
        case FormulaKind::forall: {
          std::vector<std::string> vars;
          for (const auto& v : g.variables()) {
            std::string n = v;
            if (vis.contains(v)) {
              for (std::size_t k = 1;; ++k) {
                n = v + "__" + std::to_string(k);
                if (!all.contains(n)) break;
              }
              all.insert(n);
              scope[v] = Term::var(n);
            } else {
              scope.erase(v);
            }
            vis.insert(n);
            vars.push_back(n);
          }
          Formula body = self(self, g.child(0), vis, scope);
          return g.is(FormulaKind::exists) ? Formula::exists(std::move(vars), std::move(body))
                                           : Formula::forall(std::move(vars), std::move(body));
        }
        default: {
          std::vector<Formula> kids;
          for (const auto& c : g.children()) kids.push_back(self(self, c, vis, scope));
          return rebuild(g, std::move(kids));
        }
      }
    };
    ax.body = rec(rec, ax.body, visible, {});
  }

  AxiomProgram program(const SExpr& e) {
    if (!e.head_is("program")) fail("syntax", "expected (program ...)", e.span);
    if (e.items.size() < 4) fail("syntax", "a program needs (objects ...), (basic ...) and (derived ...)", e.span);
    AxiomProgram p;
    const SExpr& objs = e.items[1];
    if (!objs.head_is("objects")) fail("syntax", "expected (objects ...)", objs.span);
    for (std::size_t i = 1; i < objs.items.size(); ++i) p.objects.push_back(name(objs.items[i], "an object name"));
    for (auto& d : declarations(e.items[2], "basic", PredicateKind::basic)) p.signature.push_back(std::move(d));
    for (auto& d : declarations(e.items[3], "derived", PredicateKind::derived)) p.signature.push_back(std::move(d));
    for (std::size_t i = 4; i < e.items.size(); ++i) {
      const SExpr& s = e.items[i];
      if (!s.head_is("stratum")) fail("syntax", "expected (stratum ...)", s.span);
      Stratum st;
      for (std::size_t k = 1; k < s.items.size(); ++k) st.push_back(axiom(s.items[k]));
      p.strata.push_back(std::move(st));
    }
    p.sort_signature();
    return p;
  }
};

}  // namespace detail

struct ParseResult {
  std::optional<AxiomProgram> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

/// Never throws: any input yields a program or a list of diagnostics.
inline ParseResult try_parse_program(std::string_view text, const std::string& file = {}) {
  ParseResult result;
  try {
    detail::SExprReader reader(text, file);
    auto exprs = reader.read_all();
    if (exprs.size() != 1) {
      SourceSpan span{file, 0, text.size(), 1, 1};
      if (exprs.size() > 1) span = exprs[1].span;
      result.diagnostics.push_back({"syntax", "expected exactly one (program ...) expression", span});
      return result;
    }
    detail::ProgramBuilder builder;
    AxiomProgram p = builder.program(exprs.front());
    for (auto& d : well_formedness_diagnostics(p)) {
      if (!d.span.known()) d.span = exprs.front().span;
      result.diagnostics.push_back(std::move(d));
    }
    if (result.diagnostics.empty()) {
      for (const auto& v : check_stratified(p)) {
        Diagnostic d{"stratification", std::string("(") + v.rule + ") " + v.message, v.span};
        if (!d.span.known()) d.span = exprs.front().span;
        result.diagnostics.push_back(std::move(d));
      }
    }
    if (result.diagnostics.empty()) result.program = std::move(p);
  } catch (const InputError& e) {
    for (const auto& d : e.diagnostics()) result.diagnostics.push_back(d);
  } catch (const Error& e) {
    result.diagnostics.push_back({e.code(), e.what(), e.span().known() ? e.span() : SourceSpan{file, 0, 0, 1, 1}});
  } catch (const std::exception& e) {
    result.diagnostics.push_back({"internal", e.what(), SourceSpan{file, 0, 0, 1, 1}});
  }
  return result;
}

/// Parses and validates a program; throws InputError with all diagnostics.
inline AxiomProgram parse_program(std::string_view text, const std::string& file = {}) {
  ParseResult r = try_parse_program(text, file);
  if (!r.ok()) throw InputError(std::move(r.diagnostics));
  return std::move(*r.program);
}

/// Parses `(state atom*)` into a closed-world basic state over `universe`
/// (defaults to the program's declared objects).
inline TruthAssignment parse_state(std::string_view text, const AxiomProgram& program,
                                   std::optional<Universe> universe = std::nullopt, const std::string& file = {}) {
  if (!universe) {
    if (program.objects.empty()) throw InputError({{"universe", "the program declares no objects", {file, 0, 0, 1, 1}}});
    universe.emplace(program.objects);
  }
  detail::SExprReader reader(text, file);
  auto exprs = reader.read_all();
  if (exprs.size() != 1 || !exprs.front().head_is("state"))
    throw InputError({{"syntax", "expected exactly one (state ...) expression",
                       exprs.empty() ? SourceSpan{file, 0, text.size(), 1, 1} : exprs.front().span}});
  TruthAssignment s = empty_basic_state(program, *universe);
  std::vector<Diagnostic> diags;
  const auto& items = exprs.front().items;
  for (std::size_t i = 1; i < items.size(); ++i) {
    const detail::SExpr& a = items[i];
    if (!a.is_list || a.items.empty() || a.items.front().is_list) {
      diags.push_back({"syntax", "expected a ground atom", a.span});
      continue;
    }
    const std::string& pred = a.items.front().text;
    auto p = s.predicate_index(pred);
    if (!p) {
      diags.push_back({"undeclared-predicate", "predicate '" + pred + "' is not declared", a.span});
      continue;
    }
    const Predicate& decl = program.signature[*p];
    if (decl.derived()) {
      diags.push_back({"derived-in-state", "derived predicate in state: '" + pred + "'", a.span});
      continue;
    }
    if (a.items.size() - 1 != decl.arity) {
      diags.push_back({"arity", "predicate '" + pred + "' has arity " + std::to_string(decl.arity), a.span});
      continue;
    }
    std::vector<std::size_t> args;
    bool ok = true;
    for (std::size_t k = 1; k < a.items.size(); ++k) {
      const auto& t = a.items[k];
      auto idx = t.is_list ? std::nullopt : universe->index_of(t.text);
      if (!idx) {
        diags.push_back({"unknown-object", "unknown object in state atom", t.span});
        ok = false;
        break;
      }
      args.push_back(*idx);
    }
    if (ok) s.set(*p, universe->encode(args));
  }
  if (!diags.empty()) throw InputError(std::move(diags));
  return s;
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_sexpr(const Term& t) { return t.is_variable() ? "?" + t.name : t.name; }

inline std::string to_sexpr(const Atom& a) {
  std::string s = "(" + a.predicate;
  for (const auto& t : a.terms) s += " " + to_sexpr(t);
  return s + ")";
}

inline void write_sexpr(std::string& out, const Formula& phi) {
  switch (phi.kind()) {
    case FormulaKind::atom:
      out += '(';
      out += phi.predicate();
      for (const auto& t : phi.terms()) {
        out += ' ';
        out += to_sexpr(t);
      }
      out += ')';
      return;
    case FormulaKind::top:
      out += "true";
      return;
    case FormulaKind::bottom:
      out += "false";
      return;
    case FormulaKind::negation:
      out += "(not ";
      break;
    case FormulaKind::conjunction:
      out += "(and ";
      break;
    case FormulaKind::disjunction:
      out += "(or ";
      break;
    case FormulaKind::exists:
    case FormulaKind::forall: {
      out += phi.is(FormulaKind::exists) ? "(exists (" : "(forall (";
      for (std::size_t i = 0; i < phi.variables().size(); ++i) {
        if (i) out += ' ';
        out += '?';
        out += phi.variables()[i];
      }
      out += ") ";
      break;
    }
  }
  for (std::size_t i = 0; i < phi.children().size(); ++i) {
    if (i) out += ' ';
    write_sexpr(out, phi.child(i));
  }
  out += ')';
}

inline std::string to_sexpr(const Formula& phi) {
  std::string s;
  write_sexpr(s, phi);
  return s;
}

/// Deterministic rendering; `parse_program(print_program(p)) == p` for every
/// valid program whose signature is in canonical order.
inline std::string print_program(const AxiomProgram& program) {
  AxiomProgram sorted_sig;
  sorted_sig.signature = program.signature;
  sorted_sig.sort_signature();
  std::string out = "(program\n  (objects";
  for (const auto& o : program.objects) out += " " + o;
  out += ")\n";
  for (PredicateKind kind : {PredicateKind::basic, PredicateKind::derived}) {
    out += kind == PredicateKind::basic ? "  (basic" : "  (derived";
    for (const auto& p : sorted_sig.signature)
      if (p.kind == kind) out += " (" + p.name + " " + std::to_string(p.arity) + ")";
    out += ")\n";
  }
  for (const auto& stratum : program.strata) {
    out += "  (stratum";
    for (const auto& ax : stratum) {
      out += "\n    (axiom " + to_sexpr(ax.head) + "\n      ";
      write_sexpr(out, ax.body);
      out += ")";
    }
    out += ")\n";
  }
  out += ")\n";
  return out;
}

inline std::string print_state(const TruthAssignment& s) {
  std::string out = "(state";
  for (std::size_t p = 0; p < s.signature().size(); ++p) {
    if (!s.covers(p) || s.signature()[p].derived()) continue;
    for (std::size_t c = 0; c < s.bits(p).size(); ++c) {
      if (!s.get(p, c)) continue;
      out += " (" + s.signature()[p].name;
      for (std::size_t a : s.universe().decode(c, s.signature()[p].arity)) out += " " + s.universe().name(a);
      out += ")";
    }
  }
  return out + ")\n";
}

}  // namespace axf

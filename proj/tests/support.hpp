#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "axf/axf.hpp"

namespace axf::testing {

inline std::string source_path(const std::string& rel) { return std::string(AXF_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AxiomProgram load(const std::string& rel) { return parse_program(slurp(source_path(rel)), rel); }

inline AxiomProgram path_program() { return load("programs/path.axp"); }

/// Basic state over `program`'s declared objects from a list of atoms such
/// as {"E a b", "E b c"}.
inline TruthAssignment state_of(const AxiomProgram& program, const std::vector<std::string>& atoms) {
  std::string text = "(state";
  for (const auto& a : atoms) text += " (" + a + ")";
  return parse_state(text + ")", program);
}

/// Renames the stage predicates of a single-predicate family to the bare
/// relation names and folds true/false, as in the golden file.
inline AxiomProgram golden_view(const AxiomProgram& transformed, const StagePredicateFamily& fam) {
  std::map<std::string, std::string> rename;
  for (StageRelation r : kStageRelations) rename[fam.name(r, 0, 0)] = to_string(r);
  auto ren = [&](const Formula& phi) {
    return map_atoms(phi, [&](const Formula& a, Polarity) {
      auto it = rename.find(a.predicate());
      return it == rename.end() ? a : Formula::atom(it->second, a.terms());
    });
  };
  AxiomProgram out = transformed;
  for (auto& p : out.signature)
    if (auto it = rename.find(p.name); it != rename.end()) p.name = it->second;
  for (auto& stratum : out.strata)
    for (auto& ax : stratum) {
      if (auto it = rename.find(ax.head.predicate); it != rename.end()) ax.head.predicate = it->second;
      ax.body = fold_constants(ren(ax.body));
    }
  return out;
}

/// Stage axioms of the golden file in order lt, leq, nlt, nleq, tri,
/// followed by the acyclic axiom.
inline std::vector<Axiom> golden_axioms() {
  const AxiomProgram g = load("tests/golden/path_stage_axioms.axp");
  std::vector<Axiom> out = g.strata.at(0);
  out.push_back(g.strata.at(1).at(0));
  return out;
}

/// Compares the transformed path program with the golden file. Returns an
/// empty string on success, otherwise a description of the first mismatch.
inline std::string compare_with_golden(const TransformResult& r) {
  if (r.report.families.size() != 1) return "expected one stage family";
  const auto& fam = r.report.families.front();
  const AxiomProgram view = golden_view(r.program, fam);
  if (view.strata.size() != 2) return "expected two strata";
  const auto& s1 = view.strata[0];
  if (s1.size() != 6) return "stratum 1 should hold the path axiom and five stage axioms";
  const auto golden = golden_axioms();
  for (std::size_t k = 0; k < 5; ++k)
    if (!alpha_equivalent(s1[k + 1], golden[k]))
      return "stage axiom " + std::string(to_string(kStageRelations[k])) + " differs: " + to_sexpr(s1[k + 1].body);
  if (view.strata[1].size() != 1 || !alpha_equivalent(view.strata[1][0], golden[5]))
    return "acyclic axiom differs: " + to_sexpr(view.strata[1].at(0).body);
  return {};
}

/// Single-edit mutations of the stage axioms of the path program, one per
/// stage relation (1 = lt, ..., 5 = tri).
inline AxiomProgram mutate_stage_axiom(const TransformResult& r, int relation) {
  const auto& fam = r.report.families.at(0);
  AxiomProgram p = r.program;
  const StageRelation rel = kStageRelations[relation - 1];
  for (auto& ax : p.strata[0]) {
    if (ax.head.predicate != fam.name(rel, 0, 0)) continue;
    switch (relation) {
      case 1: {  // drop the tri conjunct under the existential
        const Formula& ex = ax.body;
        ax.body = rebuild(ex, {ex.child(0).child(0)});
        break;
      }
      case 2: {  // use phi_i without the [lt] substitution
        const Axiom& orig = p.strata[0][0];
        Binding b;
        for (std::size_t t = 0; t < orig.head.terms.size(); ++t) b[orig.head.terms[t].name] = ax.head.terms[t];
        ax.body = substitute(orig.body, b);
        break;
      }
      case 3: {  // drop the third disjunct
        std::vector<Formula> kids = ax.body.children();
        kids.pop_back();
        ax.body = Formula::disjunction(std::move(kids));
        break;
      }
      case 4: {  // nlt renamed to nleq inside the body
        const std::string from = fam.name(StageRelation::nlt, 0, 0);
        const std::string to = fam.name(StageRelation::nleq, 0, 0);
        ax.body = map_atoms(ax.body, [&](const Formula& a, Polarity) {
          return a.predicate() == from ? Formula::atom(to, a.terms()) : a;
        });
        break;
      }
      case 5: {  // drop the second conjunct
        std::vector<Formula> kids = ax.body.children();
        kids.erase(kids.begin() + 1);
        ax.body = Formula::conjunction(std::move(kids));
        break;
      }
      default:
        break;
    }
  }
  return p;
}

/// The transformed path program with one of the two negations in the
/// acyclic body removed.
inline AxiomProgram drop_acyclic_negation(const TransformResult& r) {
  AxiomProgram p = r.program;
  Axiom& ax = p.strata.at(1).at(0);
  const Formula& all = ax.body;
  ax.body = rebuild(all, {all.child(0).child(0)});
  return p;
}

struct Command {
  int exit_code = -1;
  std::string out;
};

/// Runs the CLI with `args` (already shell-quoted) and captures stdout.
inline Command run_cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string("\"") + AXF_CLI_PATH + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Command c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
  const int status = pclose(pipe);
  c.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

}  // namespace axf::testing

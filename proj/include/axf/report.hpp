#pragma once

// JSON views of programs, diagnostics and reports. Strata, axioms and
// states are numbered from 1.

#include <string>
#include <vector>

#include <json.hpp>

#include "axf/evaluator.hpp"
#include "axf/parser.hpp"
#include "axf/transformer.hpp"
#include "axf/verifier.hpp"

namespace axf {

using Json = nlohmann::ordered_json;

inline Json to_json(const Diagnostic& d) {
  Json j{{"code", d.code}, {"message", d.message}};
  if (!d.span.file.empty()) j["file"] = d.span.file;
  if (d.span.known()) {
    j["line"] = d.span.line;
    j["column"] = d.span.column;
  }
  return j;
}

inline Json to_json(const std::vector<Diagnostic>& ds) {
  Json j = Json::array();
  for (const auto& d : ds) j.push_back(to_json(d));
  return j;
}

inline Json to_json(const AxiomProgram& p) {
  Json sig = Json::array();
  for (const auto& pred : p.signature)
    sig.push_back({{"name", pred.name}, {"arity", pred.arity}, {"kind", pred.derived() ? "derived" : "basic"}});
  Json strata = Json::array();
  for (const auto& stratum : p.strata) {
    Json axioms = Json::array();
    for (const auto& ax : stratum) axioms.push_back({{"head", to_sexpr(ax.head)}, {"body", to_sexpr(ax.body)}});
    strata.push_back(std::move(axioms));
  }
  return {{"objects", p.objects}, {"signature", std::move(sig)}, {"strata", std::move(strata)}};
}

inline Json to_json(const OccurrenceRef& o) {
  return {{"predicate", o.predicate}, {"stratum", o.stratum + 1}, {"axiom", o.axiom + 1},
          {"path", o.path},           {"polarity", to_string(o.polarity)}};
}

inline Json to_json(const SizeMetrics& m) {
  Json strata = Json::array();
  for (std::size_t i = 0; i < m.strata.size(); ++i) {
    const auto& s = m.strata[i];
    strata.push_back({{"stratum", i + 1},
                      {"m", s.m},
                      {"r", s.r},
                      {"R", s.R},
                      {"o", s.o},
                      {"q", s.q},
                      {"stage_predicates", s.stage_predicates},
                      {"stage_axiom_size", s.stage_axiom_size}});
  }
  return {{"strata", std::move(strata)},
          {"signature_size", m.signature_size},
          {"Q", m.Q},
          {"stage_predicates", m.stage_predicates}};
}

inline Json to_json(const StagePredicateFamily& f) {
  Json j{{"stratum", f.stratum + 1}, {"round", f.round}, {"predicates", f.predicates},
         {"stage_predicates", f.stage_predicate_count()}};
  Json aux = Json::array();
  if (f.none_aux) aux.push_back(*f.none_aux);
  for (const auto& n : f.final_aux) aux.push_back(n);
  j["auxiliary"] = std::move(aux);
  return j;
}

inline Json to_json(const TransformReport& r) {
  Json repl = Json::array();
  for (const auto& x : r.replacements) repl.push_back({{"occurrence", to_json(x.occurrence)}, {"replacement", x.replacement}});
  Json fams = Json::array();
  for (const auto& f : r.families) fams.push_back(to_json(f));
  return {{"procedure", "worklist"},
          {"passes", r.passes},
          {"optimize_aux", r.optimize_aux},
          {"simplified", r.simplified},
          {"merged", r.merged},
          {"replacements", std::move(repl)},
          {"families", std::move(fams)},
          {"metrics", {{"before", to_json(r.before)}, {"after", to_json(r.after)}}}};
}

inline Json to_json(const Counterexample& c) {
  Json j{{"check", to_string(c.check)}, {"universe_size", c.universe_size}};
  if (!c.basic_state.empty() || !c.atom.empty()) {
    j["state_index"] = c.state_index;
    if (c.seed) j["seed"] = *c.seed;
    j["basic_state"] = c.basic_state;
  }
  if (!c.atom.empty()) {
    j["atom"] = c.atom;
    j["expected"] = c.expected;
    j["actual"] = c.actual;
  }
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

inline Json to_json(const CheckResult& r) {
  Json j{{"check", to_string(r.check)}, {"states_tested", r.states_tested}, {"result", r.ok ? "ok" : "counterexample"}};
  if (r.counterexample) j["counterexample"] = to_json(*r.counterexample);
  j["wall_time"] = r.wall_time;
  return j;
}

inline Json to_json(const VerificationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.results) checks.push_back(to_json(c));
  return {{"result", r.ok() ? "ok" : "counterexample"}, {"checks", std::move(checks)}};
}

}  // namespace axf

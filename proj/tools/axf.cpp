// axf: parse, evaluate, transform and verify stratified axiom programs.
//
// Exit codes: 0 success, 1 counterexample, 2 bad input or over-budget
// request, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "axf/axf.hpp"

namespace {

enum Exit { kOk = 0, kCounterexample = 1, kInput = 2, kInternal = 3 };

struct Globals {
  bool json = false;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw axf::InputError({{"io", "cannot read file", {path, 0, 0, 0, 0}}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw axf::InputError({{"io", "cannot write file", {path, 0, 0, 0, 0}}});
}

axf::AxiomProgram load_program(const std::string& path) { return axf::parse_program(read_file(path), path); }

std::optional<axf::Universe> eval_universe(const axf::AxiomProgram& p, std::optional<std::size_t> n) {
  if (n) return axf::Universe::padded(p.objects, *n);
  return std::nullopt;
}

int cmd_parse(const Globals& g, const std::string& file) {
  auto r = axf::try_parse_program(read_file(file), file);
  if (!r.ok()) throw axf::InputError(std::move(r.diagnostics));
  if (g.json)
    std::cout << axf::to_json(*r.program).dump(2) << '\n';
  else
    std::cout << axf::print_program(*r.program);
  return kOk;
}

int cmd_eval(const Globals& g, const std::string& file, const std::string& state_file, bool stages,
             std::optional<std::size_t> universe_size) {
  const auto program = load_program(file);
  const auto universe = eval_universe(program, universe_size);
  const auto basic = axf::parse_state(read_file(state_file), program, universe, state_file);
  const axf::CompiledProgram compiled(program, basic.universe());
  std::vector<axf::StageTable> tables;
  const auto s = stages ? compiled.extend_in_stages(basic, &tables) : compiled.extend(basic);
  const auto atoms = s.true_atoms(axf::PredicateKind::derived);

  if (g.json) {
    axf::Json j{{"atoms", atoms}};
    if (stages) {
      axf::Json js = axf::Json::array();
      for (const auto& t : tables) {
        axf::Json entries = axf::Json::object();
        for (std::size_t p : t.predicates)
          for (std::size_t c = 0; c < t.stages.at(p).size(); ++c)
            if (t.derived(p, c)) entries[s.atom_name(p, c)] = t.stage(p, c);
        js.push_back({{"stratum", t.stratum + 1}, {"f", t.fixpoint}, {"stages", std::move(entries)}});
      }
      j["stages"] = std::move(js);
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  for (const auto& a : atoms) std::cout << a << '\n';
  if (stages) {
    for (const auto& t : tables) {
      std::cout << "stratum " << t.stratum + 1 << '\n';
      for (std::size_t p : t.predicates)
        for (std::size_t c = 0; c < t.stages.at(p).size(); ++c)
          if (t.derived(p, c)) std::cout << s.atom_name(p, c) << ": " << t.stage(p, c) << '\n';
      std::cout << "f: " << t.fixpoint << '\n';
    }
  }
  return kOk;
}

int cmd_transform(const Globals& g, const std::string& file, const std::string& out, const axf::TransformOptions& opts,
                  const std::string& report_file) {
  const auto program = load_program(file);
  axf::TransformResult r;
  try {
    r = axf::transform(program, opts);
  } catch (const axf::MergeRefused& e) {
    throw axf::InternalError(e.what());
  }
  if (auto problem = axf::polarity_lint(r.program)) throw axf::InternalError("transformed program fails the lint: " + *problem);
  const std::string text = axf::print_program(r.program);
  if (!axf::try_parse_program(text).ok()) throw axf::InternalError("transformed program does not parse back");
  const axf::Json report = axf::to_json(r.report);
  if (!report_file.empty()) write_file(report_file, report.dump(2) + "\n");
  if (!out.empty()) write_file(out, text);

  if (g.json) {
    axf::Json j = report;
    if (out.empty()) j["program"] = text;
    std::cout << j.dump(2) << '\n';
  } else if (out.empty()) {
    std::cout << text;
  }
  if (!g.quiet)
    std::cerr << r.report.replacements.size() << " replacements, " << r.report.families.size() << " stage families, Q "
              << r.report.before.Q << " -> " << r.report.after.Q << '\n';
  return kOk;
}

struct VerifyArgs {
  std::string file;
  std::string transformed;
  std::vector<std::size_t> universes;
  bool exhaustive = false;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string checks = "all";
  bool optimize_aux = false;
  std::size_t threads = 0;
};

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  const auto program = load_program(a.file);
  axf::VerificationPlan plan;
  if (!a.universes.empty()) plan.universe_sizes = a.universes;
  if (a.samples) {
    if (a.exhaustive) throw axf::Error("plan", "--exhaustive and --samples exclude each other");
    plan.mode = axf::EnumerationMode::sampled;
    plan.samples = *a.samples;
  }
  plan.seed = a.seed;
  plan.threads = a.threads;
  if (a.checks != "all") {
    plan.checks.clear();
    std::stringstream ss(a.checks);
    for (std::string item; std::getline(ss, item, ',');) {
      auto c = axf::parse_check(item);
      if (!c) throw axf::Error("plan", "unknown check '" + item + "'");
      plan.checks.push_back(*c);
    }
  }
  axf::check_plan(program, plan);
  const auto subject = a.transformed.empty()
                           ? axf::VerificationSubject::from_original(program, a.optimize_aux)
                           : axf::VerificationSubject::from_pair(program, load_program(a.transformed));
  const auto report = axf::verify(subject, plan);

  if (g.json) {
    std::cout << axf::to_json(report).dump(2) << '\n';
  } else if (!g.quiet) {
    for (const auto& r : report.results) {
      std::printf("%-18s %-14s %10zu states  %.3f s\n", axf::to_string(r.check), r.ok ? "ok" : "COUNTEREXAMPLE",
                  r.states_tested, r.wall_time);
      if (!r.counterexample) continue;
      const auto& c = *r.counterexample;
      if (!c.atom.empty()) {
        std::printf("  universe size %zu, state %llu", c.universe_size, static_cast<unsigned long long>(c.state_index));
        if (c.seed) std::printf(" (seed %llu)", static_cast<unsigned long long>(*c.seed));
        std::printf("\n  state: {");
        for (std::size_t i = 0; i < c.basic_state.size(); ++i) std::printf("%s%s", i ? ", " : "", c.basic_state[i].c_str());
        std::printf("}\n  %s: expected %s, got %s\n", c.atom.c_str(), c.expected ? "true" : "false",
                    c.actual ? "true" : "false");
      }
      if (!c.detail.empty()) std::printf("  %s\n", c.detail.c_str());
    }
  }
  return report.ok() ? kOk : kCounterexample;
}

int cmd_stats(const Globals& g, const std::string& file) {
  const auto m = axf::compute_metrics(load_program(file));
  if (g.json) {
    std::cout << axf::to_json(m).dump(2) << '\n';
    return kOk;
  }
  std::printf("%-8s %6s %6s %6s %6s %8s %6s\n", "stratum", "m", "r", "R", "o", "q", "stage");
  for (std::size_t i = 0; i < m.strata.size(); ++i) {
    const auto& s = m.strata[i];
    std::printf("%-8zu %6zu %6zu %6zu %6zu %8zu %6zu\n", i + 1, s.m, s.r, s.R, s.o, s.q, s.stage_predicates);
  }
  std::printf("signature %zu\nstage predicates %zu\nQ %zu\n", m.signature_size, m.stage_predicates, m.Q);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratified axiom programs: evaluation and elimination of negative derived occurrences"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--quiet", g.quiet, "Suppress summaries on stderr");

  std::string file;
  auto* parse = app.add_subcommand("parse", "Check a program and print it in normal form");
  parse->add_option("file", file, "Program file")->required();

  std::string state_file;
  bool stages = false;
  std::optional<std::size_t> eval_size;
  auto* eval = app.add_subcommand("eval", "Extend a basic state and print the true derived atoms");
  eval->add_option("file", file, "Program file")->required();
  eval->add_option("--state", state_file, "Basic state file")->required();
  eval->add_flag("--stages", stages, "Also print the stage of every derived atom and f per stratum");
  eval->add_option("--universe", eval_size, "Pad the declared objects to N objects");

  std::string out, report_file;
  axf::TransformOptions topts;
  auto* transform = app.add_subcommand("transform", "Eliminate negative occurrences of derived predicates");
  transform->add_option("file", file, "Program file")->required();
  transform->add_option("-o,--output", out, "Output program file (default: stdout)");
  transform->add_flag("--merge", topts.merge, "Combine all strata into one");
  transform->add_flag("--optimize-aux", topts.optimize_aux, "Share subformulas through auxiliary axioms");
  transform->add_flag("--simplify", topts.simplify, "Fold constants and double negations");
  transform->add_option("--report", report_file, "Write the transformation report as JSON");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check the transformation against brute-force oracles");
  verify->add_option("file", va.file, "Program file")->required();
  verify->add_option("--transformed", va.transformed, "Transformed program to check (default: transform FILE)");
  verify->add_option("--universe", va.universes, "Universe size; repeatable (default: 1 2 3)");
  auto* exh = verify->add_flag("--exhaustive", va.exhaustive, "Enumerate all basic states (default)");
  verify->add_option("--samples", va.samples, "Number of sampled basic states")->excludes(exh);
  verify->add_option("--seed", va.seed, "Seed for sampled states");
  verify->add_option("--checks", va.checks,
                     "Comma-separated subset of theorem1,theorem2,equivalence,merge_equivalence,polarity_lint,"
                     "aux_equivalence, or all");
  verify->add_flag("--optimize-aux", va.optimize_aux, "Transform with auxiliary axioms");
  verify->add_option("--threads", va.threads, "Worker threads (default: AXF_THREADS or all cores)");

  auto* stats = app.add_subcommand("stats", "Print size metrics per stratum");
  stats->add_option("file", file, "Program file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*parse) return cmd_parse(g, file);
    if (*eval) return cmd_eval(g, file, state_file, stages, eval_size);
    if (*transform) return cmd_transform(g, file, out, topts, report_file);
    if (*verify) return cmd_verify(g, va);
    if (*stats) return cmd_stats(g, file);
  } catch (const axf::InputError& e) {
    if (g.json) {
      std::cout << axf::Json{{"error", "input"}, {"diagnostics", axf::to_json(e.diagnostics())}}.dump(2) << '\n';
    } else {
      for (const auto& d : e.diagnostics()) std::cerr << axf::format_diagnostic(d) << '\n';
    }
    return kInput;
  } catch (const axf::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const axf::Error& e) {
    if (g.json)
      std::cout << axf::Json{{"error", e.code()}, {"message", e.what()}}.dump(2) << '\n';
    else
      std::cerr << "error[" << e.code() << "]: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

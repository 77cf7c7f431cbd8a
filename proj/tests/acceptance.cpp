// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "support.hpp"

using namespace axf;
using axf::testing::path_program;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs > limit_s) {
    o.pass = false;
    o.detail += " (over time limit " + std::to_string(limit_s) + " s)";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", n, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

VerificationPlan exhaustive(std::vector<std::size_t> sizes, std::vector<Check> checks) {
  VerificationPlan plan;
  plan.universe_sizes = std::move(sizes);
  plan.checks = std::move(checks);
  return plan;
}

std::string describe(const VerificationReport& rep) {
  for (const auto& r : rep.results)
    if (!r.ok && r.counterexample)
      return std::string(to_string(r.check)) + " fails at universe " + std::to_string(r.counterexample->universe_size) +
             " state " + std::to_string(r.counterexample->state_index) + " " + r.counterexample->detail;
  return {};
}

// Random stratified programs with at most three strata and arity two.
std::vector<AxiomProgram> random_family(std::size_t count) {
  std::vector<AxiomProgram> out;
  for (std::uint64_t seed = 0; out.size() < count; ++seed) {
    ProgramProfile profile;
    profile.strata = seed % 5 == 0 ? 1 : 2 + seed % 2;
    profile.predicates_per_stratum = 1 + (seed / 3) % 2;
    profile.negation_rate = 0.7;
    out.push_back(generate_random_program(profile, 1000 + seed));
  }
  return out;
}

}  // namespace

int main() {
  const AxiomProgram path = path_program();
  const auto family = random_family(100);

  criterion(1, "golden stage axioms for path/acyclic", 1.0, [&] {
    const auto r = eliminate_negative_occurrences(path);
    const std::string diff = axf::testing::compare_with_golden(r);
    return Outcome{diff.empty(), diff.empty() ? "5 stage axioms and acyclic body match" : diff};
  });

  criterion(2, "path(x) iff not nleq(x,x) on all 512 three-object states", 60.0, [&] {
    const auto rep = verify(VerificationSubject::from_original(path), exhaustive({3}, {Check::theorem2}));
    return Outcome{rep.ok(), rep.ok() ? std::to_string(rep.results[0].states_tested) + " states" : describe(rep)};
  });

  criterion(3, "stage relations match the stage table oracle on 512 states", 120.0, [&] {
    const auto rep = verify(VerificationSubject::from_original(path), exhaustive({3}, {Check::theorem1}));
    return Outcome{rep.ok(), rep.ok() ? std::to_string(rep.results[0].states_tested) + " states" : describe(rep)};
  });

  criterion(4, "extension equivalence on path and 100 random programs", 300.0, [&] {
    auto rep = verify(VerificationSubject::from_original(path), exhaustive({3}, {Check::equivalence}));
    if (!rep.ok()) return Outcome{false, "path: " + describe(rep)};
    std::uint64_t states = rep.results[0].states_tested;
    std::size_t rewritten = 0;
    for (std::size_t k = 0; k < family.size(); ++k) {
      if (!negative_occurrences(family[k], family[k].derived_predicates()).empty()) ++rewritten;
      rep = verify(VerificationSubject::from_original(family[k]), exhaustive({2}, {Check::equivalence}));
      if (!rep.ok()) return Outcome{false, "random program " + std::to_string(k) + ": " + describe(rep)};
      states += rep.results[0].states_tested;
    }
    return Outcome{true, std::to_string(states) + " states, 0 mismatches, " + std::to_string(rewritten) +
                             " random programs with negated derived atoms"};
  });

  criterion(5, "no negative derived occurrences after transform and merge", 60.0, [&] {
    std::vector<AxiomProgram> inputs{path};
    inputs.insert(inputs.end(), family.begin(), family.end());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const auto t = eliminate_negative_occurrences(inputs[k]).program;
      for (const AxiomProgram& out : {t, merge_to_single_stratum(t)}) {
        if (auto bad = polarity_lint(out)) return Outcome{false, "program " + std::to_string(k) + ": " + *bad};
        if (!is_stratified(out)) return Outcome{false, "program " + std::to_string(k) + " not stratified"};
      }
    }
    return Outcome{true, std::to_string(inputs.size()) + " programs, transformed and merged"};
  });

  criterion(6, "stage predicate counts, arity bound and size envelope", 120.0, [&] {
    std::vector<AxiomProgram> inputs{path};
    inputs.insert(inputs.end(), family.begin(), family.end());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t points = 0;
    std::size_t worst_ratio_k = 0;
    double worst_degree = 0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      for (bool aux : {false, true}) {
        const auto r = eliminate_negative_occurrences(inputs[k], aux);
        std::size_t expected = 0;
        for (const auto& fam : r.report.families) {
          const std::size_t m = fam.size();
          const std::size_t rmax = *std::max_element(fam.arities.begin(), fam.arities.end());
          if (fam.stage_predicate_count() != 5 * m * m)
            return Outcome{false, "program " + std::to_string(k) + ": stage predicate count is not 5m^2"};
          if (fam.auxiliary_count() != (aux ? 1 + m : 0))
            return Outcome{false, "program " + std::to_string(k) + ": auxiliary count is not 1+m"};
          for (const auto& d : fam.declarations())
            if (d.arity > 2 * rmax) return Outcome{false, d.name + " has arity above 2r"};
          expected += 5 * m * m + fam.auxiliary_count();
        }
        if (r.program.signature.size() != inputs[k].signature.size() + expected)
          return Outcome{false, "program " + std::to_string(k) + ": unexpected number of new predicates"};
        if (aux) continue;
        const double qin = static_cast<double>(r.report.before.Q);
        const double qout = static_cast<double>(r.report.after.Q);
        if (qout > std::pow(qin, 4.0))
          return Outcome{false, "program " + std::to_string(k) + ": Q_out exceeds Q_in^4"};
        if (r.report.families.empty()) continue;
        const double degree = std::log(qout) / std::log(qin);
        if (degree > worst_degree) {
          worst_degree = degree;
          worst_ratio_k = k;
        }
        const double x = std::log(qin), y = std::log(qout);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++points;
      }
    }
    const double n = static_cast<double>(points);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    char buf[160];
    std::snprintf(buf, sizeof buf, "fit Q_out ~ Q_in^%.2f over %zu programs, max log Q_out / log Q_in = %.2f (program %zu)",
                  slope, points, worst_degree, worst_ratio_k);
    return Outcome{true, buf};
  });

  criterion(7, "20 evaluation orders on 10 instances agree", 60.0, [&] {
    std::uint64_t compared = 0;
    for (std::size_t k = 0; k < 10; ++k) {
      const AxiomProgram p = k == 0 ? eliminate_negative_occurrences(path).program
                                    : eliminate_negative_occurrences(family[k]).program;
      const Universe u = verification_universe(p, k == 0 ? 3 : 2);
      const CompiledProgram c(p, u);
      const StateSpace space(p, u);
      const std::uint64_t states = std::uint64_t{1} << std::min<std::size_t>(space.atom_count(), 6);
      for (std::uint64_t s = 0; s < states; ++s) {
        const auto b = space.exhaustive(s);
        const auto ref = c.extend_in_stages(b);
        for (std::uint64_t order = 1; order <= 20; ++order) {
          if (!(c.extend(b, order * 0x9e3779b97f4a7c15ULL + k) == ref))
            return Outcome{false, "instance " + std::to_string(k) + " state " + std::to_string(s) + " order " +
                                      std::to_string(order)};
          ++compared;
        }
      }
    }
    return Outcome{true, std::to_string(compared) + " evaluations"};
  });

  criterion(8, "each single-edit stage axiom mutation is detected", 120.0, [&] {
    const auto r = eliminate_negative_occurrences(path);
    int detected = 0;
    std::string missed;
    for (int rel = 1; rel <= 5; ++rel) {
      const auto mutated = axf::testing::mutate_stage_axiom(r, rel);
      const auto rep = verify(VerificationSubject::from_pair(path, mutated),
                              exhaustive({1, 2, 3}, {Check::theorem2, Check::theorem1, Check::equivalence}));
      if (!rep.ok()) ++detected;
      else missed += " " + std::to_string(rel);
    }
    return Outcome{detected == 5, std::to_string(detected) + "/5 detected" + (missed.empty() ? "" : ", missed:" + missed)};
  });

  return failures == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include "support.hpp"

using namespace axf;
using axf::testing::path_program;
using axf::testing::state_of;

namespace {

// Transitive closure by Floyd-Warshall, independent of the evaluator.
std::vector<std::vector<bool>> closure(std::vector<std::vector<bool>> r) {
  const std::size_t n = r.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

// Shortest path length in edges (0 when unreachable), by breadth-first search.
std::size_t distance(const std::vector<std::vector<bool>>& e, std::size_t from, std::size_t to) {
  const std::size_t n = e.size();
  std::vector<std::size_t> d(n, 0);
  std::vector<std::size_t> frontier{from};
  for (std::size_t len = 1; !frontier.empty(); ++len) {
    std::vector<std::size_t> next;
    for (std::size_t u : frontier)
      for (std::size_t v = 0; v < n; ++v)
        if (e[u][v] && d[v] == 0) {
          d[v] = len;
          next.push_back(v);
        }
    frontier = std::move(next);
  }
  return d[to];
}

}  // namespace

TEST(Evaluator, PathChainExtension) {
  const AxiomProgram p = path_program();
  const auto s = extend(p, Universe(p.objects), state_of(p, {"E a b", "E b c"}));
  EXPECT_EQ(s.true_atoms(PredicateKind::derived),
            (std::vector<std::string>{"acyclic()", "path(a,b)", "path(a,c)", "path(b,c)"}));
}

TEST(Evaluator, EmptyStateOnlyAcyclic) {
  const AxiomProgram p = path_program();
  const auto s = extend(p, Universe(p.objects), state_of(p, {}));
  EXPECT_EQ(s.true_atoms(PredicateKind::derived), std::vector<std::string>{"acyclic()"});
}

TEST(Evaluator, MatchesTransitiveClosureOnAllThreeObjectGraphs) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  const CompiledProgram c(p, u);
  const StateSpace space(p, u);
  ASSERT_EQ(space.atom_count(), 9U);
  for (std::uint64_t k = 0; k < 512; ++k) {
    std::vector<std::vector<bool>> e(3, std::vector<bool>(3));
    for (std::size_t t = 0; t < 9; ++t) e[t / 3][t % 3] = (k >> t) & 1U;
    const auto tc = closure(e);
    const auto s = c.extend(space.exhaustive(k));
    bool cyclic = false;
    for (std::size_t i = 0; i < 3; ++i) {
      cyclic = cyclic || tc[i][i];
      for (std::size_t j = 0; j < 3; ++j)
        ASSERT_EQ(s.holds("path", std::vector<std::size_t>{i, j}), tc[i][j]) << "state " << k;
    }
    ASSERT_EQ(s.holds("acyclic", std::vector<std::size_t>{}), !cyclic);
  }
}

TEST(Evaluator, StagesOfPathChain) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  std::vector<StageTable> tables;
  const auto s = CompiledProgram(p, u).extend_in_stages(state_of(p, {"E a b", "E b c"}), &tables);
  ASSERT_EQ(tables.size(), 2U);
  const auto path = *s.predicate_index("path");
  const auto code = [&](std::size_t a, std::size_t b) { return a * 3 + b; };
  EXPECT_EQ(tables[0].fixpoint, 2U);
  EXPECT_EQ(tables[0].stage(path, code(0, 1)), 1U);
  EXPECT_EQ(tables[0].stage(path, code(1, 2)), 1U);
  EXPECT_EQ(tables[0].stage(path, code(0, 2)), 2U);
  EXPECT_EQ(tables[0].stage(path, code(2, 0)), 3U);  // f + 1
  EXPECT_FALSE(tables[0].derived(path, code(2, 0)));
  EXPECT_EQ(tables[1].fixpoint, 1U);
}

TEST(Evaluator, StagesEqualShortestPathLength) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  const CompiledProgram c(p, u);
  const StateSpace space(p, u);
  const auto path = *c.initial_state(space.exhaustive(0)).predicate_index("path");
  for (std::uint64_t k = 0; k < 512; ++k) {
    std::vector<std::vector<bool>> e(3, std::vector<bool>(3));
    for (std::size_t t = 0; t < 9; ++t) e[t / 3][t % 3] = (k >> t) & 1U;
    std::vector<StageTable> tables;
    c.extend_in_stages(space.exhaustive(k), &tables);
    std::size_t longest = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t d = distance(e, i, j);
        longest = std::max(longest, d);
        if (d > 0) ASSERT_EQ(tables[0].stage(path, i * 3 + j), d) << "state " << k;
        else ASSERT_FALSE(tables[0].derived(path, i * 3 + j));
      }
    ASSERT_EQ(tables[0].fixpoint, longest);
  }
}

TEST(Evaluator, EmptyEdgeRelationHasFixpointZero) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  std::vector<StageTable> tables;
  const auto s = CompiledProgram(p, u).extend_in_stages(state_of(p, {}), &tables);
  EXPECT_EQ(tables[0].fixpoint, 0U);
  EXPECT_EQ(tables[0].explicit_entries(), 0U);
  const auto rel = stage_relations(tables[0], s.signature(), u);
  const auto& nleq = rel.get(StageRelation::nleq, 0, 0);
  const auto& leq = rel.get(StageRelation::leq, 0, 0);
  EXPECT_EQ(nleq.size(), 81U);
  EXPECT_TRUE(std::all_of(nleq.begin(), nleq.end(), [](auto v) { return v == 1; }));
  EXPECT_TRUE(std::all_of(leq.begin(), leq.end(), [](auto v) { return v == 0; }));
}

TEST(Evaluator, StageRelationComplements) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  const CompiledProgram c(p, u);
  const StateSpace space(p, u);
  for (std::uint64_t k = 0; k < 512; k += 7) {
    std::vector<StageTable> tables;
    const auto s = c.extend_in_stages(space.exhaustive(k), &tables);
    const auto rel = stage_relations(tables[0], s.signature(), u);
    const auto& lt = rel.get(StageRelation::lt, 0, 0);
    const auto& nlt = rel.get(StageRelation::nlt, 0, 0);
    const auto& leq = rel.get(StageRelation::leq, 0, 0);
    const auto& nleq = rel.get(StageRelation::nleq, 0, 0);
    const auto& tri = rel.get(StageRelation::tri, 0, 0);
    for (std::size_t x = 0; x < lt.size(); ++x) {
      ASSERT_NE(lt[x], nlt[x]);
      ASSERT_NE(leq[x], nleq[x]);
      ASSERT_TRUE(!tri[x] || lt[x]);
    }
    const auto path = *s.predicate_index("path");
    for (std::size_t a = 0; a < 9; ++a) ASSERT_NE(s.get(path, a), nleq[a * 9 + a] != 0);
  }
}

TEST(Evaluator, StagedAndInPlaceEvaluationAgree) {
  for (const char* f : {"programs/path.axp", "programs/chain3.axp", "programs/two_preds.axp"}) {
    const AxiomProgram p = axf::testing::load(f);
    const Universe u = verification_universe(p, 2);
    const CompiledProgram c(p, u);
    const StateSpace space(p, u);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << space.atom_count()); ++k) {
      const auto b = space.exhaustive(k);
      ASSERT_EQ(c.extend(b), c.extend_in_stages(b)) << f << " state " << k;
    }
  }
}

TEST(Evaluator, RandomOrdersGiveSameExtension) {
  const AxiomProgram p = axf::testing::load("programs/two_preds.axp");
  const Universe u(p.objects);
  const CompiledProgram c(p, u);
  const StateSpace space(p, u);
  for (std::uint64_t k = 0; k < 64; ++k) {
    const auto b = space.exhaustive(k);
    const auto ref = c.extend(b);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) ASSERT_EQ(c.extend(b, seed), ref);
  }
}

TEST(Evaluator, PrefixEvaluation) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  const CompiledProgram c(p, u);
  const auto s = c.extend(state_of(p, {}), std::nullopt, 1);
  EXPECT_TRUE(s.true_atoms(PredicateKind::derived).empty());
}

TEST(EvalFormula, ClosedAndOpenFormulas) {
  const AxiomProgram p = path_program();
  const Universe u(p.objects);
  const auto s = CompiledProgram(p, u).extend(state_of(p, {"E a b"}));
  const Formula e = Formula::atom("E", variables_as_terms({"x", "y"}));
  EXPECT_TRUE(eval_formula(e, s, {{"x", "a"}, {"y", "b"}}));
  EXPECT_FALSE(eval_formula(e, s, {{"x", "b"}, {"y", "a"}}));
  EXPECT_TRUE(eval_formula(Formula::exists({"x", "y"}, e), s, {}));
  EXPECT_FALSE(eval_formula(Formula::forall({"x"}, Formula::exists({"y"}, e)), s, {}));
  EXPECT_THROW(eval_formula(e, s, {{"x", "a"}}), Error);
  EXPECT_THROW(eval_formula(Formula::atom("nope", {}), s, {}), Error);
}

TEST(Universe, EncodingAndPadding) {
  const Universe u({"a", "b", "c"});
  EXPECT_EQ(u.encode(std::vector<std::size_t>{1, 2}), 5U);
  EXPECT_EQ(u.decode(5, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(u.tuple_count(0), 1U);
  EXPECT_THROW(Universe({}), Error);
  EXPECT_THROW(Universe({"a", "a"}), Error);
  EXPECT_EQ(Universe::padded({"o1"}, 3).objects(), (std::vector<std::string>{"o1", "o2", "o3"}));
  EXPECT_THROW(Universe::padded({"a", "b"}, 1), Error);
}

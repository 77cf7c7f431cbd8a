#include <gtest/gtest.h>

#include "support.hpp"

using namespace axf;
using axf::testing::path_program;

namespace {

Formula at(const std::string& p, std::vector<std::string> vars) { return Formula::atom(p, variables_as_terms(vars)); }

Formula body_of(const std::string& text) {
  const std::string src = "(program (objects a) (basic (B 1) (E 2) (Z 0)) (derived (P 1) (Q 1))"
                          " (stratum (axiom (P ?x) (B ?x))) (stratum (axiom (Q ?x) " +
                          text + ")))";
  return parse_program(src).strata.at(1).at(0).body;
}

}  // namespace

TEST(Formula, FactoriesCollapseDegenerateNodes) {
  const Formula a = at("B", {"x"});
  EXPECT_EQ(Formula::conjunction({a}), a);
  EXPECT_EQ(Formula::disjunction({a}), a);
  EXPECT_TRUE(Formula::conjunction({}).is(FormulaKind::top));
  EXPECT_TRUE(Formula::disjunction({}).is(FormulaKind::bottom));
  EXPECT_EQ(Formula::exists({}, a), a);
  EXPECT_EQ(Formula::forall({}, a), a);
  EXPECT_EQ(Formula::conjunction({a, a}).children().size(), 2U);
}

TEST(Formula, EqualityIgnoresSpans) {
  const Formula a = at("B", {"x"});
  EXPECT_EQ(a, a.with_span({"f", 0, 3, 2, 5}));
  EXPECT_NE(a, at("B", {"y"}));
}

TEST(Polarity, CountsNegations) {
  const Formula phi = body_of("(and (P ?x) (not (P ?x)) (not (not (P ?x))))");
  std::vector<Polarity> seen;
  for_each_atom(phi, [&](const Formula&, const std::vector<std::size_t>&, Polarity p) { seen.push_back(p); });
  ASSERT_EQ(seen.size(), 3U);
  EXPECT_EQ(seen[0], Polarity::positive);
  EXPECT_EQ(seen[1], Polarity::negative);
  EXPECT_EQ(seen[2], Polarity::positive);
}

TEST(Polarity, ImplicationAntecedentIsNegative) {
  const Formula phi = body_of("(imply (P ?x) (B ?x))");
  std::map<std::string, Polarity> pol;
  for_each_atom(phi, [&](const Formula& a, const std::vector<std::size_t>&, Polarity p) { pol[a.predicate()] = p; });
  EXPECT_EQ(pol["P"], Polarity::negative);
  EXPECT_EQ(pol["B"], Polarity::positive);
}

TEST(Polarity, PolarityOfMatchesTraversal) {
  const Formula phi = body_of("(forall (?y) (or (not (P ?y)) (exists (?z) (not (not (P ?z))))))");
  for_each_atom(phi, [&](const Formula& a, const std::vector<std::size_t>& path, Polarity p) {
    EXPECT_EQ(polarity_of(phi, path), p);
    EXPECT_EQ(subformula_at(phi, path), a);
  });
  EXPECT_THROW(polarity_of(phi, std::vector<std::size_t>{7}), Error);
}

TEST(Occurrences, AcyclicHasOneNegativePathOccurrence) {
  const AxiomProgram p = path_program();
  const auto negs = negative_occurrences(p, p.derived_predicates());
  ASSERT_EQ(negs.size(), 1U);
  EXPECT_EQ(negs[0].predicate, "path");
  EXPECT_EQ(negs[0].stratum, 1U);
  EXPECT_EQ(negs[0].axiom, 0U);
  EXPECT_EQ(polarity_of(p.strata[1][0].body, negs[0].path), Polarity::negative);
}

TEST(Strata, AffectedAndDefiningStrata) {
  const AxiomProgram p = path_program();
  EXPECT_EQ(affected_predicates(p.strata[0]), std::vector<std::string>{"path"});
  EXPECT_EQ(affected_predicates(p.strata[1]), std::vector<std::string>{"acyclic"});
  const auto home = defining_strata(p);
  EXPECT_EQ(home.at("path"), 0U);
  EXPECT_EQ(home.at("acyclic"), 1U);
  EXPECT_TRUE(affected_predicates({}).empty());
}

TEST(Stratification, PathProgramIsStratified) { EXPECT_TRUE(is_stratified(path_program())); }

TEST(Stratification, DetectsEachCondition) {
  AxiomProgram p = path_program();
  // (a): path defined again in stratum 2
  AxiomProgram a = p;
  a.strata[1].push_back(p.strata[0][0]);
  auto va = check_stratified(a);
  ASSERT_FALSE(va.empty());
  EXPECT_TRUE(std::any_of(va.begin(), va.end(), [](const auto& v) { return v.rule == 'a'; }));

  // (b), (c): acyclic used positively in stratum 1
  AxiomProgram bc = p;
  bc.strata[0][0].body = Formula::conjunction({bc.strata[0][0].body, Formula::atom("acyclic", {})});
  auto vbc = check_stratified(bc);
  EXPECT_TRUE(std::any_of(vbc.begin(), vbc.end(), [](const auto& v) { return v.rule == 'b'; }));
  EXPECT_TRUE(std::any_of(vbc.begin(), vbc.end(), [](const auto& v) { return v.rule == 'c'; }));

  // (d): path negated inside its own stratum
  AxiomProgram d = p;
  d.strata[0][0].body = Formula::conjunction(
      {d.strata[0][0].body, Formula::negation(Formula::atom("path", variables_as_terms({"y", "x"})))});
  auto vd = check_stratified(d);
  ASSERT_EQ(vd.size(), 1U);
  EXPECT_EQ(vd[0].rule, 'd');
  EXPECT_EQ(vd[0].predicate, "path");
}

TEST(Stratification, UndeclaredPredicateThrows) {
  AxiomProgram p = path_program();
  p.strata[1][0].body = Formula::atom("nope", {});
  EXPECT_THROW(check_stratified(p), Error);
}

TEST(WellFormedness, ReportsStructuralProblems) {
  AxiomProgram p = path_program();
  p.strata[0].push_back({{"E", variables_as_terms({"x", "y"})}, at("E", {"x", "y"}), {}});
  p.strata[0].push_back({{"path", variables_as_terms({"x", "x"})}, at("E", {"x", "x"}), {}});
  p.strata[0].push_back({{"path", variables_as_terms({"x", "y"})}, at("E", {"x", "w"}), {}});
  p.strata[0].push_back({{"path", variables_as_terms({"x", "y"})}, Formula::atom("E", {Term::var("x"), Term::constant("q")}), {}});
  std::set<std::string> codes;
  for (const auto& d : well_formedness_diagnostics(p)) codes.insert(d.code);
  EXPECT_TRUE(codes.contains("basic-head"));
  EXPECT_TRUE(codes.contains("head-repeated-variable"));
  EXPECT_TRUE(codes.contains("free-variable"));
  EXPECT_TRUE(codes.contains("unknown-object"));
}

TEST(WellFormedness, HeadOnlyVariablesAreAllowed) {
  AxiomProgram p = path_program();
  p.strata[0].push_back({{"path", variables_as_terms({"x", "y"})}, at("E", {"x", "x"}), {}});
  EXPECT_TRUE(well_formedness_diagnostics(p).empty());
}

TEST(Substitution, ReplacesFreeVariablesOnly) {
  const Formula phi = Formula::conjunction({at("B", {"x"}), Formula::exists({"x"}, at("E", {"x", "y"}))});
  const Formula out = substitute(phi, {{"x", Term::constant("a")}, {"y", Term::var("v")}});
  EXPECT_EQ(out, Formula::conjunction({Formula::atom("B", {Term::constant("a")}),
                                       Formula::exists({"x"}, at("E", {"x", "v"}))}));
  EXPECT_EQ(substitute(phi, {}), phi);
  const std::vector<std::string> objs{"b"};
  EXPECT_THROW(substitute(phi, {{"x", Term::constant("a")}}, objs), Error);
}

TEST(Substitution, FreshenBoundRenamesQuantifiedVariables) {
  const Formula phi = Formula::forall({"x"}, Formula::exists({"z"}, at("E", {"x", "z"})));
  NameSupply names;
  const Formula out = freshen_bound(phi, names, "b");
  EXPECT_EQ(out, Formula::forall({"b1"}, Formula::exists({"b2"}, at("E", {"b1", "b2"}))));
  EXPECT_EQ(names.fresh("b"), "b3");
}

TEST(AlphaEquivalence, MatchesRenamings) {
  const Axiom a{{"P", variables_as_terms({"x"})}, Formula::exists({"z"}, at("E", {"x", "z"})), {}};
  const Axiom b{{"P", variables_as_terms({"u"})}, Formula::exists({"w"}, at("E", {"u", "w"})), {}};
  const Axiom c{{"P", variables_as_terms({"u"})}, Formula::exists({"w"}, at("E", {"w", "u"})), {}};
  EXPECT_TRUE(alpha_equivalent(a, b));
  EXPECT_FALSE(alpha_equivalent(a, c));
}

TEST(Traversal, ReplaceAtAndMapAtoms) {
  const Formula phi = body_of("(and (B ?x) (not (P ?x)))");
  const auto path = std::vector<std::size_t>{1, 0};
  const Formula out = replace_at(phi, path, Formula::bottom());
  EXPECT_TRUE(subformula_at(out, path).is(FormulaKind::bottom));
  const Formula mapped = map_atoms(phi, [](const Formula& a, Polarity pol) {
    return pol == Polarity::negative ? Formula::top() : a;
  });
  EXPECT_TRUE(subformula_at(mapped, path).is(FormulaKind::top));
  EXPECT_EQ(free_variables(phi), std::set<std::string>{"x"});
}

TEST(NodeCount, CountsAtomsTermsConnectivesAndVariables) {
  const AxiomProgram p = path_program();
  const Axiom& ax = p.strata[0][0];
  EXPECT_EQ(node_count(ax.head), 3U);
  EXPECT_EQ(node_count(ax.body), 13U);
}

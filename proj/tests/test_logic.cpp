#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcsp/adversaries/families.hpp"
#include "qcsp/fixtures.hpp"
#include "qcsp/logic/game.hpp"

using namespace qcsp;

namespace {

Structure graph(std::size_t n, std::vector<Tuple> edges) {
  Structure s(n);
  s.add_relation("E", Relation(n, 2, std::move(edges)));
  return s;
}

}  // namespace

TEST(ParseSentence, Examples) {
  Structure g = fixtures::two_clique();
  PHSentence phi = parse_sentence("A x A y E z : E(x,z) & E(y,z)", g);
  EXPECT_EQ(phi.num_universals(), 2u);
  EXPECT_EQ(phi.num_existentials(), 1u);
  EXPECT_EQ(phi.matrix.size(), 2u);
  Structure l = fixtures::leq();
  PHSentence eq = parse_sentence("A x : x=c0", l);
  EXPECT_TRUE(eq.has_equality());
  EXPECT_THROW(parse_sentence("E z : Q(z)", g), InputError);
}

TEST(ParseSentence, Errors) {
  Structure g = fixtures::two_clique();
  EXPECT_THROW(parse_sentence("E x : E(x)", g), InputError);        // arity mismatch
  EXPECT_THROW(parse_sentence("E x : E(x,y)", g), InputError);      // unbound
  EXPECT_THROW(parse_sentence("E x : x=x", g, false), InputError);  // equality disallowed
  EXPECT_THROW(parse_sentence("E x E x : E(x,x)", g), InputError);  // quantified twice
  EXPECT_THROW(parse_sentence("E x : E(x,c9)", g), InputError);     // unknown constant
  EXPECT_THROW(parse_sentence("E x E(x,x)", g), InputError);        // missing colon
}

TEST(ParseSentence, PrintRoundTrip) {
  oracle::Gen gen(21);
  Structure s = gen.structure(3, 2, 3, true);
  for (int i = 0; i < 50; ++i) {
    PHSentence phi = gen.sentence(s, gen.below(3), 1 + gen.below(3), 1 + gen.below(4), false, true);
    EXPECT_EQ(parse_sentence(print_sentence(phi, s), s), phi);
  }
}

TEST(EvalCsp, Examples) {
  EXPECT_TRUE(eval_csp(fixtures::two_clique(), parse_sentence("E x E y : E(x,y)", fixtures::two_clique())).holds);
  Structure loopless = graph(1, {});
  EXPECT_FALSE(eval_csp(loopless, parse_sentence("E x : E(x,x)", loopless)).holds);
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence("E z : E(a,z) & E(b,z) & E(c,z)", k4);
  GameVerdict v = eval_csp(k4, phi);
  ASSERT_TRUE(v.holds);
  EXPECT_EQ(v.skolem[0][0].at(Tuple{}), 3u);  // frozen: z = 3 is the only common neighbour
  EXPECT_THROW(eval_csp(k4, parse_sentence(fixtures::k4_sentence(), k4)), InputError);
}

TEST(EvalQcsp, K4SentenceIsFalse) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence(fixtures::k4_sentence(), k4);
  GameVerdict v = eval_qcsp(k4, phi);
  EXPECT_FALSE(v.holds);
  EXPECT_TRUE(verify_counter(k4, phi, nullptr, v.counter));
}

TEST(EvalQcsp, UniversalEqualityOnTwoElementsIsFalse) {
  Structure s(2);
  s.add_relation("T", Relation(2, 1, {{0}, {1}}));
  EXPECT_FALSE(eval_qcsp(s, parse_sentence("A x A y : x=y", s)).holds);
}

TEST(EvalQcsp, ExistentialSentencesAgreeWithCsp) {
  oracle::Gen g(22);
  for (int i = 0; i < 100; ++i) {
    Structure s = g.structure(2 + g.below(2), 2, 3, g.coin(), 0.4);
    PHSentence phi = g.sentence(s, 0, 1 + g.below(4), 1 + g.below(4), true, true);
    ASSERT_EQ(eval_qcsp(s, phi).holds, eval_csp(s, phi).holds);
  }
}

TEST(EvalRestricted, K4SingletonAdversariesAllHold) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence(fixtures::k4_sentence(), k4);
  int count = 0;
  oracle::all_tuples(4, 3, [&](const Tuple& t) {
    AdversarySet o(4, 3);
    o.add(Adversary(4, 3, {t}));
    EXPECT_TRUE(eval_qcsp_restricted(k4, phi, o).holds) << tuple_to_string(t);
    ++count;
  });
  EXPECT_EQ(count, 64);
}

TEST(EvalRestricted, FullAdversaryAndEmptySet) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence(fixtures::k4_sentence(), k4);
  AdversarySet full(4, 3);
  full.add(Adversary::full(4, 3));
  GameVerdict v = eval_qcsp_restricted(k4, phi, full);
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.failing_adversary, std::optional<std::size_t>(0));
  EXPECT_TRUE(eval_qcsp_restricted(k4, phi, AdversarySet(4, 3)).holds);
  AdversarySet wrong(4, 2);
  wrong.add(Adversary::full(4, 2));
  EXPECT_THROW(eval_qcsp_restricted(k4, phi, wrong), InputError);
}

TEST(EvalQcsp, AgreesWithOracleAndWitnessesReplay) {
  oracle::Gen g(23);
  int trues = 0, falses = 0;
  for (int i = 0; i < 400; ++i) {
    Structure s = g.structure(2 + g.below(2), 1 + g.below(2), 3, g.coin(), 0.55);
    PHSentence phi = g.sentence(s, g.below(4), g.below(4), 1 + g.below(4), false, g.coin(0.3));
    GameVerdict v = eval_qcsp(s, phi);
    ASSERT_EQ(v.holds, oracle::eval(s, phi)) << print_sentence(phi, s);
    if (v.holds) {
      ++trues;
      ASSERT_EQ(v.skolem.size(), 1u);
      EXPECT_TRUE(verify_skolem(s, phi, nullptr, v.skolem[0]));
    } else {
      ++falses;
      EXPECT_TRUE(verify_counter(s, phi, nullptr, v.counter));
    }
  }
  EXPECT_GT(trues, 50);
  EXPECT_GT(falses, 50);
}

TEST(EvalRestricted, AgreesWithOracleAndWitnessesReplay) {
  oracle::Gen g(24);
  for (int i = 0; i < 300; ++i) {
    std::size_t n = 2 + g.below(2), m = 1 + g.below(3);
    Structure s = g.structure(n, 1 + g.below(2), 3, g.coin(), 0.55);
    PHSentence phi = g.sentence(s, m, g.below(4), 1 + g.below(4), false);
    AdversarySet o = g.adversary_set(n, m, 3);
    GameVerdict v = eval_qcsp_restricted(s, phi, o);
    ASSERT_EQ(v.holds, oracle::eval_restricted(s, phi, o)) << print_sentence(phi, s);
    if (v.holds) {
      ASSERT_EQ(v.skolem.size(), o.members.size());
      for (std::size_t b = 0; b < o.members.size(); ++b)
        EXPECT_TRUE(verify_skolem(s, phi, &o.members[b], v.skolem[b]));
    } else {
      ASSERT_TRUE(v.failing_adversary.has_value());
      EXPECT_TRUE(verify_counter(s, phi, &o.members[*v.failing_adversary], v.counter));
    }
  }
}

TEST(EvalRestricted, CorruptedSkolemTableFailsReplay) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence("A x E z : E(x,z)", k4);
  GameVerdict v = eval_qcsp(k4, phi);
  ASSERT_TRUE(v.holds);
  auto t = v.skolem[0];
  for (auto& [key, val] : t[1]) val = key[0];  // z = x is never an edge
  EXPECT_FALSE(verify_skolem(k4, phi, nullptr, t));
}

TEST(EvalRestricted, Domination) {
  oracle::Gen g(25);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2, m = 1 + g.below(3);
    Structure s = g.structure(n, 2, 3, g.coin(), 0.6);
    PHSentence phi = g.sentence(s, m, g.below(3), 1 + g.below(4), false);
    Adversary big = g.adversary(n, m, 0.6);
    std::vector<Tuple> sub;
    for (const auto& t : big.tuples())
      if (g.coin()) sub.push_back(t);
    if (sub.empty()) sub.push_back(big.tuples()[0]);
    AdversarySet ob(n, m), os(n, m);
    ob.add(big);
    os.add(Adversary(n, m, sub));
    if (eval_qcsp_restricted(s, phi, ob).holds) ASSERT_TRUE(eval_qcsp_restricted(s, phi, os).holds);
  }
}

TEST(EvalRestricted, UnionPrincipleForwardDirectionsOnArbitrarySentences) {
  oracle::Gen g(26);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2, m = 1 + g.below(3);
    Structure s = g.structure(n, 2, 3, g.coin(), 0.6);
    PHSentence phi = g.sentence(s, m, g.below(3), 1 + g.below(4), false);
    AdversarySet o = g.adversary_set(n, m, 3);
    bool on_union = eval_qcsp_restricted(s, phi, o.union_set()).holds;
    bool on_set = eval_qcsp_restricted(s, phi, o).holds;
    bool on_singletons = eval_qcsp_restricted(s, phi, o.singletons()).holds;
    if (on_union) ASSERT_TRUE(on_set);
    if (on_set) ASSERT_TRUE(on_singletons);
  }
}

TEST(EvalRestricted, K4IsTheCounterexampleToTheConverseOutsidePi2) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence(fixtures::k4_sentence(), k4);
  AdversarySet full(4, 3);
  full.add(Adversary::full(4, 3));
  EXPECT_TRUE(eval_qcsp_restricted(k4, phi, full.singletons()).holds);
  EXPECT_FALSE(eval_qcsp_restricted(k4, phi, full).holds);
  EXPECT_FALSE(phi.is_pi2());
}

TEST(EvalQcsp, NodeBudgetIsReportedNotTruncated) {
  Structure k4 = fixtures::k4();
  PHSentence phi = parse_sentence(fixtures::k4_sentence(), k4);
  EvalOptions o;
  o.budget.search_nodes = 3;
  EXPECT_THROW(eval_qcsp(k4, phi, o), BudgetExceeded);
}

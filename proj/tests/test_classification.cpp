#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcsp/classification/essential.hpp"
#include "qcsp/classification/gap_algebra.hpp"
#include "qcsp/classification/hubie.hpp"
#include "qcsp/classification/paths.hpp"
#include "qcsp/classification/projectivity.hpp"
#include "qcsp/classification/shop.hpp"
#include "qcsp/fixtures.hpp"

using namespace qcsp;

namespace {

constexpr Mask k02 = 0b101, k12 = 0b110;

Operation chen_r() { return make_family_op(Family::ChenR); }
Operation chen_s() { return make_family_op(Family::ChenS); }

// Random k-ary operation that is αβ-projective at coordinate `at`.
Operation random_projective(oracle::Gen& g, std::size_t n, std::size_t k, Mask a, Mask b, std::size_t at) {
  return Operation::from_function(n, k, [&](const Tuple& x) {
    Mask allowed = full_mask(n);
    if ((a >> x[at]) & 1) allowed &= a;
    if ((b >> x[at]) & 1) allowed &= b;
    auto e = elements_of(allowed);
    return e[g.below(e.size())];
  });
}

Structure k3_with_constants() {
  Structure s(3);
  s.add_relation("E", materialize(parse_relation_expr("x1!=x2", 2), 3));
  s.add_all_constants();
  return s;
}

bool qlc_reference(const std::string& b) {
  std::size_t len = b.size();
  for (std::size_t a = 0; a <= len; ++a) {
    if (b.substr(0, a) != std::string(a, '0')) continue;
    for (std::size_t ones = 1; a + ones <= len; ++ones)
      if (b.substr(a, ones) == std::string(ones, '1') && len - a - ones == a) return true;
    std::size_t rest = len - a;
    if (rest == a || rest + 1 == a) return true;
  }
  return false;
}

}  // namespace

TEST(AlphaBeta, Examples) {
  for (const auto& [a, b] : alpha_beta_pairs(3))
    for (std::size_t k = 1; k <= 3; ++k)
      for (std::size_t i = 0; i < k; ++i) EXPECT_TRUE(is_alpha_beta_projective(Operation::projection(3, k, i), a, b));
  EXPECT_FALSE(is_alpha_beta_projective(chen_r(), k02, k12));
  EXPECT_TRUE(is_alpha_beta_projective(chen_s(), k02, k12));  // frozen: table check
  EXPECT_FALSE(oracle::is_ab_projective(oracle::table_of(chen_r()), k02, k12));
  EXPECT_TRUE(oracle::is_ab_projective(oracle::table_of(chen_s()), k02, k12));
  EXPECT_THROW(is_alpha_beta_projective(chen_s(), 0b001, 0b010), InputError);  // union not A
  EXPECT_THROW(is_alpha_beta_projective(chen_s(), 0b111, 0b010), InputError);  // not strict
}

TEST(AlphaBeta, PairsAreUnorderedAndValid) {
  auto p = alpha_beta_pairs(3);
  EXPECT_EQ(p.size(), 6u);
  for (const auto& [a, b] : p) {
    EXPECT_LT(a, b);
    EXPECT_EQ(a | b, 0b111u);
  }
  EXPECT_EQ(alpha_beta_pairs(2).size(), 1u);
}

TEST(AlphaBeta, ClosedUnderComposition) {
  oracle::Gen g(51);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3;
    auto pairs = alpha_beta_pairs(n);
    auto [a, b] = pairs[g.below(pairs.size())];
    std::size_t k = 2 + g.below(2);
    Operation outer = random_projective(g, n, k, a, b, g.below(k));
    std::size_t inner_arity = 1 + g.below(3);
    std::vector<Operation> inner;
    for (std::size_t i = 0; i < k; ++i) inner.push_back(random_projective(g, n, inner_arity, a, b, g.below(inner_arity)));
    Operation comp = Operation::from_function(n, inner_arity, [&](const Tuple& x) {
      Tuple mid;
      for (const auto& h : inner) mid.push_back(h(std::span<const Element>(x)));
      return outer(std::span<const Element>(mid));
    });
    ASSERT_TRUE(is_alpha_beta_projective(comp, a, b));
    ASSERT_TRUE(oracle::is_ab_projective(oracle::table_of(comp), a, b));
  }
}

TEST(Classify, ChenGapIsPGPWithVerifiedViolators) {
  PGPVerdict v = classify_pgp_egp({chen_r(), chen_s()});
  EXPECT_FALSE(v.egp);
  EXPECT_EQ(v.violations.size(), 6u);
  for (const auto& pv : v.violations) {
    EXPECT_FALSE(is_alpha_beta_projective(pv.op, pv.alpha, pv.beta));
    EXPECT_FALSE(oracle::is_ab_projective(oracle::table_of(pv.op), pv.alpha, pv.beta));
  }
}

TEST(Classify, ProjectiveSamplesAreEGP) {
  oracle::Gen g(52);
  std::vector<Operation> ops;
  for (int i = 0; i < 5; ++i) ops.push_back(random_projective(g, 3, 2 + g.below(2), k02, k12, 0));
  PGPVerdict v = classify_pgp_egp(ops);
  ASSERT_TRUE(v.egp);
  ASSERT_TRUE(v.witness.has_value());
  for (const auto& f : ops) EXPECT_TRUE(is_alpha_beta_projective(f, v.witness->first, v.witness->second));
  PGPVerdict p = classify_pgp_egp({Operation::projection(2, 2, 0), Operation::projection(2, 3, 2)});
  ASSERT_TRUE(p.egp);
  EXPECT_EQ(*p.witness, std::make_pair(Mask{0b01}, Mask{0b10}));
}

TEST(Classify, StructureModeMatchesOracleEnumeration) {
  oracle::Gen g(53);
  int egp = 0, pgp = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Structure s = g.structure(2, 1 + g.below(2), 2, g.coin(), 0.5);
    std::size_t max_arity = 1;
    for (const auto& nr : s.relations()) max_arity = std::max(max_arity, nr.relation.size());
    if (max_arity > 3) continue;
    bool ref_egp = false;
    for (const auto& [a, b] : alpha_beta_pairs(2)) {
      bool all = true;
      for (std::size_t k = 1; k <= max_arity && all; ++k)
        for (const auto& f : oracle::polymorphisms(s, k))
          if (!oracle::is_ab_projective(f, a, b)) all = false;
      ref_egp = ref_egp || all;
    }
    PGPVerdict v = classify_pgp_egp(s);
    ASSERT_EQ(v.egp, ref_egp) << print_document(s);
    (v.egp ? egp : pgp)++;
  }
  EXPECT_GT(egp, 0);
  EXPECT_GT(pgp, 0);
  EXPECT_FALSE(classify_pgp_egp(fixtures::leq()).egp);  // majority is not {0}{1}-projective
}

TEST(Hubie, Examples) {
  auto mx = Operation::from_function(2, 2, [](const Tuple& x) { return std::max(x[0], x[1]); });
  EXPECT_TRUE(is_hubie_pol(mx, 0));
  EXPECT_FALSE(is_hubie_pol(mx, 1));
  for (std::size_t k = 2; k <= 3; ++k)
    for (Element x = 0; x < 3; ++x) EXPECT_FALSE(is_hubie_pol(Operation::projection(3, k, 0), x));
  for (std::size_t n : {2u, 3u}) {
    Operation f = make_family_op(Family::FHatA, n);
    EXPECT_TRUE(is_hubie_pol(f, 1)) << n;
    EXPECT_TRUE(oracle::is_generalized_hubie(oracle::table_of(f), Tuple(f.arity(), 1)));
  }
  auto diag_only = Operation::from_function(3, 2, [](const Tuple& x) { return x[0]; });
  EXPECT_FALSE(is_generalized_hubie_pol(diag_only, {0, 0}));
}

TEST(Hubie, GeneralizedOnChenR) {
  Operation r = chen_r();
  oracle::all_tuples(2, 4, [&](const Tuple& z) {
    bool want = z == Tuple{0, 0, 1, 1};  // frozen: image checks over {0,1}^4
    EXPECT_EQ(is_generalized_hubie_pol(r, z), want) << tuple_to_string(z);
    EXPECT_EQ(oracle::is_generalized_hubie(oracle::table_of(r), z), want);
  });
  for (Element x = 0; x < 3; ++x) EXPECT_EQ(is_hubie_pol(r, x), is_generalized_hubie_pol(r, Tuple(4, x)));
  EXPECT_THROW(is_generalized_hubie_pol(r, {0, 1}), InputError);
}

TEST(Hubie, SearchInStructureMode) {
  Structure s = fixtures::leq();
  HubieSearch h0 = find_hubie_pol(s, 0, 2);
  ASSERT_TRUE(h0.op.has_value());
  EXPECT_EQ(h0.op->table(), (std::vector<Element>{0, 1, 1, 1}));  // frozen: max, the only one of 4 binary pols
  HubieSearch h1 = find_hubie_pol(s, 1, 2);
  ASSERT_TRUE(h1.op.has_value());
  EXPECT_EQ(h1.op->table(), (std::vector<Element>{0, 0, 0, 1}));  // min
  HubieSearch none = find_hubie_pol(k3_with_constants(), 0, 3);
  EXPECT_FALSE(none.op.has_value());
  EXPECT_TRUE(none.inconclusive);
}

TEST(Hubie, SearchInAlgebraMode) {
  HubieSearch h = find_hubie_pol({chen_s(), make_family_op(Family::FHatA, 2)}, 3, 1, 4);
  ASSERT_TRUE(h.op.has_value());
  EXPECT_TRUE(is_hubie_pol(*h.op, 1));
  EXPECT_EQ(h.term, "f_hat_a_2");
}

TEST(Shop, Examples) {
  Structure total(3);
  total.add_relation("T", Relation(3, 2, [] {
    std::vector<Tuple> v;
    oracle::all_tuples(3, 2, [&](const Tuple& t) { v.push_back(t); });
    return v;
  }()));
  auto t = has_simple_A_she(total);
  ASSERT_TRUE(t.has_value());
  EXPECT_TRUE(t->simple_source(3).has_value());
  EXPECT_FALSE(has_simple_A_she(fixtures::two_clique()).has_value());  // frozen: all 4 candidates fail
  Structure one(1);
  one.add_relation("L", Relation(1, 2, {{0, 0}}));
  EXPECT_TRUE(has_simple_A_she(one).has_value());
  Shop bad{{0b01, 0b00}};
  EXPECT_FALSE(bad.valid(2));
  Shop fixes_constant{{0b11, 0b10}};
  EXPECT_TRUE(is_she(Structure(2), fixes_constant));
  Structure with_c(2);
  with_c.add_constant("c0", 0);
  EXPECT_FALSE(is_she(with_c, fixes_constant));
}

TEST(Shop, AgreesWithBruteForceOverSimpleShops) {
  oracle::Gen g(54);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 2 + g.below(2);
    Structure s = g.structure(n, 1 + g.below(2), 2, false, 0.6);
    bool want = false;
    for (Element x = 0; x < n && !want; ++x)
      oracle::all_tuples(n, n, [&](const Tuple& img) {
        if (want) return;
        std::vector<std::set<Element>> f(n);
        for (Element a = 0; a < n; ++a) f[a] = a == x ? std::set<Element>{} : std::set<Element>{img[a]};
        for (Element a = 0; a < n; ++a) f[x].insert(a);
        for (const auto& nr : s.relations()) {
          auto r = oracle::set_of(nr.relation.tuples());
          for (const auto& t : r) {
            bool ok = true;
            std::vector<std::vector<Element>> ch;
            for (auto e : t) ch.emplace_back(f[e].begin(), f[e].end());
            std::function<void(std::size_t, Tuple&)> go = [&](std::size_t i, Tuple& cur) {
              if (!ok) return;
              if (i == t.size()) {
                ok = r.count(cur) > 0;
                return;
              }
              for (auto e : ch[i]) {
                cur.push_back(e);
                go(i + 1, cur);
                cur.pop_back();
              }
            };
            Tuple cur;
            go(0, cur);
            if (!ok) return;
          }
        }
        want = true;
      });
    ASSERT_EQ(has_simple_A_she(s).has_value(), want) << print_document(s);
  }
}

TEST(Essential, Examples) {
  Relation ne(2, 2, {{0, 1}, {1, 0}});
  EXPECT_EQ(essential_tuples(ne), (std::vector<Tuple>{{0, 0}, {1, 1}}));  // frozen: oracle
  EXPECT_TRUE(is_essential(ne));
  EXPECT_TRUE(is_essential_by_rho_tilde(ne));
  std::vector<Tuple> all;
  oracle::all_tuples(3, 2, [&](const Tuple& t) { all.push_back(t); });
  EXPECT_TRUE(essential_tuples(Relation(3, 2, all)).empty());
  EXPECT_TRUE(essential_tuples(Relation(3, 2, {})).empty());
  Relation unary(3, 1, {{0}, {2}});
  EXPECT_FALSE(is_essential(unary));
  EXPECT_FALSE(is_essential_by_rho_tilde(unary));
  std::vector<Tuple> prod;
  for (Element a : {0u, 1u})
    for (Element b : {1u, 2u}) prod.push_back({a, b});
  Relation p(3, 2, prod);
  EXPECT_FALSE(is_essential(p));
  EXPECT_EQ(rho_tilde(p).tuples(), p.tuples());
}

TEST(Essential, DualOraclesAgree) {
  oracle::Gen g(55);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 2 + g.below(2), k = 2 + g.below(2);  // unary: none by convention
    auto ts = g.relation(n, k, 0.2 + 0.6 * (g.below(100) / 100.0));
    Relation r(n, k, std::vector<Tuple>(ts.begin(), ts.end()));
    auto lib = essential_tuples(r);
    ASSERT_EQ(lib, oracle::essential_tuples(ts, n, k));
    ASSERT_EQ(oracle::set_of(rho_tilde(r).tuples()), oracle::rho_tilde(ts, n, k));
    ASSERT_EQ(is_essential(r), is_essential_by_rho_tilde(r));
  }
}

TEST(Essential, TwoTwoPrefixBreaksS) {
  oracle::Gen g(56);
  Operation s = chen_s();
  int hits = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t k = 2 + g.below(2);
    auto ts = g.relation(3, k, 0.5);
    Relation r(3, k, std::vector<Tuple>(ts.begin(), ts.end()));
    for (const auto& t : essential_tuples(r))
      if (t[0] == 2 && t[1] == 2) {
        EXPECT_FALSE(preserves(s, r));
        ++hits;
        break;
      }
  }
  EXPECT_GT(hits, 10);
}

TEST(Families, PointValues) {
  Operation r = chen_r();
  EXPECT_EQ(r({0, 1, 1, 1}), 1u);
  EXPECT_EQ(r({1, 0, 1, 1}), 1u);
  EXPECT_EQ(r({0, 0, 0, 1}), 0u);
  EXPECT_EQ(r({0, 0, 1, 0}), 0u);
  EXPECT_EQ(r({2, 1, 1, 1}), 2u);
  Operation fa = make_family_op(Family::FA, 3);
  EXPECT_EQ(fa.arity(), 4u);
  EXPECT_EQ(fa({1, 1, 1, 1}), 1u);
  EXPECT_EQ(fa({1, 0, 0, 0}), 0u);
  EXPECT_EQ(fa({0, 1, 1, 0}), 2u);
  Operation s = chen_s();
  for (Element x = 0; x < 3; ++x) EXPECT_EQ(s({x, x}), x);
  EXPECT_EQ(s({0, 1}), 2u);
  Operation fh = make_family_op(Family::FHatA, 2);
  EXPECT_EQ(fh.arity(), 4u);
  EXPECT_EQ(fh({1, 1, 0, 0}), 0u);
  EXPECT_EQ(fh({0, 1, 0, 0}), 2u);
}

TEST(Families, IdempotentAndSwapRelated) {
  auto swap = [](Element e) -> Element { return e == 2 ? 2 : 1 - e; };
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<std::pair<Family, Family>> pairs{{Family::FHatA, Family::FHatB}};
    if (n >= 3) pairs.push_back({Family::FA, Family::FB});
    for (auto [fa, fb] : pairs) {
      Operation a = make_family_op(fa, n), b = make_family_op(fb, n);
      EXPECT_TRUE(a.is_idempotent());
      EXPECT_TRUE(b.is_idempotent());
      oracle::all_tuples(3, a.arity(), [&](const Tuple& x) {
        Tuple y = x;
        for (auto& e : y) e = swap(e);
        ASSERT_EQ(b(std::span<const Element>(y)), swap(a(std::span<const Element>(x))));
      });
    }
  }
  EXPECT_TRUE(chen_r().is_idempotent());
  EXPECT_THROW(make_family_op(Family::FA, 2), InputError);
  EXPECT_THROW(make_family_op(Family::FHatA, 1), InputError);
  EXPECT_THROW(make_family_op(Family::ChenS, 0, 2), InputError);
  EXPECT_THROW(parse_family("f_c"), InputError);
  EXPECT_EQ(parse_family(family_name(Family::FHatB)), Family::FHatB);
}

TEST(Families, PreservationReports) {
  Operation fh = make_family_op(Family::FHatA, 2);
  FamilyReport rep = check_family_preservation(fh, {Relation(3, 1, {{0}, {2}}), Relation(3, 1, {{1}, {2}})}, {"U02", "U12"});
  EXPECT_TRUE(rep.all_preserved);
  EXPECT_TRUE(rep.arity_regime);
  Operation fa = make_family_op(Family::FA, 3);
  FamilyReport bad = check_family_preservation(fa, {Relation(3, 1, {{0}, {1}})}, {"U01"});
  EXPECT_FALSE(bad.all_preserved);
  ASSERT_FALSE(bad.relations[0].violation.empty());
  std::vector<Tuple> rows = bad.relations[0].violation;
  oracle::TupleSet r{{0}, {1}};
  EXPECT_FALSE(r.count(oracle::apply_rows(oracle::table_of(fa), rows)));
}

TEST(Families, HatAPreservesEveryBinaryInvariantOfTheGapAlgebra) {
  std::vector<Tuple> all;
  oracle::all_tuples(3, 2, [&](const Tuple& t) { all.push_back(t); });
  auto s = oracle::table_of(chen_s()), r = oracle::table_of(chen_r());
  std::vector<Relation> inv;
  std::vector<std::string> names;
  for (unsigned mask = 1; mask < 512; ++mask) {
    oracle::TupleSet rel;
    for (unsigned i = 0; i < 9; ++i)
      if ((mask >> i) & 1) rel.insert(all[i]);
    if (oracle::preserves(s, rel) && oracle::preserves(r, rel)) {
      inv.emplace_back(3, 2, std::vector<Tuple>(rel.begin(), rel.end()));
      names.push_back("B" + std::to_string(mask));
    }
  }
  EXPECT_EQ(inv.size(), 98u);  // frozen: subset enumeration
  FamilyReport rep = check_family_preservation(make_family_op(Family::FHatA, 2), inv, names);
  EXPECT_TRUE(rep.all_preserved);
  EXPECT_TRUE(rep.arity_regime);
}

TEST(Zhuk, ChenGapSatisfiesTheFirstRegime) {
  ZhukResult z = check_zhuk_condition({chen_r(), chen_s()});
  ASSERT_TRUE(z.found);  // frozen: exact restricted-row clone search
  EXPECT_EQ(z.regime, 1);
  const Operation& p = z.p->op;
  const Operation& r3 = z.r3->op;
  EXPECT_EQ(p({0, 1}), 0u);
  EXPECT_EQ(p({0, 2}), 2u);
  EXPECT_EQ(r3({0, 0, 1}), 0u);
  EXPECT_EQ(r3({0, 1, 0}), 0u);
  EXPECT_EQ(r3({0, 1, 1}), 2u);
  EXPECT_TRUE(p.is_idempotent());
  EXPECT_TRUE(r3.is_idempotent());
}

TEST(Zhuk, ProjectionsAreATrueNegative) {
  ZhukResult z = check_zhuk_condition({Operation::projection(3, 2, 0), Operation::projection(3, 2, 1)});
  EXPECT_FALSE(z.found);
  EXPECT_TRUE(z.exact);
}

TEST(Zhuk, LiteralTablesAreFoundImmediately) {
  Operation p = Operation::from_function(3, 2, [](const Tuple& x) -> Element {
    if (x[0] == x[1]) return x[0];
    return x == Tuple{0, 1} ? 0 : 2;
  }, "p");
  Operation r3 = Operation::from_function(3, 3, [](const Tuple& x) -> Element {
    if (x[0] == x[1] && x[1] == x[2]) return x[0];
    if (x == Tuple{0, 0, 1} || x == Tuple{0, 1, 0}) return 0;
    return 2;
  }, "r3");
  ZhukResult z = check_zhuk_condition({p, r3});
  ASSERT_TRUE(z.found);
  EXPECT_EQ(z.regime, 1);
}

TEST(BinaryWitnesses, P1AndP2) {
  LemmaFunResult lf = find_lemma_fun_witnesses({chen_r(), chen_s()});
  ASSERT_TRUE(lf.p1 && lf.p2);  // frozen: exact restricted-row clone search
  EXPECT_EQ(lf.p1->op({0, 1}), 1u);
  EXPECT_EQ(lf.p1->op({1, 0}), 2u);
  EXPECT_EQ(lf.p1->op({2, 0}), 2u);
  EXPECT_EQ(lf.p2->op({0, 1}), 0u);
  EXPECT_EQ(lf.p2->op({1, 0}), 2u);
  EXPECT_EQ(lf.p2->op({1, 2}), 2u);
  LemmaFunResult none = find_lemma_fun_witnesses({Operation::projection(3, 2, 0), Operation::projection(3, 2, 1)});
  EXPECT_FALSE(none.p1);
  EXPECT_FALSE(none.p2);
  EXPECT_TRUE(none.exact);
  Operation p1 = Operation::from_function(3, 2, [](const Tuple& x) -> Element {
    if (x[0] == x[1]) return x[0];
    return x == Tuple{0, 1} ? 1 : 2;
  });
  EXPECT_TRUE(find_lemma_fun_witnesses({p1}).p1.has_value());
}

TEST(Paths, QuasiLoopConnectedExamples) {
  // frozen: reference matcher over all splits
  std::vector<std::pair<std::string, bool>> cases{{"0110", true}, {"11", true},   {"0", true},     {"0001", true},
                                                  {"1", true},    {"01", true},   {"10", false},   {"011", true},
                                                  {"0101", false}, {"001", true}, {"1010", false}, {"111", true}};
  for (const auto& [b, want] : cases) EXPECT_EQ(is_quasi_loop_connected(b), want) << b;
  EXPECT_THROW(is_quasi_loop_connected("012"), InputError);
}

TEST(Paths, MatcherAgreesOnAllShortStrings) {
  for (std::size_t len = 1; len <= 10; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      std::string b;
      for (std::size_t i = 0; i < len; ++i) b += ((bits >> (len - 1 - i)) & 1) ? '1' : '0';
      ASSERT_EQ(is_quasi_loop_connected(b), qlc_reference(b)) << b;
    }
}

TEST(Paths, StructureShape) {
  Structure s = path_structure("101");
  EXPECT_EQ(s.domain_size(), 3u);
  const Relation& e = s.relation("E");
  EXPECT_TRUE(e.contains(Tuple{0, 0}));
  EXPECT_FALSE(e.contains(Tuple{1, 1}));
  EXPECT_TRUE(e.contains(Tuple{0, 1}));
  EXPECT_TRUE(e.contains(Tuple{2, 1}));
  EXPECT_FALSE(e.contains(Tuple{0, 2}));
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/classification/clone_search.hpp"
#include "qcsp/core/polymorphism.hpp"

namespace qcsp {

enum class Family { FA, FB, FHatA, FHatB, ChenR, ChenS };

inline Family parse_family(const std::string& name) {
  if (name == "f_a") return Family::FA;
  if (name == "f_b") return Family::FB;
  if (name == "f_hat_a") return Family::FHatA;
  if (name == "f_hat_b") return Family::FHatB;
  if (name == "chen_r") return Family::ChenR;
  if (name == "chen_s") return Family::ChenS;
  throw InputError("unknown family '" + name + "' (f_a, f_b, f_hat_a, f_hat_b, chen_r, chen_s)");
}

inline std::string family_name(Family f) {
  switch (f) {
    case Family::FA: return "f_a";
    case Family::FB: return "f_b";
    case Family::FHatA: return "f_hat_a";
    case Family::FHatB: return "f_hat_b";
    case Family::ChenR: return "chen_r";
    case Family::ChenS: return "chen_s";
  }
  return "?";
}

// Operations on {0,1,2}; everything not listed goes to 2, diagonals are idempotent.
inline Operation make_family_op(Family fam, std::size_t n = 0, std::size_t domain_size = 3) {
  if (domain_size != 3) throw InputError("family operations live on the domain {0,1,2}");
  auto swap01 = [](Element e) -> Element { return e == 2 ? 2 : 1 - e; };
  switch (fam) {
    case Family::ChenS:
      return Operation::from_function(3, 2, [](const Tuple& x) -> Element { return x[0] == x[1] ? x[0] : 2; }, "s");
    case Family::ChenR:
      return Operation::from_function(
          3, 4,
          [](const Tuple& x) -> Element {
            if (x[0] == x[1] && x[1] == x[2] && x[2] == x[3]) return x[0];
            static const Tuple ones[] = {{0, 1, 1, 1}, {1, 0, 1, 1}};
            static const Tuple zeros[] = {{0, 0, 0, 1}, {0, 0, 1, 0}};
            for (const auto& t : ones)
              if (x == t) return 1;
            for (const auto& t : zeros)
              if (x == t) return 0;
            return 2;
          },
          "r");
    case Family::FA:
    case Family::FB: {
      if (n < 3) throw InputError("f_a / f_b need n >= 3");
      bool swap = fam == Family::FB;
      return Operation::from_function(
          3, n + 1,
          [&](const Tuple& x) -> Element {
            Tuple y = x;
            if (swap)
              for (auto& e : y) e = swap01(e);
            std::size_t zeros = 0, ones = 0;
            for (Element e : y) zeros += e == 0, ones += e == 1;
            Element v = 2;
            if (zeros == y.size()) v = 0;
            else if (ones == y.size()) v = 1;
            else if (ones == 1 && zeros + 1 == y.size()) v = 0;
            return swap ? swap01(v) : v;
          },
          family_name(fam) + "_" + std::to_string(n));
    }
    case Family::FHatA:
    case Family::FHatB: {
      if (n < 2) throw InputError("f_hat_a / f_hat_b need n >= 2");
      bool swap = fam == Family::FHatB;
      return Operation::from_function(
          3, n + 2,
          [&](const Tuple& x) -> Element {
            Tuple y = x;
            if (swap)
              for (auto& e : y) e = swap01(e);
            std::size_t zeros = 0, ones = 0;
            for (std::size_t i = 1; i < y.size(); ++i) zeros += y[i] == 0, ones += y[i] == 1;
            std::size_t rest = y.size() - 1;
            Element v = 2;
            if (y[0] == 0 && zeros == rest) v = 0;
            else if (y[0] == 1 && ones == rest) v = 1;
            else if (y[0] == 1 && ones == 1 && zeros + 1 == rest) v = 0;
            return swap ? swap01(v) : v;
          },
          family_name(fam) + "_" + std::to_string(n));
    }
  }
  throw InputError("unknown family");
}

struct RelationPreservation {
  std::string name;
  std::size_t arity = 0;
  bool preserved = true;
  std::vector<Tuple> violation;  // rows of R whose image escapes R
};

struct FamilyReport {
  std::vector<RelationPreservation> relations;
  bool all_preserved = true;
  bool arity_regime = true;  // every relation has arity below the operation's
};

inline FamilyReport check_family_preservation(const Operation& f, const std::vector<Relation>& rels,
                                              const std::vector<std::string>& names = {}) {
  FamilyReport rep;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    RelationPreservation p;
    p.name = i < names.size() ? names[i] : "R" + std::to_string(i + 1);
    p.arity = rels[i].arity();
    if (auto v = find_preservation_violation(f, rels[i])) {
      p.preserved = false;
      p.violation = std::move(*v);
      rep.all_preserved = false;
    }
    if (p.arity >= f.arity()) rep.arity_regime = false;
    rep.relations.push_back(std::move(p));
  }
  return rep;
}

struct ZhukResult {
  bool found = false;
  bool exact = false;  // not found and both searches ran to a fixpoint
  int regime = 0;      // 1 or 2
  std::optional<TermHit> p, r3;
  std::string reason;
};

// Idempotent binary p and ternary r3 matching one of the two table fragments. Each fragment
// plus the diagonal rows is a restricted-row term search, so the answer is exact when the
// closures finish.
inline ZhukResult check_zhuk_condition(const std::vector<Operation>& ops, const Budget& budget = Budget{}) {
  for (const auto& f : ops)
    if (f.domain_size() != 3) throw InputError("the Zhuk condition is stated on {0,1,2}");
  struct Regime {
    std::vector<Tuple> r_rows;
    Tuple r_vals;
    std::vector<Tuple> p_rows;
    Tuple p_vals;
  };
  const Regime regimes[2] = {
      {{{0, 0, 1}, {0, 1, 0}, {0, 1, 1}}, {0, 0, 2}, {{0, 1}, {0, 2}}, {0, 2}},
      {{{1, 0, 1}, {1, 1, 0}, {1, 0, 0}}, {1, 1, 2}, {{0, 1}, {2, 1}}, {1, 2}},
  };
  ZhukResult out;
  bool all_exact = true;
  for (int g = 0; g < 2; ++g) {
    auto rows_r = regimes[g].r_rows;
    auto vals_r = regimes[g].r_vals;
    auto rows_p = regimes[g].p_rows;
    auto vals_p = regimes[g].p_vals;
    for (Element a = 0; a < 3; ++a) {
      rows_r.push_back(Tuple(3, a));
      vals_r.push_back(a);
      rows_p.push_back(Tuple(2, a));
      vals_p.push_back(a);
    }
    TermSearch p = find_term_on_rows(ops, 3, 2, rows_p, vals_p, budget);
    TermSearch r = find_term_on_rows(ops, 3, 3, rows_r, vals_r, budget);
    if (p.hit && r.hit) {
      out.found = true;
      out.exact = true;
      out.regime = g + 1;
      out.p = p.hit;
      out.r3 = r.hit;
      return out;
    }
    // a definitive miss on either side settles this regime
    bool settled = (!p.hit && p.exact) || (!r.hit && r.exact);
    if (!settled) {
      all_exact = false;
      out.reason = !p.reason.empty() ? p.reason : r.reason;
    }
  }
  out.exact = all_exact;
  return out;
}

struct LemmaFunResult {
  std::optional<TermHit> p1, p2;
  bool exact = true;  // any missing witness is a true negative
};

// p1(0,1)=1, p1(1,0)=p1(2,0)=2 and p2(0,1)=0, p2(1,0)=p2(1,2)=2.
inline LemmaFunResult find_lemma_fun_witnesses(const std::vector<Operation>& ops, const Budget& budget = Budget{}) {
  for (const auto& f : ops)
    if (f.domain_size() != 3) throw InputError("these witnesses are stated on {0,1,2}");
  LemmaFunResult out;
  TermSearch a = find_term_on_rows(ops, 3, 2, {{0, 1}, {1, 0}, {2, 0}}, {1, 2, 2}, budget);
  TermSearch b = find_term_on_rows(ops, 3, 2, {{0, 1}, {1, 0}, {1, 2}}, {0, 2, 2}, budget);
  out.p1 = a.hit;
  out.p2 = b.hit;
  out.exact = (a.hit || a.exact) && (b.hit || b.exact);
  return out;
}

}  // namespace qcsp

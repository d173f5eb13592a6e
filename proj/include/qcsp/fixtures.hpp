#pragma once

#include <string>
#include <vector>

#include "qcsp/classification/gap_algebra.hpp"
#include "qcsp/classification/paths.hpp"
#include "qcsp/core/text_format.hpp"
#include "qcsp/reductions/gadgets.hpp"

namespace qcsp::fixtures {

// Irreflexive 4-clique with constants a, b, c for 0, 1, 2.
inline Structure k4() {
  Structure s(4);
  s.add_relation("E", materialize(parse_relation_expr("x1!=x2", 2), 4));
  s.add_constant("a", 0);
  s.add_constant("b", 1);
  s.add_constant("c", 2);
  return s;
}
inline const char* k4_sentence() { return "A x A y E z A w : E(x,z) & E(y,z) & E(w,z)"; }

// ({0,1,2}; r, s) with its two proper subuniverses and all constants.
inline Document chen_gap() {
  Document d{Structure(3), {make_family_op(Family::ChenR), make_family_op(Family::ChenS)}};
  d.structure.add_relation("U02", Relation(3, 1, {{0}, {2}}));
  d.structure.add_relation("U12", Relation(3, 1, {{1}, {2}}));
  d.structure.add_all_constants();
  return d;
}

// x1 != x2 | x1 = 0 on three elements, and not-all-equal on two.
inline Structure intro_ternary() {
  Structure s(3);
  RelationExpr e = parse_relation_expr("x1!=x2 | x1=0", 2);
  s.add_relation("R", materialize(e, 3));
  return s;
}
inline Structure intro_nae() {
  Structure s(2);
  s.add_relation("NAE", materialize(parse_relation_expr("x1!=x2 | x2!=x3", 3), 2));
  return s;
}

inline constexpr Mask kAlpha = 0b011;  // {0,1}
inline constexpr Mask kBeta = 0b110;   // {1,2}

// σ_1, σ_2, τ_1, τ_2 for ({0,1},{1,2}) with all constants.
inline Structure sigma_tau(bool with_constants = true) {
  Structure s(3);
  for (std::size_t k = 1; k <= 2; ++k) s.add_relation("sigma" + std::to_string(k), materialize(sigma_k(kAlpha, kBeta, k), 3));
  for (std::size_t k = 1; k <= 2; ++k) {
    auto e = tau_k(kAlpha, kBeta, k);
    s.add_relation("tau" + std::to_string(k), materialize(e, 3));
  }
  if (with_constants) s.add_all_constants();
  return s;
}

// τ_1, τ_2 only, for the canon-based evaluator.
inline Structure tau_language() {
  Structure s(3);
  for (std::size_t k = 1; k <= 2; ++k) s.add_relation("tau" + std::to_string(k), materialize(tau_k(kAlpha, kBeta, k), 3));
  s.add_all_constants();
  return s;
}

// ({0,1}; x <= y, 0, 1)
inline Structure leq() {
  Structure s(2);
  s.add_relation("le", materialize(parse_relation_expr("x1=0 | x2=1", 2), 2));
  s.add_all_constants();
  return s;
}

inline Structure two_clique() {
  Structure s(2);
  s.add_relation("E", Relation(2, 2, {{0, 1}, {1, 0}}));
  return s;
}

inline std::vector<std::string> names() {
  return {"k4", "chen-gap", "intro", "sigma-tau", "leq", "two-clique", "path:<bits>"};
}

}  // namespace qcsp::fixtures

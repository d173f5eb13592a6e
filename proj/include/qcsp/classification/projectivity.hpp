#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/core/polymorphism.hpp"

namespace qcsp {

// (α,β) must be nonempty strict subsets covering the domain.
inline void validate_alpha_beta(Mask alpha, Mask beta, std::size_t n) {
  Mask full = full_mask(n);
  if ((alpha & ~full) || (beta & ~full)) throw InputError("alpha/beta mention elements outside the domain");
  if (alpha == 0 || beta == 0 || alpha == full || beta == full)
    throw InputError("alpha and beta must be nonempty strict subsets");
  if ((alpha | beta) != full) throw InputError("alpha and beta must cover the domain");
}

// Coordinate i that carries α-membership and β-membership to the output, if any.
inline std::optional<std::size_t> projective_coordinate(const Operation& f, Mask alpha, Mask beta) {
  validate_alpha_beta(alpha, beta, f.domain_size());
  std::size_t n = f.domain_size(), k = f.arity();
  std::vector<char> ok(k, 1);
  std::size_t alive = k;
  for (std::uint64_t code = 0; code < f.table().size() && alive; ++code) {
    Element y = f.table()[code];
    bool in_a = (alpha >> y) & 1, in_b = (beta >> y) & 1;
    if (in_a && in_b) continue;
    std::uint64_t c = code;
    for (std::size_t i = k; i-- > 0;) {
      Element x = static_cast<Element>(c % n);
      c /= n;
      if (!ok[i]) continue;
      if ((((alpha >> x) & 1) && !in_a) || (((beta >> x) & 1) && !in_b)) {
        ok[i] = 0;
        --alive;
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    if (ok[i]) return i;
  return std::nullopt;
}

inline bool is_alpha_beta_projective(const Operation& f, Mask alpha, Mask beta) {
  return projective_coordinate(f, alpha, beta).has_value();
}

// Unordered valid (α,β) pairs, α < β as masks.
inline std::vector<std::pair<Mask, Mask>> alpha_beta_pairs(std::size_t n) {
  std::vector<std::pair<Mask, Mask>> out;
  Mask full = full_mask(n);
  for (Mask a = 1; a < full; ++a)
    for (Mask b = a + 1; b < full; ++b)
      if ((a | b) == full) out.emplace_back(a, b);
  return out;
}

struct PairViolation {
  Mask alpha = 0, beta = 0;
  Operation op;  // an operation that is not αβ-projective
};

struct PGPVerdict {
  bool egp = false;
  std::optional<std::pair<Mask, Mask>> witness;  // EGP: every checked op is αβ-projective here
  std::vector<PairViolation> violations;         // PGP: one per pair
  std::size_t operations_checked = 0;
  std::size_t max_arity = 0;
};

// Algebra mode: basic operations suffice, since αβ-projectivity survives composition.
inline PGPVerdict classify_pgp_egp(const std::vector<Operation>& ops) {
  if (ops.empty()) throw InputError("no operations to classify");
  std::size_t n = ops[0].domain_size();
  PGPVerdict v;
  v.operations_checked = ops.size();
  for (const auto& f : ops) {
    if (f.domain_size() != n) throw InputError("operations over different domains");
    v.max_arity = std::max(v.max_arity, f.arity());
  }
  for (auto [a, b] : alpha_beta_pairs(n)) {
    const Operation* bad = nullptr;
    for (const auto& f : ops)
      if (!is_alpha_beta_projective(f, a, b)) {
        bad = &f;
        break;
      }
    if (!bad) {
      v.egp = true;
      v.witness = std::make_pair(a, b);
      v.violations.clear();
      return v;
    }
    v.violations.push_back({a, b, *bad});
  }
  return v;  // also PGP when n = 1 (no valid pairs)
}

// Structure mode: polymorphisms up to arity max(|R|), enumerated in table order; stops
// once every pair has a violator.
inline PGPVerdict classify_pgp_egp(const Structure& s, const Budget& budget = Budget{}) {
  std::size_t n = s.domain_size();
  std::size_t K = 1;
  for (const auto& nr : s.relations()) K = std::max(K, nr.relation.size());
  auto pairs = alpha_beta_pairs(n);
  std::vector<std::optional<Operation>> bad(pairs.size());
  std::size_t open = pairs.size();
  PGPVerdict v;
  v.max_arity = K;
  for (std::size_t k = 1; k <= K && open; ++k) {
    CspSolver solver = detail::polymorphism_solver(s, k, false, budget);
    std::uint64_t seen = 0;
    solver.for_each_solution(
        [&](const std::vector<Element>& t) {
          if (++seen > budget.enumeration) throw BudgetExceeded("too many polymorphisms of arity " + std::to_string(k));
          Operation f(n, k, t);
          ++v.operations_checked;
          for (std::size_t p = 0; p < pairs.size(); ++p)
            if (!bad[p] && !is_alpha_beta_projective(f, pairs[p].first, pairs[p].second)) {
              bad[p] = f;
              --open;
            }
          return open > 0;
        },
        budget.search_nodes);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (!bad[p]) {
      v.egp = true;
      v.witness = pairs[p];
      v.violations.clear();
      return v;
    }
  for (std::size_t p = 0; p < pairs.size(); ++p) v.violations.push_back({pairs[p].first, pairs[p].second, *bad[p]});
  return v;
}

}  // namespace qcsp

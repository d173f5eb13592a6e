#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "qcsp/core/csp_solver.hpp"
#include "qcsp/core/operation.hpp"

namespace qcsp {

namespace detail {

// Straight enumeration of all |R|^k row choices.
inline std::optional<std::vector<Tuple>> violation_by_enumeration(const Operation& f, const Relation& r) {
  const auto& rows = r.tuples();
  std::size_t k = f.arity();
  if (rows.empty()) return std::nullopt;
  std::vector<std::size_t> pick(k, 0);
  std::vector<const Tuple*> args(k);
  while (true) {
    for (std::size_t j = 0; j < k; ++j) args[j] = &rows[pick[j]];
    Tuple img = f.apply_columns(args);
    if (!r.contains(img)) {
      std::vector<Tuple> w;
      for (auto* a : args) w.push_back(*a);
      return w;
    }
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (++pick[j] < rows.size()) break;
      pick[j] = 0;
      if (j == 0) return std::nullopt;
    }
  }
}

// For every non-member target tuple, search row choices column by column, pruning a
// branch as soon as some coordinate can no longer reach its target value.
inline std::optional<std::vector<Tuple>> violation_by_targets(const Operation& f, const Relation& r) {
  std::size_t n = f.domain_size(), k = f.arity(), ar = r.arity();
  const auto& rows = r.tuples();
  if (rows.empty()) return std::nullopt;
  // reach[j][p]: outputs reachable from an argument prefix p of length j
  std::vector<std::vector<Mask>> reach(k + 1);
  reach[k].resize(f.table().size());
  for (std::size_t c = 0; c < f.table().size(); ++c) reach[k][c] = Mask{1} << f.table()[c];
  for (std::size_t j = k; j-- > 0;) {
    reach[j].assign(reach[j + 1].size() / n, 0);
    for (std::size_t p = 0; p < reach[j].size(); ++p)
      for (std::size_t e = 0; e < n; ++e) reach[j][p] |= reach[j + 1][p * n + e];
  }
  std::vector<std::size_t> chosen(k);
  std::optional<std::vector<Tuple>> found;
  for_each_tuple(n, ar, [&](const Tuple& target) {
    if (r.contains(target)) return true;
    std::vector<std::vector<std::uint64_t>> prefix(k + 1, std::vector<std::uint64_t>(ar, 0));
    auto rec = [&](auto&& self, std::size_t j) -> bool {
      if (j == k) return true;
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        bool ok = true;
        for (std::size_t i = 0; i < ar; ++i) {
          std::uint64_t p = prefix[j][i] * n + rows[ri][i];
          prefix[j + 1][i] = p;
          if (!((reach[j + 1][p] >> target[i]) & 1)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        chosen[j] = ri;
        if (self(self, j + 1)) return true;
      }
      return false;
    };
    if (rec(rec, 0)) {
      std::vector<Tuple> w;
      for (auto ri : chosen) w.push_back(rows[ri]);
      found = w;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace detail

// Rows r_1..r_k of R whose coordinatewise image under f leaves R, if any.
inline std::optional<std::vector<Tuple>> find_preservation_violation(const Operation& f, const Relation& r) {
  if (f.domain_size() != r.domain_size()) throw InputError("operation and relation over different domains");
  std::uint64_t choices = checked_pow(r.size(), f.arity());
  std::uint64_t targets = checked_pow(r.domain_size(), r.arity());
  if (choices <= 2'000'000 || r.domain_size() > 32 || targets > 2'000'000 || f.table().size() > 20'000'000)
    return detail::violation_by_enumeration(f, r);
  return detail::violation_by_targets(f, r);
}

inline bool preserves(const Operation& f, const Relation& r) { return !find_preservation_violation(f, r); }

inline bool preserves_structure(const Operation& f, const Structure& s) {
  for (const auto& c : s.constants()) {
    Tuple d(f.arity(), c.element);
    if (f(d) != c.element) return false;
  }
  for (const auto& nr : s.relations())
    if (!preserves(f, nr.relation)) return false;
  return true;
}

namespace detail {

// Solver whose variables are the table entries of a k-ary operation on S.
inline CspSolver polymorphism_solver(const Structure& s, std::size_t k, bool idempotent_only, const Budget& budget) {
  std::size_t n = s.domain_size();
  std::uint64_t entries = checked_pow(n, k);
  if (entries > budget.table_entries) throw BudgetExceeded("operation table of " + std::to_string(entries) + " entries");
  std::uint64_t total_constraints = 0;
  for (const auto& nr : s.relations()) {
    std::uint64_t c = checked_pow(nr.relation.size(), k);
    if (c == kOverflow || total_constraints + c > 20'000'000)
      throw BudgetExceeded("polymorphism constraints for arity " + std::to_string(k) + " exceed cap");
    total_constraints += c;
  }
  CspSolver solver(entries, n);
  auto diag = [&](Element a) {
    Tuple d(k, a);
    return encode(d, n);
  };
  for (const auto& c : s.constants()) solver.fix(diag(c.element), c.element);
  if (idempotent_only)
    for (Element a = 0; a < n; ++a) solver.fix(diag(a), a);
  for (const auto& nr : s.relations()) {
    const auto& rows = nr.relation.tuples();
    if (rows.empty()) continue;
    std::size_t ar = nr.relation.arity();
    std::vector<std::size_t> pick(k, 0);
    while (true) {
      std::vector<SolverArg> args(ar);
      for (std::size_t i = 0; i < ar; ++i) {
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < k; ++j) c = c * n + rows[pick[j]][i];
        args[i] = SolverArg::var(static_cast<std::uint32_t>(c));
      }
      solver.add_constraint(&nr.relation, std::move(args));
      std::size_t j = k;
      bool done = false;
      while (true) {
        if (j == 0) {
          done = true;
          break;
        }
        --j;
        if (++pick[j] < rows.size()) break;
        pick[j] = 0;
      }
      if (done) break;
    }
  }
  return solver;
}

}  // namespace detail

// All k-ary polymorphisms of S (constants are preserved as singleton relations), sorted by table.
inline std::vector<Operation> polymorphisms(const Structure& s, std::size_t k, bool idempotent_only = false,
                                            const Budget& budget = Budget{}) {
  if (k == 0) throw InputError("arity must be positive");
  std::uint64_t entries = checked_pow(s.domain_size(), k);
  std::uint64_t candidates = checked_pow(s.domain_size(), entries);
  if (entries == kOverflow || candidates > budget.enumeration)
    throw BudgetExceeded("enumerating " + std::to_string(s.domain_size()) + "^" + std::to_string(entries) +
                         " candidate tables exceeds the enumeration cap");
  CspSolver solver = detail::polymorphism_solver(s, k, idempotent_only, budget);
  std::vector<std::vector<Element>> tables;
  solver.for_each_solution(
      [&](const std::vector<Element>& t) {
        tables.push_back(t);
        return true;
      },
      budget.search_nodes);
  std::sort(tables.begin(), tables.end());
  std::vector<Operation> out;
  out.reserve(tables.size());
  for (auto& t : tables) out.emplace_back(s.domain_size(), k, std::move(t));
  return out;
}

// First polymorphism agreeing with the given (input code, value) entries, searched directly.
inline std::optional<Operation> find_polymorphism(const Structure& s, std::size_t k,
                                                  const std::vector<std::pair<std::uint64_t, Element>>& fixed,
                                                  const Budget& budget = Budget{}) {
  CspSolver solver = detail::polymorphism_solver(s, k, false, budget);
  for (const auto& [code, v] : fixed) solver.fix(code, v);
  auto sol = solver.solve(budget.search_nodes);
  if (!sol) return std::nullopt;
  return Operation(s.domain_size(), k, std::move(*sol));
}

// Majority-style near-unanimity polymorphism of arity d, if one exists.
inline std::optional<Operation> find_near_unanimity_polymorphism(const Structure& s, std::size_t d,
                                                                 const Budget& budget = Budget{}) {
  std::size_t n = s.domain_size();
  std::vector<std::pair<std::uint64_t, Element>> fixed;
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b)
      for (std::size_t pos = 0; pos < d; ++pos) {
        Tuple t(d, a);
        t[pos] = b;
        fixed.emplace_back(encode(t, n), a);
      }
  return find_polymorphism(s, d, fixed, budget);
}

}  // namespace qcsp

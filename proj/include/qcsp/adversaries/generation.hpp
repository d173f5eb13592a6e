#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qcsp/adversaries/adversary.hpp"
#include "qcsp/core/closure.hpp"
#include "qcsp/core/polymorphism.hpp"

namespace qcsp {

// Tuples of omega generate A^m under the clone of ops.
inline bool generates(const AdversarySet& omega, const std::vector<Operation>& ops, const Budget& budget = Budget{}) {
  auto seeds = omega.all_tuples();
  if (seeds.empty()) return false;
  auto c = traced_closure(ops, seeds, omega.domain_size, omega.length, std::nullopt, budget);
  return c.elements.size() == checked_pow(omega.domain_size, omega.length);
}

// Some polymorphism f of s with f(X) = t, where X lists the given seeds (arguments in order).
inline std::optional<Operation> polymorphism_mapping(const Structure& s, const std::vector<Tuple>& seeds,
                                                     const Tuple& t, const Budget& budget = Budget{}) {
  std::size_t n = s.domain_size(), k = seeds.size();
  std::vector<std::pair<std::uint64_t, Element>> fixed;
  std::map<std::uint64_t, Element> seen;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < k; ++j) c = c * n + seeds[j][i];
    auto [it, fresh] = seen.emplace(c, t[i]);
    if (!fresh && it->second != t[i]) return std::nullopt;
    if (fresh) fixed.emplace_back(c, t[i]);
  }
  return find_polymorphism(s, k, fixed, budget);
}

// Structure mode: the tuples of omega generate A^m under all polymorphisms of s.
inline bool generates(const AdversarySet& omega, const Structure& s, const Budget& budget = Budget{}) {
  auto seeds = omega.all_tuples();
  if (seeds.empty()) return false;
  if (omega.domain_size != s.domain_size()) throw InputError("adversaries over a different domain");
  bool all = true;
  for_each_tuple(s.domain_size(), omega.length, [&](const Tuple& t) {
    all = polymorphism_mapping(s, seeds, t, budget).has_value();
    return all;
  });
  return all;
}

struct GeneratingSize {
  std::size_t size = 0;
  bool exact = false;         // false: greedy upper bound only
  std::vector<Tuple> witness;  // a generating set of that size
};

namespace detail {

inline bool closure_full(const std::vector<Operation>& ops, const std::vector<Tuple>& seeds, std::size_t n,
                         std::size_t m, const Budget& budget) {
  if (seeds.empty()) return false;
  auto c = traced_closure(ops, seeds, n, m, std::nullopt, budget);
  return c.elements.size() == checked_pow(n, m);
}

// Is t = op(args) for some op and arguments drawn from A^m minus {t}? Searched
// coordinate by coordinate over preimages of t's entries.
inline bool reachable_without(const std::vector<Operation>& ops, const Tuple& t, std::size_t n) {
  std::size_t m = t.size();
  for (const auto& op : ops) {
    std::size_t k = op.arity();
    std::vector<std::vector<std::uint64_t>> pre(n);
    for (std::uint64_t c = 0; c < op.table().size(); ++c) pre[op.at(c)].push_back(c);
    // columns[i] = input code chosen at coordinate i; argument j differs from t somewhere
    std::vector<std::uint64_t> chosen(m);
    auto arg_digit = [&](std::uint64_t code, std::size_t j) {
      for (std::size_t s = j + 1; s < k; ++s) code /= n;
      return static_cast<Element>(code % n);
    };
    auto rec = [&](auto&& self, std::size_t i) -> bool {
      if (i == m) {
        for (std::size_t j = 0; j < k; ++j) {
          bool differs = false;
          for (std::size_t c = 0; c < m && !differs; ++c) differs = arg_digit(chosen[c], j) != t[c];
          if (!differs) return false;
        }
        return true;
      }
      for (auto c : pre[t[i]]) {
        chosen[i] = c;
        if (self(self, i + 1)) return true;
      }
      return false;
    };
    if (rec(rec, 0)) return true;
  }
  return false;
}

}  // namespace detail

// Least size of a generating set of A^m. Exact (increasing-cardinality search) when
// |A|^m <= 81 and the subset budget suffices; otherwise a greedy upper bound.
inline GeneratingSize min_generating_size(const std::vector<Operation>& ops, std::size_t n, std::size_t m,
                                          const Budget& budget = Budget{}) {
  std::uint64_t total = checked_pow(n, m);
  if (total > 1'000'000) throw BudgetExceeded("power too large for generating-set search");
  std::vector<Tuple> all;
  for_each_tuple(n, m, [&](const Tuple& t) {
    all.push_back(t);
    return true;
  });
  // tuples not producible from the rest belong to every generating set
  std::vector<Tuple> forced;
  std::vector<Tuple> rest;
  for (const auto& t : all) (detail::reachable_without(ops, t, n) ? rest : forced).push_back(t);
  auto greedy = [&]() {
    GeneratingSize g;
    std::vector<Tuple> cur = forced;
    while (!detail::closure_full(ops, cur, n, m, budget)) {
      std::size_t best = 0, best_size = 0;
      auto base = cur.empty() ? std::vector<Tuple>{} : term_closure(ops, cur, n, budget);
      for (std::size_t i = 0; i < rest.size(); ++i) {
        if (std::binary_search(base.begin(), base.end(), rest[i])) continue;
        auto trial = cur;
        trial.push_back(rest[i]);
        auto sz = term_closure(ops, trial, n, budget).size();
        if (sz > best_size) {
          best_size = sz;
          best = i;
        }
      }
      cur.push_back(rest[best]);
    }
    g.size = cur.size();
    g.witness = cur;
    return g;
  };
  if (total > 81) return greedy();
  if (rest.empty() || detail::closure_full(ops, forced, n, m, budget))
    return GeneratingSize{forced.size(), true, forced};
  std::uint64_t checks = 0;
  for (std::size_t extra = 1; extra <= rest.size(); ++extra) {
    std::vector<std::size_t> pick(extra);
    for (std::size_t i = 0; i < extra; ++i) pick[i] = i;
    while (true) {
      if (++checks > budget.subset_checks) {
        auto g = greedy();
        g.exact = false;
        return g;
      }
      auto trial = forced;
      for (auto i : pick) trial.push_back(rest[i]);
      if (detail::closure_full(ops, trial, n, m, budget)) {
        std::sort(trial.begin(), trial.end());
        return GeneratingSize{trial.size(), true, trial};
      }
      std::size_t i = extra;
      while (i > 0 && pick[i - 1] == rest.size() - extra + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < extra; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return GeneratingSize{all.size(), true, all};
}

}  // namespace qcsp

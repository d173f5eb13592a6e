#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcsp/core/operation.hpp"

namespace qcsp {

// How an element of a closure was produced: a seed, or ops[op] applied to earlier elements.
struct Origin {
  long op = -1;  // -1 for seeds
  std::size_t seed = 0;
  std::vector<std::size_t> args;
};

struct TracedClosure {
  std::size_t length = 0;
  std::vector<Tuple> elements;  // discovery order
  std::vector<Origin> origin;
  bool complete = false;        // reached a fixpoint (or the full power)
  std::optional<std::size_t> target_index;

  std::optional<std::size_t> find(const Tuple& t) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i] == t) return i;
    return std::nullopt;
  }
};

// Subalgebra generated by seeds, computed semi-naively: each round only applies
// operations to argument lists that use at least one element found in the previous round.
// Stops early once an element satisfying `stop` shows up (its index goes in target_index)
// or the whole power A^m is reached.
inline TracedClosure traced_closure_until(const std::vector<Operation>& ops, const std::vector<Tuple>& seeds,
                                          std::size_t domain_size, std::size_t length,
                                          const std::function<bool(const Tuple&)>& stop,
                                          const Budget& budget = Budget{}, std::uint64_t size_cap = 0) {
  TracedClosure out;
  out.length = length;
  std::size_t n = domain_size;
  for (const auto& op : ops)
    if (op.domain_size() != n) throw InputError("operation over a different domain");
  std::uint64_t full = checked_pow(n, length);
  if (full == kOverflow) throw InputError("power too large to encode");
  if (size_cap == 0) size_cap = std::min<std::uint64_t>(full, budget.closure_size);
  std::unordered_map<std::uint64_t, std::size_t> index;
  auto add = [&](Tuple t, Origin o) -> bool {
    std::uint64_t c = encode(t, n);
    if (index.count(c)) return false;
    if (out.elements.size() >= size_cap)
      throw BudgetExceeded("closure exceeded size cap " + std::to_string(size_cap));
    index.emplace(c, out.elements.size());
    if (stop && !out.target_index && stop(t)) out.target_index = out.elements.size();
    out.elements.push_back(std::move(t));
    out.origin.push_back(std::move(o));
    return true;
  };
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i].size() != length) throw InputError("seed of wrong length");
    for (Element e : seeds[i])
      if (e >= n) throw InputError("seed element outside domain");
    add(seeds[i], Origin{-1, i, {}});
  }
  auto done = [&] { return out.target_index.has_value() || out.elements.size() == full; };
  std::uint64_t work = 0;
  std::size_t old_end = 0, cur_end = out.elements.size();
  while (old_end < cur_end && !done()) {
    for (std::size_t oi = 0; oi < ops.size() && !done(); ++oi) {
      const Operation& op = ops[oi];
      std::size_t k = op.arity();
      std::vector<std::size_t> pick(k);
      for (std::size_t first_new = 0; first_new < k && !done(); ++first_new) {
        // positions before first_new: old; at first_new: new; after: any
        auto lo = [&](std::size_t j) { return j == first_new ? old_end : std::size_t{0}; };
        auto hi = [&](std::size_t j) { return j < first_new ? old_end : cur_end; };
        bool empty = false;
        for (std::size_t j = 0; j < k; ++j) {
          pick[j] = lo(j);
          if (lo(j) >= hi(j)) empty = true;
        }
        if (empty) continue;
        while (!done()) {
          work += length + 1;
          if (work > budget.closure_work)
            throw BudgetExceeded("closure exceeded work cap " + std::to_string(budget.closure_work));
          Tuple img(length);
          for (std::size_t i = 0; i < length; ++i) {
            std::uint64_t c = 0;
            for (std::size_t j = 0; j < k; ++j) c = c * n + out.elements[pick[j]][i];
            img[i] = op.at(c);
          }
          add(std::move(img), Origin{static_cast<long>(oi), 0, pick});
          std::size_t j = k;
          bool wrapped = true;
          while (j > 0) {
            --j;
            if (++pick[j] < hi(j)) {
              wrapped = false;
              break;
            }
            pick[j] = lo(j);
          }
          if (wrapped) break;
        }
      }
    }
    old_end = cur_end;
    cur_end = out.elements.size();
  }
  out.complete = out.elements.size() == full || old_end >= cur_end;
  return out;
}

inline TracedClosure traced_closure(const std::vector<Operation>& ops, const std::vector<Tuple>& seeds,
                                    std::size_t domain_size, std::size_t length,
                                    const std::optional<Tuple>& target = std::nullopt,
                                    const Budget& budget = Budget{}, std::uint64_t size_cap = 0) {
  std::function<bool(const Tuple&)> stop;
  if (target) stop = [&](const Tuple& t) { return t == *target; };
  return traced_closure_until(ops, seeds, domain_size, length, stop, budget, size_cap);
}

// Sorted generated subalgebra.
inline std::vector<Tuple> term_closure(const std::vector<Operation>& ops, const std::vector<Tuple>& seeds,
                                       std::size_t domain_size, const Budget& budget = Budget{},
                                       std::uint64_t cap = 0) {
  if (seeds.empty()) return {};
  auto c = traced_closure(ops, seeds, domain_size, seeds[0].size(), std::nullopt, budget, cap);
  auto v = c.elements;
  std::sort(v.begin(), v.end());
  return v;
}

// Evaluates the term that produced element `idx` with seed i bound to seed_values[i].
inline Element evaluate_traced(const TracedClosure& c, const std::vector<Operation>& ops, std::size_t idx,
                               const std::vector<Element>& seed_values, std::vector<long>& memo) {
  if (memo[idx] >= 0) return static_cast<Element>(memo[idx]);
  const Origin& o = c.origin[idx];
  Element v;
  if (o.op < 0) {
    v = seed_values[o.seed];
  } else {
    const Operation& op = ops[static_cast<std::size_t>(o.op)];
    std::uint64_t code = 0;
    for (auto a : o.args) code = code * op.domain_size() + evaluate_traced(c, ops, a, seed_values, memo);
    v = op.at(code);
  }
  memo[idx] = v;
  return v;
}

// Seeds actually used by the term behind element idx, ascending.
inline std::vector<std::size_t> traced_leaves(const TracedClosure& c, std::size_t idx) {
  std::vector<char> seen(c.elements.size(), 0);
  std::vector<std::size_t> leaves, stack{idx};
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = 1;
    if (c.origin[i].op < 0) leaves.push_back(c.origin[i].seed);
    else
      for (auto a : c.origin[i].args) stack.push_back(a);
  }
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  return leaves;
}

// Term text such as "s(x1,r(x1,x2,x2,x1))"; seeds print as x<seed+1> unless names are given.
inline std::string traced_term_string(const TracedClosure& c, const std::vector<Operation>& ops, std::size_t idx,
                                      const std::vector<std::string>& seed_names = {}) {
  const Origin& o = c.origin[idx];
  if (o.op < 0) return o.seed < seed_names.size() ? seed_names[o.seed] : "x" + std::to_string(o.seed + 1);
  const Operation& op = ops[static_cast<std::size_t>(o.op)];
  std::string s = op.name().empty() ? "f" + std::to_string(o.op) : op.name();
  s += '(';
  for (std::size_t i = 0; i < o.args.size(); ++i) {
    if (i) s += ',';
    s += traced_term_string(c, ops, o.args[i], seed_names);
  }
  return s + ")";
}

// Tabulates the term behind element idx as an operation of arity = number of seeds.
inline Operation traced_operation(const TracedClosure& c, const std::vector<Operation>& ops, std::size_t idx,
                                  std::size_t domain_size, std::size_t num_seeds, const Budget& budget = Budget{}) {
  std::uint64_t entries = checked_pow(domain_size, num_seeds);
  if (entries > budget.table_entries) throw BudgetExceeded("term table too large to tabulate");
  std::vector<long> memo(c.elements.size());
  return Operation::from_function(domain_size, num_seeds, [&](const Tuple& x) {
    std::fill(memo.begin(), memo.end(), -1);
    return evaluate_traced(c, ops, idx, x, memo);
  });
}

}  // namespace qcsp

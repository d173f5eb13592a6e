#pragma once

#include <bit>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "qcsp/core/relation.hpp"

namespace qcsp {

// Argument of a solver constraint: a variable or a fixed element.
struct SolverArg {
  bool is_var = true;
  std::uint32_t value = 0;
  static SolverArg var(std::uint32_t v) { return {true, v}; }
  static SolverArg constant(Element e) { return {false, e}; }
};

// Backtracking search with generalized arc consistency over explicit relations.
// Domains are bitmasks, so the domain size is limited to 64.
class CspSolver {
 public:
  CspSolver(std::size_t num_vars, std::size_t domain_size)
      : n_(domain_size), domains_(num_vars, full_mask(domain_size)), watch_(num_vars), hints_(num_vars) {
    if (domain_size > kMaxMaskDomain) throw InputError("solver supports domains of at most 64 elements");
  }

  std::size_t num_vars() const { return domains_.size(); }

  void restrict(std::size_t var, Mask allowed) {
    domains_[var] &= allowed;
    if (!domains_[var]) infeasible_ = true;
  }
  void fix(std::size_t var, Element e) { restrict(var, Mask{1} << e); }
  void hint(std::size_t var, Element e) { hints_[var] = e; }

  // The relation must outlive the solver.
  void add_constraint(const Relation* rel, std::vector<SolverArg> args) {
    if (args.size() != rel->arity()) throw InputError("constraint arity mismatch");
    bool any_var = false;
    for (const auto& a : args) {
      if (a.is_var) any_var = true;
      else if (a.value >= n_) throw InputError("constant outside domain");
    }
    if (!any_var) {
      Tuple t;
      for (const auto& a : args) t.push_back(a.value);
      if (!rel->contains(t)) infeasible_ = true;
      return;
    }
    std::size_t id = constraints_.size();
    constraints_.push_back({rel, std::move(args)});
    for (const auto& a : constraints_.back().args)
      if (a.is_var) watch_[a.value].push_back(id);
  }

  void add_equality(SolverArg a, SolverArg b) {
    if (!equality_) {
      std::vector<Tuple> diag;
      for (Element e = 0; e < n_; ++e) diag.push_back({e, e});
      equality_ = std::make_unique<Relation>(n_, 2, std::move(diag));
    }
    add_constraint(equality_.get(), {a, b});
  }

  // First solution in search order, or nullopt. Throws BudgetExceeded past node_budget.
  std::optional<std::vector<Element>> solve(std::uint64_t node_budget = 10'000'000) {
    std::optional<std::vector<Element>> found;
    for_each_solution(
        [&](const std::vector<Element>& s) {
          found = s;
          return false;
        },
        node_budget);
    return found;
  }

  // Calls f on every solution until f returns false. Returns false if stopped early.
  template <typename F>
  bool for_each_solution(F&& f, std::uint64_t node_budget = 10'000'000) {
    nodes_ = 0;
    budget_ = node_budget;
    if (infeasible_) return true;
    std::vector<Mask> doms = domains_;
    std::vector<std::size_t> all(constraints_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (!propagate(doms, all)) return true;
    return dfs(doms, f);
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  struct Constraint {
    const Relation* rel;
    std::vector<SolverArg> args;
  };

  bool revise(std::vector<Mask>& doms, const Constraint& c, std::vector<std::size_t>& changed) {
    std::size_t r = c.args.size();
    support_.assign(r, 0);
    for (const auto& t : c.rel->tuples()) {
      bool ok = true;
      for (std::size_t i = 0; i < r && ok; ++i) {
        const auto& a = c.args[i];
        if (a.is_var) ok = (doms[a.value] >> t[i]) & 1;
        else ok = t[i] == a.value;
      }
      if (!ok) continue;
      // repeated variables must take equal values within one tuple
      for (std::size_t i = 0; i < r && ok; ++i)
        for (std::size_t j = i + 1; j < r && ok; ++j)
          if (c.args[i].is_var && c.args[j].is_var && c.args[i].value == c.args[j].value && t[i] != t[j]) ok = false;
      if (!ok) continue;
      for (std::size_t i = 0; i < r; ++i) support_[i] |= Mask{1} << t[i];
    }
    for (std::size_t i = 0; i < r; ++i) {
      const auto& a = c.args[i];
      if (!a.is_var) {
        if (!support_[i]) return false;
        continue;
      }
      Mask nd = doms[a.value] & support_[i];
      if (!nd) return false;
      if (nd != doms[a.value]) {
        doms[a.value] = nd;
        changed.push_back(a.value);
      }
    }
    return true;
  }

  bool propagate(std::vector<Mask>& doms, const std::vector<std::size_t>& initial) {
    std::deque<std::size_t> queue(initial.begin(), initial.end());
    std::vector<char> queued(constraints_.size(), 0);
    for (auto c : initial) queued[c] = 1;
    std::vector<std::size_t> changed;
    while (!queue.empty()) {
      std::size_t c = queue.front();
      queue.pop_front();
      queued[c] = 0;
      changed.clear();
      if (!revise(doms, constraints_[c], changed)) return false;
      for (auto v : changed)
        for (auto d : watch_[v])
          if (!queued[d]) {
            queued[d] = 1;
            queue.push_back(d);
          }
    }
    return true;
  }

  template <typename F>
  bool dfs(std::vector<Mask>& doms, F& f) {
    if (++nodes_ > budget_) throw BudgetExceeded("CSP search exceeded " + std::to_string(budget_) + " nodes");
    std::size_t best = doms.size();
    int best_count = 65;
    for (std::size_t v = 0; v < doms.size(); ++v) {
      int c = std::popcount(doms[v]);
      if (c > 1 && c < best_count) {
        best = v;
        best_count = c;
      }
    }
    if (best == doms.size()) {
      std::vector<Element> sol(doms.size());
      for (std::size_t v = 0; v < doms.size(); ++v) sol[v] = static_cast<Element>(std::countr_zero(doms[v]));
      return f(static_cast<const std::vector<Element>&>(sol));
    }
    std::vector<Element> order;
    Mask d = doms[best];
    if (hints_[best] && ((d >> *hints_[best]) & 1)) order.push_back(*hints_[best]);
    for (Element e : elements_of(d))
      if (!(hints_[best] && *hints_[best] == e)) order.push_back(e);
    for (Element e : order) {
      std::vector<Mask> next = doms;
      next[best] = Mask{1} << e;
      if (!propagate(next, watch_[best])) continue;
      if (!dfs(next, f)) return false;
    }
    return true;
  }

  std::size_t n_;
  std::vector<Mask> domains_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::size_t>> watch_;
  std::vector<std::optional<Element>> hints_;
  std::unique_ptr<Relation> equality_;
  std::vector<Mask> support_;
  bool infeasible_ = false;
  std::uint64_t nodes_ = 0;
  std::uint64_t budget_ = 0;
};

}  // namespace qcsp

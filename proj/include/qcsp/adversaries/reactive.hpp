#pragma once

#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "qcsp/adversaries/adversary.hpp"
#include "qcsp/core/closure.hpp"

namespace qcsp {

// f together with decoding maps g^j_i. Argument j of f plays against
// omega.members[member[j]]; g[j][i] maps the history (a_1..a_{i+1}), or just
// (a_{i+1}) when last_coordinate_only, to the move fed to that argument.
struct ReactiveWitness {
  Operation f;
  std::vector<std::size_t> member;
  bool last_coordinate_only = true;
  std::vector<std::vector<std::map<Tuple, Element>>> g;
};

struct ReactiveCheck {
  bool ok = false;
  std::string locus;  // where the first failure happened
};

inline ReactiveCheck verify_reactive(const Adversary& target, const AdversarySet& omega, const ReactiveWitness& w) {
  std::size_t k = w.f.arity(), m = target.length();
  if (w.member.size() != k || w.g.size() != k) return {false, "witness arity does not match f"};
  for (std::size_t j = 0; j < k; ++j) {
    if (w.member[j] >= omega.members.size()) return {false, "argument " + std::to_string(j + 1) + " names no adversary"};
    if (w.g[j].size() != m) return {false, "g maps of argument " + std::to_string(j + 1) + " have wrong length"};
  }
  if (omega.length != m) return {false, "adversary length differs from target"};
  std::vector<Tuple> moves(k, Tuple(m));
  for (const auto& a : target.tuples()) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        Tuple key = w.last_coordinate_only ? Tuple{a[i]} : Tuple(a.begin(), a.begin() + static_cast<long>(i) + 1);
        auto it = w.g[j][i].find(key);
        if (it == w.g[j][i].end())
          return {false, "g^" + std::to_string(j + 1) + "_" + std::to_string(i + 1) + " undefined at " + tuple_to_string(key)};
        moves[j][i] = it->second;
      }
      if (!omega.members[w.member[j]].contains(moves[j]))
        return {false, "play " + tuple_to_string(moves[j]) + " for target " + tuple_to_string(a) + " leaves adversary " +
                           std::to_string(w.member[j] + 1)};
    }
    for (std::size_t i = 0; i < m; ++i) {
      Tuple col(k);
      for (std::size_t j = 0; j < k; ++j) col[j] = moves[j][i];
      if (w.f(col) != a[i])
        return {false, "f does not return a_" + std::to_string(i + 1) + " for target " + tuple_to_string(a)};
    }
  }
  return {true, ""};
}

struct ReactiveSearch {
  std::optional<ReactiveWitness> witness;
  bool definitive = false;  // absence is a proof, not a cap
  std::string reason;
  std::size_t candidate_arguments = 0;
};

// Searches for a witness whose f is a term operation of ops. Every consistent decoding
// map is an argument candidate; a suitable f exists iff the vector of target values on
// the decoding rows lies in the subalgebra generated by the candidates' rows.
inline ReactiveSearch find_reactive(const Adversary& target, const AdversarySet& omega, const std::vector<Operation>& ops,
                                    std::size_t arity_cap, bool last_coordinate_only = true,
                                    const Budget& budget = Budget{}) {
  ReactiveSearch out;
  std::size_t m = target.length(), n = target.domain_size();
  if (omega.length != m) throw InputError("adversary length differs from target");
  // rows of the decoding: (position, history key)
  std::vector<std::pair<std::size_t, Tuple>> keys;
  {
    std::set<std::pair<std::size_t, Tuple>> ks;
    for (const auto& a : target.tuples())
      for (std::size_t i = 0; i < m; ++i)
        ks.insert({i, last_coordinate_only ? Tuple{a[i]} : Tuple(a.begin(), a.begin() + static_cast<long>(i) + 1)});
    keys.assign(ks.begin(), ks.end());
  }
  std::map<std::pair<std::size_t, Tuple>, std::size_t> key_index;
  for (std::size_t r = 0; r < keys.size(); ++r) key_index[keys[r]] = r;
  // for each target tuple, its row index at every position
  std::vector<std::vector<std::size_t>> rows_of;
  for (const auto& a : target.tuples()) {
    std::vector<std::size_t> r(m);
    for (std::size_t i = 0; i < m; ++i)
      r[i] = key_index[{i, last_coordinate_only ? Tuple{a[i]} : Tuple(a.begin(), a.begin() + static_cast<long>(i) + 1)}];
    rows_of.push_back(std::move(r));
  }
  std::size_t D = keys.size();
  std::vector<Tuple> seeds;
  std::vector<std::size_t> seed_member;
  std::set<Tuple> seen;
  std::uint64_t enumerated = 0;
  for (std::size_t o = 0; o < omega.members.size(); ++o) {
    const Adversary& adv = omega.members[o];
    Tuple mu(D, 0);
    // rows are sorted by position, so level i ends where position i ends
    std::vector<std::size_t> level_end(m, 0);
    for (std::size_t r = 0; r < D; ++r) level_end[keys[r].first] = r + 1;
    auto consistent_through = [&](std::size_t pos) {
      // prefix of every decoded target tuple must extend into adv
      std::set<Tuple> prefixes;
      for (const auto& rr : rows_of) {
        Tuple p(pos + 1);
        for (std::size_t i = 0; i <= pos; ++i) p[i] = mu[rr[i]];
        prefixes.insert(std::move(p));
      }
      for (const auto& p : prefixes) {
        bool ok = false;
        auto it = std::lower_bound(adv.tuples().begin(), adv.tuples().end(), p);
        if (it != adv.tuples().end() && std::equal(p.begin(), p.end(), it->begin())) ok = true;
        if (!ok) return false;
      }
      return true;
    };
    auto rec = [&](auto&& self, std::size_t r) -> void {
      if (++enumerated > budget.search_nodes) throw BudgetExceeded("decoding-map enumeration exceeded cap");
      if (r == D) {
        if (seen.insert(mu).second) {
          seeds.push_back(mu);
          seed_member.push_back(o);
        }
        return;
      }
      for (Element e = 0; e < n; ++e) {
        mu[r] = e;
        std::size_t pos = keys[r].first;
        if (r + 1 == level_end[pos] && !consistent_through(pos)) continue;
        self(self, r + 1);
      }
    };
    rec(rec, 0);
  }
  out.candidate_arguments = seeds.size();
  if (seeds.empty()) {
    out.definitive = true;
    out.reason = "no decoding map is consistent with any adversary";
    return out;
  }
  Tuple goal(D);
  for (std::size_t r = 0; r < D; ++r) goal[r] = keys[r].second.back();
  TracedClosure c;
  try {
    c = traced_closure(ops, seeds, n, D, goal, budget);
  } catch (const BudgetExceeded& e) {
    out.reason = e.what();
    return out;
  }
  if (!c.target_index) {
    out.definitive = c.complete;
    out.reason = c.complete ? "target values are not generated by any term" : "closure stopped before a fixpoint";
    return out;
  }
  auto leaves = traced_leaves(c, *c.target_index);
  if (leaves.size() > arity_cap) {
    out.reason = "witness term uses " + std::to_string(leaves.size()) + " arguments, above the arity cap";
    return out;
  }
  if (checked_pow(n, leaves.size()) > budget.table_entries) {
    out.reason = "witness table too large";
    return out;
  }
  std::vector<long> memo(c.elements.size());
  std::vector<Element> seed_values(seeds.size(), 0);
  Operation f = Operation::from_function(n, leaves.size(), [&](const Tuple& x) {
    for (std::size_t j = 0; j < leaves.size(); ++j) seed_values[leaves[j]] = x[j];
    std::fill(memo.begin(), memo.end(), -1);
    return evaluate_traced(c, ops, *c.target_index, seed_values, memo);
  });
  ReactiveWitness w;
  w.f = std::move(f);
  w.last_coordinate_only = last_coordinate_only;
  for (auto leaf : leaves) {
    w.member.push_back(seed_member[leaf]);
    std::vector<std::map<Tuple, Element>> g(m);
    for (std::size_t r = 0; r < D; ++r) g[keys[r].first][keys[r].second] = seeds[leaf][r];
    w.g.push_back(std::move(g));
  }
  out.witness = std::move(w);
  out.definitive = true;
  return out;
}

}  // namespace qcsp

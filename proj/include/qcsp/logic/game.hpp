#pragma once

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qcsp/adversaries/adversary.hpp"
#include "qcsp/core/csp_solver.hpp"
#include "qcsp/logic/sentence.hpp"

namespace qcsp {

// Per-variable table: key is the tuple of values the variable may depend on.
using StrategyTables = std::vector<std::map<Tuple, Element>>;

struct GameVerdict {
  bool holds = false;
  // holds: one Skolem strategy per adversary played, indexed by variable, keyed by
  // the values of the universals preceding that variable.
  std::vector<StrategyTables> skolem;
  // !holds: the universal player's winning counter-strategy against `failing_adversary`,
  // indexed by variable, keyed by the values of the preceding existentials.
  StrategyTables counter;
  std::optional<std::size_t> failing_adversary;
  std::uint64_t nodes = 0;
};

// Preferred value for an existential variable given the assignment so far
// (entries for unassigned variables are meaningless).
using HintFn = std::function<std::optional<Element>(std::size_t var, std::span<const Element> assignment)>;

struct EvalOptions {
  Budget budget{};
  HintFn hint{};
};

namespace detail {

// Which universal moves extend to a tuple of the adversary, by prefix.
class PrefixFilter {
 public:
  PrefixFilter(const Adversary& b) : n_(b.domain_size()), next_(b.length()) {
    for (const auto& t : b.tuples()) {
      std::uint64_t code = 0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        next_[j][code] |= Mask{1} << t[j];
        code = code * n_ + t[j];
      }
    }
  }
  Mask allowed(std::size_t j, std::span<const Element> prefix) const {
    auto it = next_[j].find(encode(prefix, n_));
    return it == next_[j].end() ? 0 : it->second;
  }

 private:
  std::size_t n_;
  std::vector<std::unordered_map<std::uint64_t, Mask>> next_;
};

class GameSearch {
 public:
  GameSearch(const Structure& s, const PHSentence& phi, const Adversary* adversary, const EvalOptions& opt,
             std::uint64_t& nodes)
      : s_(s), phi_(phi), opt_(opt), nodes_(nodes), assign_(phi.num_vars(), 0) {
    if (adversary) filter_.emplace(*adversary);
    std::size_t V = phi.num_vars();
    suffix_start_ = V;
    while (suffix_start_ > 0 && phi.quantifiers[suffix_start_ - 1] == Quantifier::Exists) --suffix_start_;
    atoms_at_.resize(V);
    for (std::size_t a = 0; a < phi.matrix.size(); ++a) {
      long mx = -1;
      for (const auto& t : phi.matrix[a].args)
        if (t.is_var) mx = std::max(mx, static_cast<long>(t.value));
      if (mx < 0) ground_.push_back(a);
      else if (static_cast<std::size_t>(mx) < suffix_start_) atoms_at_[static_cast<std::size_t>(mx)].push_back(a);
      else suffix_atoms_.push_back(a);
    }
    universal_index_.assign(V, 0);
    std::size_t u = 0;
    for (std::size_t v = 0; v < V; ++v)
      if (phi.quantifiers[v] == Quantifier::Forall) universal_index_[v] = u++;
  }

  bool run() {
    for (auto a : ground_)
      if (!atom_holds(a)) return false;
    return search(0);
  }

  StrategyTables skolem_tables() const { return tables(true_log_); }
  StrategyTables counter_tables() const { return tables(false_log_); }

 private:
  struct Entry {
    std::size_t var;
    Tuple key;
    Element value;
  };

  StrategyTables tables(const std::vector<Entry>& log) const {
    StrategyTables t(phi_.num_vars());
    for (const auto& e : log) t[e.var][e.key] = e.value;
    return t;
  }

  bool atom_holds(std::size_t a) {
    const Atom& at = phi_.matrix[a];
    buf_.clear();
    for (const auto& t : at.args) buf_.push_back(t.is_var ? assign_[t.value] : t.value);
    if (at.is_equality()) return buf_[0] == buf_[1];
    return s_.relations()[at.relation].relation.contains(buf_);
  }

  Tuple key_of(std::size_t v, Quantifier q) const {
    Tuple k;
    for (std::size_t w = 0; w < v; ++w)
      if (phi_.quantifiers[w] == q) k.push_back(assign_[w]);
    return k;
  }

  void tick() {
    if (++nodes_ > opt_.budget.search_nodes)
      throw BudgetExceeded("game search exceeded " + std::to_string(opt_.budget.search_nodes) + " nodes");
  }

  bool solve_suffix() {
    std::size_t V = phi_.num_vars(), p = suffix_start_;
    if (p == V) return true;
    CspSolver solver(V - p, s_.domain_size());
    auto arg = [&](const Term& t) {
      if (!t.is_var) return SolverArg::constant(t.value);
      if (t.value < p) return SolverArg::constant(assign_[t.value]);
      return SolverArg::var(static_cast<std::uint32_t>(t.value - p));
    };
    for (auto a : suffix_atoms_) {
      const Atom& at = phi_.matrix[a];
      if (at.is_equality()) {
        solver.add_equality(arg(at.args[0]), arg(at.args[1]));
      } else {
        std::vector<SolverArg> args;
        for (const auto& t : at.args) args.push_back(arg(t));
        solver.add_constraint(&s_.relations()[at.relation].relation, std::move(args));
      }
    }
    if (opt_.hint)
      for (std::size_t v = p; v < V; ++v)
        if (auto h = opt_.hint(v, assign_); h && *h < s_.domain_size()) solver.hint(v - p, *h);
    std::uint64_t left = opt_.budget.search_nodes > nodes_ ? opt_.budget.search_nodes - nodes_ : 0;
    auto sol = solver.solve(left);
    nodes_ += solver.nodes();
    if (!sol) return false;
    Tuple key = key_of(V, Quantifier::Forall);
    for (std::size_t v = p; v < V; ++v) {
      assign_[v] = (*sol)[v - p];
      true_log_.push_back({v, key, assign_[v]});
    }
    return true;
  }

  bool search(std::size_t v) {
    tick();
    if (v == suffix_start_) return solve_suffix();
    std::size_t ts = true_log_.size(), fs = false_log_.size();
    std::size_t n = s_.domain_size();
    if (phi_.quantifiers[v] == Quantifier::Exists) {
      std::vector<Element> order;
      std::optional<Element> h;
      if (opt_.hint) h = opt_.hint(v, assign_);
      if (h && *h < n) order.push_back(*h);
      for (Element e = 0; e < n; ++e)
        if (!(h && *h == e)) order.push_back(e);
      for (Element e : order) {
        assign_[v] = e;
        if (!atoms_ok(v)) continue;
        if (search(v + 1)) {
          false_log_.resize(fs);
          true_log_.push_back({v, key_of(v, Quantifier::Forall), e});
          return true;
        }
      }
      true_log_.resize(ts);
      return false;
    }
    Mask allowed = full_mask(n);
    if (filter_) {
      Tuple prefix = key_of(v, Quantifier::Forall);
      allowed = filter_->allowed(universal_index_[v], prefix);
    }
    for (Element u : elements_of(allowed)) {
      assign_[v] = u;
      if (!atoms_ok(v) || !search(v + 1)) {
        true_log_.resize(ts);
        false_log_.push_back({v, key_of(v, Quantifier::Exists), u});
        return false;
      }
    }
    false_log_.resize(fs);
    return true;
  }

  bool atoms_ok(std::size_t v) {
    for (auto a : atoms_at_[v])
      if (!atom_holds(a)) return false;
    return true;
  }

  const Structure& s_;
  const PHSentence& phi_;
  const EvalOptions& opt_;
  std::uint64_t& nodes_;
  std::optional<PrefixFilter> filter_;
  std::vector<Element> assign_;
  std::size_t suffix_start_ = 0;
  std::vector<std::vector<std::size_t>> atoms_at_;
  std::vector<std::size_t> ground_, suffix_atoms_;
  std::vector<std::size_t> universal_index_;
  std::vector<Entry> true_log_, false_log_;
  Tuple buf_;
};

inline GameVerdict play(const Structure& s, const PHSentence& phi, const Adversary* b, const EvalOptions& opt) {
  validate_sentence(phi, s);
  GameVerdict v;
  GameSearch g(s, phi, b, opt, v.nodes);
  v.holds = g.run();
  if (v.holds) v.skolem.push_back(g.skolem_tables());
  else v.counter = g.counter_tables();
  return v;
}

}  // namespace detail

inline GameVerdict eval_qcsp(const Structure& s, const PHSentence& phi, const EvalOptions& opt = {}) {
  return detail::play(s, phi, nullptr, opt);
}

inline GameVerdict eval_csp(const Structure& s, const PHSentence& phi, const EvalOptions& opt = {}) {
  if (!phi.is_existential()) throw InputError("eval_csp needs a purely existential sentence");
  return detail::play(s, phi, nullptr, opt);
}

// Holds iff the existential player wins against every adversary of omega.
inline GameVerdict eval_qcsp_restricted(const Structure& s, const PHSentence& phi, const AdversarySet& omega,
                                        const EvalOptions& opt = {}) {
  validate_sentence(phi, s);
  if (!omega.members.empty()) {
    if (omega.length != phi.num_universals())
      throw InputError("adversary length " + std::to_string(omega.length) + " differs from the " +
                       std::to_string(phi.num_universals()) + " universal variables");
    if (omega.domain_size != s.domain_size()) throw InputError("adversaries over a different domain");
  }
  GameVerdict out;
  out.holds = true;
  for (std::size_t b = 0; b < omega.members.size(); ++b) {
    GameVerdict v = detail::play(s, phi, &omega.members[b], opt);
    out.nodes += v.nodes;
    if (!v.holds) {
      out.holds = false;
      out.skolem.clear();
      out.counter = std::move(v.counter);
      out.failing_adversary = b;
      return out;
    }
    out.skolem.push_back(std::move(v.skolem[0]));
  }
  return out;
}

// Replays a Skolem strategy against every universal play allowed by b (all plays if b is null).
inline bool verify_skolem(const Structure& s, const PHSentence& phi, const Adversary* b, const StrategyTables& t) {
  std::optional<detail::PrefixFilter> filter;
  if (b) filter.emplace(*b);
  std::vector<Element> assign(phi.num_vars());
  Tuple universals;
  auto rec = [&](auto&& self, std::size_t v) -> bool {
    if (v == phi.num_vars()) return matrix_holds(phi, s, assign);
    if (phi.quantifiers[v] == Quantifier::Exists) {
      if (v >= t.size()) return false;
      auto it = t[v].find(universals);
      if (it == t[v].end()) return false;
      assign[v] = it->second;
      return self(self, v + 1);
    }
    Mask allowed = filter ? filter->allowed(universals.size(), universals) : full_mask(s.domain_size());
    for (Element u : elements_of(allowed)) {
      assign[v] = u;
      universals.push_back(u);
      bool ok = self(self, v + 1);
      universals.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return rec(rec, 0);
}

// Checks that the counter-strategy beats every existential response.
inline bool verify_counter(const Structure& s, const PHSentence& phi, const Adversary* b, const StrategyTables& t) {
  std::optional<detail::PrefixFilter> filter;
  if (b) filter.emplace(*b);
  std::vector<Element> assign(phi.num_vars());
  Tuple universals, existentials;
  auto rec = [&](auto&& self, std::size_t v) -> bool {
    if (v == phi.num_vars()) return !matrix_holds(phi, s, assign);
    if (phi.quantifiers[v] == Quantifier::Forall) {
      if (v >= t.size()) return false;
      auto it = t[v].find(existentials);
      if (it == t[v].end()) {
        // the universal may already have won on an earlier atom; any allowed move will do
        Mask allowed = filter ? filter->allowed(universals.size(), universals) : full_mask(s.domain_size());
        if (!allowed) return false;
        assign[v] = elements_of(allowed)[0];
      } else {
        assign[v] = it->second;
        if (filter && !((filter->allowed(universals.size(), universals) >> assign[v]) & 1)) return false;
      }
      universals.push_back(assign[v]);
      bool ok = self(self, v + 1);
      universals.pop_back();
      return ok;
    }
    for (Element e = 0; e < s.domain_size(); ++e) {
      assign[v] = e;
      existentials.push_back(e);
      bool ok = self(self, v + 1);
      existentials.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return rec(rec, 0);
}

}  // namespace qcsp

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcsp/adversaries/adversary.hpp"
#include "qcsp/core/csp_solver.hpp"
#include "qcsp/logic/sentence.hpp"

namespace qcsp {

// Existential pH-instance over a target structure: variables and atoms whose terms are
// variables (indices below num_vars) or constants.
struct CSPInstance {
  std::size_t num_vars = 0;
  std::vector<std::string> names;
  std::vector<Atom> atoms;
  std::vector<std::size_t> pool;  // adversary each variable was created for

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& a : atoms) s += a.args.size();
    return s;
  }
  PHSentence as_sentence() const {
    PHSentence phi;
    for (const auto& n : names) phi.add_var(Quantifier::Exists, n);
    phi.matrix = atoms;
    return phi;
  }
};

// One copy of the matrix per adversary B and tuple t of B, universals replaced by the
// constants naming t. The copy of existential x is keyed by (B, x, t restricted to the
// universals before x), so copies agreeing on that prefix are the same CSP variable.
inline std::vector<CSPInstance> qcsp_to_csp(const Structure& s, const PHSentence& phi, const AdversarySet& omega,
                                            bool split = false) {
  validate_sentence(phi, s, true);
  std::size_t m = phi.num_universals();
  std::size_t N = s.domain_size();
  if (omega.length != m && !omega.members.empty())
    throw InputError("adversary length " + std::to_string(omega.length) + " differs from " + std::to_string(m) +
                     " universals");
  std::vector<char> named(N, 0);
  for (const auto& c : s.constants()) named[c.element] = 1;
  for (const auto& b : omega.members)
    for (const auto& t : b.tuples())
      for (Element e : t)
        if (!named[e]) throw InputError("element " + std::to_string(e) + " occurs in the adversaries but has no constant");
  // position of each universal in the prefix order, and universals preceding each variable
  std::vector<std::size_t> uindex(phi.num_vars(), 0), before(phi.num_vars(), 0);
  for (std::size_t v = 0, u = 0; v < phi.num_vars(); ++v) {
    before[v] = u;
    if (phi.quantifiers[v] == Quantifier::Forall) uindex[v] = u++;
  }
  // no adversaries: the empty conjunction
  std::vector<CSPInstance> out(1);
  const auto& members = omega.members;
  for (std::size_t bi = 0; bi < members.size(); ++bi) {
    if (split && bi > 0) out.emplace_back();
    CSPInstance& inst = out.back();
    std::map<std::pair<std::size_t, Tuple>, std::uint32_t> var_of;
    std::set<Atom, bool (*)(const Atom&, const Atom&)> seen([](const Atom& a, const Atom& b) {
      if (a.relation != b.relation) return a.relation < b.relation;
      return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end(),
                                          [](const Term& x, const Term& y) {
                                            return std::pair(x.is_var, x.value) < std::pair(y.is_var, y.value);
                                          });
    });
    for (const auto& atom : inst.atoms) seen.insert(atom);
    for (const auto& t : members[bi].tuples()) {
      auto term = [&](const Term& x) -> Term {
        if (!x.is_var) return x;
        if (phi.quantifiers[x.value] == Quantifier::Forall) return Term::constant(t[uindex[x.value]]);
        Tuple prefix(t.begin(), t.begin() + static_cast<long>(before[x.value]));
        auto [it, fresh] = var_of.emplace(std::make_pair(std::size_t{x.value}, prefix), 0);
        if (fresh) {
          it->second = static_cast<std::uint32_t>(inst.num_vars++);
          std::string name = phi.names[x.value];
          if (members.size() > 1) name += "_B" + std::to_string(bi + 1);
          if (!prefix.empty()) name += "_" + tuple_key(prefix);
          for (auto& ch : name)
            if (ch == ',') ch = '.';
          inst.names.push_back(name);
          inst.pool.push_back(bi);
        }
        return Term::var(it->second);
      };
      for (const auto& a : phi.matrix) {
        Atom c{a.relation, {}};
        for (const auto& x : a.args) c.args.push_back(term(x));
        if (seen.insert(c).second) inst.atoms.push_back(std::move(c));
      }
    }
  }
  return out;
}

// Satisfying assignment of a CSP instance, if any.
inline std::optional<std::vector<Element>> solve_csp(const Structure& s, const CSPInstance& inst,
                                                     const Budget& budget = Budget{}) {
  CspSolver solver(inst.num_vars, s.domain_size());
  auto arg = [](const Term& t) { return t.is_var ? SolverArg::var(t.value) : SolverArg::constant(t.value); };
  for (const auto& a : inst.atoms) {
    if (a.is_equality()) {
      const Term &x = a.args[0], &y = a.args[1];
      if (!x.is_var && !y.is_var) {
        if (x.value != y.value) return std::nullopt;
        continue;
      }
      solver.add_equality(arg(x), arg(y));
    } else {
      solver.add_constraint(&s.relations()[a.relation].relation, [&] {
        std::vector<SolverArg> v;
        for (const auto& t : a.args) v.push_back(arg(t));
        return v;
      }());
    }
  }
  return solver.solve(budget.search_nodes);
}

inline bool csp_satisfiable(const Structure& s, const std::vector<CSPInstance>& insts, const Budget& budget = Budget{}) {
  for (const auto& i : insts)
    if (!solve_csp(s, i, budget)) return false;
  return true;
}

}  // namespace qcsp

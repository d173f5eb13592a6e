#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcsp/adversaries/families.hpp"
#include "qcsp/canonical/canonical.hpp"
#include "qcsp/classification/essential.hpp"
#include "qcsp/classification/gap_algebra.hpp"
#include "qcsp/classification/hubie.hpp"
#include "qcsp/classification/paths.hpp"
#include "qcsp/classification/projectivity.hpp"
#include "qcsp/classification/shop.hpp"
#include "qcsp/fixtures.hpp"
#include "qcsp/logic/game.hpp"
#include "qcsp/reductions/conp.hpp"
#include "qcsp/reductions/gadgets.hpp"
#include "qcsp/reductions/qcsp_to_csp.hpp"

namespace qcsp::cli {

using json = nlohmann::ordered_json;

enum Exit : int { kYes = 0, kNo = 1, kInconclusive = 2, kInputError = 3 };

// FNV-1a over everything the command read.
class Digest {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    h_ ^= 0xff;
    h_ *= 0x100000001b3ULL;
  }
  std::string hex() const {
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h_;
    return o.str();
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline json budget_json(const Budget& b) {
  return json{{"enum", b.enumeration}, {"nodes", b.search_nodes}, {"atoms", b.product_atoms},
              {"work", b.closure_work}, {"size", b.closure_size}, {"subsets", b.subset_checks},
              {"table", b.table_entries}};
}

inline std::string mask_string(Mask m) {
  std::string s = "{";
  bool first = true;
  for (Element e : elements_of(m)) {
    if (!first) s += ",";
    s += std::to_string(e);
    first = false;
  }
  return s + "}";
}

inline json tables_json(const StrategyTables& t, const PHSentence& phi) {
  json j = json::object();
  for (std::size_t v = 0; v < t.size() && v < phi.num_vars(); ++v) {
    if (t[v].empty()) continue;
    json m = json::object();
    for (const auto& [k, val] : t[v]) m[tuple_key(k)] = val;
    j[phi.names[v]] = std::move(m);
  }
  return j;
}

inline json verdict_json(const GameVerdict& v, const PHSentence& phi) {
  json j{{"holds", v.holds}};
  if (v.holds) {
    json sk = json::array();
    for (const auto& t : v.skolem) sk.push_back(tables_json(t, phi));
    j["witness"] = json{{"skolem", sk}};
  } else {
    json w{{"counter", tables_json(v.counter, phi)}};
    if (v.failing_adversary) w["failing_adversary"] = *v.failing_adversary;
    j["witness"] = w;
  }
  j["nodes"] = v.nodes;
  return j;
}

inline json operation_json(const Operation& f) {
  return json{{"name", f.name()}, {"arity", f.arity()}, {"table", operation_table_string(f)}};
}

// Everything one invocation needs: parsed options, the report being built, the digest.
struct Context {
  Budget budget;
  bool as_json = false;
  bool timings = false;
  std::uint64_t seed = 1;
  Digest digest;
  json report = json::object();
  std::ostringstream text;

  std::string load(const std::string& path) {
    std::string s = read_file(path);
    digest.add(s);
    return s;
  }
  Document document(const std::string& path) { return parse_document(load(path)); }
  PHSentence sentence(const std::string& path, const std::string& inline_text, const Structure& s) {
    std::string t;
    if (!inline_text.empty()) {
      t = inline_text;
      digest.add(t);
    } else if (!path.empty()) {
      t = load(path);
    } else {
      throw InputError("give --sentence FILE or --phi TEXT");
    }
    std::string clean;
    std::istringstream in(t);
    for (std::string line; std::getline(in, line);) {
      auto h = line.find('#');
      if (h != std::string::npos) line.resize(h);
      clean += line + " ";
    }
    return parse_sentence(clean, s, true);
  }
  void line(const std::string& key, const std::string& value) { text << key << ": " << value << "\n"; }
};

inline Element parse_element(const std::string& s, const Structure& st) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    auto v = std::stoull(s);
    if (v >= st.domain_size()) throw InputError("element " + s + " outside domain");
    return static_cast<Element>(v);
  }
  if (auto c = st.find_constant(s)) return *c;
  throw InputError("unknown element '" + s + "'");
}

inline Mask parse_mask(const std::string& s, std::size_t n) {
  auto v = detail::parse_element_list(s, n);
  return mask_of(v);
}

inline AdversarySet parse_adversaries(const std::vector<std::string>& lits, std::size_t n) {
  AdversarySet out;
  out.domain_size = n;
  bool first = true;
  for (const auto& l : lits) {
    AdversarySet a = parse_adversary_literal(l, n);
    if (first) {
      out.length = a.length;
      first = false;
    }
    for (auto& b : a.members) out.add(std::move(b));
  }
  return out;
}

// --clauses "1,2,3;2,3,4" with 1-based variables.
inline NAEInstance parse_nae(std::size_t vars, const std::string& clauses) {
  NAEInstance I;
  I.num_vars = vars;
  std::string s = clauses;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto end = s.find(';', pos);
    if (end == std::string::npos) end = s.size();
    auto v = detail::parse_element_list(s.substr(pos, end - pos), ~std::size_t{0} >> 1);
    if (!v.empty()) {
      if (v.size() != 3) throw InputError("NAE clauses have three variables");
      std::array<std::size_t, 3> c{};
      for (int i = 0; i < 3; ++i) {
        if (v[i] == 0) throw InputError("clause variables are 1-based");
        c[i] = v[i] - 1;
      }
      I.clauses.push_back(c);
    }
    pos = end + 1;
  }
  I.validate();
  return I;
}

struct Options {
  std::string structure, sentence, phi, ops, relation, source = "0", name, alpha = "0,1", beta = "1,2", out,
      clauses, fixture, mode, a_elem, budget_text;
  std::vector<std::string> adversaries;
  std::size_t p = 1, n = 0, k = 1, m = 1, vars = 3, arity_cap = 3;
  bool split = false, evaluate = false, count_atoms = false, cross_check = false, csp = false, emit = false;
};

inline int cmd_eval(Context& c, const Options& o, bool restricted) {
  Document d = c.document(o.structure);
  PHSentence phi = c.sentence(o.sentence, o.phi, d.structure);
  EvalOptions eo;
  eo.budget = c.budget;
  GameVerdict v;
  if (o.csp) v = eval_csp(d.structure, phi, eo);
  else if (restricted) v = eval_qcsp_restricted(d.structure, phi, parse_adversaries(o.adversaries, d.structure.domain_size()), eo);
  else v = eval_qcsp(d.structure, phi, eo);
  c.report["verdict"] = verdict_json(v, phi);
  c.line("sentence", print_sentence(phi, d.structure));
  c.line("holds", v.holds ? "true" : "false");
  if (v.failing_adversary) c.line("failing adversary", std::to_string(*v.failing_adversary + 1));
  return v.holds ? kYes : kNo;
}

inline int cmd_reduce(Context& c, const Options& o) {
  Document d = c.document(o.structure);
  const Structure& s = d.structure;
  PHSentence phi = c.sentence(o.sentence, o.phi, s);
  AdversarySet omega = parse_adversaries(o.adversaries, s.domain_size());
  if (o.adversaries.empty()) {
    omega = AdversarySet(s.domain_size(), phi.num_universals());
    if (phi.num_universals() > 0) omega.add(Adversary::full(s.domain_size(), phi.num_universals()));
    else omega.add(Adversary(s.domain_size(), 0, {Tuple{}}));
  }
  auto insts = qcsp_to_csp(s, phi, omega, o.split);
  json arr = json::array();
  bool sat = true;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    auto sol = solve_csp(s, insts[i], c.budget);
    sat = sat && sol.has_value();
    json j{{"variables", insts[i].num_vars}, {"atoms", insts[i].atoms.size()}, {"size", insts[i].size()},
           {"satisfiable", sol.has_value()}};
    if (o.emit) j["instance"] = print_sentence(insts[i].as_sentence(), s);
    arr.push_back(j);
    c.text << "instance " << i + 1 << ": " << insts[i].num_vars << " variables, " << insts[i].atoms.size() << " atoms, "
           << (sol ? "satisfiable" : "unsatisfiable") << "\n";
    if (o.emit) c.text << "  " << print_sentence(insts[i].as_sentence(), s) << "\n";
  }
  c.report["width"] = omega.width();
  c.report["instances"] = arr;
  c.report["satisfiable"] = sat;
  c.line("width", std::to_string(omega.width()));
  c.line("satisfiable", sat ? "true" : "false");
  return sat ? kYes : kNo;
}

inline int cmd_classify(Context& c, const Options& o) {
  std::string path = !o.ops.empty() ? o.ops : o.structure;
  if (path.empty()) throw InputError("give --ops FILE or --structure FILE");
  Document d = c.document(path);
  bool algebra = o.mode.empty() ? !d.operations.empty() : o.mode == "algebra";
  if (!o.mode.empty() && o.mode != "algebra" && o.mode != "structure") throw InputError("--mode is algebra or structure");
  PGPVerdict v = algebra ? classify_pgp_egp(d.operations) : classify_pgp_egp(d.structure, c.budget);
  c.report["mode"] = algebra ? "algebra" : "structure";
  c.report["outcome"] = v.egp ? "EGP" : "PGP";
  c.report["operations_checked"] = v.operations_checked;
  c.line("mode", algebra ? "algebra" : "structure");
  c.line("outcome", v.egp ? "EGP" : "PGP");
  if (v.witness) {
    c.report["witness"] = json{{"alpha", mask_string(v.witness->first)}, {"beta", mask_string(v.witness->second)}};
    c.line("projective pair", mask_string(v.witness->first) + " " + mask_string(v.witness->second));
  }
  json viol = json::array();
  for (const auto& pv : v.violations) {
    viol.push_back(json{{"alpha", mask_string(pv.alpha)}, {"beta", mask_string(pv.beta)}, {"operation", operation_json(pv.op)}});
    c.text << "  " << mask_string(pv.alpha) << mask_string(pv.beta) << " broken by "
           << (pv.op.name().empty() ? operation_table_string(pv.op) : pv.op.name()) << "\n";
  }
  c.report["violations"] = viol;
  return kYes;
}

inline int cmd_collapsible(Context& c, const Options& o) {
  Document d = c.document(o.structure);
  Element x = parse_element(o.source, d.structure);
  CollapsibilityDecision r = decide_p_collapsible_singleton(d.structure, x, o.p, c.budget);
  c.report["collapsible"] = r.collapsible;
  c.report["route"] = r.route;
  c.report["witness_arity"] = r.witness_arity;
  c.report["product_atoms"] = r.product_atoms;
  if (r.witness) {
    c.report["witness_operation"] = operation_json(r.witness->f);
    AdversarySet om = upsilon(o.p + 1, o.p, {x}, d.structure.domain_size());
    c.report["witness_verified"] =
        verify_reactive(Adversary::full(d.structure.domain_size(), o.p + 1), om, *r.witness).ok;
  }
  c.line("collapsible", r.collapsible ? "true" : "false");
  c.line("route", r.route);
  c.line("witness arity", std::to_string(r.witness_arity));
  return r.collapsible ? kYes : kNo;
}

inline int cmd_canonical(Context& c, const Options& o, bool general) {
  Document d = c.document(o.structure);
  const Structure& s = d.structure;
  AdversarySet omega = parse_adversaries(o.adversaries, s.domain_size());
  CanonicalSentence cs = general ? canonical_general(o.n ? o.n : s.domain_size(), omega, s, c.budget)
                                 : canonical_pi2(omega, s, c.budget);
  std::string text = print_sentence(cs.sentence, s);
  c.report["mode"] = general ? "general" : "pi2";
  c.report["factors"] = cs.arity();
  c.report["atoms"] = cs.atom_count;
  c.report["universals"] = cs.sentence.num_universals();
  c.report["existentials"] = cs.sentence.num_existentials();
  c.report["sentence"] = text;
  c.text << text << "\n";
  if (!o.evaluate) return kYes;
  GameVerdict v = eval_canonical(s, cs, c.budget);
  c.report["holds"] = v.holds;
  c.line("holds", v.holds ? "true" : "false");
  return v.holds ? kYes : kNo;
}

inline int cmd_gadget(Context& c, const Options& o, const std::string& which) {
  Mask a = parse_mask(o.alpha, 64), b = parse_mask(o.beta, 64);
  std::size_t n = domain_of(a, b);
  c.report["alpha"] = mask_string(a);
  c.report["beta"] = mask_string(b);
  if (which == "sigma" || which == "tau") {
    RelationExpr e = which == "sigma" ? sigma_k(a, b, o.k) : tau_k(a, b, o.k);
    Relation r = materialize(e, n);
    Structure s(n);
    s.add_relation(which + std::to_string(o.k), Relation(n, e.arity(), r.tuples(), e));
    std::string doc = print_document(s);
    c.report["document"] = doc;
    c.report["tuples"] = r.size();
    c.text << doc;
    if (o.count_atoms) {
      EncodingSize z = encoding_size(e, n);
      c.report["dnf_atoms"] = z.dnf_atoms;
      c.report["tuple_entries"] = z.tuple_entries;
      c.line("dnf atoms", std::to_string(z.dnf_atoms));
      c.line("tuple-listing entries", std::to_string(z.tuple_entries));
    }
    return kYes;
  }
  if (which == "ppdef") {
    PPDefinition d = pp_define_tau_in_sigma(a, b, o.k, c.budget);
    c.report["formula"] = d.formula.to_string();
    c.report["conjuncts"] = d.formula.conjuncts.size();
    c.report["phi_tuples"] = d.phi.size();
    c.report["tau_tuples"] = d.tau.size();
    c.report["equal"] = d.equal;
    c.line("formula", d.formula.to_string());
    c.line("conjuncts", std::to_string(d.formula.conjuncts.size()));
    c.line("equality verified", d.equal ? "true" : "false");
    return d.equal ? kYes : kNo;
  }
  if (which == "naesat") {
    NAEInstance I = parse_nae(o.vars, o.clauses);
    NAEReduction r = naesat_complement_reduction(I, a, b);
    std::string doc = print_document(r.structure), sen = print_sentence(r.sentence, r.structure);
    c.report["document"] = doc;
    c.report["sentence"] = sen;
    c.report["dnf_atoms"] = r.atom_count;
    c.text << doc << sen << "\n";
    if (!o.evaluate) return kYes;
    EvalOptions eo;
    eo.budget = c.budget;
    bool psi = eval_qcsp(r.structure, r.sentence, eo).holds;
    bool nae = nae_solve(I).has_value();
    c.report["psi_holds"] = psi;
    c.report["nae_satisfiable"] = nae;
    c.line("psi holds", psi ? "true" : "false");
    c.line("NAE satisfiable", nae ? "true" : "false");
    return psi ? kYes : kNo;
  }
  throw InputError("unknown gadget " + which);
}

inline int cmd_shop(Context& c, const Options& o) {
  Document d = c.document(o.structure);
  auto h = has_simple_A_she(d.structure, c.budget);
  c.report["found"] = h.has_value();
  c.line("simple A-she", h ? "found" : "absent");
  if (h) {
    json im = json::array();
    for (std::size_t a = 0; a < h->images.size(); ++a) {
      im.push_back(mask_string(h->images[a]));
      c.text << "  " << a << " -> " << mask_string(h->images[a]) << "\n";
    }
    c.report["images"] = im;
    c.report["source"] = *h->simple_source(d.structure.domain_size());
  }
  return h ? kYes : kNo;
}

inline int cmd_essential(Context& c, const Options& o) {
  Document d = c.document(o.structure);
  json arr = json::array();
  int code = kYes;
  bool matched = false;
  for (const auto& nr : d.structure.relations()) {
    if (!o.relation.empty() && nr.name != o.relation) continue;
    matched = true;
    auto et = essential_tuples(nr.relation, c.budget);
    bool by_rho = is_essential_by_rho_tilde(nr.relation, c.budget);
    json tj = json::array();
    for (const auto& t : et) tj.push_back(tuple_to_string(t));
    arr.push_back(json{{"relation", nr.name}, {"essential", !et.empty()}, {"rho_tilde_agrees", by_rho == !et.empty()},
                       {"essential_tuples", tj}});
    c.text << nr.name << ": " << (et.empty() ? "not essential" : "essential") << " (" << et.size()
           << " essential tuples, rho-tilde " << (by_rho == !et.empty() ? "agrees" : "DISAGREES") << ")\n";
    if (!o.relation.empty() && et.empty()) code = kNo;
  }
  if (!matched) throw InputError(o.relation.empty() ? "structure has no relations" : "no relation named " + o.relation);
  c.report["relations"] = arr;
  return code;
}

inline json term_json(const std::optional<TermHit>& h) {
  if (!h) return nullptr;
  return json{{"term", h->term}, {"table", operation_table_string(h->op)}};
}

inline int cmd_zhuk(Context& c, const Options& o) {
  Document d = c.document(o.ops);
  ZhukResult z = check_zhuk_condition(d.operations, c.budget);
  LemmaFunResult lf = find_lemma_fun_witnesses(d.operations, c.budget);
  c.report["found"] = z.found;
  c.report["exact"] = z.exact;
  if (z.found) {
    c.report["regime"] = z.regime;
    c.report["p"] = term_json(z.p);
    c.report["r3"] = term_json(z.r3);
  }
  c.report["lemma_fun"] = json{{"p1", term_json(lf.p1)}, {"p2", term_json(lf.p2)}, {"exact", lf.exact}};
  if (z.found) {
    c.line("zhuk condition", "found in regime " + std::to_string(z.regime));
    c.line("p", z.p->term);
    c.line("r3", z.r3->term);
  } else {
    c.line("zhuk condition", z.exact ? "not found (exhaustive)" : "not found within budget");
  }
  c.line("p1", lf.p1 ? lf.p1->term : "absent");
  c.line("p2", lf.p2 ? lf.p2->term : "absent");
  if (z.found) return kYes;
  return z.exact ? kNo : kInconclusive;
}

inline int cmd_family(Context& c, const Options& o) {
  Family fam = parse_family(o.name);
  Operation f = make_family_op(fam, o.n);
  std::string doc = print_document(Structure(3), {f});
  c.report["operation"] = operation_json(f);
  c.report["idempotent"] = f.is_idempotent();
  c.text << doc;
  if (o.structure.empty()) return kYes;
  Document d = c.document(o.structure);
  std::vector<Relation> rels;
  std::vector<std::string> names;
  for (const auto& nr : d.structure.relations()) {
    rels.push_back(nr.relation);
    names.push_back(nr.name);
  }
  FamilyReport rep = check_family_preservation(f, rels, names);
  json arr = json::array();
  for (const auto& r : rep.relations) {
    json j{{"relation", r.name}, {"arity", r.arity}, {"preserved", r.preserved}};
    if (!r.preserved) {
      json v = json::array();
      for (const auto& t : r.violation) v.push_back(tuple_to_string(t));
      j["violation"] = v;
    }
    arr.push_back(j);
    c.text << r.name << ": " << (r.preserved ? "preserved" : "violated") << "\n";
  }
  c.report["relations"] = arr;
  c.report["arity_regime"] = rep.arity_regime;
  return rep.all_preserved ? kYes : kNo;
}

inline int cmd_hubie(Context& c, const Options& o) {
  HubieSearch h;
  if (!o.ops.empty()) {
    Document d = c.document(o.ops);
    std::size_t n = d.operations.empty() ? d.structure.domain_size() : d.operations[0].domain_size();
    h = find_hubie_pol(d.operations, n, parse_element(o.source, Structure(n)), o.arity_cap, c.budget);
  } else {
    Document d = c.document(o.structure);
    h = find_hubie_pol(d.structure, parse_element(o.source, d.structure), o.arity_cap, c.budget);
  }
  c.report["found"] = h.op.has_value();
  if (h.op) {
    c.report["operation"] = operation_json(*h.op);
    if (!h.term.empty()) c.report["term"] = h.term;
    c.line("hubie-pol", h.term.empty() ? operation_table_string(*h.op) : h.term);
    return kYes;
  }
  c.report["reason"] = h.reason;
  c.line("hubie-pol", "none found (" + h.reason + ")");
  return kInconclusive;
}

inline int cmd_nu(Context& c, const Options& o) {
  Mask a = parse_mask(o.alpha, 64), b = parse_mask(o.beta, 64);
  Element e = o.a_elem.empty() ? elements_of(a & b).empty() ? 0 : elements_of(a & b)[0]
                               : static_cast<Element>(std::stoul(o.a_elem));
  NUReport r = near_unanimity_for_reduct(o.m, a, b, e, c.budget);
  c.report["arity"] = r.op.arity();
  c.report["default"] = e;
  json arr = json::array();
  for (auto [i, ok] : r.sigma_preserved) {
    arr.push_back(json{{"i", i}, {"preserved", ok}});
    c.text << "sigma" << i << ": " << (ok ? "preserved" : "violated") << "\n";
  }
  c.report["sigma"] = arr;
  c.report["all_preserved"] = r.all_preserved;
  return r.all_preserved ? kYes : kNo;
}

inline int cmd_conp(Context& c, const Options& o) {
  Document d = c.document(o.structure);
  PHSentence phi = c.sentence(o.sentence, o.phi, d.structure);
  ConpResult r = conp_eval(d.structure, phi, c.budget);
  c.report["verdict"] = verdict_json(r.verdict, phi);
  c.report["canon"] = r.canon;
  c.report["reason"] = r.reason;
  c.line("holds", r.verdict.holds ? "true" : "false");
  c.line("canon", std::to_string(r.canon));
  c.line("reason", r.reason);
  if (o.cross_check) {
    EvalOptions eo;
    eo.budget = c.budget;
    bool g = eval_qcsp(d.structure, phi, eo).holds;
    c.report["game_agrees"] = g == r.verdict.holds;
    c.line("game search agrees", g == r.verdict.holds ? "true" : "false");
  }
  return r.verdict.holds ? kYes : kNo;
}

inline int cmd_fixtures(Context& c, const Options& o) {
  std::vector<std::pair<std::string, std::string>> files;
  const std::string& f = o.fixture;
  if (f == "k4") {
    files.push_back({"k4.struct", print_document(fixtures::k4())});
    files.push_back({"k4.ph", std::string(fixtures::k4_sentence()) + "\n"});
  } else if (f == "chen-gap") {
    Document d = fixtures::chen_gap();
    files.push_back({"chen-gap.struct", print_document(d.structure, d.operations)});
  } else if (f == "intro") {
    files.push_back({"intro-ternary.struct", print_document(fixtures::intro_ternary())});
    files.push_back({"intro-nae.struct", print_document(fixtures::intro_nae())});
  } else if (f == "sigma-tau") {
    files.push_back({"sigma-tau.struct", print_document(fixtures::sigma_tau())});
    files.push_back({"tau-language.struct", print_document(fixtures::tau_language())});
  } else if (f == "leq") {
    files.push_back({"leq.struct", print_document(fixtures::leq())});
  } else if (f == "two-clique") {
    files.push_back({"two-clique.struct", print_document(fixtures::two_clique())});
  } else if (f.rfind("path:", 0) == 0) {
    std::string bits = f.substr(5);
    files.push_back({"path-" + bits + ".struct", print_document(path_structure(bits))});
    c.report["quasi_loop_connected"] = is_quasi_loop_connected(bits);
    c.line("quasi-loop-connected", is_quasi_loop_connected(bits) ? "true" : "false");
  } else if (f == "list") {
    json arr = json::array();
    for (const auto& n : fixtures::names()) {
      arr.push_back(n);
      c.text << n << "\n";
    }
    c.report["fixtures"] = arr;
    return kYes;
  } else {
    throw InputError("unknown fixture '" + f + "' (try: fixtures list)");
  }
  json arr = json::array();
  for (const auto& [name, body] : files) {
    if (!o.out.empty()) {
      std::filesystem::create_directories(o.out);
      std::string path = (std::filesystem::path(o.out) / name).string();
      std::ofstream w(path);
      if (!w) throw InputError("cannot write " + path);
      w << body;
      arr.push_back(path);
      c.line("wrote", path);
    } else {
      arr.push_back(name);
      c.text << "# " << name << "\n" << body;
    }
    c.report["contents"][name] = body;
  }
  c.report["files"] = arr;
  return kYes;
}

// Runs one command line (argv[0] is the program name). Reports go to out, diagnostics to err.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err,
               const std::string& env_budget = {}) {
  auto start = std::chrono::steady_clock::now();
  CLI::App app{"Finite-domain QCSP and clone workbench", "qcsp"};
  app.require_subcommand(1);
  app.fallthrough();
  Context c;
  Options o;
  app.add_flag("--json", c.as_json, "structured report");
  app.add_flag("--timings", c.timings, "include wall-clock timings in the report");
  app.add_option("--seed", c.seed, "seed recorded in the report");
  app.add_option("--budget", o.budget_text, "caps, e.g. nodes=1000000,atoms=500000 (overrides QCSP_BUDGET)");

  auto structure_opt = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--structure", o.structure, "structure file");
    if (required) opt->required();
  };
  auto sentence_opts = [&](CLI::App* s) {
    s->add_option("--sentence", o.sentence, "sentence file");
    s->add_option("--phi", o.phi, "sentence text");
  };

  std::function<int()> action;
  std::string command;
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& desc, std::function<int()> f) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    s->callback([&, parent, name, f] {
      command = parent == &app ? name : parent->get_name() + " " + name;
      action = f;
    });
    return s;
  };

  auto* ev = sub(&app, "eval", "evaluate a pH-sentence (full game)", [&] { return cmd_eval(c, o, false); });
  structure_opt(ev, true);
  sentence_opts(ev);
  ev->add_flag("--csp", o.csp, "require an existential sentence");

  auto* er = sub(&app, "eval-restricted", "evaluate against a set of adversaries", [&] { return cmd_eval(c, o, true); });
  structure_opt(er, true);
  sentence_opts(er);
  er->add_option("--adversary", o.adversaries, "upsilon:m,p,{x}  xi:m,p  full:m  tuples:(..);(..)");

  auto* red = app.add_subcommand("reduce", "reductions");
  red->require_subcommand(1);
  red->fallthrough();
  auto* q2c = sub(red, "qcsp-to-csp", "adversary-restricted QCSP to one CSP instance", [&] { return cmd_reduce(c, o); });
  structure_opt(q2c, true);
  sentence_opts(q2c);
  q2c->add_option("--adversary", o.adversaries, "adversary literals (default: full)");
  q2c->add_flag("--split", o.split, "one instance per adversary");
  q2c->add_flag("--emit", o.emit, "print the instances");

  auto* cl = sub(&app, "classify", "PGP/EGP via alpha-beta projectivity", [&] { return cmd_classify(c, o); });
  cl->add_option("--ops", o.ops, "document with operations (algebra mode)");
  structure_opt(cl, false);
  cl->add_option("--mode", o.mode, "algebra or structure");

  auto* co = sub(&app, "collapsible", "p-collapsibility from a singleton source", [&] { return cmd_collapsible(c, o); });
  structure_opt(co, true);
  co->add_option("--source", o.source, "source element (number or constant name)");
  co->add_option("--p", o.p, "p > 0");

  auto* can = app.add_subcommand("canonical", "canonical sentences");
  can->require_subcommand(1);
  can->fallthrough();
  for (bool general : {false, true}) {
    auto* s = sub(can, general ? "general" : "pi2", general ? "canonical general sentence" : "canonical Pi2 sentence",
                  [&, general] { return cmd_canonical(c, o, general); });
    structure_opt(s, true);
    s->add_option("--adversary", o.adversaries, "adversary literals")->required();
    s->add_flag("--evaluate", o.evaluate, "also evaluate the sentence");
    if (general) s->add_option("--n", o.n, "block size (default |A|)");
  }

  auto* gad = app.add_subcommand("gadget", "hardness gadgets");
  gad->require_subcommand(1);
  gad->fallthrough();
  for (std::string g : {"sigma", "tau", "ppdef", "naesat"}) {
    auto* s = sub(gad, g, g + " gadget", [&, g] { return cmd_gadget(c, o, g); });
    s->add_option("--k", o.k, "block count");
    s->add_option("--alpha", o.alpha, "alpha, e.g. 0,1");
    s->add_option("--beta", o.beta, "beta, e.g. 1,2");
    s->add_flag("--count-atoms", o.count_atoms, "DNF and tuple-listing sizes");
    if (g == "naesat") {
      s->add_option("--vars", o.vars, "number of NAE variables");
      s->add_option("--clauses", o.clauses, "clauses such as 1,2,3;2,3,1 (1-based)");
      s->add_flag("--evaluate", o.evaluate, "evaluate psi and brute-force the NAE instance");
    }
  }

  auto* sh = sub(&app, "shop", "search for a simple A-she", [&] { return cmd_shop(c, o); });
  structure_opt(sh, true);

  auto* es = sub(&app, "essential", "essential relations and tuples", [&] { return cmd_essential(c, o); });
  structure_opt(es, true);
  es->add_option("--relation", o.relation, "only this relation");

  auto* zk = sub(&app, "zhuk", "Zhuk condition and the binary p1/p2 witnesses", [&] { return cmd_zhuk(c, o); });
  zk->add_option("--ops", o.ops, "document with operations on {0,1,2}")->required();

  auto* fa = sub(&app, "family", "gap-algebra operation families", [&] { return cmd_family(c, o); });
  fa->add_option("--name", o.name, "f_a, f_b, f_hat_a, f_hat_b, chen_r, chen_s")->required();
  fa->add_option("--n", o.n, "family parameter");
  structure_opt(fa, false);

  auto* hu = sub(&app, "hubie", "search for a Hubie-pol", [&] { return cmd_hubie(c, o); });
  structure_opt(hu, false);
  hu->add_option("--ops", o.ops, "document with operations (algebra mode)");
  hu->add_option("--source", o.source, "source element");
  hu->add_option("--arity-cap", o.arity_cap, "largest arity searched");

  auto* nu = sub(&app, "nu", "near-unanimity operation for the sigma reduct", [&] { return cmd_nu(c, o); });
  nu->add_option("--m", o.m, "m (arity 3m+1)");
  nu->add_option("--alpha", o.alpha, "alpha");
  nu->add_option("--beta", o.beta, "beta");
  nu->add_option("--a", o.a_elem, "default element (least of alpha∩beta)");

  auto* cp = sub(&app, "conp-eval", "canon-based evaluation", [&] { return cmd_conp(c, o); });
  structure_opt(cp, true);
  sentence_opts(cp);
  cp->add_flag("--cross-check", o.cross_check, "compare with the game search");

  auto* fx = sub(&app, "fixtures", "write built-in structures", [&] { return cmd_fixtures(c, o); });
  fx->add_option("name", o.fixture, "k4, chen-gap, intro, sigma-tau, leq, two-clique, path:<bits>, list")->required();
  fx->add_option("--out", o.out, "directory to write into (default: stdout)");

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kYes;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kYes;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInputError;
  }

  int code = kInputError;
  try {
    c.budget = Budget::parse(env_budget);
    if (!o.budget_text.empty()) c.budget = Budget::parse(o.budget_text);
    for (std::size_t i = 1; i < argv.size(); ++i) c.digest.add(argv[i]);
    code = action();
  } catch (const BudgetExceeded& e) {
    c.report["inconclusive"] = e.what();
    c.line("inconclusive", e.what());
    code = kInconclusive;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }

  json rep{{"command", command}, {"inputs_digest", c.digest.hex()}, {"seed", c.seed},
           {"budget", budget_json(c.budget)}, {"exit_code", code}};
  for (auto& [k, v] : c.report.items()) rep[k] = v;
  if (c.timings) {
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rep["timings"] = json{{"total_ms", ms}};
  }
  if (c.as_json) {
    out << rep.dump(2) << "\n";
  } else {
    out << "command: " << command << "\n" << c.text.str() << "inputs digest: " << c.digest.hex() << "\n";
    if (c.timings) out << "time: " << rep["timings"]["total_ms"].get<double>() << " ms\n";
  }
  return code;
}

}  // namespace qcsp::cli

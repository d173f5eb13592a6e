#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "qcsp/core/structure.hpp"

namespace qcsp {

enum class Quantifier { Forall, Exists };

struct Term {
  bool is_var = true;
  std::uint32_t value = 0;  // variable index or element
  static Term var(std::uint32_t v) { return {true, v}; }
  static Term constant(Element e) { return {false, e}; }
  bool operator==(const Term&) const = default;
};

struct Atom {
  // relation index into the bound structure, or kEquality for t1 = t2
  static constexpr std::size_t kEquality = static_cast<std::size_t>(-1);
  std::size_t relation = kEquality;
  std::vector<Term> args;
  bool is_equality() const { return relation == kEquality; }
  bool operator==(const Atom&) const = default;
};

// Prenex positive-Horn sentence. Variable i is the i-th quantified variable.
struct PHSentence {
  std::vector<Quantifier> quantifiers;
  std::vector<std::string> names;
  std::vector<Atom> matrix;

  std::size_t num_vars() const { return quantifiers.size(); }
  std::size_t count(Quantifier q) const {
    std::size_t c = 0;
    for (auto x : quantifiers) c += x == q;
    return c;
  }
  std::size_t num_universals() const { return count(Quantifier::Forall); }
  std::size_t num_existentials() const { return count(Quantifier::Exists); }
  bool is_existential() const { return num_universals() == 0; }
  bool has_equality() const {
    for (const auto& a : matrix)
      if (a.is_equality()) return true;
    return false;
  }
  // All universals precede all existentials.
  bool is_pi2() const {
    bool seen_exists = false;
    for (auto q : quantifiers) {
      if (q == Quantifier::Exists) seen_exists = true;
      else if (seen_exists) return false;
    }
    return true;
  }
  std::size_t add_var(Quantifier q, std::string name) {
    quantifiers.push_back(q);
    names.push_back(std::move(name));
    return quantifiers.size() - 1;
  }
  bool operator==(const PHSentence&) const = default;
};

// Checks arities, element ranges and variable indices against s.
inline void validate_sentence(const PHSentence& phi, const Structure& s, bool allow_equality = true) {
  if (phi.names.size() != phi.quantifiers.size()) throw InputError("sentence names/quantifiers mismatch");
  for (const auto& a : phi.matrix) {
    if (a.is_equality()) {
      if (!allow_equality) throw InputError("equality atoms are not allowed here");
      if (a.args.size() != 2) throw InputError("equality atom needs two arguments");
    } else {
      if (a.relation >= s.relations().size()) throw InputError("atom refers to an unknown relation");
      if (a.args.size() != s.relations()[a.relation].relation.arity())
        throw InputError("arity mismatch for relation " + s.relations()[a.relation].name);
    }
    for (const auto& t : a.args) {
      if (t.is_var && t.value >= phi.num_vars()) throw InputError("unbound variable in atom");
      if (!t.is_var && t.value >= s.domain_size()) throw InputError("constant outside domain");
    }
  }
}

// Grammar:  sentence := (('A'|'E') ident)* ':' matrix
//           matrix   := 'true' | atom ('&' atom)*
//           atom     := ident '(' term (',' term)* ')' | term '=' term
//           term     := variable | constant name | integer element
inline PHSentence parse_sentence(std::string_view text, const Structure& s, bool allow_equality = true) {
  struct Lexer {
    std::string_view t;
    std::size_t i = 0;
    void ws() {
      while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    }
    [[noreturn]] void fail(const std::string& m) {
      throw InputError("sentence: " + m + " at offset " + std::to_string(i));
    }
    bool peek(char c) {
      ws();
      return i < t.size() && t[i] == c;
    }
    bool eat(char c) {
      if (peek(c)) {
        ++i;
        return true;
      }
      return false;
    }
    std::string ident() {
      ws();
      std::size_t st = i;
      while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_' || t[i] == '.')) ++i;
      if (st == i) fail("expected identifier");
      return std::string(t.substr(st, i - st));
    }
    bool at_end() {
      ws();
      return i >= t.size();
    }
  };
  Lexer lx{text};
  PHSentence phi;
  while (!lx.peek(':')) {
    std::string q = lx.ident();
    if (q != "A" && q != "E") lx.fail("expected quantifier A or E, got '" + q + "'");
    std::string v = lx.ident();
    for (const auto& existing : phi.names)
      if (existing == v) lx.fail("variable " + v + " quantified twice");
    phi.add_var(q == "A" ? Quantifier::Forall : Quantifier::Exists, v);
  }
  lx.eat(':');
  auto term = [&](const std::string& id) -> Term {
    for (std::size_t v = 0; v < phi.names.size(); ++v)
      if (phi.names[v] == id) return Term::var(static_cast<std::uint32_t>(v));
    if (auto c = s.find_constant(id)) return Term::constant(*c);
    if (!id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      auto e = std::stoul(id);
      if (e >= s.domain_size()) throw InputError("sentence: element " + id + " outside domain");
      return Term::constant(static_cast<Element>(e));
    }
    throw InputError("sentence: unbound variable or unknown constant '" + id + "'");
  };
  if (lx.at_end()) return phi;
  std::size_t save = lx.i;
  if (lx.ident() == "true" && lx.at_end()) return phi;
  lx.i = save;
  do {
    std::string head = lx.ident();
    Atom a;
    if (lx.eat('(')) {
      auto r = s.find_relation(head);
      if (!r) throw InputError("sentence: unknown relation '" + head + "'");
      a.relation = *r;
      if (!lx.peek(')')) {
        do a.args.push_back(term(lx.ident()));
        while (lx.eat(','));
      }
      if (!lx.eat(')')) lx.fail("expected ')'");
      if (a.args.size() != s.relations()[*r].relation.arity())
        throw InputError("sentence: arity mismatch for relation '" + head + "'");
    } else if (lx.eat('=')) {
      if (!allow_equality) throw InputError("sentence: equality used where it is not allowed");
      a.args = {term(head), term(lx.ident())};
    } else {
      lx.fail("expected '(' or '=' after '" + head + "'");
    }
    phi.matrix.push_back(std::move(a));
  } while (lx.eat('&'));
  if (!lx.at_end()) lx.fail("trailing input");
  return phi;
}

inline std::string print_term(const Term& t, const PHSentence& phi, const Structure& s) {
  if (t.is_var) return phi.names[t.value];
  if (auto n = s.constant_name(t.value)) return *n;
  return std::to_string(t.value);
}

inline std::string print_sentence(const PHSentence& phi, const Structure& s) {
  std::string out;
  for (std::size_t v = 0; v < phi.num_vars(); ++v) {
    out += phi.quantifiers[v] == Quantifier::Forall ? "A " : "E ";
    out += phi.names[v] + " ";
  }
  out += ":";
  if (phi.matrix.empty()) return out + " true";
  for (std::size_t i = 0; i < phi.matrix.size(); ++i) {
    const auto& a = phi.matrix[i];
    out += i ? " & " : " ";
    if (a.is_equality()) {
      out += print_term(a.args[0], phi, s) + "=" + print_term(a.args[1], phi, s);
    } else {
      out += s.relations()[a.relation].name + "(";
      for (std::size_t j = 0; j < a.args.size(); ++j) {
        if (j) out += ",";
        out += print_term(a.args[j], phi, s);
      }
      out += ")";
    }
  }
  return out;
}

// Whether the matrix holds under a total assignment.
inline bool matrix_holds(const PHSentence& phi, const Structure& s, std::span<const Element> assignment) {
  Tuple buf;
  for (const auto& a : phi.matrix) {
    buf.clear();
    for (const auto& t : a.args) buf.push_back(t.is_var ? assignment[t.value] : t.value);
    if (a.is_equality()) {
      if (buf[0] != buf[1]) return false;
    } else if (!s.relations()[a.relation].relation.contains(buf)) {
      return false;
    }
  }
  return true;
}

}  // namespace qcsp

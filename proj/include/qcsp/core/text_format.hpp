#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcsp/core/operation.hpp"

namespace qcsp {

// A structure file may also carry operation tables.
struct Document {
  Structure structure;
  std::vector<Operation> operations;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line, std::size_t max_parts) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < line.size() && parts.size() + 1 < max_parts) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    parts.push_back(line.substr(i, j - i));
    i = j;
  }
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i < line.size()) {
    std::string rest = line.substr(i);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
    parts.push_back(rest);
  }
  return parts;
}

inline std::size_t parse_count(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw InputError("expected a non-negative integer for " + what + ", got '" + s + "'");
  return std::stoul(s);
}

// "(0,1);(1,0)" -> tuples
inline std::vector<Tuple> parse_tuple_list(const std::string& text, std::size_t arity) {
  std::vector<Tuple> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ';')) ++i;
  };
  skip();
  while (i < text.size()) {
    if (text[i] != '(') throw InputError("expected '(' in tuple list: " + text);
    std::size_t close = text.find(')', i);
    if (close == std::string::npos) throw InputError("unterminated tuple in: " + text);
    std::string body = text.substr(i + 1, close - i - 1);
    Tuple t;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw InputError("empty tuple entry in: " + text);
      t.push_back(static_cast<Element>(parse_count(item.substr(b, e - b + 1), "tuple entry")));
    }
    if (t.size() != arity) throw InputError("tuple " + tuple_to_string(t) + " does not have arity " + std::to_string(arity));
    out.push_back(std::move(t));
    i = close + 1;
    skip();
  }
  return out;
}

}  // namespace detail

inline Document parse_document(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::optional<Structure> s;
  std::vector<Operation> ops;
  std::size_t lineno = 0;
  auto need = [&]() -> Structure& {
    if (!s) throw InputError("line " + std::to_string(lineno) + ": 'domain' must come first");
    return *s;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto parts = detail::split_ws(line, 2);
    if (parts.empty()) continue;
    const std::string& kw = parts[0];
    try {
      if (kw == "domain") {
        if (s) throw InputError("duplicate 'domain'");
        if (parts.size() != 2) throw InputError("usage: domain <n>");
        std::size_t n = detail::parse_count(parts[1], "domain size");
        if (n == 0) throw InputError("domain must be nonempty");
        s.emplace(n);
      } else if (kw == "constant") {
        auto p = detail::split_ws(line, 4);
        if (p.size() != 3) throw InputError("usage: constant <name> <element>");
        need().add_constant(p[1], static_cast<Element>(detail::parse_count(p[2], "element")));
      } else if (kw == "relation") {
        auto p = detail::split_ws(line, 5);
        if (p.size() < 4) throw InputError("usage: relation <name> <arity> tuples|expr ...");
        std::size_t arity = detail::parse_count(p[2], "arity");
        if (arity == 0) throw InputError("relation arity must be positive");
        std::string body = p.size() > 4 ? p[4] : "";
        if (p[3] == "tuples") {
          need().add_relation(p[1], Relation(need().domain_size(), arity, detail::parse_tuple_list(body, arity)));
        } else if (p[3] == "expr") {
          need().add_relation(p[1], materialize(parse_relation_expr(body, arity), need().domain_size()));
        } else {
          throw InputError("expected 'tuples' or 'expr', got '" + p[3] + "'");
        }
      } else if (kw == "operation") {
        auto p = detail::split_ws(line, 5);
        if (p.size() < 4 || p[3] != "table") throw InputError("usage: operation <name> <arity> table v0 v1 ...");
        std::size_t arity = detail::parse_count(p[2], "arity");
        std::vector<Element> table;
        std::istringstream vs(p.size() > 4 ? p[4] : "");
        std::string v;
        while (vs >> v) table.push_back(static_cast<Element>(detail::parse_count(v, "table value")));
        ops.emplace_back(need().domain_size(), arity, std::move(table), p[1]);
      } else {
        throw InputError("unknown keyword '" + kw + "'");
      }
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!s) throw InputError("missing 'domain' line");
  return Document{std::move(*s), std::move(ops)};
}

inline Structure parse_structure(const std::string& text) { return parse_document(text).structure; }

inline std::string print_relation_body(const Relation& r) {
  if (r.source()) return "expr " + r.source()->to_string();
  std::string s = "tuples";
  for (std::size_t i = 0; i < r.tuples().size(); ++i) {
    s += i ? ";" : " ";
    s += tuple_to_string(r.tuples()[i]);
  }
  return s;
}

inline std::string print_document(const Structure& s, const std::vector<Operation>& ops = {}) {
  std::ostringstream o;
  o << "domain " << s.domain_size() << "\n";
  for (const auto& c : s.constants()) o << "constant " << c.name << " " << c.element << "\n";
  for (const auto& r : s.relations())
    o << "relation " << r.name << " " << r.relation.arity() << " " << print_relation_body(r.relation) << "\n";
  for (std::size_t i = 0; i < ops.size(); ++i) {
    std::string name = ops[i].name().empty() ? "f" + std::to_string(i) : ops[i].name();
    o << "operation " << name << " " << ops[i].arity() << " table " << operation_table_string(ops[i]) << "\n";
  }
  return o.str();
}

inline std::string print_structure(const Structure& s) { return print_document(s); }

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace qcsp

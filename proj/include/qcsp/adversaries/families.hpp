#pragma once

#include <string>

#include "qcsp/adversaries/adversary.hpp"

namespace qcsp {

// For each x in `sources`, every rectangle with p positions equal to A and the rest {x}.
// Members are ordered by x, then by the free positions in lexicographic order.
inline AdversarySet upsilon(std::size_t m, std::size_t p, const std::vector<Element>& sources, std::size_t n) {
  if (p > m) throw InputError("upsilon needs p <= m");
  if (sources.empty()) throw InputError("upsilon needs a nonempty source set");
  AdversarySet out(n, m);
  for (Element x : sources) {
    if (x >= n) throw InputError("upsilon source outside domain");
    std::vector<std::size_t> free(p);
    for (std::size_t i = 0; i < p; ++i) free[i] = i;
    while (true) {
      std::vector<Mask> sides(m, Mask{1} << x);
      for (auto i : free) sides[i] = full_mask(n);
      out.add(Adversary::rectangle(n, sides));
      // next p-subset
      std::size_t i = p;
      while (i > 0 && free[i - 1] == m - p + i - 1) --i;
      if (i == 0) break;
      ++free[i - 1];
      for (std::size_t j = i; j < p; ++j) free[j] = free[j - 1] + 1;
    }
  }
  return out;
}

// Number of indices i >= 1 with t[i] != t[i-1].
inline std::size_t switch_count(std::span<const Element> t) {
  std::size_t c = 0;
  for (std::size_t i = 1; i < t.size(); ++i) c += t[i] != t[i - 1];
  return c;
}

// All m-tuples with at most p switches.
inline Adversary xi(std::size_t m, std::size_t p, std::size_t n) {
  if (m == 0) throw InputError("xi needs m >= 1");
  std::vector<Tuple> all;
  for_each_tuple(n, m, [&](const Tuple& t) {
    if (switch_count(t) <= p) all.push_back(t);
    return true;
  });
  return Adversary(n, m, std::move(all));
}

// Two positions agree in every tuple of every member.
inline bool is_degenerate(const AdversarySet& omega) {
  std::size_t m = omega.length;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      bool forced = true;
      for (const auto& b : omega.members) {
        for (const auto& t : b.tuples())
          if (t[i] != t[j]) {
            forced = false;
            break;
          }
        if (!forced) break;
      }
      if (forced) return true;
    }
  return false;
}

// Every member of big (length n*m) has a member of small (length m) containing all
// its projections that pick one coordinate from each block of n consecutive positions.
inline bool is_projective_at(const AdversarySet& big, const AdversarySet& small, std::size_t n, std::size_t m) {
  if (big.length != n * m || small.length != m) throw InputError("projectivity: length mismatch");
  for (const auto& b : big.members) {
    std::vector<Tuple> proj;
    for (const auto& t : b.tuples()) {
      for_each_tuple(n, m, [&](const Tuple& choice) {
        Tuple p(m);
        for (std::size_t j = 0; j < m; ++j) p[j] = t[j * n + choice[j]];
        proj.push_back(std::move(p));
        return true;
      });
    }
    std::sort(proj.begin(), proj.end());
    proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
    bool dominated = false;
    for (const auto& a : small.members) {
      dominated = std::all_of(proj.begin(), proj.end(), [&](const Tuple& p) { return a.contains(p); });
      if (dominated) break;
    }
    if (!dominated) return false;
  }
  return true;
}

namespace detail {
inline std::vector<Element> parse_element_list(std::string_view s, std::size_t n) {
  std::vector<Element> out;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t"), e = cur.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty element in list");
    auto t = cur.substr(b, e - b + 1);
    if (t.find_first_not_of("0123456789") != std::string::npos) throw InputError("bad element '" + t + "'");
    auto v = std::stoul(t);
    if (v >= n) throw InputError("element " + t + " outside domain");
    out.push_back(static_cast<Element>(v));
    cur.clear();
  };
  for (char c : s) {
    if (c == ',') flush();
    else cur += c;
  }
  flush();
  return out;
}
}  // namespace detail

// Literals: upsilon:m,p,{x,...}  xi:m,p  tuples:(..);(..)  full:m
// Each literal denotes a set of adversaries (upsilon) or a single one.
inline AdversarySet parse_adversary_literal(std::string_view lit, std::size_t n) {
  auto colon = lit.find(':');
  if (colon == std::string_view::npos) throw InputError("adversary literal needs a kind prefix: " + std::string(lit));
  auto kind = lit.substr(0, colon);
  auto body = lit.substr(colon + 1);
  if (kind == "upsilon") {
    auto brace = body.find('{');
    auto close = body.find('}');
    if (brace == std::string_view::npos || close == std::string_view::npos || close < brace)
      throw InputError("upsilon literal needs {sources}");
    auto head = detail::parse_element_list(body.substr(0, brace == 0 ? 0 : brace - 1), ~std::size_t{0} >> 1);
    if (head.size() != 2) throw InputError("upsilon literal is upsilon:m,p,{x,...}");
    auto src = detail::parse_element_list(body.substr(brace + 1, close - brace - 1), n);
    return upsilon(head[0], head[1], src, n);
  }
  if (kind == "xi") {
    auto v = detail::parse_element_list(body, ~std::size_t{0} >> 1);
    if (v.size() != 2) throw InputError("xi literal is xi:m,p");
    return AdversarySet(n, v[0], {xi(v[0], v[1], n)});
  }
  if (kind == "full") {
    auto v = detail::parse_element_list(body, ~std::size_t{0} >> 1);
    if (v.size() != 1 || v[0] == 0) throw InputError("full literal is full:m");
    return AdversarySet(n, v[0], {Adversary::full(n, v[0])});
  }
  if (kind == "tuples") {
    std::vector<Tuple> ts;
    std::string s(body);
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] == ';' || s[i] == ' ') {
        ++i;
        continue;
      }
      if (s[i] != '(') throw InputError("tuples literal expects '('");
      auto close = s.find(')', i);
      if (close == std::string::npos) throw InputError("unterminated tuple");
      ts.push_back(detail::parse_element_list(s.substr(i + 1, close - i - 1), n));
      i = close + 1;
    }
    if (ts.empty()) throw InputError("tuples literal is empty");
    std::size_t m = ts[0].size();
    return AdversarySet(n, m, {Adversary(n, m, std::move(ts))});
  }
  throw InputError("unknown adversary kind '" + std::string(kind) + "'");
}

inline std::string adversary_literal(const Adversary& b) {
  std::string s = "tuples:";
  for (std::size_t i = 0; i < b.tuples().size(); ++i) {
    if (i) s += ';';
    s += tuple_to_string(b.tuples()[i]);
  }
  return s;
}

}  // namespace qcsp

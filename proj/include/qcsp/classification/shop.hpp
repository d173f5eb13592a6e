#pragma once

#include <bit>
#include <optional>
#include <vector>

#include "qcsp/core/structure.hpp"

namespace qcsp {

// Surjective hyper-operation: each element maps to a nonempty set, images cover A.
struct Shop {
  std::vector<Mask> images;

  bool valid(std::size_t n) const {
    if (images.size() != n) return false;
    Mask cover = 0;
    for (Mask m : images) {
      if (m == 0 || (m & ~full_mask(n))) return false;
      cover |= m;
    }
    return cover == full_mask(n);
  }
  // some x with image A and singletons everywhere else
  std::optional<Element> simple_source(std::size_t n) const {
    std::optional<Element> src;
    for (Element a = 0; a < images.size(); ++a) {
      if (images[a] == full_mask(n) && !src) src = a;
      else if (std::popcount(images[a]) != 1) return std::nullopt;
    }
    if (!src && n == 1) src = 0;
    return src;
  }
};

// Hyper-endomorphism: every choice of images of a tuple of R lies in R (constants stay put).
inline bool is_she(const Structure& s, const Shop& h) {
  std::size_t n = s.domain_size();
  if (!h.valid(n)) return false;
  for (const auto& c : s.constants())
    if (h.images[c.element] != (Mask{1} << c.element)) return false;
  for (const auto& nr : s.relations()) {
    const Relation& r = nr.relation;
    for (const auto& t : r.tuples()) {
      std::vector<std::vector<Element>> choice(t.size());
      std::vector<std::size_t> sizes(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        choice[i] = elements_of(h.images[t[i]]);
        sizes[i] = choice[i].size();
      }
      std::vector<std::size_t> idx(t.size(), 0);
      Tuple img(t.size());
      while (true) {
        for (std::size_t i = 0; i < t.size(); ++i) img[i] = choice[i][idx[i]];
        if (!r.contains(img)) return false;
        std::size_t i = t.size();
        while (i > 0 && ++idx[i - 1] == sizes[i - 1]) idx[--i] = 0;
        if (i == 0) break;
      }
    }
  }
  return true;
}

// Exhaustive over the n·n^(n-1) simple A-shops: source x ascending, then the
// singleton images lexicographically.
inline std::optional<Shop> has_simple_A_she(const Structure& s, const Budget& budget = Budget{}) {
  std::size_t n = s.domain_size();
  std::uint64_t per = checked_pow(n, n - 1);
  if (per == kOverflow || per > budget.enumeration / n) throw BudgetExceeded("too many simple shops to enumerate");
  std::optional<Shop> found;
  for (Element x = 0; x < n && !found; ++x) {
    for_each_tuple(n, n - 1, [&](const Tuple& rest) {
      Shop h;
      h.images.resize(n);
      for (Element a = 0, j = 0; a < n; ++a) h.images[a] = a == x ? full_mask(n) : Mask{1} << rest[j++];
      if (is_she(s, h)) {
        found = std::move(h);
        return false;
      }
      return true;
    });
  }
  return found;
}

}  // namespace qcsp

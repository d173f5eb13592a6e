#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcsp {

using Element = std::uint32_t;
using Tuple = std::vector<Element>;
// Bitmask over a domain of at most 64 elements.
using Mask = std::uint64_t;

inline constexpr std::size_t kMaxMaskDomain = 64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or violated precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured cap was hit before the computation finished.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

struct Budget {
  std::uint64_t enumeration = std::uint64_t{1} << 24;  // candidate operation tables
  std::uint64_t search_nodes = 10'000'000;
  std::uint64_t product_atoms = 500'000;
  std::uint64_t closure_work = 200'000'000;  // coordinatewise op applications
  std::uint64_t closure_size = 1'000'000;
  std::uint64_t subset_checks = 2'000'000;
  std::uint64_t table_entries = 1'000'000;  // largest operation table we tabulate

  // Reads "key=value,key=value" (keys: enum, nodes, atoms, work, size, subsets, table).
  // A bare integer scales every cap to that value.
  static Budget parse(std::string_view text) {
    Budget b;
    if (text.empty()) return b;
    auto to_u64 = [&](std::string_view s) {
      std::uint64_t v = 0;
      if (s.empty()) throw InputError("empty budget value");
      for (char c : s) {
        if (c < '0' || c > '9') throw InputError("bad budget value: " + std::string(s));
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
      }
      return v;
    };
    if (text.find('=') == std::string_view::npos) {
      std::uint64_t v = to_u64(text);
      b.enumeration = b.search_nodes = b.product_atoms = b.closure_work = v;
      b.closure_size = b.subset_checks = b.table_entries = v;
      return b;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find(',', pos);
      if (end == std::string_view::npos) end = text.size();
      auto item = text.substr(pos, end - pos);
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw InputError("bad budget item: " + std::string(item));
      auto key = item.substr(0, eq);
      auto v = to_u64(item.substr(eq + 1));
      if (key == "enum") b.enumeration = v;
      else if (key == "nodes") b.search_nodes = v;
      else if (key == "atoms") b.product_atoms = v;
      else if (key == "work") b.closure_work = v;
      else if (key == "size") b.closure_size = v;
      else if (key == "subsets") b.subset_checks = v;
      else if (key == "table") b.table_entries = v;
      else throw InputError("unknown budget key: " + std::string(key));
      pos = end + 1;
    }
    return b;
  }

  static Budget from_env() {
    const char* v = std::getenv("QCSP_BUDGET");
    return v ? parse(v) : Budget{};
  }
};

// n^k, or nullopt-like max() when it would not fit in 63 bits.
inline std::uint64_t checked_pow(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (n != 0 && r > (std::numeric_limits<std::uint64_t>::max() >> 1) / n)
      return std::numeric_limits<std::uint64_t>::max();
    r *= n;
  }
  return r;
}

inline constexpr std::uint64_t kOverflow = std::numeric_limits<std::uint64_t>::max();

// Base-n code; first coordinate most significant.
inline std::uint64_t encode(std::span<const Element> t, std::uint64_t n) {
  std::uint64_t c = 0;
  for (Element e : t) c = c * n + e;
  return c;
}

inline Tuple decode(std::uint64_t code, std::uint64_t n, std::size_t len) {
  Tuple t(len);
  for (std::size_t i = len; i-- > 0;) {
    t[i] = static_cast<Element>(code % n);
    code /= n;
  }
  return t;
}

// Calls f(tuple) for every tuple of A^len in lexicographic order; stops if f returns false.
template <typename F>
bool for_each_tuple(std::size_t n, std::size_t len, F&& f) {
  Tuple t(len, 0);
  if (n == 0) return true;
  while (true) {
    if (!f(static_cast<const Tuple&>(t))) return false;
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (++t[i] < n) break;
      t[i] = 0;
      if (i == 0) return true;
    }
    if (len == 0) return true;
  }
}

inline Mask full_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }

inline Mask mask_of(std::span<const Element> elems) {
  Mask m = 0;
  for (Element e : elems) m |= Mask{1} << e;
  return m;
}

inline std::vector<Element> elements_of(Mask m) {
  std::vector<Element> out;
  for (Element e = 0; m; ++e, m >>= 1)
    if (m & 1) out.push_back(e);
  return out;
}

inline std::string tuple_to_string(std::span<const Element> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i]);
  }
  return s + ")";
}

// Compact key used by JSON witnesses: "0,1,2".
inline std::string tuple_key(std::span<const Element> t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i]);
  }
  return s;
}

}  // namespace qcsp

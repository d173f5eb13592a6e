#pragma once

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "qcsp/core/common.hpp"

namespace qcsp {

// Nonempty m-ary relation that constrains the universal player's plays.
class Adversary {
 public:
  Adversary() = default;
  Adversary(std::size_t domain_size, std::size_t length, std::vector<Tuple> tuples)
      : n_(domain_size), m_(length), tuples_(std::move(tuples)) {
    if (tuples_.empty()) throw InputError("adversary must be nonempty");
    for (const auto& t : tuples_) {
      if (t.size() != m_) throw InputError("adversary tuple " + tuple_to_string(t) + " has wrong length");
      for (Element e : t)
        if (e >= n_) throw InputError("adversary element outside domain");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
    for (const auto& t : tuples_) codes_.insert(encode(t, n_));
  }

  static Adversary full(std::size_t domain_size, std::size_t length) {
    std::vector<Tuple> all;
    for_each_tuple(domain_size, length, [&](const Tuple& t) {
      all.push_back(t);
      return true;
    });
    return Adversary(domain_size, length, std::move(all));
  }

  // Product of per-position element sets.
  static Adversary rectangle(std::size_t domain_size, const std::vector<Mask>& sides) {
    std::vector<Tuple> all;
    for_each_tuple(domain_size, sides.size(), [&](const Tuple& t) {
      for (std::size_t i = 0; i < t.size(); ++i)
        if (!((sides[i] >> t[i]) & 1)) return true;
      all.push_back(t);
      return true;
    });
    return Adversary(domain_size, sides.size(), std::move(all));
  }

  std::size_t domain_size() const { return n_; }
  std::size_t length() const { return m_; }
  std::size_t size() const { return tuples_.size(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  bool contains(std::span<const Element> t) const { return t.size() == m_ && codes_.count(encode(t, n_)) != 0; }

  bool operator==(const Adversary& o) const { return n_ == o.n_ && m_ == o.m_ && tuples_ == o.tuples_; }

 private:
  std::size_t n_ = 1;
  std::size_t m_ = 0;
  std::vector<Tuple> tuples_;
  std::unordered_set<std::uint64_t> codes_;
};

struct AdversarySet {
  std::size_t domain_size = 1;
  std::size_t length = 0;
  std::vector<Adversary> members;

  AdversarySet() = default;
  AdversarySet(std::size_t n, std::size_t m, std::vector<Adversary> ms = {})
      : domain_size(n), length(m), members(std::move(ms)) {
    for (const auto& b : members) check(b);
  }

  void add(Adversary b) {
    check(b);
    members.push_back(std::move(b));
  }

  // width = sum of member sizes
  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& b : members) w += b.size();
    return w;
  }

  // Sorted union of all member tuples.
  std::vector<Tuple> all_tuples() const {
    std::vector<Tuple> u;
    for (const auto& b : members) u.insert(u.end(), b.tuples().begin(), b.tuples().end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
  }

  // {∪Ω}
  AdversarySet union_set() const {
    AdversarySet s(domain_size, length);
    if (!members.empty()) s.add(Adversary(domain_size, length, all_tuples()));
    return s;
  }

  // Ω_tuples: one singleton adversary per tuple.
  AdversarySet singletons() const {
    AdversarySet s(domain_size, length);
    for (auto& t : all_tuples()) s.add(Adversary(domain_size, length, {t}));
    return s;
  }

 private:
  void check(const Adversary& b) const {
    if (b.length() != length) throw InputError("adversary length mismatch in set");
    if (b.domain_size() != domain_size) throw InputError("adversary over a different domain");
  }
};

}  // namespace qcsp

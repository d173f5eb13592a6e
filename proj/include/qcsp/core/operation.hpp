#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/core/structure.hpp"

namespace qcsp {

// Total k-ary operation stored as a table over A^k (first argument most significant).
class Operation {
 public:
  Operation() = default;
  Operation(std::size_t domain_size, std::size_t arity, std::vector<Element> table, std::string name = {})
      : n_(domain_size), k_(arity), table_(std::move(table)), name_(std::move(name)) {
    if (k_ == 0) throw InputError("operation arity must be positive");
    if (table_.size() != checked_pow(n_, k_)) throw InputError("operation table has wrong size");
    for (Element e : table_)
      if (e >= n_) throw InputError("operation value outside domain");
  }

  template <typename F>
  static Operation from_function(std::size_t n, std::size_t k, F&& f, std::string name = {}) {
    std::uint64_t total = checked_pow(n, k);
    if (total > (std::uint64_t{1} << 28)) throw BudgetExceeded("operation table too large");
    std::vector<Element> table;
    table.reserve(total);
    for_each_tuple(n, k, [&](const Tuple& t) {
      table.push_back(static_cast<Element>(f(t)));
      return true;
    });
    return Operation(n, k, std::move(table), std::move(name));
  }

  static Operation projection(std::size_t n, std::size_t k, std::size_t i) {
    return from_function(n, k, [i](const Tuple& t) { return t[i]; }, "pi" + std::to_string(i + 1) + "_" + std::to_string(k));
  }

  std::size_t domain_size() const { return n_; }
  std::size_t arity() const { return k_; }
  const std::vector<Element>& table() const { return table_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  Element operator()(std::span<const Element> args) const { return table_[encode(args, n_)]; }
  Element operator()(std::initializer_list<Element> args) const {
    return (*this)(std::span<const Element>(args.begin(), args.size()));
  }
  Element at(std::uint64_t code) const { return table_[code]; }

  bool is_idempotent() const {
    for (Element a = 0; a < n_; ++a) {
      Tuple d(k_, a);
      if ((*this)(d) != a) return false;
    }
    return true;
  }

  // Applies the operation coordinatewise to k tuples of equal length.
  Tuple apply_columns(const std::vector<const Tuple*>& args) const {
    std::size_t len = args.empty() ? 0 : args[0]->size();
    Tuple out(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::uint64_t c = 0;
      for (const Tuple* a : args) c = c * n_ + (*a)[i];
      out[i] = table_[c];
    }
    return out;
  }

  bool operator==(const Operation& o) const { return n_ == o.n_ && k_ == o.k_ && table_ == o.table_; }

 private:
  std::size_t n_ = 1;
  std::size_t k_ = 1;
  std::vector<Element> table_;
  std::string name_;
};

inline std::string operation_table_string(const Operation& f) {
  std::string s;
  for (std::size_t i = 0; i < f.table().size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(f.table()[i]);
  }
  return s;
}

}  // namespace qcsp

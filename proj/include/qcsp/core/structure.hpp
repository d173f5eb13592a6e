#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsp/core/relation.hpp"

namespace qcsp {

struct NamedRelation {
  std::string name;
  Relation relation;
  bool operator==(const NamedRelation&) const = default;
};

struct NamedConstant {
  std::string name;
  Element element;
  bool operator==(const NamedConstant&) const = default;
};

class Structure {
 public:
  Structure() = default;
  explicit Structure(std::size_t domain_size) : n_(domain_size) {
    if (n_ == 0) throw InputError("domain must be nonempty");
  }

  std::size_t domain_size() const { return n_; }
  const std::vector<NamedRelation>& relations() const { return relations_; }
  const std::vector<NamedConstant>& constants() const { return constants_; }

  Structure& add_relation(std::string name, Relation r) {
    if (r.domain_size() != n_) throw InputError("relation " + name + " over wrong domain");
    if (find_relation(name)) throw InputError("duplicate relation " + name);
    relations_.push_back({std::move(name), std::move(r)});
    return *this;
  }

  Structure& add_constant(std::string name, Element e) {
    if (e >= n_) throw InputError("constant " + name + " outside domain");
    if (find_constant(name)) throw InputError("duplicate constant " + name);
    constants_.push_back({std::move(name), e});
    return *this;
  }

  // Names every element c0..c(n-1) that is not already named that way.
  Structure& add_all_constants() {
    for (Element e = 0; e < n_; ++e) {
      std::string name = "c" + std::to_string(e);
      if (!find_constant(name)) add_constant(name, e);
    }
    return *this;
  }

  std::optional<std::size_t> find_relation(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name == name) return i;
    return std::nullopt;
  }

  const Relation& relation(std::string_view name) const {
    auto i = find_relation(name);
    if (!i) throw InputError("unknown relation " + std::string(name));
    return relations_[*i].relation;
  }

  std::optional<Element> find_constant(std::string_view name) const {
    for (const auto& c : constants_)
      if (c.name == name) return c.element;
    return std::nullopt;
  }

  std::optional<std::string> constant_name(Element e) const {
    for (const auto& c : constants_)
      if (c.element == e) return c.name;
    return std::nullopt;
  }

  // Set of elements named by some constant.
  Mask named_elements() const {
    Mask m = 0;
    for (const auto& c : constants_) m |= Mask{1} << c.element;
    return m;
  }

  bool operator==(const Structure&) const = default;

 private:
  std::size_t n_ = 1;
  std::vector<NamedRelation> relations_;
  std::vector<NamedConstant> constants_;
};

}  // namespace qcsp

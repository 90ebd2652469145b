#pragma once

#include <map>
#include <optional>
#include <vector>

#include "entq/term.hpp"

namespace entq {

// A mapping from variables to terms kept in resolved form: no binding target
// is itself bound, so applying the substitution twice equals applying it
// once, and no variable maps to itself.
class Substitution {
 public:
  Substitution() = default;

  // Adds or confirms a binding. Returns false when v is already bound to a
  // different term (the existing binding is kept).
  bool bind(const Variable& v, const Term& t) {
    if (Term(v) == t) return true;
    auto [it, inserted] = bindings_.emplace(v, t);
    return inserted || it->second == t;
  }

  const Term* lookup(const Variable& v) const {
    auto it = bindings_.find(v);
    return it == bindings_.end() ? nullptr : &it->second;
  }

  Term apply(const Term& t) const {
    if (is_variable(t)) {
      if (const Term* bound = lookup(as_variable(t))) return *bound;
    }
    return t;
  }

  Atom apply(const Atom& a) const {
    Atom out{a.relation, {}};
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(apply(t));
    return out;
  }

  std::vector<Atom> apply(const std::vector<Atom>& atoms) const {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(apply(a));
    return out;
  }

  // True when every binding target is a constant.
  bool ground() const {
    for (const auto& [v, t] : bindings_) {
      if (!is_constant(t)) return false;
    }
    return true;
  }

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<Variable, Term>& bindings() const { return bindings_; }

  // Merges other's bindings into this one; false on any conflict.
  bool merge(const Substitution& other) {
    for (const auto& [v, t] : other.bindings_) {
      if (!bind(v, t)) return false;
    }
    return true;
  }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<Variable, Term> bindings_;
};

}  // namespace entq

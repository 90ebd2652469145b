#pragma once

#include <string>
#include <variant>
#include <vector>

namespace entq {

// A database or query constant. Compared as an exact string; integer-typed
// manifest columns are canonicalized to decimal form at load time so that
// string equality coincides with numeric equality.
struct Constant {
  std::string value;

  friend auto operator<=>(const Constant&, const Constant&) = default;
};

// A query variable. Identity is (scope, name); after a query set has been
// renamed apart the scope is the owning query's name, so variables never
// collide across queries.
struct Variable {
  std::string scope;
  std::string name;

  std::string qualified() const {
    return scope.empty() ? name : scope + "::" + name;
  }

  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, Constant>;

inline bool is_variable(const Term& t) { return std::holds_alternative<Variable>(t); }
inline bool is_constant(const Term& t) { return std::holds_alternative<Constant>(t); }
inline const Variable& as_variable(const Term& t) { return std::get<Variable>(t); }
inline const Constant& as_constant(const Term& t) { return std::get<Constant>(t); }

// A relation symbol applied to flat terms. Terms are variables or constants
// only; there are no nested function symbols in this language.
struct Atom {
  std::string relation;
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.relation != b.relation) return a.relation < b.relation;
    return a.args < b.args;
  }
};

// Renders a constant in query-text form: bare when it cannot be mistaken for
// a variable token, single-quoted otherwise.
std::string print_constant(const std::string& value);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);

}  // namespace entq

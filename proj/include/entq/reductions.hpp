#pragma once

#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entq/eql.hpp"
#include "entq/relstore.hpp"
#include "entq/substitution.hpp"

namespace entq {

struct Literal {
  int var = 0;  // 1-based
  bool positive = true;

  friend bool operator==(const Literal&, const Literal&) = default;
};

// A 3-CNF formula: exactly three literals per clause, repeats allowed.
struct Cnf3 {
  int num_vars = 0;
  std::vector<std::array<Literal, 3>> clauses;

  int num_clauses() const { return static_cast<int>(clauses.size()); }
};

struct DimacsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// DIMACS CNF. Clauses with fewer than three distinct literals are padded by
// repetition; clauses with more than three are rejected.
Cnf3 parse_dimacs(std::istream& in);
Cnf3 parse_dimacs_file(const std::filesystem::path& path);
std::string to_dimacs(const Cnf3& f);

// Test helper: exhaustive satisfiability over up to ~20 variables.
bool brute_force_sat(const Cnf3& f);
std::optional<std::vector<bool>> brute_force_model(const Cnf3& f);

struct Instance {
  QuerySet queries;
  Database db;
};

// Coordinating-set existence instance over a two-value database:
//   ClauseQuery : {C1(1) ... Ck(1)} C(1)  :- .
//   xi_Val      : {C(1)}            Ri(x) :- D(x).
//   xi_True     : {Ri(1)}  /\ {Cj(1) : xi in Cj}   :- .
//   xi_False    : {Ri(0)}  /\ {Cj(1) : ~xi in Cj}  :- .
// Head atom lists are deduplicated; they may be empty.
Instance gen_theorem1(const Cnf3& f);

// Satisfying assignment -> coordinating set of the gen_theorem1 instance.
// Throws std::invalid_argument when h does not satisfy f.
std::pair<std::set<std::string>, Substitution> assignment_to_set(
    const Cnf3& f, const std::vector<bool>& h);

// Coordinating set of the gen_theorem1 instance -> satisfying assignment.
// Variables with neither literal query in S default to true.
std::vector<bool> set_to_assignment(const Cnf3& f, const std::set<std::string>& S);

// Maximum-size instance (safe by construction): per variable
//   vj : { } Rj(xj) :- D(xj).
// and per clause C = l1 v l2 v l3 three blocking queries whose posts admit
// at most one of them in any coordinating set. The formula is satisfiable
// iff the maximum coordinating set has size k + m.
Instance gen_theorem2(const Cnf3& f);

// Mixed-coordination-attribute instance from the flights schema: one query
// per clause with a friend wildcard, two date-pinned literal queries per
// variable, and a selection gadget forcing one polarity per variable.
Instance gen_appendixB(const Cnf3& f);

// Query names used by the generators (also what set_to_assignment expects).
std::string theorem1_clause_query_name();
std::string theorem1_val_name(int var);
std::string theorem1_true_name(int var);
std::string theorem1_false_name(int var);

}  // namespace entq

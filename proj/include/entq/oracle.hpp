#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entq/eql.hpp"
#include "entq/relstore.hpp"
#include "entq/substitution.hpp"

namespace entq {

// Bounds for the exhaustive search. Exceeding a limit aborts with
// OracleLimitExceeded, never a wrong answer. max_combinations counts the
// candidate assignments actually examined (body groundings times
// leftover-variable assignments, summed over subsets).
struct OracleLimits {
  std::size_t max_queries = 16;
  std::uint64_t max_combinations = 2'000'000;
};

struct OracleLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checks the coordinating-set conditions directly: (1) h assigns a constant
// to every variable of the subset, (2) every grounded body atom is a
// database tuple, (3) the grounded postconditions are a subset of the
// grounded heads. h must bind variables to constants only.
bool is_coordinating(std::span<const EntangledQuery> subset, const Substitution& h,
                     const Database& db);
bool is_coordinating(const QuerySet& qs, const std::set<std::string>& members,
                     const Substitution& h, const Database& db);

struct CoordinatingSet {
  std::set<std::string> members;
  Substitution assignment;  // canonical: lexicographically least valid one
};

// Every nonempty subset that coordinates, with one canonical assignment
// each. Assignment values are drawn from the active domain: constants in
// the database plus constants in the queries. This loses nothing because
// body atoms can only ground to database tuples, and post/head atoms only
// need mutual equality, which any fixed value witnesses equally well.
std::vector<CoordinatingSet> find_all(const QuerySet& qs, const Database& db,
                                      const OracleLimits& limits = {});

// Size of a maximum coordinating set, 0 when none exists.
std::size_t max_size(const QuerySet& qs, const Database& db,
                     const OracleLimits& limits = {});

std::vector<Constant> active_domain(const QuerySet& qs, const Database& db);

}  // namespace entq

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entq/eql.hpp"
#include "entq/graphs.hpp"
#include "entq/relstore.hpp"
#include "entq/substitution.hpp"

namespace entq {

// How to pick among the coordinating sets the algorithm discovers. All
// criteria are deterministic.
struct SelectionCriterion {
  enum class Kind {
    MaxSize,      // larger wins, ties broken by smallest sorted name list
    FirstFound,   // first candidate in processing order
    MustInclude,  // max-size among candidates containing `required`
  };

  Kind kind = Kind::MaxSize;
  std::string required;

  static SelectionCriterion max_size() { return {}; }
  static SelectionCriterion first_found() { return {Kind::FirstFound, ""}; }
  static SelectionCriterion must_include(std::string name) {
    return {Kind::MustInclude, std::move(name)};
  }
};

struct UnsafeInput : std::runtime_error {
  explicit UnsafeInput(std::vector<std::string> queries);
  std::vector<std::string> unsafe_queries;
};

struct CandidateSet {
  std::set<std::string> members;
  Substitution assignment;
};

struct CoordinationResult {
  // Nullopt when no coordinating set exists (or none matches the criterion).
  std::optional<std::set<std::string>> members;
  Substitution assignment;
  std::uint64_t db_queries_issued = 0;
  // Every coordinating set discovered, in processing order.
  std::vector<CandidateSet> candidates;
};

struct EvalTimings {
  double graph_seconds = 0;  // graph construction + SCC + ordering
};

// Greatest fixpoint: drops every query some postcondition of which unifies
// with no head atom of any remaining query. Removed queries belong to no
// coordinating set, so this cannot change the answer.
QuerySet prune_unsatisfiable_posts(const QuerySet& qs);

// R(q): all queries in components reachable from q's component, q included.
std::set<std::string> reachable_set(const ComponentsDAG& dag, const std::string& q);

// The SCC coordination algorithm. Requires a safe query set (throws
// UnsafeInput otherwise): prunes unsatisfiable postconditions, condenses the
// coordination graph, processes components in reverse topological order
// combining each with its successors' combined queries, and grounds each
// combination with a single database query. Candidate member sets are
// exactly the reachable sets R(q); at most one database query is issued per
// component.
CoordinationResult evaluate(const QuerySet& qs, const Database& db,
                            const SelectionCriterion& sel = SelectionCriterion::max_size(),
                            EvalTimings* timings = nullptr);

}  // namespace entq

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entq/eql.hpp"

namespace entq {

// Directed multigraph over queries: one edge per unifiable (post atom,
// head atom) pair, self-loops included.
struct ExtendedCoordinationGraph {
  struct Edge {
    int from;      // query index
    int post_idx;  // postcondition atom index within `from`
    int to;        // query index
    int head_idx;  // head atom index within `to`
  };

  std::vector<std::string> vertices;  // query names, input order
  std::vector<Edge> edges;
};

// Parallel-edge collapse of the extended graph.
struct CoordinationGraph {
  std::vector<std::string> vertices;
  std::set<std::pair<int, int>> edges;  // (from, to) query indices

  int index_of(const std::string& name) const;
};

// Condensation of the coordination graph into strongly connected
// components. `order` lists component ids in reverse topological order:
// every successor of a component precedes it.
struct ComponentsDAG {
  std::vector<std::string> vertex_names;
  std::vector<std::vector<int>> components;  // vertex indices, ascending
  std::vector<int> component_of;             // vertex index -> component id
  std::set<std::pair<int, int>> edges;       // component ids
  std::vector<int> order;

  std::vector<std::vector<std::string>> component_names() const;
};

// Expects a renamed-apart query set.
ExtendedCoordinationGraph build_extended(const QuerySet& qs);

CoordinationGraph collapse(const ExtendedCoordinationGraph& g);

struct SafetyReport {
  struct Violation {
    std::string query;
    int post_idx;
    // (target query, head index) pairs the post atom unifies with.
    std::vector<std::pair<std::string, int>> targets;
  };

  std::vector<Violation> violations;

  bool safe() const { return violations.empty(); }
  std::vector<std::string> unsafe_queries() const;
};

// A query is unsafe when one of its postcondition atoms unifies with more
// than one head atom occurrence in the set.
SafetyReport check_safety(const ExtendedCoordinationGraph& g);

// True iff the graph is strongly connected as a single component covering
// all vertices. Defined for any graph; the notion is meaningful for safe
// sets, where it means every query's coordination forces everyone's.
bool check_uniqueness(const CoordinationGraph& g);

ComponentsDAG condense(const CoordinationGraph& g);

std::string to_dot(const ExtendedCoordinationGraph& g, const QuerySet& qs);
std::string to_dot(const CoordinationGraph& g);

}  // namespace entq

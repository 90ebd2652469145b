#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entq/consistent.hpp"
#include "entq/eql.hpp"
#include "entq/relstore.hpp"

namespace entq::bench {

struct EntangledWorkload {
  QuerySet queries;
  Database db;
};

// A chain of n queries: each one posts a coordination request on the next
// query's head, the last has no postconditions. Every body is satisfiable,
// so the algorithm issues one database query per list position. Safe and
// not unique.
EntangledWorkload gen_list(int n);

// Directed preferential-attachment graph: new nodes attach `edges_per_node`
// edges to existing nodes with probability proportional to degree. Each
// node's query posts a request on each successor's head over a per-target
// answer relation, which keeps the set safe. Same seed, same workload.
EntangledWorkload gen_scalefree(int n, std::uint64_t seed, int initial_clique = 2,
                                int edges_per_node = 2);

struct FlightsWorkload {
  consistent::Config cfg;
  std::vector<consistent::Query> queries;
  Database db;
};

// Flights table with table_size distinct (destination, day) combinations, a
// complete friendship graph, and all-wildcard queries, so every value
// satisfies every query and nothing is pruned in any step.
FlightsWorkload gen_flights(int num_queries, int table_size, std::uint64_t seed);

struct TimingRecord {
  std::string workload;
  int size = 0;
  int rep = 0;
  double total_ms = 0;
  double graph_ms = 0;  // graph construction + SCC + ordering
  std::uint64_t db_queries = 0;
  int result_size = 0;
};

enum class WorkloadKind { List, ScaleFree, Flights };
enum class FlightsVary { TableSize, QueryCount };

struct RunConfig {
  WorkloadKind kind = WorkloadKind::List;
  std::vector<int> sizes;
  int reps = 10;
  std::uint64_t seed = 1;
  // Flights only: which dimension `sizes` varies, and the fixed other one.
  FlightsVary vary = FlightsVary::TableSize;
  int flights_fixed = 50;
};

// Runs the matching algorithm (SCC coordination for list/scale-free,
// consistent coordination for flights) over each size, one discarded
// warm-up repetition per size. Wall-clock, monotonic.
std::vector<TimingRecord> run(const RunConfig& cfg);

std::string to_csv(const std::vector<TimingRecord>& records);

// Least-squares linear fit quality; 1.0 is a perfect fit.
double r_squared_linear(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace entq::bench

#include "entq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "entq/scc_coord.hpp"

namespace entq::bench {

EntangledWorkload gen_list(int n) {
  if (n < 1) throw std::invalid_argument("list size must be >= 1");
  EntangledWorkload w;

  DatabaseBuilder b;
  b.add_relation("T", 2, 0);
  for (int i = 1; i <= n; ++i) {
    b.add_row("T", {"L" + std::to_string(i), "V" + std::to_string(i)});
  }
  w.db = b.build();

  for (int i = 1; i <= n; ++i) {
    EntangledQuery q;
    q.name = "q" + std::to_string(i);
    Variable u{q.name, "u"};
    q.heads.push_back(Atom{"A" + std::to_string(i), {u}});
    // Key-pinned body: one tuple satisfies it.
    q.body.push_back(Atom{"T", {Constant{"L" + std::to_string(i)}, u}});
    if (i < n) {
      // Request on the next query's answer; the fresh variable is grounded
      // by the successor's body.
      q.post.push_back(Atom{"A" + std::to_string(i + 1), {Variable{q.name, "w"}}});
    }
    w.queries.queries.push_back(std::move(q));
  }
  return w;
}

EntangledWorkload gen_scalefree(int n, std::uint64_t seed, int initial_clique,
                                int edges_per_node) {
  if (n < 2) throw std::invalid_argument("scale-free size must be >= 2");
  if (initial_clique < 2 || initial_clique > n) {
    throw std::invalid_argument("initial clique must be in [2, n]");
  }
  std::mt19937_64 rng(seed);

  // adjacency: node -> successors (edges point from newer to older nodes).
  std::vector<std::vector<int>> succ(n);
  std::vector<int> degree(n, 0);
  for (int i = 0; i < initial_clique; ++i) {
    for (int j = 0; j < initial_clique; ++j) {
      if (i == j) continue;
      succ[i].push_back(j);
      ++degree[i];
      ++degree[j];
    }
  }
  for (int v = initial_clique; v < n; ++v) {
    const int targets = std::min(edges_per_node, v);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < targets) {
      std::uint64_t total = 0;
      for (int u = 0; u < v; ++u) total += degree[u];
      int pick = -1;
      if (total == 0) {
        pick = static_cast<int>(rng() % v);
      } else {
        std::uint64_t roll = rng() % total;
        for (int u = 0; u < v; ++u) {
          if (roll < static_cast<std::uint64_t>(degree[u])) {
            pick = u;
            break;
          }
          roll -= degree[u];
        }
      }
      if (std::find(chosen.begin(), chosen.end(), pick) != chosen.end()) continue;
      chosen.push_back(pick);
    }
    for (int u : chosen) {
      succ[v].push_back(u);
      ++degree[v];
      ++degree[u];
    }
  }

  EntangledWorkload w;
  DatabaseBuilder b;
  b.add_relation("T", 2, 0);
  for (int i = 0; i < n; ++i) {
    b.add_row("T", {"L" + std::to_string(i), "V" + std::to_string(i)});
  }
  w.db = b.build();

  for (int i = 0; i < n; ++i) {
    EntangledQuery q;
    q.name = "q" + std::to_string(i);
    Variable u{q.name, "u"};
    q.heads.push_back(Atom{"A" + std::to_string(i), {u}});
    q.body.push_back(Atom{"T", {Constant{"L" + std::to_string(i)}, u}});
    std::vector<int> targets = succ[i];
    std::sort(targets.begin(), targets.end());
    for (int t : targets) {
      q.post.push_back(
          Atom{"A" + std::to_string(t), {Variable{q.name, "w" + std::to_string(t)}}});
    }
    w.queries.queries.push_back(std::move(q));
  }
  return w;
}

FlightsWorkload gen_flights(int num_queries, int table_size, std::uint64_t seed) {
  if (num_queries < 1 || table_size < 1) {
    throw std::invalid_argument("flights workload sizes must be positive");
  }
  std::mt19937_64 rng(seed);

  FlightsWorkload w;
  w.cfg.subject_relation = "Fl";
  w.cfg.key_column = 0;
  w.cfg.attributes = {"destination", "day", "source", "airline"};
  w.cfg.coord_attributes = {"destination", "day"};
  w.cfg.friends_relation = "F";

  DatabaseBuilder b;
  b.add_relation("Fl", 5, 0);
  const char* sources[] = {"JFK", "LAX", "ORD", "SEA"};
  const char* airlines[] = {"AA", "UA", "DL"};
  // Distinct (destination, day) combination per tuple.
  int dests = 1;
  while (dests * dests < table_size) ++dests;
  for (int i = 0; i < table_size; ++i) {
    b.add_row("Fl", {"K" + std::to_string(i + 1),
                     "City" + std::to_string(i / dests),
                     "Day" + std::to_string(i % dests),
                     sources[rng() % 4], airlines[rng() % 3]});
  }
  b.add_relation("F", 2);
  for (int i = 1; i <= num_queries; ++i) {
    for (int j = 1; j <= num_queries; ++j) {
      if (i == j) continue;
      b.add_row("F", {"U" + std::to_string(i), "U" + std::to_string(j)});
    }
  }
  w.db = b.build();

  for (int i = 1; i <= num_queries; ++i) {
    consistent::Query q;
    q.user = "U" + std::to_string(i);
    q.own.assign(w.cfg.attributes.size(), std::nullopt);
    consistent::Partner p;
    p.wildcard = true;
    p.constraints.assign(w.cfg.attributes.size(), std::nullopt);
    q.partners.push_back(std::move(p));
    w.queries.push_back(std::move(q));
  }
  return w;
}

namespace {

const char* workload_name(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::List: return "list";
    case WorkloadKind::ScaleFree: return "scalefree";
    case WorkloadKind::Flights: return "flights";
  }
  return "?";
}

TimingRecord run_entangled(const EntangledWorkload& w) {
  using clock = std::chrono::steady_clock;
  EvalTimings t;
  const auto start = clock::now();
  CoordinationResult r = evaluate(w.queries, w.db, SelectionCriterion::max_size(), &t);
  const double total = std::chrono::duration<double>(clock::now() - start).count();
  TimingRecord rec;
  rec.total_ms = total * 1e3;
  rec.graph_ms = t.graph_seconds * 1e3;
  rec.db_queries = r.db_queries_issued;
  rec.result_size = r.members ? static_cast<int>(r.members->size()) : 0;
  return rec;
}

TimingRecord run_flights(const FlightsWorkload& w) {
  using clock = std::chrono::steady_clock;
  consistent::EvalTimings t;
  const auto start = clock::now();
  consistent::Result r = consistent::evaluate(w.queries, w.cfg, w.db, {}, &t);
  const double total = std::chrono::duration<double>(clock::now() - start).count();
  TimingRecord rec;
  rec.total_ms = total * 1e3;
  rec.graph_ms = t.graph_seconds * 1e3;
  rec.db_queries = r.db_queries;
  rec.result_size = static_cast<int>(r.member_keys.size());
  return rec;
}

}  // namespace

std::vector<TimingRecord> run(const RunConfig& cfg) {
  std::vector<TimingRecord> out;
  for (int size : cfg.sizes) {
    for (int rep = -1; rep < cfg.reps; ++rep) {  // rep -1 is the warm-up
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(std::max(rep, 0));
      TimingRecord rec;
      switch (cfg.kind) {
        case WorkloadKind::List:
          rec = run_entangled(gen_list(size));
          break;
        case WorkloadKind::ScaleFree:
          rec = run_entangled(gen_scalefree(size, seed));
          break;
        case WorkloadKind::Flights: {
          const int queries =
              cfg.vary == FlightsVary::QueryCount ? size : cfg.flights_fixed;
          const int table =
              cfg.vary == FlightsVary::TableSize ? size : cfg.flights_fixed;
          rec = run_flights(gen_flights(queries, table, seed));
          break;
        }
      }
      if (rep < 0) continue;
      rec.workload = workload_name(cfg.kind);
      rec.size = size;
      rec.rep = rep;
      out.push_back(rec);
    }
  }
  return out;
}

std::string to_csv(const std::vector<TimingRecord>& records) {
  std::ostringstream out;
  out << "workload,size,rep,total_ms,graph_ms,db_queries,result_size\n";
  for (const auto& r : records) {
    out << r.workload << "," << r.size << "," << r.rep << "," << r.total_ms << ","
        << r.graph_ms << "," << r.db_queries << "," << r.result_size << "\n";
  }
  return out.str();
}

double r_squared_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) throw std::invalid_argument("need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (syy == 0) return 1.0;  // constant data is a perfect line
  if (sxx == 0) throw std::invalid_argument("degenerate x values");
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace entq::bench

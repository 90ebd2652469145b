#include "entq/scc_coord.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>

#include "entq/oracle.hpp"
#include "entq/unify.hpp"

namespace entq {

UnsafeInput::UnsafeInput(std::vector<std::string> queries)
    : std::runtime_error("unsafe query set"), unsafe_queries(std::move(queries)) {}

QuerySet prune_unsatisfiable_posts(const QuerySet& qs) {
  std::vector<const EntangledQuery*> alive;
  for (const auto& q : qs.queries) alive.push_back(&q);

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<const EntangledQuery*> next;
    for (const EntangledQuery* q : alive) {
      bool satisfiable = true;
      for (const Atom& p : q->post) {
        bool matched = false;
        for (const EntangledQuery* r : alive) {
          for (const Atom& h : r->heads) {
            if (unifiable(p, h)) {
              matched = true;
              break;
            }
          }
          if (matched) break;
        }
        if (!matched) {
          satisfiable = false;
          break;
        }
      }
      if (satisfiable) {
        next.push_back(q);
      } else {
        changed = true;
      }
    }
    alive = std::move(next);
  }

  QuerySet out;
  for (const EntangledQuery* q : alive) out.queries.push_back(*q);
  return out;
}

std::set<std::string> reachable_set(const ComponentsDAG& dag, const std::string& q) {
  auto it = std::find(dag.vertex_names.begin(), dag.vertex_names.end(), q);
  if (it == dag.vertex_names.end()) {
    throw std::out_of_range("unknown query: " + q);
  }
  const int start = dag.component_of[it - dag.vertex_names.begin()];

  std::vector<std::vector<int>> succ(dag.components.size());
  for (const auto& [u, v] : dag.edges) succ[u].push_back(v);

  std::set<int> seen{start};
  std::vector<int> work{start};
  while (!work.empty()) {
    int c = work.back();
    work.pop_back();
    for (int next : succ[c]) {
      if (seen.insert(next).second) work.push_back(next);
    }
  }

  std::set<std::string> out;
  for (int c : seen) {
    for (int v : dag.components[c]) out.insert(dag.vertex_names[v]);
  }
  return out;
}

namespace {

bool better_candidate(const CandidateSet& a, const CandidateSet& b) {
  if (a.members.size() != b.members.size()) {
    return a.members.size() > b.members.size();
  }
  return a.members < b.members;  // lexicographically smallest sorted name list
}

}  // namespace

CoordinationResult evaluate(const QuerySet& input, const Database& db,
                            const SelectionCriterion& sel, EvalTimings* timings) {
  using clock = std::chrono::steady_clock;

  {
    const SafetyReport report = check_safety(build_extended(rename_apart(input)));
    if (!report.safe()) throw UnsafeInput(report.unsafe_queries());
  }

  CoordinationResult result;
  const auto graph_start = clock::now();
  const QuerySet qs = rename_apart(prune_unsatisfiable_posts(input));
  const ExtendedCoordinationGraph ext = build_extended(qs);
  const CoordinationGraph graph = collapse(ext);
  const ComponentsDAG dag = condense(graph);
  if (timings) {
    timings->graph_seconds =
        std::chrono::duration<double>(clock::now() - graph_start).count();
  }
  if (qs.empty()) return result;

  const std::vector<Constant> domain = active_domain(qs, db);

  // Head occurrences a post atom may target, per query index: own component
  // members (original atoms) are handled via the extended graph; successor
  // components contribute their combined heads.
  struct ComponentState {
    bool failed = false;
    CombinedQuery combined;
    std::optional<Substitution> grounding;
  };
  std::vector<ComponentState> states(dag.components.size());

  std::vector<std::vector<int>> succ(dag.components.size());
  for (const auto& [u, v] : dag.edges) succ[u].push_back(v);
  for (auto& s : succ) std::sort(s.begin(), s.end());

  for (int comp : dag.order) {
    ComponentState& state = states[comp];

    bool successor_failed = false;
    std::vector<CombinedQuery> successor_combined;
    for (int s : succ[comp]) {
      if (states[s].failed) {
        successor_failed = true;
        break;
      }
      successor_combined.push_back(states[s].combined);
    }
    if (successor_failed) {
      state.failed = true;
      continue;
    }

    std::vector<EntangledQuery> queries;
    for (int v : dag.components[comp]) queries.push_back(qs.queries[v]);

    // Safety makes the post-to-head matching unique: each post atom unifies
    // with exactly one head occurrence, found either inside this component
    // or among the successors' combined heads.
    bool matching_failed = false;
    std::vector<std::pair<Atom, Atom>> matching;
    for (const EntangledQuery& q : queries) {
      for (const Atom& p : q.post) {
        const Atom* target = nullptr;
        int hits = 0;
        for (const EntangledQuery& r : queries) {
          for (const Atom& h : r.heads) {
            if (unifiable(p, h)) {
              target = &h;
              ++hits;
            }
          }
        }
        for (const CombinedQuery& s : successor_combined) {
          for (const Atom& h : s.heads) {
            if (unifiable(p, h)) {
              target = &h;
              ++hits;
            }
          }
        }
        assert(hits <= 1 && "safety guarantees at most one matching head");
        if (!target) {
          // The statically matching head was specialized away by a successor
          // unifier; this candidate cannot coordinate.
          matching_failed = true;
          break;
        }
        matching.push_back({p, *target});
      }
      if (matching_failed) break;
    }
    if (matching_failed) {
      state.failed = true;
      continue;
    }

    std::optional<CombinedQuery> combined =
        combine(queries, successor_combined, matching);
    if (!combined) {
      state.failed = true;  // unification clash, no database query issued
      continue;
    }
    state.combined = std::move(*combined);

    ++result.db_queries_issued;
    std::optional<Substitution> grounding =
        first_grounding(db, state.combined.body, {});
    if (!grounding) {
      state.failed = true;
      continue;
    }
    state.grounding = std::move(grounding);

    // Assemble the ground assignment for every member variable.
    CandidateSet candidate;
    candidate.members = state.combined.members;
    bool assignable = true;
    for (const std::string& name : candidate.members) {
      for (const Variable& v : qs.at(name).variables()) {
        Term resolved = state.combined.unifier.apply(Term(v));
        if (is_variable(resolved)) {
          if (const Term* g = state.grounding->lookup(as_variable(resolved))) {
            resolved = *g;
          }
        }
        if (is_variable(resolved)) {
          // Variable untouched by body and unification; any domain value
          // satisfies the remaining (equality-only) conditions.
          if (domain.empty()) {
            assignable = false;
            break;
          }
          resolved = domain.front();
        }
        candidate.assignment.bind(v, resolved);
      }
      if (!assignable) break;
    }
    if (!assignable) {
      state.failed = true;
      continue;
    }
    result.candidates.push_back(std::move(candidate));
  }

  // Selection.
  const CandidateSet* chosen = nullptr;
  for (const CandidateSet& c : result.candidates) {
    if (sel.kind == SelectionCriterion::Kind::FirstFound) {
      chosen = &c;
      break;
    }
    if (sel.kind == SelectionCriterion::Kind::MustInclude &&
        !c.members.count(sel.required)) {
      continue;
    }
    if (!chosen || better_candidate(c, *chosen)) chosen = &c;
  }
  if (chosen) {
    result.members = chosen->members;
    result.assignment = chosen->assignment;
  }
  return result;
}

}  // namespace entq

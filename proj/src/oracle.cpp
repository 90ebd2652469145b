#include "entq/oracle.hpp"

#include <algorithm>

#include "entq/unify.hpp"

namespace entq {

bool is_coordinating(std::span<const EntangledQuery> subset, const Substitution& h,
                     const Database& db) {
  if (subset.empty()) throw std::invalid_argument("subset must be nonempty");
  if (!h.ground()) throw std::invalid_argument("assignment must be ground");

  // (1) every variable is assigned a value
  for (const EntangledQuery& q : subset) {
    for (const Variable& v : q.variables()) {
      if (!h.lookup(v)) return false;
    }
  }

  // (2) every grounded body atom appears in the database
  for (const EntangledQuery& q : subset) {
    for (const Atom& a : q.body) {
      const Relation* rel = db.find(a.relation);
      if (!rel || rel->arity != a.args.size()) return false;
      std::vector<Constant> row;
      row.reserve(a.args.size());
      for (const Term& t : a.args) row.push_back(as_constant(h.apply(t)));
      if (!rel->contains(row)) return false;
    }
  }

  // (3) grounded postconditions are a subset of grounded heads
  std::set<Atom> grounded_heads;
  for (const EntangledQuery& q : subset) {
    for (const Atom& a : q.heads) grounded_heads.insert(h.apply(a));
  }
  for (const EntangledQuery& q : subset) {
    for (const Atom& a : q.post) {
      if (!grounded_heads.count(h.apply(a))) return false;
    }
  }
  return true;
}

bool is_coordinating(const QuerySet& qs, const std::set<std::string>& members,
                     const Substitution& h, const Database& db) {
  std::vector<EntangledQuery> subset;
  for (const std::string& name : members) subset.push_back(qs.at(name));
  return is_coordinating(subset, h, db);
}

std::vector<Constant> active_domain(const QuerySet& qs, const Database& db) {
  std::set<Constant> domain;
  for (const Constant& c : db.constants()) domain.insert(c);
  for (const Constant& c : query_constants(qs)) domain.insert(c);
  return {domain.begin(), domain.end()};
}

namespace {

// Sound pre-filter: a grounded post can only equal a grounded head the post
// atom unifies with, so a subset where some post unifies with no head in the
// subset can never coordinate.
bool posts_covered(std::span<const EntangledQuery> subset) {
  for (const EntangledQuery& q : subset) {
    for (const Atom& p : q.post) {
      bool covered = false;
      for (const EntangledQuery& r : subset) {
        for (const Atom& head : r.heads) {
          if (unifiable(p, head)) {
            covered = true;
            break;
          }
        }
        if (covered) break;
      }
      if (!covered) return false;
    }
  }
  return true;
}

bool assignment_less(const Substitution& a, const Substitution& b) {
  // Same key set by construction (all variables of the subset).
  auto ia = a.bindings().begin();
  auto ib = b.bindings().begin();
  for (; ia != a.bindings().end() && ib != b.bindings().end(); ++ia, ++ib) {
    const std::string& va = as_constant(ia->second).value;
    const std::string& vb = as_constant(ib->second).value;
    if (va != vb) return va < vb;
  }
  return false;
}

struct SubsetSearch {
  const Database& db;
  const std::vector<Constant>& domain;
  std::uint64_t& used;
  std::uint64_t limit;

  // Returns the canonical (lexicographically least) valid assignment for the
  // subset, if any. Candidates are built from complete body groundings
  // extended over the active domain for variables the body never mentions.
  std::optional<Substitution> canonical_assignment(
      std::span<const EntangledQuery> subset) {
    std::vector<Atom> body;
    std::set<Variable> body_vars;
    for (const EntangledQuery& q : subset) {
      for (const Atom& a : q.body) {
        body.push_back(a);
        for (const Term& t : a.args) {
          if (is_variable(t)) body_vars.insert(as_variable(t));
        }
      }
    }
    std::vector<Variable> leftover;
    for (const EntangledQuery& q : subset) {
      for (const Variable& v : q.variables()) {
        if (!body_vars.count(v)) leftover.push_back(v);
      }
    }
    std::sort(leftover.begin(), leftover.end());
    leftover.erase(std::unique(leftover.begin(), leftover.end()), leftover.end());
    if (!leftover.empty() && domain.empty()) return std::nullopt;

    std::optional<Substitution> best;
    enumerate_groundings(db, body, {}, [&](const Substitution& grounding) {
      complete(subset, grounding, leftover, 0, best);
      return true;
    });
    return best;
  }

  void complete(std::span<const EntangledQuery> subset, const Substitution& partial,
                const std::vector<Variable>& leftover, std::size_t i,
                std::optional<Substitution>& best) {
    if (i == leftover.size()) {
      if (++used > limit) {
        throw OracleLimitExceeded("combination budget exceeded (limit " +
                                  std::to_string(limit) + ")");
      }
      if (is_coordinating(subset, partial, db)) {
        if (!best || assignment_less(partial, *best)) best = partial;
      }
      return;
    }
    for (const Constant& c : domain) {
      Substitution next = partial;
      next.bind(leftover[i], Term(c));
      complete(subset, next, leftover, i + 1, best);
    }
  }
};

}  // namespace

std::vector<CoordinatingSet> find_all(const QuerySet& input, const Database& db,
                                      const OracleLimits& limits) {
  if (input.size() > limits.max_queries) {
    throw OracleLimitExceeded("query count " + std::to_string(input.size()) +
                              " exceeds limit " + std::to_string(limits.max_queries));
  }
  const QuerySet qs = rename_apart(input);
  const std::vector<Constant> domain = active_domain(qs, db);
  const std::size_t n = qs.size();

  std::uint64_t combinations = 0;
  std::vector<CoordinatingSet> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<EntangledQuery> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) subset.push_back(qs.queries[i]);
    }
    if (!posts_covered(subset)) continue;

    SubsetSearch search{db, domain, combinations, limits.max_combinations};
    std::optional<Substitution> best = search.canonical_assignment(subset);
    if (best) {
      CoordinatingSet cs;
      for (const EntangledQuery& q : subset) cs.members.insert(q.name);
      cs.assignment = *best;
      out.push_back(std::move(cs));
    }
  }
  return out;
}

std::size_t max_size(const QuerySet& qs, const Database& db,
                     const OracleLimits& limits) {
  std::size_t best = 0;
  for (const CoordinatingSet& cs : find_all(qs, db, limits)) {
    best = std::max(best, cs.members.size());
  }
  return best;
}

}  // namespace entq

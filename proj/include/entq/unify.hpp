#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "entq/eql.hpp"
#include "entq/substitution.hpp"
#include "entq/term.hpp"

namespace entq {

// Positional unifiability test: same relation, same arity, and no position
// carrying two different constants. Pairwise only; transitive clashes are
// the mgu's job.
bool unifiable(const Atom& a, const Atom& b);

// Union-find over variables with at most one constant anchor per class.
// Terms are flat, so no occurs-check is needed. Class representatives are
// deterministic: a constant anchor wins, otherwise the lexicographically
// smallest scoped variable name.
class Unifier {
 public:
  // Each returns false on a constant clash; the unifier state stays valid
  // (already-merged classes remain merged).
  bool unify(const Term& a, const Term& b);
  bool unify_atoms(const Atom& a, const Atom& b);
  bool absorb(const Substitution& s);

  Term resolve(const Term& t) const;

  // Resolved, idempotent substitution over every variable seen so far.
  Substitution substitution() const;

 private:
  Variable find(const Variable& v) const;
  void touch(const Variable& v) const;

  // parent_ and anchors are mutated through path compression from const
  // lookups; the observable mapping never changes.
  mutable std::map<Variable, Variable> parent_;
  std::map<Variable, Constant> anchor_;  // keyed by class root
};

struct MguClash {
  Atom left;
  Atom right;
};

struct MguResult {
  std::optional<Substitution> subst;
  std::optional<MguClash> clash;

  bool ok() const { return subst.has_value(); }
};

// Most general unifier of positionally aligned atom pairs, on top of the
// bindings in base. Fails exactly on a (possibly transitive) constant clash;
// the failing pair is reported.
MguResult mgu(std::span<const std::pair<Atom, Atom>> constraints,
              const Substitution& base = {});

// A set of queries fused into one conjunctive query: unified heads,
// concatenated bodies, and the substitution that made the postconditions
// line up with the heads.
struct CombinedQuery {
  std::vector<Atom> heads;
  std::vector<Atom> body;
  std::set<std::string> members;
  Substitution unifier;
};

// Fuses `queries` with previously combined successor queries under the given
// post-to-head matching. Fails (nullopt) when the matching constraints or
// the successors' unifiers clash.
std::optional<CombinedQuery> combine(
    std::span<const EntangledQuery> queries,
    std::span<const CombinedQuery> successors,
    std::span<const std::pair<Atom, Atom>> matching);

}  // namespace entq

#include "entq/unify.hpp"

#include <algorithm>

namespace entq {

bool unifiable(const Atom& a, const Atom& b) {
  if (a.relation != b.relation || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (is_constant(a.args[i]) && is_constant(b.args[i]) &&
        as_constant(a.args[i]) != as_constant(b.args[i])) {
      return false;
    }
  }
  return true;
}

void Unifier::touch(const Variable& v) const { parent_.emplace(v, v); }

Variable Unifier::find(const Variable& v) const {
  touch(v);
  Variable root = v;
  while (true) {
    const Variable& p = parent_.at(root);
    if (p == root) break;
    root = p;
  }
  // Path compression.
  Variable cur = v;
  while (!(parent_.at(cur) == root)) {
    Variable next = parent_.at(cur);
    parent_.at(cur) = root;
    cur = next;
  }
  return root;
}

bool Unifier::unify(const Term& a, const Term& b) {
  if (is_constant(a) && is_constant(b)) return as_constant(a) == as_constant(b);
  if (is_constant(a)) return unify(b, a);

  const Variable ra = find(as_variable(a));
  if (is_constant(b)) {
    auto it = anchor_.find(ra);
    if (it != anchor_.end()) return it->second == as_constant(b);
    anchor_.emplace(ra, as_constant(b));
    return true;
  }

  const Variable rb = find(as_variable(b));
  if (ra == rb) return true;
  auto ia = anchor_.find(ra);
  auto ib = anchor_.find(rb);
  if (ia != anchor_.end() && ib != anchor_.end() && !(ia->second == ib->second)) {
    return false;
  }
  // Smaller qualified name becomes the root.
  const Variable& root = ra.qualified() <= rb.qualified() ? ra : rb;
  const Variable& child = ra.qualified() <= rb.qualified() ? rb : ra;
  parent_.at(child) = root;
  if (auto ic = anchor_.find(child); ic != anchor_.end()) {
    anchor_.emplace(root, ic->second);
    anchor_.erase(ic);
  }
  return true;
}

bool Unifier::unify_atoms(const Atom& a, const Atom& b) {
  if (a.relation != b.relation || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!unify(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool Unifier::absorb(const Substitution& s) {
  for (const auto& [v, t] : s.bindings()) {
    if (!unify(Term(v), t)) return false;
  }
  return true;
}

Term Unifier::resolve(const Term& t) const {
  if (!is_variable(t)) return t;
  Variable root = find(as_variable(t));
  if (auto it = anchor_.find(root); it != anchor_.end()) return it->second;
  return root;
}

Substitution Unifier::substitution() const {
  Substitution out;
  std::vector<Variable> vars;
  vars.reserve(parent_.size());
  for (const auto& [v, p] : parent_) vars.push_back(v);
  for (const Variable& v : vars) {
    Term target = resolve(Term(v));
    if (!(target == Term(v))) out.bind(v, target);
  }
  return out;
}

MguResult mgu(std::span<const std::pair<Atom, Atom>> constraints,
              const Substitution& base) {
  Unifier u;
  if (!u.absorb(base)) {
    return {std::nullopt, MguClash{{}, {}}};
  }
  for (const auto& [left, right] : constraints) {
    if (!u.unify_atoms(left, right)) {
      return {std::nullopt, MguClash{left, right}};
    }
  }
  return {u.substitution(), std::nullopt};
}

namespace {

void append_unique(std::vector<Atom>& out, std::set<Atom>& seen, const Atom& a) {
  if (seen.insert(a).second) out.push_back(a);
}

}  // namespace

std::optional<CombinedQuery> combine(
    std::span<const EntangledQuery> queries,
    std::span<const CombinedQuery> successors,
    std::span<const std::pair<Atom, Atom>> matching) {
  Unifier u;
  for (const CombinedQuery& s : successors) {
    if (!u.absorb(s.unifier)) return std::nullopt;
  }
  for (const auto& [post, head] : matching) {
    if (!u.unify_atoms(post, head)) return std::nullopt;
  }
  Substitution subst = u.substitution();

  CombinedQuery out;
  out.unifier = subst;
  std::set<Atom> seen_heads, seen_body;
  for (const EntangledQuery& q : queries) {
    out.members.insert(q.name);
    for (const Atom& h : q.heads) append_unique(out.heads, seen_heads, subst.apply(h));
    for (const Atom& b : q.body) append_unique(out.body, seen_body, subst.apply(b));
  }
  for (const CombinedQuery& s : successors) {
    out.members.insert(s.members.begin(), s.members.end());
    for (const Atom& h : s.heads) append_unique(out.heads, seen_heads, subst.apply(h));
    for (const Atom& b : s.body) append_unique(out.body, seen_body, subst.apply(b));
  }
  return out;
}

}  // namespace entq

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "entq/eql.hpp"
#include "entq/relstore.hpp"
#include "entq/substitution.hpp"

namespace entq::consistent {

// Application schema the consistent coordination algorithm is specialized
// to: one subject relation S whose non-key columns are named attributes, a
// subset of them being the coordination attributes, and one directed binary
// friends relation F where F(user, friend) holds.
struct Config {
  std::string subject_relation;
  std::size_t key_column = 0;
  std::vector<std::string> attributes;        // non-key columns, in order
  std::vector<std::string> coord_attributes;  // subset of attributes
  std::string friends_relation;
  std::string answer_relation = "R";

  std::size_t attribute_index(const std::string& name) const;
  // Column of the i-th attribute in the subject relation.
  std::size_t column_of(std::size_t attribute_idx) const {
    return attribute_idx < key_column ? attribute_idx : attribute_idx + 1;
  }
  bool is_coord(std::size_t attribute_idx) const;
  std::size_t arity() const { return attributes.size() + 1; }

  void validate(const Database& db) const;
};

// Per-attribute requirement: a pinned constant or "don't care" (nullopt).
using AttrTerm = std::optional<Constant>;

struct Partner {
  bool wildcard = false;   // coordinate with any friend from F
  std::string name;        // partner user name when !wildcard
  std::vector<AttrTerm> constraints;  // aligned with Config::attributes
};

struct Query {
  std::string user;
  std::vector<AttrTerm> own;  // aligned with Config::attributes
  std::vector<Partner> partners;

  const Partner* wildcard_partner() const;
};

struct Violation {
  std::string user;
  std::string attribute;
  int partner;  // index into partners
  std::string message;
};

// Definition check: on every coordination attribute the partner terms must
// equal the user's own term (same constant, or both "don't care" which
// translates to one shared variable); on every other attribute the partner
// terms must be don't-cares (distinct fresh variables).
std::vector<Violation> check_consistency(const Query& q, const Config& cfg);

struct InconsistentQueries : std::runtime_error {
  explicit InconsistentQueries(std::vector<Violation> violations);
  std::vector<Violation> violations;
};

// Translation to the entangled form:
//   {R(y1, p1), ...} R(x, User) :- S(x, a1, ..., ad), F(User, f), S(y1, ...), ...
// The F atom is present iff the query has a wildcard partner.
EntangledQuery to_entangled(const Query& q, const Config& cfg);
QuerySet to_entangled(std::span<const Query> qs, const Config& cfg);

using Value = std::vector<Constant>;  // one constant per coordination attribute

struct Options {
  std::vector<std::pair<std::string, std::vector<Value>>> per_query;  // user -> V(q)
  std::vector<Value> all;  // V(Q), sorted

  const std::vector<Value>* for_user(const std::string& user) const;
};

// V(q) per query via one distinct_values call each (own constants pinned,
// don't-cares free); V(Q) is their union.
Options compute_options(std::span<const Query> qs, const Config& cfg,
                        const Database& db, std::uint64_t* db_queries = nullptr);

struct PrunedGraph {
  std::vector<std::string> vertices;  // users with nonempty V(q), input order
  // (from, to): `from` names `to` as a constant partner.
  std::set<std::pair<std::string, std::string>> constant_edges;
  // (from, to): `from` has a wildcard partner and F(from, to) holds.
  std::set<std::pair<std::string, std::string>> wildcard_edges;
};

// One friends-list query per wildcard query is issued to build the edges.
PrunedGraph pruned_graph(std::span<const Query> qs, const Config& cfg,
                         const Database& db, const Options& options,
                         std::uint64_t* db_queries = nullptr);

struct ValueOutcome {
  Value value;
  std::vector<std::string> survivors;  // sorted; empty when cleaning emptied G_v
};

struct Result {
  std::optional<Value> value;
  std::map<std::string, Constant> member_keys;       // user -> subject key
  std::map<std::string, std::string> chosen_friend;  // wildcard member -> partner
  std::uint64_t db_queries = 0;
  std::vector<ValueOutcome> per_value;  // every v in V(Q), iteration order
  Options options;
};

struct EvalOptions {
  bool first_match = false;  // stop at the first nonempty cleaned subgraph
};

struct EvalTimings {
  double graph_seconds = 0;  // pruned-graph construction
};

// The consistent coordination algorithm: compute V(q) per query, build the
// pruned coordination graph, and for every v in V(Q) clean the induced
// subgraph G_v to a fixpoint, removing queries whose constant partners are
// gone or whose wildcard has no surviving friend. Returns the best surviving
// (v, G_v) — most members, ties broken by member list then value — with one
// final grounding query per member for its subject key.
Result evaluate(std::span<const Query> qs, const Config& cfg, const Database& db,
                const EvalOptions& opts = {}, EvalTimings* timings = nullptr);

// Ground assignment over to_entangled(members) induced by the result;
// validates against the coordinating-set checker.
Substitution build_assignment(const Result& result, std::span<const Query> qs,
                              const Config& cfg, const Database& db);

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& cfg);
std::vector<Query> queries_from_json(const nlohmann::json& j, const Config& cfg);
nlohmann::json queries_to_json(std::span<const Query> qs, const Config& cfg);
nlohmann::json result_to_json(const Result& r, const Config& cfg);

}  // namespace entq::consistent

#include "entq/consistent.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

namespace entq::consistent {

std::size_t Config::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == name) return i;
  }
  throw std::out_of_range("unknown attribute: " + name);
}

bool Config::is_coord(std::size_t attribute_idx) const {
  const std::string& name = attributes.at(attribute_idx);
  return std::find(coord_attributes.begin(), coord_attributes.end(), name) !=
         coord_attributes.end();
}

void Config::validate(const Database& db) const {
  const Relation& subject = db.at(subject_relation);
  if (subject.arity != arity()) {
    throw RelstoreError("subject relation " + subject_relation + " has arity " +
                        std::to_string(subject.arity) + ", expected " +
                        std::to_string(arity()));
  }
  if (key_column >= arity()) throw RelstoreError("key column out of range");
  if (subject.key_column != key_column) {
    throw RelstoreError("subject relation must declare column " +
                        std::to_string(key_column) + " as its key");
  }
  const Relation& friends = db.at(friends_relation);
  if (friends.arity != 2) {
    throw RelstoreError("friends relation " + friends_relation + " must be binary");
  }
  for (const std::string& a : coord_attributes) {
    attribute_index(a);  // throws on unknown
    if (std::count(coord_attributes.begin(), coord_attributes.end(), a) > 1) {
      throw RelstoreError("duplicate coordination attribute: " + a);
    }
  }
}

const Partner* Query::wildcard_partner() const {
  for (const Partner& p : partners) {
    if (p.wildcard) return &p;
  }
  return nullptr;
}

namespace {

void validate_shape(const Query& q, const Config& cfg) {
  if (q.own.size() != cfg.attributes.size()) {
    throw std::invalid_argument("query for " + q.user +
                                ": own constraints do not match attribute count");
  }
  int wildcards = 0;
  for (const Partner& p : q.partners) {
    if (p.constraints.size() != cfg.attributes.size()) {
      throw std::invalid_argument("query for " + q.user +
                                  ": partner constraints do not match attribute count");
    }
    if (p.wildcard) {
      ++wildcards;
    } else if (p.name.empty()) {
      throw std::invalid_argument("query for " + q.user + ": unnamed constant partner");
    }
  }
  if (wildcards > 1) {
    throw std::invalid_argument("query for " + q.user +
                                ": at most one friend-wildcard partner is allowed");
  }
}

std::string term_desc(const AttrTerm& t) {
  return t ? "'" + t->value + "'" : "don't-care";
}

}  // namespace

std::vector<Violation> check_consistency(const Query& q, const Config& cfg) {
  validate_shape(q, cfg);
  std::vector<Violation> out;
  for (std::size_t j = 0; j < cfg.attributes.size(); ++j) {
    const bool coord = cfg.is_coord(j);
    for (std::size_t i = 0; i < q.partners.size(); ++i) {
      const AttrTerm& own = q.own[j];
      const AttrTerm& partner = q.partners[i].constraints[j];
      if (coord) {
        if (own != partner) {
          out.push_back({q.user, cfg.attributes[j], static_cast<int>(i),
                         "coordination attribute must match the user's own term (" +
                             term_desc(own) + " vs " + term_desc(partner) + ")"});
        }
      } else if (partner.has_value()) {
        out.push_back({q.user, cfg.attributes[j], static_cast<int>(i),
                       "non-coordination attribute must be a fresh variable for "
                       "partners, got " +
                           term_desc(partner)});
      }
    }
  }
  return out;
}

InconsistentQueries::InconsistentQueries(std::vector<Violation> v)
    : std::runtime_error("queries are not consistent for the configured attributes"),
      violations(std::move(v)) {}

namespace {

Term own_term(const Query& q, const Config& cfg, std::size_t j) {
  if (q.own[j]) return *q.own[j];
  const std::string prefix = cfg.is_coord(j) ? "c_" : "s_";
  return Variable{q.user, prefix + cfg.attributes[j]};
}

Term partner_term(const Query& q, const Config& cfg, std::size_t partner_idx,
                  std::size_t j) {
  const AttrTerm& t = q.partners[partner_idx].constraints[j];
  if (t) return *t;
  if (cfg.is_coord(j)) {
    // Shared with the user's own term (Definition of coordinating attributes).
    return Variable{q.user, "c_" + cfg.attributes[j]};
  }
  return Variable{q.user, "p" + std::to_string(partner_idx + 1) + "_" + cfg.attributes[j]};
}

Atom subject_atom(const Config& cfg, const Term& key,
                  const std::function<Term(std::size_t)>& attr_term) {
  Atom a;
  a.relation = cfg.subject_relation;
  a.args.resize(cfg.arity(), Constant{""});
  a.args[cfg.key_column] = key;
  for (std::size_t j = 0; j < cfg.attributes.size(); ++j) {
    a.args[cfg.column_of(j)] = attr_term(j);
  }
  return a;
}

}  // namespace

EntangledQuery to_entangled(const Query& q, const Config& cfg) {
  validate_shape(q, cfg);
  EntangledQuery out;
  out.name = q.user;

  const Variable x{q.user, "x"};
  out.heads.push_back(Atom{cfg.answer_relation, {x, Constant{q.user}}});

  out.body.push_back(
      subject_atom(cfg, x, [&](std::size_t j) { return own_term(q, cfg, j); }));

  if (q.wildcard_partner() != nullptr) {
    out.body.push_back(Atom{cfg.friends_relation,
                            {Constant{q.user}, Variable{q.user, "f"}}});
  }

  for (std::size_t i = 0; i < q.partners.size(); ++i) {
    const Partner& p = q.partners[i];
    const Variable y{q.user, "y" + std::to_string(i + 1)};
    const Term who = p.wildcard ? Term(Variable{q.user, "f"}) : Term(Constant{p.name});
    out.post.push_back(Atom{cfg.answer_relation, {y, who}});
    out.body.push_back(subject_atom(
        cfg, y, [&](std::size_t j) { return partner_term(q, cfg, i, j); }));
  }
  return out;
}

QuerySet to_entangled(std::span<const Query> qs, const Config& cfg) {
  QuerySet out;
  for (const Query& q : qs) out.queries.push_back(to_entangled(q, cfg));
  return out;
}

const std::vector<Value>* Options::for_user(const std::string& user) const {
  for (const auto& [u, values] : per_query) {
    if (u == user) return &values;
  }
  return nullptr;
}

Options compute_options(std::span<const Query> qs, const Config& cfg,
                        const Database& db, std::uint64_t* db_queries) {
  Options out;
  std::vector<std::size_t> coord_columns;
  for (const std::string& a : cfg.coord_attributes) {
    coord_columns.push_back(cfg.column_of(cfg.attribute_index(a)));
  }
  std::set<Value> all;
  for (const Query& q : qs) {
    std::vector<std::pair<std::size_t, Constant>> filter;
    for (std::size_t j = 0; j < q.own.size(); ++j) {
      if (q.own[j]) filter.push_back({cfg.column_of(j), *q.own[j]});
    }
    std::vector<Value> values =
        distinct_values(db, cfg.subject_relation, coord_columns, filter);
    if (db_queries) ++*db_queries;
    all.insert(values.begin(), values.end());
    out.per_query.push_back({q.user, std::move(values)});
  }
  out.all.assign(all.begin(), all.end());
  return out;
}

PrunedGraph pruned_graph(std::span<const Query> qs, const Config& cfg,
                         const Database& db, const Options& options,
                         std::uint64_t* db_queries) {
  PrunedGraph g;
  std::set<std::string> vertex_set;
  for (const Query& q : qs) {
    const auto* values = options.for_user(q.user);
    if (values && !values->empty()) {
      g.vertices.push_back(q.user);
      vertex_set.insert(q.user);
    }
  }
  const std::size_t friend_col[] = {1};
  for (const Query& q : qs) {
    if (!vertex_set.count(q.user)) continue;
    for (const Partner& p : q.partners) {
      if (!p.wildcard) {
        if (vertex_set.count(p.name)) g.constant_edges.insert({q.user, p.name});
        continue;
      }
      // Friends list: F(user, friend) filtered on user, projected on friend.
      std::vector<Value> friends = distinct_values(
          db, cfg.friends_relation, std::span<const std::size_t>(friend_col, 1),
          {{0, Constant{q.user}}});
      if (db_queries) ++*db_queries;
      for (const auto& f : friends) {
        if (vertex_set.count(f[0].value)) {
          g.wildcard_edges.insert({q.user, f[0].value});
        }
      }
    }
  }
  return g;
}

namespace {

struct QueryInfo {
  std::vector<std::string> constant_partners;
  bool has_wildcard = false;
};

std::vector<std::string> clean_subgraph(const std::set<std::string>& gv,
                                        const std::map<std::string, QueryInfo>& info,
                                        const PrunedGraph& graph) {
  std::set<std::string> alive = gv;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = alive.begin(); it != alive.end();) {
      const QueryInfo& qi = info.at(*it);
      bool ok = true;
      for (const std::string& p : qi.constant_partners) {
        if (!alive.count(p) || !graph.constant_edges.count({*it, p})) {
          ok = false;
          break;
        }
      }
      if (ok && qi.has_wildcard) {
        ok = false;
        for (const std::string& f : alive) {
          if (graph.wildcard_edges.count({*it, f})) {
            ok = true;
            break;
          }
        }
      }
      if (ok) {
        ++it;
      } else {
        it = alive.erase(it);
        changed = true;
      }
    }
  }
  return {alive.begin(), alive.end()};
}

}  // namespace

Result evaluate(std::span<const Query> qs, const Config& cfg, const Database& db,
                const EvalOptions& opts, EvalTimings* timings) {
  using clock = std::chrono::steady_clock;
  cfg.validate(db);

  std::set<std::string> users;
  std::vector<Violation> violations;
  for (const Query& q : qs) {
    if (!users.insert(q.user).second) {
      throw std::invalid_argument("duplicate query for user " + q.user);
    }
    auto v = check_consistency(q, cfg);
    violations.insert(violations.end(), v.begin(), v.end());
  }
  if (!violations.empty()) throw InconsistentQueries(std::move(violations));

  Result result;
  result.options = compute_options(qs, cfg, db, &result.db_queries);

  const auto graph_start = clock::now();
  const PrunedGraph graph =
      pruned_graph(qs, cfg, db, result.options, &result.db_queries);
  if (timings) {
    timings->graph_seconds =
        std::chrono::duration<double>(clock::now() - graph_start).count();
  }

  std::map<std::string, QueryInfo> info;
  std::map<std::string, std::set<Value>> value_sets;
  for (const Query& q : qs) {
    QueryInfo qi;
    for (const Partner& p : q.partners) {
      if (p.wildcard) {
        qi.has_wildcard = true;
      } else {
        qi.constant_partners.push_back(p.name);
      }
    }
    info.emplace(q.user, std::move(qi));
    const auto* values = result.options.for_user(q.user);
    value_sets.emplace(q.user, std::set<Value>(values->begin(), values->end()));
  }

  std::optional<std::size_t> best;  // index into result.per_value
  for (const Value& v : result.options.all) {
    std::set<std::string> gv;
    for (const std::string& u : graph.vertices) {
      if (value_sets.at(u).count(v)) gv.insert(u);
    }
    ValueOutcome outcome{v, clean_subgraph(gv, info, graph)};
    result.per_value.push_back(outcome);
    if (outcome.survivors.empty()) continue;
    if (!best) {
      best = result.per_value.size() - 1;
    } else {
      const ValueOutcome& cur = result.per_value[*best];
      if (outcome.survivors.size() > cur.survivors.size() ||
          (outcome.survivors.size() == cur.survivors.size() &&
           outcome.survivors < cur.survivors)) {
        best = result.per_value.size() - 1;
      }
    }
    if (opts.first_match && best) break;
  }
  if (!best) return result;

  const ValueOutcome& chosen = result.per_value[*best];
  result.value = chosen.value;

  // One final grounding query per member pins the coordination attributes to
  // the chosen value and returns the member's subject key.
  std::map<std::string, const Query*> by_user;
  for (const Query& q : qs) by_user.emplace(q.user, &q);
  for (const std::string& u : chosen.survivors) {
    const Query& q = *by_user.at(u);
    const Variable x{u, "x"};
    Atom self = subject_atom(cfg, x, [&](std::size_t j) -> Term {
      if (q.own[j]) return *q.own[j];
      if (cfg.is_coord(j)) {
        // Pin to the chosen value.
        for (std::size_t k = 0; k < cfg.coord_attributes.size(); ++k) {
          if (cfg.coord_attributes[k] == cfg.attributes[j]) return chosen.value[k];
        }
      }
      return Variable{u, "s_" + cfg.attributes[j]};
    });
    std::vector<Atom> body{self};
    std::optional<Substitution> g = first_grounding(db, body, {});
    ++result.db_queries;
    if (!g) {
      throw std::logic_error("member " + u + " lost its witness tuple");
    }
    result.member_keys.emplace(u, as_constant(*g->lookup(x)));
  }

  // Deterministic wildcard partner choice: smallest surviving friend.
  std::set<std::string> members(chosen.survivors.begin(), chosen.survivors.end());
  for (const std::string& u : chosen.survivors) {
    if (!info.at(u).has_wildcard) continue;
    for (const std::string& f : members) {
      if (graph.wildcard_edges.count({u, f})) {
        result.chosen_friend.emplace(u, f);
        break;
      }
    }
  }
  return result;
}

Substitution build_assignment(const Result& result, std::span<const Query> qs,
                              const Config& cfg, const Database& db) {
  if (!result.value) throw std::invalid_argument("result has no coordinating set");
  Substitution h;
  const Relation& subject = db.at(cfg.subject_relation);

  std::map<std::string, const Query*> by_user;
  for (const Query& q : qs) by_user.emplace(q.user, &q);

  auto tuple_of = [&](const std::string& user) -> const std::vector<Constant>& {
    const auto* row = subject.find_by_key(result.member_keys.at(user));
    if (!row) throw std::logic_error("missing subject tuple for " + user);
    return *row;
  };

  for (const auto& [user, key] : result.member_keys) {
    const Query& q = *by_user.at(user);
    const std::vector<Constant>& own_tuple = tuple_of(user);
    h.bind(Variable{user, "x"}, key);
    for (std::size_t j = 0; j < cfg.attributes.size(); ++j) {
      if (q.own[j]) continue;
      const std::string prefix = cfg.is_coord(j) ? "c_" : "s_";
      h.bind(Variable{user, prefix + cfg.attributes[j]}, own_tuple[cfg.column_of(j)]);
    }
    for (std::size_t i = 0; i < q.partners.size(); ++i) {
      const Partner& p = q.partners[i];
      const std::string partner_user =
          p.wildcard ? result.chosen_friend.at(user) : p.name;
      h.bind(Variable{user, "y" + std::to_string(i + 1)},
             result.member_keys.at(partner_user));
      if (p.wildcard) h.bind(Variable{user, "f"}, Constant{partner_user});
      const std::vector<Constant>& partner_tuple = tuple_of(partner_user);
      for (std::size_t j = 0; j < cfg.attributes.size(); ++j) {
        if (p.constraints[j]) continue;
        if (cfg.is_coord(j)) continue;  // shared c_ variable, bound above
        h.bind(Variable{user, "p" + std::to_string(i + 1) + "_" + cfg.attributes[j]},
               partner_tuple[cfg.column_of(j)]);
      }
    }
  }
  return h;
}

namespace {

AttrTerm attr_from_json(const nlohmann::json& obj, const std::string& attr) {
  if (!obj.contains(attr) || obj[attr].is_null()) return std::nullopt;
  return Constant{obj[attr].get<std::string>()};
}

std::vector<AttrTerm> attrs_from_json(const nlohmann::json& obj, const Config& cfg) {
  std::vector<AttrTerm> out;
  for (const std::string& a : cfg.attributes) out.push_back(attr_from_json(obj, a));
  return out;
}

nlohmann::json attrs_to_json(const std::vector<AttrTerm>& terms, const Config& cfg) {
  nlohmann::json obj = nlohmann::json::object();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j]) obj[cfg.attributes[j]] = terms[j]->value;
  }
  return obj;
}

}  // namespace

Config config_from_json(const nlohmann::json& j) {
  Config cfg;
  cfg.subject_relation = j.at("subject").get<std::string>();
  cfg.key_column = j.value("key", 0u);
  cfg.attributes = j.at("attributes").get<std::vector<std::string>>();
  cfg.coord_attributes = j.at("coord").get<std::vector<std::string>>();
  cfg.friends_relation = j.at("friends").get<std::string>();
  cfg.answer_relation = j.value("answer", std::string("R"));
  return cfg;
}

nlohmann::json config_to_json(const Config& cfg) {
  return {{"subject", cfg.subject_relation},
          {"key", cfg.key_column},
          {"attributes", cfg.attributes},
          {"coord", cfg.coord_attributes},
          {"friends", cfg.friends_relation},
          {"answer", cfg.answer_relation}};
}

std::vector<Query> queries_from_json(const nlohmann::json& j, const Config& cfg) {
  std::vector<Query> out;
  for (const auto& jq : j.at("queries")) {
    Query q;
    q.user = jq.at("user").get<std::string>();
    q.own = attrs_from_json(jq.value("own", nlohmann::json::object()), cfg);
    if (jq.contains("partners")) {
      for (const auto& jp : jq["partners"]) {
        Partner p;
        if (jp.value("friend", false)) {
          p.wildcard = true;
        } else {
          p.name = jp.at("user").get<std::string>();
        }
        p.constraints =
            attrs_from_json(jp.value("constraints", nlohmann::json::object()), cfg);
        q.partners.push_back(std::move(p));
      }
    }
    validate_shape(q, cfg);
    out.push_back(std::move(q));
  }
  return out;
}

nlohmann::json queries_to_json(std::span<const Query> qs, const Config& cfg) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Query& q : qs) {
    nlohmann::json jq{{"user", q.user}, {"own", attrs_to_json(q.own, cfg)}};
    nlohmann::json partners = nlohmann::json::array();
    for (const Partner& p : q.partners) {
      nlohmann::json jp;
      if (p.wildcard) {
        jp["friend"] = true;
      } else {
        jp["user"] = p.name;
      }
      jp["constraints"] = attrs_to_json(p.constraints, cfg);
      partners.push_back(std::move(jp));
    }
    jq["partners"] = std::move(partners);
    arr.push_back(std::move(jq));
  }
  return {{"queries", std::move(arr)}};
}

nlohmann::json result_to_json(const Result& r, const Config& cfg) {
  nlohmann::json out;
  if (!r.value) {
    out["value"] = nullptr;
    out["members"] = nullptr;
  } else {
    nlohmann::json value = nlohmann::json::object();
    for (std::size_t k = 0; k < cfg.coord_attributes.size(); ++k) {
      value[cfg.coord_attributes[k]] = (*r.value)[k].value;
    }
    out["value"] = std::move(value);
    nlohmann::json members = nlohmann::json::object();
    for (const auto& [user, key] : r.member_keys) members[user] = key.value;
    out["members"] = std::move(members);
  }
  out["db_queries"] = r.db_queries;
  nlohmann::json candidates = nlohmann::json::array();
  for (const ValueOutcome& vo : r.per_value) {
    if (vo.survivors.empty()) continue;
    nlohmann::json value = nlohmann::json::object();
    for (std::size_t k = 0; k < cfg.coord_attributes.size(); ++k) {
      value[cfg.coord_attributes[k]] = vo.value[k].value;
    }
    candidates.push_back({{"value", std::move(value)}, {"size", vo.survivors.size()}});
  }
  out["candidates"] = std::move(candidates);
  return out;
}

}  // namespace entq::consistent

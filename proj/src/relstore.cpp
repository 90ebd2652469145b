#include "entq/relstore.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entq {

const Relation& Database::at(const std::string& name) const {
  const Relation* r = find(name);
  if (!r) throw RelstoreError("unknown relation: " + name);
  return *r;
}

std::vector<Constant> Database::constants() const {
  std::set<Constant> seen;
  for (const auto& [name, rel] : relations_) {
    for (const auto& row : rel.tuples) {
      seen.insert(row.begin(), row.end());
    }
  }
  return {seen.begin(), seen.end()};
}

namespace {

std::string canonicalize_cell(const std::string& cell, ColumnType type,
                              const std::string& relation) {
  if (type == ColumnType::Str) return cell;
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(cell.c_str(), &end, 10);
  if (errno != 0 || end == cell.c_str() || *end != '\0') {
    throw RelstoreError("relation " + relation + ": cell '" + cell +
                        "' is not an integer");
  }
  return std::to_string(v);
}

}  // namespace

DatabaseBuilder& DatabaseBuilder::add_relation(const std::string& name,
                                               std::size_t arity,
                                               std::optional<std::size_t> key_column,
                                               std::vector<ColumnType> types) {
  if (arity == 0) throw RelstoreError("relation " + name + ": arity must be positive");
  if (db_.relations_.count(name)) {
    throw RelstoreError("duplicate relation name: " + name);
  }
  if (key_column && *key_column >= arity) {
    throw RelstoreError("relation " + name + ": key column out of range");
  }
  if (types.empty()) types.assign(arity, ColumnType::Str);
  if (types.size() != arity) {
    throw RelstoreError("relation " + name + ": types length does not match arity");
  }
  Relation rel;
  rel.name = name;
  rel.arity = arity;
  rel.key_column = key_column;
  rel.types = std::move(types);
  db_.relations_.emplace(name, std::move(rel));
  return *this;
}

DatabaseBuilder& DatabaseBuilder::add_row(const std::string& relation,
                                          const std::vector<std::string>& cells) {
  auto it = db_.relations_.find(relation);
  if (it == db_.relations_.end()) {
    throw RelstoreError("unknown relation: " + relation);
  }
  Relation& rel = it->second;
  if (cells.size() != rel.arity) {
    std::ostringstream msg;
    msg << "relation " << relation << ": row has " << cells.size()
        << " cells, expected " << rel.arity;
    throw RelstoreError(msg.str());
  }
  std::vector<Constant> row;
  row.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    row.push_back(Constant{canonicalize_cell(cells[i], rel.types[i], relation)});
  }
  if (rel.index_.count(row)) return *this;  // set semantics
  if (rel.key_column) {
    const Constant& key = row[*rel.key_column];
    if (rel.key_index_.count(key)) {
      throw RelstoreError("relation " + relation + ": key-column violation on '" +
                          key.value + "'");
    }
    rel.key_index_.emplace(key, rel.tuples.size());
  }
  rel.index_.insert(row);
  rel.tuples.push_back(std::move(row));
  return *this;
}

Database load_database(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw RelstoreError("cannot open manifest: " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw RelstoreError("manifest parse error: " + std::string(e.what()));
  }

  DatabaseBuilder builder;
  const auto dir = manifest_path.parent_path();
  for (const auto& spec : manifest.at("relations")) {
    const std::string name = spec.at("name").get<std::string>();
    const std::size_t arity = spec.at("arity").get<std::size_t>();
    std::optional<std::size_t> key;
    if (spec.contains("key") && !spec["key"].is_null()) {
      key = spec["key"].get<std::size_t>();
    }
    std::vector<ColumnType> types;
    if (spec.contains("types")) {
      for (const auto& t : spec["types"]) {
        const std::string s = t.get<std::string>();
        if (s == "int") {
          types.push_back(ColumnType::Int);
        } else if (s == "str") {
          types.push_back(ColumnType::Str);
        } else {
          throw RelstoreError("relation " + name + ": unknown column type '" + s + "'");
        }
      }
    }
    builder.add_relation(name, arity, key, std::move(types));

    const std::string file = spec.at("file").get<std::string>();
    const auto csv_path = dir / file;
    std::ifstream csv(csv_path);
    if (!csv) throw RelstoreError("missing file: " + csv_path.string());
    std::string line;
    while (std::getline(csv, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
          cells.push_back(line.substr(start));
          break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      builder.add_row(name, cells);
    }
  }
  return builder.build();
}

namespace {

// Backtracking nested-loop join: atoms are matched left to right with
// binding propagation. Correctness, not join optimality, is the contract.
class GroundingSearch {
 public:
  GroundingSearch(const Database& db, std::span<const Atom> body,
                  const Substitution& seed,
                  const std::function<bool(const Substitution&)>& fn)
      : db_(db), body_(body), fn_(fn) {
    for (const auto& [v, t] : seed.bindings()) {
      if (!is_constant(t)) {
        throw RelstoreError("seed substitution must bind variables to constants");
      }
      bound_.emplace(v, as_constant(t));
    }
    for (const Atom& a : body_) {
      const Relation& rel = db_.at(a.relation);
      if (rel.arity != a.args.size()) {
        throw RelstoreError("arity mismatch on relation " + a.relation);
      }
    }
  }

  bool run() { return match(0); }

 private:
  bool emit() {
    Substitution result;
    for (const auto& [v, c] : bound_) result.bind(v, Term(c));
    return fn_(result);
  }

  // Returns false to stop the whole enumeration.
  bool match(std::size_t i) {
    if (i == body_.size()) return emit();
    const Atom& atom = body_[i];
    const Relation& rel = db_.at(atom.relation);

    bool all_bound = true;
    std::vector<const Constant*> want(atom.args.size(), nullptr);
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
      const Term& t = atom.args[j];
      if (is_constant(t)) {
        want[j] = &as_constant(t);
      } else if (auto it = bound_.find(as_variable(t)); it != bound_.end()) {
        want[j] = &it->second;
      } else {
        all_bound = false;
      }
    }

    if (all_bound) {
      std::vector<Constant> row;
      row.reserve(want.size());
      for (const Constant* c : want) row.push_back(*c);
      if (!rel.contains(row)) return true;
      return match(i + 1);
    }

    // Key lookup when the key column is already pinned.
    if (rel.key_column && want[*rel.key_column]) {
      const auto* row = rel.find_by_key(*want[*rel.key_column]);
      if (!row) return true;
      return try_row(i, atom, *row);
    }

    for (const auto& row : rel.tuples) {
      if (!try_row(i, atom, row)) return false;
    }
    return true;
  }

  bool try_row(std::size_t i, const Atom& atom, const std::vector<Constant>& row) {
    std::vector<Variable> fresh;
    bool ok = true;
    for (std::size_t j = 0; j < atom.args.size() && ok; ++j) {
      const Term& t = atom.args[j];
      if (is_constant(t)) {
        ok = as_constant(t) == row[j];
      } else {
        const Variable& v = as_variable(t);
        auto it = bound_.find(v);
        if (it != bound_.end()) {
          ok = it->second == row[j];
        } else {
          bound_.emplace(v, row[j]);
          fresh.push_back(v);
        }
      }
    }
    bool keep_going = ok ? match(i + 1) : true;
    for (const Variable& v : fresh) bound_.erase(v);
    return keep_going;
  }

  const Database& db_;
  std::span<const Atom> body_;
  const std::function<bool(const Substitution&)>& fn_;
  std::map<Variable, Constant> bound_;
};

}  // namespace

void enumerate_groundings(const Database& db, std::span<const Atom> body,
                          const Substitution& seed,
                          const std::function<bool(const Substitution&)>& fn) {
  GroundingSearch(db, body, seed, fn).run();
}

std::optional<Substitution> first_grounding(const Database& db,
                                            std::span<const Atom> body,
                                            const Substitution& seed) {
  std::optional<Substitution> result;
  enumerate_groundings(db, body, seed, [&](const Substitution& s) {
    result = s;
    return false;
  });
  return result;
}

std::vector<Substitution> all_groundings(const Database& db,
                                         std::span<const Atom> body,
                                         const Substitution& seed,
                                         std::size_t limit) {
  std::vector<Substitution> results;
  enumerate_groundings(db, body, seed, [&](const Substitution& s) {
    if (results.size() == limit) {
      throw GroundingLimitExceeded("more than " + std::to_string(limit) +
                                   " groundings");
    }
    results.push_back(s);
    return true;
  });
  return results;
}

std::vector<std::vector<Constant>> distinct_values(
    const Database& db, const std::string& relation,
    std::span<const std::size_t> columns,
    const std::vector<std::pair<std::size_t, Constant>>& filter) {
  const Relation& rel = db.at(relation);
  for (std::size_t c : columns) {
    if (c >= rel.arity) throw RelstoreError("column out of range for " + relation);
  }
  for (const auto& [c, v] : filter) {
    if (c >= rel.arity) throw RelstoreError("column out of range for " + relation);
  }
  std::vector<std::vector<Constant>> out;
  std::set<std::vector<Constant>> seen;
  for (const auto& row : rel.tuples) {
    bool match = true;
    for (const auto& [c, v] : filter) {
      if (row[c] != v) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    std::vector<Constant> proj;
    proj.reserve(columns.size());
    for (std::size_t c : columns) proj.push_back(row[c]);
    if (seen.insert(proj).second) out.push_back(std::move(proj));
  }
  return out;
}

}  // namespace entq

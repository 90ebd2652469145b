#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entq/substitution.hpp"
#include "entq/term.hpp"

namespace entq {

struct RelstoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by all_groundings when more results exist than the caller's limit;
// distinct from returning an empty or truncated list.
struct GroundingLimitExceeded : RelstoreError {
  using RelstoreError::RelstoreError;
};

enum class ColumnType { Str, Int };

struct Relation {
  std::string name;
  std::size_t arity = 0;
  std::optional<std::size_t> key_column;
  std::vector<ColumnType> types;  // one per column

  // Insertion order (first occurrence wins); duplicates dropped at load.
  std::vector<std::vector<Constant>> tuples;

  bool contains(const std::vector<Constant>& row) const {
    return index_.count(row) > 0;
  }

  // Valid only when key_column is set.
  const std::vector<Constant>* find_by_key(const Constant& key) const {
    auto it = key_index_.find(key);
    return it == key_index_.end() ? nullptr : &tuples[it->second];
  }

 private:
  friend class DatabaseBuilder;
  std::set<std::vector<Constant>> index_;
  std::map<Constant, std::size_t> key_index_;
};

// Immutable once built; safe for concurrent readers. All evaluation
// operations below are pure functions of (db, inputs).
class Database {
 public:
  const Relation* find(const std::string& name) const {
    auto it = relations_.find(name);
    return it == relations_.end() ? nullptr : &it->second;
  }

  const Relation& at(const std::string& name) const;

  const std::map<std::string, Relation>& relations() const { return relations_; }

  // Every constant appearing in some tuple, sorted and deduplicated.
  std::vector<Constant> constants() const;

 private:
  friend class DatabaseBuilder;
  std::map<std::string, Relation> relations_;
};

class DatabaseBuilder {
 public:
  DatabaseBuilder& add_relation(const std::string& name, std::size_t arity,
                                std::optional<std::size_t> key_column = {},
                                std::vector<ColumnType> types = {});

  // Cells are canonicalized per the column types; duplicate rows are dropped
  // and key-column collisions between distinct rows rejected.
  DatabaseBuilder& add_row(const std::string& relation,
                           const std::vector<std::string>& cells);

  Database build() { return std::move(db_); }

 private:
  Database db_;
};

// Loads a manifest of the form
//   {"relations":[{"name":"Flights","arity":2,"key":0,
//                  "types":["int","str"],"file":"flights.csv"}]}
// CSV files are headerless, comma-separated, UTF-8, resolved relative to the
// manifest's directory.
Database load_database(const std::filesystem::path& manifest_path);

// First ground extension of seed satisfying every body atom, or nullopt.
// Deterministic: atoms are matched left to right against tuples in stored
// order, so the witness is the first one in row order.
std::optional<Substitution> first_grounding(const Database& db,
                                            std::span<const Atom> body,
                                            const Substitution& seed = {});

// All distinct ground extensions. Throws GroundingLimitExceeded when more
// than `limit` exist.
std::vector<Substitution> all_groundings(const Database& db,
                                         std::span<const Atom> body,
                                         const Substitution& seed = {},
                                         std::size_t limit = 1'000'000);

// Backtracking enumeration core shared by the operations above. Invokes fn
// for every complete grounding; enumeration stops when fn returns false.
void enumerate_groundings(const Database& db, std::span<const Atom> body,
                          const Substitution& seed,
                          const std::function<bool(const Substitution&)>& fn);

// Distinct projections of tuples matching the filter (column -> constant),
// in first-seen row order.
std::vector<std::vector<Constant>> distinct_values(
    const Database& db, const std::string& relation,
    std::span<const std::size_t> columns,
    const std::vector<std::pair<std::size_t, Constant>>& filter = {});

}  // namespace entq

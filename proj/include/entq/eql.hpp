#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entq/relstore.hpp"
#include "entq/term.hpp"

namespace entq {

// An entangled query {P} H :- B. Postconditions are what the query needs
// from other queries' heads; heads are what it offers; the body is a
// conjunction over database relations.
struct EntangledQuery {
  std::string name;
  std::vector<Atom> post;
  std::vector<Atom> heads;
  std::vector<Atom> body;

  // Distinct variables in first-occurrence order (posts, heads, then body).
  std::vector<Variable> variables() const;
};

struct QuerySet {
  std::vector<EntangledQuery> queries;

  const EntangledQuery* find(const std::string& name) const;
  const EntangledQuery& at(const std::string& name) const;
  bool empty() const { return queries.empty(); }
  std::size_t size() const { return queries.size(); }
};

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg);
  int line;
  int col;
};

// Grammar:
//   query := '@' NAME '{' atoms? '}' atoms? ':-' atoms? '.'
//   atom  := IDENT '(' term (',' term)* ')'
// Tokens beginning with a lowercase letter are variables; capitalized
// identifiers, numerals and single-quoted strings are constants. '#' starts
// a line comment. Variables are scoped by the enclosing query's name.
// Relation arities must be consistent across the whole file.
QuerySet parse_queries(std::string_view text);
QuerySet parse_queries_file(const std::filesystem::path& path);

// Canonical printer; parse(print(qs)) == qs for parser-produced sets.
std::string print_query(const EntangledQuery& q);
std::string print_queries(const QuerySet& qs);

struct Diagnostic {
  std::string query;
  std::string code;
  std::string message;
};

struct ValidateOptions {
  // Reduction-compatibility mode: queries with empty head lists are legal.
  bool allow_empty_heads = false;
};

// Checks the query set against the database schema: body relations must be
// schema relations of matching arity, head/post relations must be answer
// relations (disjoint from the schema) of consistent arity. Returns
// diagnostics instead of throwing.
std::vector<Diagnostic> validate(const QuerySet& qs, const Database& db,
                                 const ValidateOptions& opts = {});

// Tags every variable's scope with its query's name so no variable is shared
// between two queries. Idempotent.
QuerySet rename_apart(QuerySet qs);

// Constants appearing anywhere in the query set, sorted and deduplicated.
std::vector<Constant> query_constants(const QuerySet& qs);

}  // namespace entq

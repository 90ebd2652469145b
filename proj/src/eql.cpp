#include "entq/eql.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace entq {

std::vector<Variable> EntangledQuery::variables() const {
  std::vector<Variable> out;
  std::set<Variable> seen;
  auto collect = [&](const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms) {
      for (const Term& t : a.args) {
        if (is_variable(t) && seen.insert(as_variable(t)).second) {
          out.push_back(as_variable(t));
        }
      }
    }
  };
  collect(post);
  collect(heads);
  collect(body);
  return out;
}

const EntangledQuery* QuerySet::find(const std::string& name) const {
  for (const auto& q : queries) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

const EntangledQuery& QuerySet::at(const std::string& name) const {
  const EntangledQuery* q = find(name);
  if (!q) throw std::out_of_range("no query named " + name);
  return *q;
}

ParseError::ParseError(int line_, int col_, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": " + msg),
      line(line_),
      col(col_) {}

namespace {

enum class TokKind { At, LBrace, RBrace, LParen, RParen, Comma, Dot, Implies, Word, Quoted, End };

struct Token {
  TokKind kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws_and_comments();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {TokKind::End, "", line, col};
    char c = text_[pos_];
    switch (c) {
      case '@': advance(); return {TokKind::At, "@", line, col};
      case '{': advance(); return {TokKind::LBrace, "{", line, col};
      case '}': advance(); return {TokKind::RBrace, "}", line, col};
      case '(': advance(); return {TokKind::LParen, "(", line, col};
      case ')': advance(); return {TokKind::RParen, ")", line, col};
      case ',': advance(); return {TokKind::Comma, ",", line, col};
      case '.': advance(); return {TokKind::Dot, ".", line, col};
      case ':':
        advance();
        if (pos_ < text_.size() && text_[pos_] == '-') {
          advance();
          return {TokKind::Implies, ":-", line, col};
        }
        throw ParseError(line, col, "expected ':-'");
      case '\'': {
        advance();
        std::string value;
        while (pos_ < text_.size() && text_[pos_] != '\'') {
          char d = text_[pos_];
          if (d == '\\' && pos_ + 1 < text_.size()) {
            advance();
            d = text_[pos_];
          }
          if (d == '\n') throw ParseError(line, col, "unterminated string");
          value.push_back(d);
          advance();
        }
        if (pos_ >= text_.size()) throw ParseError(line, col, "unterminated string");
        advance();  // closing quote
        return {TokKind::Quoted, value, line, col};
      }
      default:
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
          std::string word;
          while (pos_ < text_.size() &&
                 (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                  text_[pos_] == '_')) {
            word.push_back(text_[pos_]);
            advance();
          }
          return {TokKind::Word, word, line, col};
        }
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  QuerySet parse() {
    QuerySet qs;
    std::set<std::string> names;
    while (tok_.kind != TokKind::End) {
      EntangledQuery q = parse_query();
      if (!names.insert(q.name).second) {
        throw ParseError(tok_.line, tok_.col, "duplicate query name '" + q.name + "'");
      }
      qs.queries.push_back(std::move(q));
    }
    return qs;
  }

 private:
  void shift() { tok_ = lexer_.next(); }

  Token expect(TokKind kind, const char* what) {
    if (tok_.kind != kind) {
      throw ParseError(tok_.line, tok_.col, std::string("expected ") + what);
    }
    Token t = tok_;
    shift();
    return t;
  }

  EntangledQuery parse_query() {
    expect(TokKind::At, "'@'");
    Token name = expect(TokKind::Word, "query name");
    EntangledQuery q;
    q.name = name.text;
    expect(TokKind::LBrace, "'{'");
    if (tok_.kind != TokKind::RBrace) q.post = parse_atoms(q.name);
    expect(TokKind::RBrace, "'}'");
    if (tok_.kind != TokKind::Implies) q.heads = parse_atoms(q.name);
    expect(TokKind::Implies, "':-'");
    if (tok_.kind != TokKind::Dot) q.body = parse_atoms(q.name);
    expect(TokKind::Dot, "'.'");
    return q;
  }

  std::vector<Atom> parse_atoms(const std::string& scope) {
    std::vector<Atom> atoms;
    atoms.push_back(parse_atom(scope));
    while (tok_.kind == TokKind::Comma) {
      shift();
      atoms.push_back(parse_atom(scope));
    }
    return atoms;
  }

  Atom parse_atom(const std::string& scope) {
    Token rel = expect(TokKind::Word, "relation name");
    Atom atom;
    atom.relation = rel.text;
    expect(TokKind::LParen, "'('");
    if (tok_.kind != TokKind::RParen) {
      atom.args.push_back(parse_term(scope));
      while (tok_.kind == TokKind::Comma) {
        shift();
        atom.args.push_back(parse_term(scope));
      }
    }
    expect(TokKind::RParen, "')'");
    auto [it, inserted] = arities_.emplace(atom.relation, atom.args.size());
    if (!inserted && it->second != atom.args.size()) {
      throw ParseError(rel.line, rel.col,
                       "arity inconsistency for relation '" + atom.relation + "'");
    }
    return atom;
  }

  Term parse_term(const std::string& scope) {
    if (tok_.kind == TokKind::Quoted) {
      Term t = Constant{tok_.text};
      shift();
      return t;
    }
    Token word = expect(TokKind::Word, "term");
    unsigned char first = static_cast<unsigned char>(word.text.front());
    if (std::islower(first)) return Variable{scope, word.text};
    return Constant{word.text};
  }

  Lexer lexer_;
  Token tok_{TokKind::End, "", 0, 0};
  std::map<std::string, std::size_t> arities_;
};

std::string print_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(atoms[i]);
  }
  return out;
}

}  // namespace

QuerySet parse_queries(std::string_view text) { return Parser(text).parse(); }

QuerySet parse_queries_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open query file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_queries(buf.str());
}

std::string print_query(const EntangledQuery& q) {
  std::string out = "@" + q.name + " {" + print_atoms(q.post) + "}";
  if (!q.heads.empty()) out += " " + print_atoms(q.heads);
  out += " :-";
  if (!q.body.empty()) out += " " + print_atoms(q.body);
  out += ".";
  return out;
}

std::string print_queries(const QuerySet& qs) {
  std::string out;
  for (const auto& q : qs.queries) {
    out += print_query(q);
    out += "\n";
  }
  return out;
}

std::vector<Diagnostic> validate(const QuerySet& qs, const Database& db,
                                 const ValidateOptions& opts) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  std::map<std::string, std::size_t> answer_arity;

  for (const auto& q : qs.queries) {
    if (!names.insert(q.name).second) {
      out.push_back({q.name, "duplicate-name", "duplicate query name"});
    }
    if (q.heads.empty() && !opts.allow_empty_heads) {
      out.push_back({q.name, "empty-heads",
                     "query has no head atoms (enable reduction-compatibility mode "
                     "to allow this)"});
    }
    for (const Atom& a : q.body) {
      const Relation* rel = db.find(a.relation);
      if (!rel) {
        out.push_back({q.name, "unknown-body-relation",
                       "body relation '" + a.relation + "' is not in the database schema"});
      } else if (rel->arity != a.args.size()) {
        out.push_back({q.name, "body-arity",
                       "body atom " + to_string(a) + " does not match arity " +
                           std::to_string(rel->arity)});
      }
    }
    auto check_answer = [&](const Atom& a, const char* where) {
      if (db.find(a.relation)) {
        out.push_back({q.name, "schema-relation-in-answer",
                       std::string(where) + " atom " + to_string(a) +
                           " uses database relation '" + a.relation + "'"});
        return;
      }
      auto [it, inserted] = answer_arity.emplace(a.relation, a.args.size());
      if (!inserted && it->second != a.args.size()) {
        out.push_back({q.name, "answer-arity",
                       "answer relation '" + a.relation + "' used with arities " +
                           std::to_string(it->second) + " and " +
                           std::to_string(a.args.size())});
      }
    };
    for (const Atom& a : q.post) check_answer(a, "postcondition");
    for (const Atom& a : q.heads) check_answer(a, "head");
  }
  return out;
}

QuerySet rename_apart(QuerySet qs) {
  for (auto& q : qs.queries) {
    auto rescope = [&](std::vector<Atom>& atoms) {
      for (Atom& a : atoms) {
        for (Term& t : a.args) {
          if (is_variable(t)) {
            t = Variable{q.name, as_variable(t).name};
          }
        }
      }
    };
    rescope(q.post);
    rescope(q.heads);
    rescope(q.body);
  }
  return qs;
}

std::vector<Constant> query_constants(const QuerySet& qs) {
  std::set<Constant> seen;
  for (const auto& q : qs.queries) {
    for (const auto* atoms : {&q.post, &q.heads, &q.body}) {
      for (const Atom& a : *atoms) {
        for (const Term& t : a.args) {
          if (is_constant(t)) seen.insert(as_constant(t));
        }
      }
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace entq

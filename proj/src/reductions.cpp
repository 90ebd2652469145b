#include "entq/reductions.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace entq {

Cnf3 parse_dimacs(std::istream& in) {
  Cnf3 f;
  bool header_seen = false;
  int declared_clauses = 0;
  std::vector<int> current;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, cnf;
      ls >> p >> cnf >> f.num_vars >> declared_clauses;
      if (cnf != "cnf") throw DimacsError("expected 'p cnf' header");
      header_seen = true;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (current.empty()) continue;
        if (current.size() > 3) {
          throw DimacsError("clause with more than three literals");
        }
        while (current.size() < 3) current.push_back(current.back());
        std::array<Literal, 3> clause;
        for (int i = 0; i < 3; ++i) {
          int v = std::abs(current[i]);
          if (v > f.num_vars) throw DimacsError("literal out of range");
          clause[i] = Literal{v, current[i] > 0};
        }
        f.clauses.push_back(clause);
        current.clear();
      } else {
        current.push_back(lit);
      }
    }
  }
  if (!header_seen) throw DimacsError("missing 'p cnf' header");
  if (!current.empty()) throw DimacsError("clause not terminated by 0");
  (void)declared_clauses;  // tolerated when it disagrees with the body
  return f;
}

Cnf3 parse_dimacs_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DimacsError("cannot open " + path.string());
  return parse_dimacs(in);
}

std::string to_dimacs(const Cnf3& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  for (const auto& clause : f.clauses) {
    for (const Literal& l : clause) out << (l.positive ? l.var : -l.var) << " ";
    out << "0\n";
  }
  return out.str();
}

namespace {

bool satisfies(const Cnf3& f, const std::vector<bool>& h) {
  for (const auto& clause : f.clauses) {
    bool ok = false;
    for (const Literal& l : clause) {
      if (h[l.var - 1] == l.positive) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::optional<std::vector<bool>> brute_force_model(const Cnf3& f) {
  const int m = f.num_vars;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    std::vector<bool> h(m);
    for (int i = 0; i < m; ++i) h[i] = (bits >> i) & 1;
    if (satisfies(f, h)) return h;
  }
  return std::nullopt;
}

bool brute_force_sat(const Cnf3& f) { return brute_force_model(f).has_value(); }

std::string theorem1_clause_query_name() { return "ClauseQuery"; }
std::string theorem1_val_name(int var) { return "x" + std::to_string(var) + "_Val"; }
std::string theorem1_true_name(int var) { return "x" + std::to_string(var) + "_True"; }
std::string theorem1_false_name(int var) { return "x" + std::to_string(var) + "_False"; }

namespace {

Atom clause_atom(int j) {
  return Atom{"C" + std::to_string(j), {Constant{"1"}}};
}

Atom truth_atom(int var, bool value) {
  return Atom{"R" + std::to_string(var), {Constant{value ? "1" : "0"}}};
}

Database two_value_db() {
  DatabaseBuilder b;
  b.add_relation("D", 1);
  b.add_row("D", {"0"});
  b.add_row("D", {"1"});
  return b.build();
}

// Clause heads for the literal query of `var` with the given polarity,
// deduplicated: one atom per clause mentioning the literal.
std::vector<Atom> clause_heads(const Cnf3& f, int var, bool positive) {
  std::vector<Atom> heads;
  for (int j = 0; j < f.num_clauses(); ++j) {
    bool mentions = false;
    for (const Literal& l : f.clauses[j]) {
      if (l.var == var && l.positive == positive) {
        mentions = true;
        break;
      }
    }
    if (mentions) heads.push_back(clause_atom(j + 1));
  }
  return heads;
}

}  // namespace

Instance gen_theorem1(const Cnf3& f) {
  Instance inst{.queries = {}, .db = two_value_db()};

  EntangledQuery clause_query;
  clause_query.name = theorem1_clause_query_name();
  for (int j = 1; j <= f.num_clauses(); ++j) clause_query.post.push_back(clause_atom(j));
  clause_query.heads.push_back(Atom{"C", {Constant{"1"}}});
  inst.queries.queries.push_back(std::move(clause_query));

  for (int i = 1; i <= f.num_vars; ++i) {
    EntangledQuery val;
    val.name = theorem1_val_name(i);
    val.post.push_back(Atom{"C", {Constant{"1"}}});
    val.heads.push_back(Atom{"R" + std::to_string(i), {Variable{val.name, "x"}}});
    val.body.push_back(Atom{"D", {Variable{val.name, "x"}}});
    inst.queries.queries.push_back(std::move(val));

    EntangledQuery pos;
    pos.name = theorem1_true_name(i);
    pos.post.push_back(truth_atom(i, true));
    pos.heads = clause_heads(f, i, true);
    inst.queries.queries.push_back(std::move(pos));

    EntangledQuery neg;
    neg.name = theorem1_false_name(i);
    neg.post.push_back(truth_atom(i, false));
    neg.heads = clause_heads(f, i, false);
    inst.queries.queries.push_back(std::move(neg));
  }
  return inst;
}

std::pair<std::set<std::string>, Substitution> assignment_to_set(
    const Cnf3& f, const std::vector<bool>& h) {
  if (static_cast<int>(h.size()) != f.num_vars) {
    throw std::invalid_argument("assignment length does not match variable count");
  }
  if (!satisfies(f, h)) {
    throw std::invalid_argument("assignment does not satisfy the formula");
  }
  std::set<std::string> members{theorem1_clause_query_name()};
  Substitution subst;
  for (int i = 1; i <= f.num_vars; ++i) {
    members.insert(theorem1_val_name(i));
    members.insert(h[i - 1] ? theorem1_true_name(i) : theorem1_false_name(i));
    subst.bind(Variable{theorem1_val_name(i), "x"},
               Constant{h[i - 1] ? "1" : "0"});
  }
  return {std::move(members), std::move(subst)};
}

std::vector<bool> set_to_assignment(const Cnf3& f, const std::set<std::string>& S) {
  if (!S.count(theorem1_clause_query_name())) {
    throw std::invalid_argument(
        "a coordinating set of this instance must contain the clause query");
  }
  std::vector<bool> h(f.num_vars, true);  // unconstrained variables default true
  for (int i = 1; i <= f.num_vars; ++i) {
    const bool pos = S.count(theorem1_true_name(i)) > 0;
    const bool neg = S.count(theorem1_false_name(i)) > 0;
    if (pos && neg) {
      throw std::invalid_argument(
          "both polarities of x" + std::to_string(i) +
          " present; not a coordinating set of this instance");
    }
    if (neg) h[i - 1] = false;
  }
  if (!satisfies(f, h)) {
    throw std::invalid_argument("set does not induce a satisfying assignment");
  }
  return h;
}

Instance gen_theorem2(const Cnf3& f) {
  Instance inst{.queries = {}, .db = two_value_db()};

  for (int i = 1; i <= f.num_vars; ++i) {
    EntangledQuery q;
    q.name = "v" + std::to_string(i);
    q.heads.push_back(Atom{"R" + std::to_string(i), {Variable{q.name, "x"}}});
    q.body.push_back(Atom{"D", {Variable{q.name, "x"}}});
    inst.queries.queries.push_back(std::move(q));
  }

  for (int j = 0; j < f.num_clauses(); ++j) {
    const auto& clause = f.clauses[j];
    // Literal t is blocked unless literals before it are falsified.
    for (int t = 0; t < 3; ++t) {
      EntangledQuery q;
      q.name = "c" + std::to_string(j + 1) + "_" + std::to_string(t + 1);
      q.post.push_back(truth_atom(clause[t].var, clause[t].positive));
      for (int s = t - 1; s >= 0; --s) {
        q.post.push_back(truth_atom(clause[s].var, !clause[s].positive));
      }
      q.heads.push_back(clause_atom(j + 1));
      inst.queries.queries.push_back(std::move(q));
    }
  }
  return inst;
}

Instance gen_appendixB(const Cnf3& f) {
  Instance inst;

  DatabaseBuilder b;
  b.add_relation("Fl", 2, 0);
  b.add_row("Fl", {"F1", "1MAR"});
  b.add_row("Fl", {"F2", "2MAR"});
  b.add_relation("Fr", 2);
  for (int j = 0; j < f.num_clauses(); ++j) {
    for (const Literal& l : f.clauses[j]) {
      std::string lit_name = "X" + std::to_string(l.var) + (l.positive ? "" : "*");
      b.add_row("Fr", {"C" + std::to_string(j + 1), lit_name});
    }
  }
  inst.db = b.build();

  const Constant mar1{"1MAR"}, mar2{"2MAR"};

  // qC requires every clause to coordinate.
  EntangledQuery qc;
  qc.name = "qC";
  qc.heads.push_back(Atom{"R", {Variable{qc.name, "x"}, Constant{"C"}}});
  qc.body.push_back(Atom{"Fl", {Variable{qc.name, "x"}, mar1}});
  for (int j = 1; j <= f.num_clauses(); ++j) {
    Variable y{qc.name, "y" + std::to_string(j)};
    qc.post.push_back(Atom{"R", {y, Constant{"C" + std::to_string(j)}}});
    qc.body.push_back(Atom{"Fl", {y, mar1}});
  }
  inst.queries.queries.push_back(std::move(qc));

  // One query per clause, coordinating with any friend (= satisfying literal).
  for (int j = 1; j <= f.num_clauses(); ++j) {
    EntangledQuery q;
    q.name = "qC" + std::to_string(j);
    Variable x{q.name, "x"}, y{q.name, "y"}, fr{q.name, "f"}, d{q.name, "d"};
    q.post.push_back(Atom{"R", {y, fr}});
    q.heads.push_back(Atom{"R", {x, Constant{"C" + std::to_string(j)}}});
    q.body.push_back(Atom{"Fr", {Constant{"C" + std::to_string(j)}, fr}});
    q.body.push_back(Atom{"Fl", {x, mar1}});
    q.body.push_back(Atom{"Fl", {y, d}});
    inst.queries.queries.push_back(std::move(q));
  }

  // Literal queries pinned to opposite dates, plus the selection gadget that
  // lets only one polarity per variable coordinate.
  for (int i = 1; i <= f.num_vars; ++i) {
    const std::string pos_name = "X" + std::to_string(i);
    const std::string neg_name = "X" + std::to_string(i) + "*";
    const std::string sel_name = "S" + std::to_string(i);

    EntangledQuery pos;
    pos.name = "qX" + std::to_string(i);
    Variable px{pos.name, "x"}, py{pos.name, "y"};
    pos.post.push_back(Atom{"R", {py, Constant{sel_name}}});
    pos.heads.push_back(Atom{"R", {px, Constant{pos_name}}});
    pos.body.push_back(Atom{"Fl", {px, mar1}});
    pos.body.push_back(Atom{"Fl", {py, mar1}});
    inst.queries.queries.push_back(std::move(pos));

    EntangledQuery neg;
    neg.name = "qX" + std::to_string(i) + "s";
    Variable nx{neg.name, "x"}, ny{neg.name, "y"};
    neg.post.push_back(Atom{"R", {ny, Constant{sel_name}}});
    neg.heads.push_back(Atom{"R", {nx, Constant{neg_name}}});
    neg.body.push_back(Atom{"Fl", {nx, mar2}});
    neg.body.push_back(Atom{"Fl", {ny, mar2}});
    inst.queries.queries.push_back(std::move(neg));

    EntangledQuery sel;
    sel.name = "qS" + std::to_string(i);
    Variable sx{sel.name, "x"}, sy{sel.name, "y"},
        sd{sel.name, "d"}, sd2{sel.name, "d2"};
    sel.post.push_back(Atom{"R", {sy, Constant{"C"}}});
    sel.heads.push_back(Atom{"R", {sx, Constant{sel_name}}});
    sel.body.push_back(Atom{"Fl", {sx, sd}});
    sel.body.push_back(Atom{"Fl", {sy, sd2}});
    inst.queries.queries.push_back(std::move(sel));
  }
  return inst;
}

}  // namespace entq

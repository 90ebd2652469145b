#include "entq/term.hpp"

#include <cctype>

namespace entq {

namespace {

bool bare_constant_token(const std::string& v) {
  if (v.empty()) return false;
  unsigned char first = static_cast<unsigned char>(v.front());
  // Tokens starting with a lowercase letter lex as variables.
  if (!std::isupper(first) && !std::isdigit(first) && first != '_') return false;
  for (unsigned char c : v) {
    if (!std::isalnum(c) && c != '_') return false;
  }
  return true;
}

}  // namespace

std::string print_constant(const std::string& value) {
  if (bare_constant_token(value)) return value;
  std::string out = "'";
  for (char c : value) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string to_string(const Term& t) {
  if (is_variable(t)) return as_variable(t).name;
  return print_constant(as_constant(t).value);
}

std::string to_string(const Atom& a) {
  std::string out = a.relation + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(a.args[i]);
  }
  out += ")";
  return out;
}

}  // namespace entq

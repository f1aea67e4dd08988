#include "coalog/io.hpp"

#include "coalog/error.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace coalog {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string t = trim(raw);
    if (!t.empty()) out.push_back({number, std::move(t)});
    start = end + 1;
  }
  return out;
}

[[noreturn]] void fail(const Line& l, const std::string& msg) {
  throw ParseError("line " + std::to_string(l.number) + ": " + msg);
}

bool is_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'' && c != '.') return false;
  return true;
}

// `key: rest`, or nullopt when the line does not start with key.
std::optional<std::string> keyed(const Line& l, std::string_view key) {
  if (l.text.size() <= key.size() || l.text.compare(0, key.size(), key) != 0 || l.text[key.size()] != ':')
    return std::nullopt;
  return trim(std::string_view(l.text).substr(key.size() + 1));
}

std::vector<std::string> names(const Line& l, const std::string& list) {
  std::vector<std::string> out;
  std::istringstream in(list);
  for (std::string w; in >> w;) {
    if (!is_name(w)) fail(l, "bad name '" + w + "'");
    out.push_back(w);
  }
  return out;
}

FinSet name_set(const Line& l, std::vector<std::string> ns) {
  try {
    return FinSet(std::move(ns));
  } catch (const InvariantViolation&) {
    fail(l, "duplicate name");
  }
}

// Header (functor, element names) followed by `name -> value` lines, each
// name exactly once.
struct Table {
  FunctorExpr functor;
  FinSet set;
  std::vector<TValue> values;
};

Table parse_table(std::string_view text, const char* set_key, const char* prefix, const char* what) {
  const auto lines = content_lines(text);
  std::optional<FunctorExpr> functor;
  std::optional<FinSet> set;
  std::vector<std::optional<TValue>> values;
  for (const Line& l : lines) {
    if (auto rest = keyed(l, "functor")) {
      if (functor) fail(l, "second functor line");
      try {
        functor = parse_functor(*rest);
      } catch (const ParseError& e) {
        fail(l, e.what());
      }
      continue;
    }
    if (auto rest = keyed(l, set_key)) {
      if (set) fail(l, std::string("second ") + set_key + " line");
      set = name_set(l, names(l, *rest));
      values.assign(set->size(), std::nullopt);
      continue;
    }
    std::string body = l.text;
    if (*prefix) {
      auto rest = keyed(l, prefix);
      if (!rest) fail(l, std::string("expected '") + prefix + ": NAME -> VALUE'");
      body = *rest;
    }
    const auto arrow = body.find("->");
    if (arrow == std::string::npos) fail(l, "expected 'NAME -> VALUE'");
    if (!functor || !set) fail(l, std::string("the functor and ") + set_key + " lines must come first");
    const std::string name = trim(std::string_view(body).substr(0, arrow));
    const auto index = set->find(name);
    if (!index) fail(l, std::string("unknown ") + what + " '" + name + "'");
    if (values[*index]) fail(l, std::string(what) + " '" + name + "' given twice");
    try {
      values[*index] = parse_value(*functor, *set, std::string_view(body).substr(arrow + 2));
    } catch (const ParseError& e) {
      fail(l, e.what());
    } catch (const ShapeError& e) {
      throw ShapeError("line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  if (!functor) throw ParseError("missing 'functor:' line");
  if (!set) throw ParseError(std::string("missing '") + set_key + ":' line");
  Table t{*functor, *set, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) throw ParseError(std::string(what) + " '" + set->label(i) + "' has no line");
    t.values.push_back(*values[i]);
  }
  return t;
}

} // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Coalgebra parse_model(std::string_view text) {
  Table t = parse_table(text, "states", "", "state");
  return Coalgebra(std::move(t.functor), std::move(t.set), std::move(t.values));
}

Valuation parse_valuation(std::string_view text, const FinSet& states) {
  Valuation h;
  for (const Line& l : content_lines(text)) {
    const auto eq = l.text.find('=');
    if (eq == std::string::npos) fail(l, "expected 'VAR = {STATE, ...}'");
    const std::string var = trim(std::string_view(l.text).substr(0, eq));
    if (!is_name(var) || !std::isalpha(static_cast<unsigned char>(var[0]))) fail(l, "bad variable '" + var + "'");
    std::string set = trim(std::string_view(l.text).substr(eq + 1));
    if (set.size() < 2 || set.front() != '{' || set.back() != '}') fail(l, "expected a braced state list");
    Subset s(states.size());
    std::string inner = set.substr(1, set.size() - 2);
    std::istringstream in(inner);
    for (std::string item; std::getline(in, item, ',');) {
      const std::string name = trim(item);
      if (name.empty()) {
        if (trim(inner).empty()) break;
        fail(l, "empty state name");
      }
      const auto i = states.find(name);
      if (!i) throw ShapeError("line " + std::to_string(l.number) + ": unknown state '" + name + "'");
      s.set(*i);
    }
    if (!h.emplace(var, std::move(s)).second) fail(l, "variable '" + var + "' given twice");
  }
  return h;
}

std::string show_states(const Subset& s, const FinSet& states) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : members(s)) {
    out += (first ? "" : ", ") + states.label(i);
    first = false;
  }
  return out + "}";
}

std::string show_valuation(const Valuation& h, const FinSet& states) {
  std::string out;
  for (const auto& [var, s] : h) out += var + " = " + show_states(s, states) + "\n";
  return out;
}

LAlgebra parse_algebra(std::string_view text) {
  Table t = parse_table(text, "atoms", "dual", "atom");
  return LAlgebra::from_dual(t.functor, FinBA(t.set), t.values);
}

std::string show_algebra(const LAlgebra& alg) {
  const FinSet& atoms = alg.carrier().atoms();
  std::string out = "functor: " + alg.functor().str() + "\natoms:";
  for (std::size_t i = 0; i < atoms.size(); ++i) out += " " + atoms.label(i);
  out += "\n";
  for (std::size_t i = 0; i < atoms.size(); ++i)
    out += "dual: " + atoms.label(i) + " -> " + show_value(alg.dual_value(i), atoms) + "\n";
  return out;
}

} // namespace coalog

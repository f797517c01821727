#include "cbp/spec_parse.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "cbp/common.hpp"

namespace cbp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string strip_parens(std::string v) {
  v = trim(v);
  while (v.size() >= 2 && v.front() == '(' && v.back() == ')') v = trim(v.substr(1, v.size() - 2));
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw SpecError("empty numeric token");
  if (const auto caret = t.find('^'); caret != std::string::npos) {
    return std::pow(parse_number(t.substr(0, caret)), parse_number(t.substr(caret + 1)));
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw SpecError("malformed number '" + t + "'");
  return v;
}

SpecNode parse_spec(const std::string& spec) {
  SpecNode node;
  node.source = strip_parens(spec);
  const std::string& s = node.source;
  const auto colon = s.find(':');
  node.kind = trim(s.substr(0, colon));
  if (node.kind.empty()) throw SpecError("missing kind in spec '" + spec + "'");
  if (colon == std::string::npos) return node;

  std::string rest = s.substr(colon + 1);
  int depth = 0;
  std::string cur;
  auto flush = [&] {
    const std::string item = trim(cur);
    cur.clear();
    if (item.empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw SpecError("token '" + item + "' in '" + spec + "' lacks '='");
    node.params.emplace_back(trim(item.substr(0, eq)), strip_parens(item.substr(eq + 1)));
  };
  for (char c : rest) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw SpecError("unbalanced ')' in '" + spec + "'");
    if (c == ',' && depth == 0)
      flush();
    else
      cur.push_back(c);
  }
  if (depth != 0) throw SpecError("unbalanced '(' in '" + spec + "'");
  flush();
  return node;
}

bool SpecNode::has(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return true;
  return false;
}

const std::string& SpecNode::text(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw SpecError("spec '" + source + "' is missing '" + key + "'");
}

std::string SpecNode::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double SpecNode::number(const std::string& key) const {
  try {
    return parse_number(text(key));
  } catch (const SpecError& e) {
    throw SpecError("in '" + source + "', key '" + key + "': " + e.what());
  }
}

double SpecNode::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int SpecNode::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw SpecError("key '" + key + "' in '" + source + "' must be an integer");
  return static_cast<int>(v);
}

void SpecNode::require_only(std::initializer_list<const char*> keys) const {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) throw SpecError("unexpected token '" + k + "=" + v + "' in '" + source + "'");
  }
}

}  // namespace cbp

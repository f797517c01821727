#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace cbp {

/// One parsed `kind:key=value,...` token of the spec mini-language. Values may be
/// nested specs wrapped in parentheses, e.g. `mollify:base=(clq:n=4,q=4),width=0.05`.
struct SpecNode {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
  std::string source;

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  /// Numeric value; accepts `4e6`, `2^20`, `0.05`.
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  void require_only(std::initializer_list<const char*> keys) const;
};

SpecNode parse_spec(const std::string& spec);
double parse_number(const std::string& token);
/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace cbp

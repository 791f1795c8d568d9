#include "mathlex/doc_filter.hpp"

#include <istream>

#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

const std::vector<FilterRule>& default_filter_rules() {
  static const std::vector<FilterRule> rules = {
      {FilterRule::Kind::Prefix, "list of", "meta-article: list"},
      {FilterRule::Kind::Prefix, "category:", "meta-article: category"},
      {FilterRule::Kind::Prefix, "book:", "book"},
      {FilterRule::Kind::Equals, "books", "book"},
  };
  return rules;
}

FilterDecision filter_document(const Document& doc, const std::vector<FilterRule>& rules) {
  const std::string title = text::to_lower(text::trim(doc.title));
  for (const auto& rule : rules) {
    const std::string pattern = text::to_lower(rule.pattern);
    bool hit = false;
    switch (rule.kind) {
      case FilterRule::Kind::Prefix:
        hit = title.rfind(pattern, 0) == 0;
        break;
      case FilterRule::Kind::Equals:
        hit = title == pattern;
        break;
      case FilterRule::Kind::Contains:
        hit = title.find(pattern) != std::string::npos;
        break;
    }
    if (hit) return {false, rule.reason};
  }
  return {true, {}};
}

std::vector<FilterRule> parse_filter_rules(std::istream& in) {
  std::vector<FilterRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.rfind("# ", 0) == 0) continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 3) throw ParseError("expected '<kind>\\t<pattern>\\t<reason>'", line_no);
    FilterRule rule;
    if (cols[0] == "prefix") {
      rule.kind = FilterRule::Kind::Prefix;
    } else if (cols[0] == "equals") {
      rule.kind = FilterRule::Kind::Equals;
    } else if (cols[0] == "contains") {
      rule.kind = FilterRule::Kind::Contains;
    } else {
      throw ParseError("unknown filter rule kind '" + cols[0] + "'", line_no);
    }
    rule.pattern = cols[1];
    rule.reason = cols[2];
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace mathlex

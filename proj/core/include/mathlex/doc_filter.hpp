#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mathlex/corpus.hpp"

namespace mathlex {

struct FilterRule {
  enum class Kind { Prefix, Equals, Contains };

  Kind kind = Kind::Prefix;
  std::string pattern;  // compared against the lowercased title
  std::string reason;

  friend bool operator==(const FilterRule&, const FilterRule&) = default;
};

struct FilterDecision {
  bool keep = true;
  std::string reason;  // empty when kept
};

// Meta-article and book rules for encyclopedia-style corpora.
const std::vector<FilterRule>& default_filter_rules();

FilterDecision filter_document(const Document& doc, const std::vector<FilterRule>& rules);

// Rule file: "<prefix|equals|contains>\t<pattern>\t<reason>" per line; blank
// lines and lines starting with "# " are ignored.
std::vector<FilterRule> parse_filter_rules(std::istream& in);

}  // namespace mathlex

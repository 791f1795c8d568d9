#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mathlex {

// One rewrite rule for a LaTeX math command. `replacement` may reference the
// command's brace arguments as #1..#9; `arity` says how many are consumed.
struct MathRule {
  std::string command;  // without the backslash, e.g. "mathbb"
  std::size_t arity = 0;
  std::string replacement;

  friend bool operator==(const MathRule&, const MathRule&) = default;
};

// Ordered; the first rule whose command matches wins.
using MathRuleTable = std::vector<MathRule>;

const MathRuleTable& default_math_rules();

// Rule file: one rule per line, "<pattern>\t<replacement>", where pattern is
// a command with optional argument placeholders (e.g. "\mathbb{#1}").
// Blank lines and lines starting with '#' followed by a space are ignored.
MathRuleTable parse_math_rules(std::istream& in);
MathRule parse_math_rule(std::string_view pattern, std::string_view replacement);

// Rewrites the interior of a math environment into plain text: table rules
// are applied, unknown commands are dropped (their arguments stay), braces
// vanish, '^' and '_' are kept, whitespace is collapsed. The result never
// contains '\', '{' or '}'. Throws NormalizationError on unbalanced braces.
std::string plaintextify_math(std::string_view fragment,
                              const MathRuleTable& rules = default_math_rules());

// Removes Markdown markup (headers, emphasis, links, wiki-links, code fences)
// and plaintextifies inline math ($...$, $$...$$, \(...\), \[...\]).
// Best-effort: malformed markup is passed through. Idempotent.
std::string strip_markdown(std::string_view source,
                           const MathRuleTable& rules = default_math_rules());

// Converts LaTeX prose to plain text: comments and environment delimiters are
// dropped, math is plaintextified, text-mode commands keep their arguments.
std::string strip_latex(std::string_view source, const MathRuleTable& rules = default_math_rules());

// A headword-bearing definition environment found in LaTeX source.
struct LatexDefinition {
  std::string headword;
  std::string text;     // plain text of the environment body
  std::size_t ordinal;  // 0-based index among definition environments

  friend bool operator==(const LatexDefinition&, const LatexDefinition&) = default;
};

// Finds \begin{definition}...\end{definition} (also "defn" and "dfn")
// environments. The headword is the first \demph, \emph, \textbf or \textit
// argument in the body; environments without one are skipped.
std::vector<LatexDefinition> find_latex_definitions(
    std::string_view source, const MathRuleTable& rules = default_math_rules());

}  // namespace mathlex

#include "mathlex/markup.hpp"

#include <cctype>
#include <istream>
#include <optional>
#include <set>

#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string collapse_whitespace(std::string_view s) { return text::join(text::split_whitespace(s), " "); }

// Checks brace balance, ignoring escaped braces.
bool braces_balanced(std::string_view s) {
  long depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth < 0) return false;
  }
  return depth == 0;
}

// Returns the index one past the '}' matching the '{' at `open`.
std::size_t match_brace(std::string_view s, std::size_t open) {
  long depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

std::string read_command_name(std::string_view s, std::size_t& i) {
  std::size_t start = i;
  while (i < s.size() && is_letter(s[i])) ++i;
  std::string name(s.substr(start, i - start));
  if (i < s.size() && s[i] == '*') ++i;
  return name;
}

// Shared output buffer that keeps word-like replacements from fusing with
// adjacent letters ("\alpha\beta" -> "alpha beta").
class Output {
 public:
  void literal(char c) {
    if (word_tail_ && is_alnum(c)) out_.push_back(' ');
    word_tail_ = false;
    out_.push_back(c);
  }

  void text(std::string_view s) {
    word_tail_ = false;
    out_.append(s);
  }

  void word(std::string_view s) {
    if (s.empty()) return;
    if (!out_.empty() && is_alnum(out_.back()) && is_alnum(s.front())) out_.push_back(' ');
    out_.append(s);
    word_tail_ = is_alnum(s.back());
  }

  void space() {
    word_tail_ = false;
    out_.push_back(' ');
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool word_tail_ = false;
};

class MathConverter {
 public:
  explicit MathConverter(const MathRuleTable& rules) : rules_(rules) {}

  std::string convert(std::string_view s) {
    Output out;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c == '\\') {
        command(s, i, out);
      } else if (c == '{') {
        std::size_t end = match_brace(s, i);
        out.text(convert(s.substr(i + 1, end - i - 2)));
        i = end;
      } else if (c == '~') {
        out.space();
        ++i;
      } else {
        out.literal(c);
        ++i;
      }
    }
    return out.take();
  }

 private:
  const MathRule* find_rule(std::string_view name) const {
    for (const auto& r : rules_) {
      if (r.command == name) return &r;
    }
    return nullptr;
  }

  // Reads one macro argument starting at i: a brace group, a command, or a
  // single character.
  std::string argument(std::string_view s, std::size_t& i) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size() || s[i] == '}') return {};
    if (s[i] == '{') {
      std::size_t end = match_brace(s, i);
      std::string arg = convert(s.substr(i + 1, end - i - 2));
      i = end;
      return arg;
    }
    if (s[i] == '\\') {
      Output out;
      command(s, i, out);
      return out.take();
    }
    return std::string(1, s[i++]);
  }

  void command(std::string_view s, std::size_t& i, Output& out) {
    ++i;  // backslash
    if (i >= s.size()) return;
    if (!is_letter(s[i])) {
      symbol(s[i++], out);
      return;
    }
    std::string name = read_command_name(s, i);
    const MathRule* rule = find_rule(name);
    if (rule == nullptr) return;  // dropped; any brace group that follows stays as content
    std::vector<std::string> args;
    for (std::size_t k = 0; k < rule->arity; ++k) args.push_back(argument(s, i));
    std::string rendered;
    for (std::size_t p = 0; p < rule->replacement.size(); ++p) {
      const char rc = rule->replacement[p];
      if (rc == '#' && p + 1 < rule->replacement.size() && rule->replacement[p + 1] >= '1' &&
          rule->replacement[p + 1] <= '9') {
        std::size_t idx = static_cast<std::size_t>(rule->replacement[p + 1] - '1');
        if (idx < args.size()) rendered += args[idx];
        ++p;
      } else {
        rendered.push_back(rc);
      }
    }
    if (rule->arity == 0) {
      out.word(rendered);
    } else {
      out.text(rendered);
    }
  }

  static void symbol(char c, Output& out) {
    switch (c) {
      case ',':
      case ';':
      case ':':
      case ' ':
      case '\\':
        out.space();
        break;
      case '!':
      case '{':
      case '}':
        break;
      case '|':
        out.text("||");
        break;
      default:
        out.literal(c);
    }
  }

  const MathRuleTable& rules_;
};

MathRuleTable build_default_rules() {
  MathRuleTable t = {
      {"mathbb", 1, "#1"},  {"mathcal", 1, "#1"}, {"mathbf", 1, "#1"},
      {"times", 0, "x"},    {"to", 0, "->"},      {"rightarrow", 0, "->"},
      {"circ", 0, "o"},     {"cdot", 0, "."},
  };
  static const char* const kGreek[] = {
      "alpha", "beta",    "gamma",  "delta", "epsilon", "varepsilon", "zeta",   "eta",
      "theta", "vartheta", "iota",  "kappa", "lambda",  "mu",         "nu",     "xi",
      "pi",    "varpi",   "rho",    "varrho", "sigma",  "varsigma",   "tau",    "upsilon",
      "phi",   "varphi",  "chi",    "psi",   "omega",   "Gamma",      "Delta",  "Theta",
      "Lambda", "Xi",     "Pi",     "Sigma", "Upsilon", "Phi",        "Psi",    "Omega"};
  for (const char* g : kGreek) t.push_back({g, 0, g});
  MathRuleTable extra = {
      {"frac", 2, "#1/#2"},  {"leq", 0, "<="},    {"le", 0, "<="},
      {"geq", 0, ">="},      {"ge", 0, ">="},     {"neq", 0, "!="},
      {"in", 0, "in"},       {"otimes", 0, "(x)"}, {"cong", 0, "~="},
      {"simeq", 0, "~="},    {"infty", 0, "infinity"}, {"mapsto", 0, "|->"},
      {"leftarrow", 0, "<-"}, {"Rightarrow", 0, "=>"}, {"ldots", 0, "..."},
      {"cdots", 0, "..."},   {"dots", 0, "..."},  {"colon", 0, ":"},
      {"langle", 0, "<"},    {"rangle", 0, ">"},  {"quad", 0, " "},
      {"qquad", 0, " "},
  };
  t.insert(t.end(), extra.begin(), extra.end());
  return t;
}

}  // namespace

const MathRuleTable& default_math_rules() {
  static const MathRuleTable rules = build_default_rules();
  return rules;
}

MathRule parse_math_rule(std::string_view pattern, std::string_view replacement) {
  pattern = text::trim(pattern);
  if (pattern.size() < 2 || pattern[0] != '\\' || !is_letter(pattern[1])) {
    throw ConfigError("math rule pattern must start with a command: '" + std::string(pattern) + "'");
  }
  std::size_t i = 1;
  MathRule rule;
  rule.command = read_command_name(pattern, i);
  while (i < pattern.size()) {
    const std::string expected = "{#" + std::to_string(rule.arity + 1) + "}";
    if (pattern.substr(i, expected.size()) != expected) {
      throw ConfigError("malformed math rule pattern '" + std::string(pattern) + "'");
    }
    ++rule.arity;
    i += expected.size();
  }
  if (replacement.find_first_of("\\{}") != std::string_view::npos) {
    throw ConfigError("math rule replacement may not contain '\\', '{' or '}': '" +
                      std::string(replacement) + "'");
  }
  rule.replacement = std::string(replacement);
  return rule;
}

MathRuleTable parse_math_rules(std::istream& in) {
  MathRuleTable rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.rfind("# ", 0) == 0) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected '<pattern>\\t<replacement>'", line_no);
    try {
      rules.push_back(parse_math_rule(line.substr(0, tab), line.substr(tab + 1)));
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rules;
}

std::string plaintextify_math(std::string_view fragment, const MathRuleTable& rules) {
  if (!braces_balanced(fragment)) {
    throw NormalizationError("unbalanced braces in math", std::string(fragment));
  }
  MathConverter conv(rules);
  return collapse_whitespace(conv.convert(fragment));
}

// ---------------------------------------------------------------------------
// Markdown

namespace {

struct MathSpan {
  std::size_t begin;
  std::size_t end;  // one past the closing delimiter
  std::string_view body;
};

// Recognizes a math span starting at i, if any.
std::optional<MathSpan> math_at(std::string_view s, std::size_t i) {
  auto closed_by = [&](std::size_t body_start, std::string_view close) -> std::optional<MathSpan> {
    std::size_t end = s.find(close, body_start);
    if (end == std::string_view::npos || end == body_start) return std::nullopt;
    return MathSpan{i, end + close.size(), s.substr(body_start, end - body_start)};
  };
  if (s.compare(i, 2, "$$") == 0) return closed_by(i + 2, "$$");
  if (s[i] == '$') {
    if (i > 0 && s[i - 1] == '\\') return std::nullopt;
    return closed_by(i + 1, "$");
  }
  if (s.compare(i, 2, "\\(") == 0) return closed_by(i + 2, "\\)");
  if (s.compare(i, 2, "\\[") == 0) return closed_by(i + 2, "\\]");
  return std::nullopt;
}

std::string inline_markdown(std::string_view s, const MathRuleTable& rules) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '$' || s[i] == '\\') {
      if (auto m = math_at(s, i)) {
        try {
          out += plaintextify_math(m->body, rules);
          i = m->end;
          continue;
        } catch (const NormalizationError&) {
          // leave the span literal
        }
      }
    }
    if (s.compare(i, 2, "[[") == 0) {
      std::size_t close = s.find("]]", i + 2);
      if (close != std::string_view::npos) {
        std::string_view inner = s.substr(i + 2, close - i - 2);
        auto bar = inner.find('|');
        out += bar == std::string_view::npos ? inner : inner.substr(bar + 1);
        i = close + 2;
        continue;
      }
    }
    const bool image = s.compare(i, 2, "![") == 0;
    if (s[i] == '[' || image) {
      std::size_t label_start = i + (image ? 2 : 1);
      std::size_t label_end = s.find(']', label_start);
      if (label_end != std::string_view::npos && label_end + 1 < s.size() &&
          s[label_end + 1] == '(') {
        std::size_t url_end = s.find(')', label_end + 2);
        if (url_end != std::string_view::npos) {
          out += s.substr(label_start, label_end - label_start);
          i = url_end + 1;
          continue;
        }
      }
    }
    if (s[i] == '`') {
      std::size_t close = s.find('`', i + 1);
      if (close != std::string_view::npos && close > i + 1) {
        out += s.substr(i + 1, close - i - 1);
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string strip_emphasis_marker(const std::string& s, std::string_view marker) {
  const char mc = marker.front();
  auto flank_ok_before = [&](std::size_t pos) { return pos == 0 || !is_alnum(s[pos - 1]); };
  auto flank_ok_after = [&](std::size_t pos) { return pos >= s.size() || !is_alnum(s[pos]); };
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool opener = s.compare(i, marker.size(), marker) == 0 && flank_ok_before(i) &&
                        (i == 0 || s[i - 1] != mc) && i + marker.size() < s.size() &&
                        !is_space(s[i + marker.size()]) && s[i + marker.size()] != mc;
    if (opener) {
      std::size_t j = s.find(marker, i + marker.size());
      while (j != std::string::npos) {
        const std::size_t after = j + marker.size();
        if (!is_space(s[j - 1]) && s[j - 1] != mc && flank_ok_after(after) &&
            (after >= s.size() || s[after] != mc)) {
          break;
        }
        j = s.find(marker, j + 1);
      }
      if (j != std::string::npos) {
        out.append(s, i + marker.size(), j - i - marker.size());
        i = j + marker.size();
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool is_fence(std::string_view line, std::string_view& fence) {
  auto t = text::trim(line);
  if (t.rfind("```", 0) == 0) {
    fence = "```";
    return true;
  }
  if (t.rfind("~~~", 0) == 0) {
    fence = "~~~";
    return true;
  }
  return false;
}

bool is_rule_line(std::string_view line) {
  auto t = text::trim(line);
  if (t.size() < 3) return false;
  const char c = t.front();
  if (c != '-' && c != '*' && c != '_') return false;
  std::size_t count = 0;
  for (char x : t) {
    if (x == c) {
      ++count;
    } else if (!is_space(x)) {
      return false;
    }
  }
  return count >= 3;
}

std::string_view strip_block_prefix(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  std::string_view rest = line.substr(i);
  // headers
  std::size_t hashes = 0;
  while (hashes < rest.size() && rest[hashes] == '#') ++hashes;
  if (hashes >= 1 && hashes <= 6 && (hashes == rest.size() || is_space(rest[hashes]))) {
    return text::trim(rest.substr(hashes));
  }
  // block quotes
  if (!rest.empty() && rest[0] == '>') return text::trim(rest.substr(1));
  // bullets
  if (rest.size() >= 2 && (rest[0] == '-' || rest[0] == '*' || rest[0] == '+') && is_space(rest[1])) {
    return text::trim(rest.substr(2));
  }
  return line;
}

std::string markdown_pass(std::string_view source, const MathRuleTable& rules) {
  auto lines = text::split(source, '\n');
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view fence;
    if (is_fence(lines[i], fence)) {
      std::size_t close = i + 1;
      while (close < lines.size() && text::trim(lines[close]).rfind(fence, 0) != 0) ++close;
      if (close < lines.size()) {
        i = close;
        continue;
      }
      // unterminated fence: pass the remainder through literally
      for (; i < lines.size(); ++i) kept.push_back(lines[i]);
      break;
    }
    if (is_rule_line(lines[i])) continue;
    std::string line(strip_block_prefix(lines[i]));
    line = inline_markdown(line, rules);
    for (std::string_view marker : {"***", "**", "__", "*", "_"}) {
      line = strip_emphasis_marker(line, marker);
    }
    kept.push_back(std::move(line));
  }
  return text::join(kept, "\n");
}

}  // namespace

std::string strip_markdown(std::string_view source, const MathRuleTable& rules) {
  // Every rewrite shortens its input, so iterating to a fixpoint terminates
  // and makes the result idempotent.
  std::string current(source);
  for (int pass = 0; pass < 64; ++pass) {
    std::string next = markdown_pass(current, rules);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// LaTeX

namespace {

const std::set<std::string, std::less<>>& dropped_with_arguments() {
  static const std::set<std::string, std::less<>> names = {
      "label", "ref",     "eqref",   "cref",     "Cref",           "cite",         "citep",
      "citet", "index",   "bibliography", "bibliographystyle", "usepackage", "documentclass",
      "includegraphics", "vspace", "hspace", "newcommand", "renewcommand"};
  return names;
}

const std::set<std::string, std::less<>>& math_environments() {
  static const std::set<std::string, std::less<>> names = {
      "equation", "equation*", "align", "align*", "displaymath", "gather", "gather*", "multline",
      "multline*"};
  return names;
}

std::string remove_comments(std::string_view s) {
  std::string out;
  for (const auto& line : text::split(s, '\n')) {
    std::size_t cut = std::string::npos;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\') {
        ++i;
      } else if (line[i] == '%') {
        cut = i;
        break;
      }
    }
    out += line.substr(0, cut);
    out.push_back('\n');
  }
  return out;
}

class LatexConverter {
 public:
  explicit LatexConverter(const MathRuleTable& rules) : rules_(rules) {}

  std::string convert(std::string_view s) {
    Output out;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c == '$' || (c == '\\' && i + 1 < s.size() && (s[i + 1] == '(' || s[i + 1] == '['))) {
        if (auto m = math_at(s, i)) {
          out.text(math(m->body, s.substr(m->begin, m->end - m->begin)));
          i = m->end;
          continue;
        }
      }
      if (c == '\\') {
        command(s, i, out);
      } else if (c == '{') {
        std::size_t end = match_brace(s, i);
        if (end == std::string_view::npos) {
          ++i;
          continue;
        }
        out.text(convert(s.substr(i + 1, end - i - 2)));
        i = end;
      } else if (c == '}') {
        ++i;
      } else if (c == '~') {
        out.space();
        ++i;
      } else {
        out.literal(c);
        ++i;
      }
    }
    return out.take();
  }

 private:
  std::string math(std::string_view body, std::string_view literal) {
    try {
      return plaintextify_math(body, rules_);
    } catch (const NormalizationError&) {
      std::string kept;
      for (char ch : literal) {
        if (ch != '\\' && ch != '{' && ch != '}' && ch != '$') kept.push_back(ch);
      }
      return kept;
    }
  }

  static void skip_group(std::string_view s, std::size_t& i, char open, char close) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size() || s[i] != open) return;
    if (open == '{') {
      std::size_t end = match_brace(s, i);
      i = end == std::string_view::npos ? s.size() : end;
      return;
    }
    std::size_t end = s.find(close, i);
    i = end == std::string_view::npos ? s.size() : end + 1;
  }

  void command(std::string_view s, std::size_t& i, Output& out) {
    ++i;
    if (i >= s.size()) return;
    if (!is_letter(s[i])) {
      const char c = s[i++];
      if (c == '\\') {
        out.text("\n");
      } else if (c == '%' || c == '&' || c == '#' || c == '_' || c == '$') {
        out.literal(c);
      } else if (c == ',' || c == ' ' || c == ';') {
        out.space();
      }
      return;
    }
    std::string name = read_command_name(s, i);
    if (name == "begin" || name == "end") {
      std::size_t name_start = i;
      while (name_start < s.size() && is_space(s[name_start])) ++name_start;
      std::string env;
      if (name_start < s.size() && s[name_start] == '{') {
        std::size_t end = match_brace(s, name_start);
        if (end != std::string_view::npos) env = std::string(s.substr(name_start + 1, end - name_start - 2));
      }
      skip_group(s, i, '{', '}');
      if (name == "begin") {
        skip_group(s, i, '[', ']');
        if (math_environments().count(env) > 0) {
          const std::string close = "\\end{" + env + "}";
          std::size_t end = s.find(close, i);
          if (end == std::string_view::npos) end = s.size();
          out.text(" ");
          out.text(math(s.substr(i, end - i), s.substr(i, end - i)));
          out.text(" ");
          i = std::min(s.size(), end + close.size());
          return;
        }
      }
      out.text("\n");
      return;
    }
    if (dropped_with_arguments().count(name) > 0) {
      skip_group(s, i, '[', ']');
      skip_group(s, i, '{', '}');
      if (name == "newcommand" || name == "renewcommand") {
        skip_group(s, i, '[', ']');
        skip_group(s, i, '{', '}');
      }
      return;
    }
    // Other commands vanish; their brace arguments are kept as text.
    if (i < s.size() && s[i] == '[') skip_group(s, i, '[', ']');
  }

  const MathRuleTable& rules_;
};

std::string collapse_paragraphs(std::string_view s) {
  std::vector<std::string> paragraphs;
  std::string current;
  for (const auto& line : text::split(s, '\n')) {
    auto t = text::trim(line);
    if (t.empty()) {
      if (!current.empty()) paragraphs.push_back(collapse_whitespace(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back(' ');
    current.append(t);
  }
  if (!current.empty()) paragraphs.push_back(collapse_whitespace(current));
  return text::join(paragraphs, "\n\n");
}

}  // namespace

std::string strip_latex(std::string_view source, const MathRuleTable& rules) {
  LatexConverter conv(rules);
  return collapse_paragraphs(conv.convert(remove_comments(source)));
}

std::vector<LatexDefinition> find_latex_definitions(std::string_view source,
                                                    const MathRuleTable& rules) {
  std::vector<LatexDefinition> out;
  const std::string cleaned = remove_comments(source);
  std::string_view s = cleaned;
  std::size_t pos = 0;
  std::size_t ordinal = 0;
  while ((pos = s.find("\\begin{", pos)) != std::string_view::npos) {
    const std::size_t name_start = pos + 7;
    const std::size_t name_end = s.find('}', name_start);
    if (name_end == std::string_view::npos) break;
    const std::string env(s.substr(name_start, name_end - name_start));
    pos = name_end + 1;
    if (env != "definition" && env != "defn" && env != "dfn") continue;
    std::size_t body_start = pos;
    if (body_start < s.size() && s[body_start] == '[') {
      std::size_t close = s.find(']', body_start);
      if (close != std::string_view::npos) body_start = close + 1;
    }
    const std::string close = "\\end{" + env + "}";
    std::size_t body_end = s.find(close, body_start);
    if (body_end == std::string_view::npos) break;
    std::string_view body = s.substr(body_start, body_end - body_start);
    pos = body_end + close.size();

    const std::size_t this_ordinal = ordinal++;
    std::string headword;
    std::size_t first = std::string_view::npos;
    for (std::string_view cmd : {"\\demph{", "\\emph{", "\\textbf{", "\\textit{"}) {
      std::size_t at = body.find(cmd);
      if (at == std::string_view::npos || at > first) continue;
      std::size_t open = at + cmd.size() - 1;
      std::size_t end = match_brace(body, open);
      if (end == std::string_view::npos) continue;
      first = at;
      headword = strip_latex(body.substr(open + 1, end - open - 2), rules);
    }
    if (headword.empty()) continue;
    out.push_back({headword, collapse_whitespace(strip_latex(body, rules)), this_ordinal});
  }
  return out;
}

}  // namespace mathlex

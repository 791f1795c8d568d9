#include "mathlex/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "mathlex/errors.hpp"
#include "mathlex/lemma_index.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

using nlohmann::json;

const char* to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::Keywords:
      return "keywords";
    case BenchmarkKind::Titles:
      return "titles";
    case BenchmarkKind::Glossary:
      return "glossary";
    case BenchmarkKind::Mwes:
      return "mwes";
  }
  return "unknown";
}

std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view s) {
  const std::string k = text::to_lower(s);
  if (k == "keywords") return BenchmarkKind::Keywords;
  if (k == "titles") return BenchmarkKind::Titles;
  if (k == "glossary") return BenchmarkKind::Glossary;
  if (k == "mwes") return BenchmarkKind::Mwes;
  return std::nullopt;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

// ---------------------------------------------------------------------------
// Terms

TermSet read_term_lines(std::istream& in, const LemmaIndex* index) {
  TermSet set;
  set.normalization = index ? Normalization::LowercaseLemma : Normalization::Lowercase;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    if (index) {
      set.add(text::join(index->lemmatize_query(line), " "));
    } else {
      set.add(line);
    }
  }
  return set;
}

TermSet load_term_file(const std::filesystem::path& path, const LemmaIndex* index) {
  auto in = open_input(path);
  return read_term_lines(in, index);
}

TermBenchmark load_term_benchmark(const std::filesystem::path& path, BenchmarkKind kind,
                                  const LemmaIndex* index) {
  TermBenchmark b;
  b.kind = kind;
  b.terms = load_term_file(path, index);
  if (b.terms.size() == 0) b.warnings.push_back(path.string() + ": benchmark file has no terms");
  return b;
}

MetricsReport eval_terms(const TermSet& predicted, const TermSet& gold) {
  if (predicted.normalization != gold.normalization) {
    throw EvaluationError(std::string("normalization mismatch: predictions are ") +
                          to_string(predicted.normalization) + ", gold is " +
                          to_string(gold.normalization));
  }
  std::size_t common = 0;
  for (const auto& t : predicted.terms) common += gold.terms.count(t);
  return MetricsReport::from_precision_recall(ratio(common, predicted.size()), ratio(common, gold.size()));
}

TermSet union_terms(const std::vector<TermSet>& sets) {
  TermSet out;
  if (!sets.empty()) out.normalization = sets.front().normalization;
  for (const auto& s : sets) {
    if (s.normalization != out.normalization) throw EvaluationError("cannot combine term sets with different normalizations");
    out.terms.insert(s.terms.begin(), s.terms.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Definitions

namespace {

template <typename F>
void for_each_record(std::istream& in, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON record: ") + e.what(), line_no);
    }
    try {
      f(record, line_no);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record field: ") + e.what(), line_no);
    }
  }
}

}  // namespace

std::vector<DefinitionRecord> read_definitions(std::istream& in) {
  std::vector<DefinitionRecord> out;
  for_each_record(in, [&](const json& j, std::size_t line_no) {
    DefinitionRecord r;
    r.headword = j.at("headword").get<std::string>();
    r.definition_text = j.at("definition").get<std::string>();
    r.doc_id = j.value("doc_id", "");
    r.start = j.value("start", std::size_t{0});
    r.end = j.value("end", r.start);
    if (text::trim(r.headword).empty() || text::trim(r.definition_text).empty()) {
      throw ParseError("headword and definition must be non-empty", line_no);
    }
    if (r.end < r.start) throw ParseError("end precedes start", line_no);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<DefinitionRecord> load_definitions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_definitions(in);
}

void write_definitions(std::ostream& out, const std::vector<DefinitionRecord>& records) {
  for (const auto& r : records) {
    json j = {{"headword", r.headword},
              {"definition", r.definition_text},
              {"doc_id", r.doc_id},
              {"start", r.start},
              {"end", r.end}};
    out << j.dump() << '\n';
  }
}

std::vector<std::string> definition_words(std::string_view text) {
  std::vector<std::string> out;
  auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  for (auto w : text::split_whitespace(text::to_lower(text))) {
    std::size_t b = 0;
    std::size_t e = w.size();
    while (b < e && is_punct(w[b])) ++b;
    while (e > b && is_punct(w[e - 1])) --e;
    if (e > b) out.push_back(w.substr(b, e - b));
  }
  return out;
}

std::size_t bag_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string_view, std::size_t> counts;
  for (const auto& w : a) ++counts[w];
  std::size_t n = 0;
  for (const auto& w : b) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++n;
    }
  }
  return n;
}

MetricsReport eval_definitions(const std::vector<DefinitionRecord>& predicted,
                               const std::vector<DefinitionRecord>& gold) {
  using Group = std::vector<const DefinitionRecord*>;
  auto group = [](const std::vector<DefinitionRecord>& records) {
    std::map<std::string, Group> groups;
    for (const auto& r : records) groups[text::normalize_phrase(r.headword)].push_back(&r);
    for (auto& [_, g] : groups) {
      std::sort(g.begin(), g.end(), [](const DefinitionRecord* a, const DefinitionRecord* b) {
        return std::tie(a->doc_id, a->start, a->end, a->definition_text) <
               std::tie(b->doc_id, b->start, b->end, b->definition_text);
      });
    }
    return groups;
  };
  const auto pred_groups = group(predicted);
  const auto gold_groups = group(gold);

  std::size_t matched = 0;
  std::size_t pred_words = 0;
  std::size_t gold_words = 0;
  for (const auto& r : predicted) pred_words += definition_words(r.definition_text).size();
  for (const auto& r : gold) gold_words += definition_words(r.definition_text).size();
  for (const auto& [headword, preds] : pred_groups) {
    auto it = gold_groups.find(headword);
    if (it == gold_groups.end()) continue;
    const Group& golds = it->second;
    for (std::size_t i = 0; i < preds.size() && i < golds.size(); ++i) {
      matched += bag_overlap(definition_words(preds[i]->definition_text),
                             definition_words(golds[i]->definition_text));
    }
  }
  return MetricsReport::from_precision_recall(ratio(matched, pred_words), ratio(matched, gold_words));
}

// ---------------------------------------------------------------------------
// Linking

std::vector<ConceptLinkGold> read_link_gold(std::istream& in) {
  std::vector<ConceptLinkGold> out;
  for_each_record(in, [&](const json& j, std::size_t line_no) {
    ConceptLinkGold g;
    g.phrase = j.at("concept").get<std::string>();
    for (const auto& id : j.at("ids")) g.accepted_ids.insert(id.get<std::string>());
    if (text::trim(g.phrase).empty()) throw ParseError("concept must be non-empty", line_no);
    if (g.accepted_ids.empty()) throw ParseError("gold record for '" + g.phrase + "' has no ids", line_no);
    out.push_back(std::move(g));
  });
  return out;
}

std::vector<LinkPrediction> read_link_predictions(std::istream& in) {
  std::vector<LinkPrediction> out;
  for_each_record(in, [&](const json& j, std::size_t line_no) {
    LinkPrediction p;
    p.phrase = j.at("concept").get<std::string>();
    p.ranked_ids = j.at("ids").get<std::vector<std::string>>();
    std::set<std::string> seen(p.ranked_ids.begin(), p.ranked_ids.end());
    if (seen.size() != p.ranked_ids.size()) {
      throw ParseError("prediction for '" + p.phrase + "' lists an id twice", line_no);
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<ConceptLinkGold> load_link_gold(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_link_gold(in);
}

std::vector<LinkPrediction> load_link_predictions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_link_predictions(in);
}

void write_link_predictions(std::ostream& out, const std::vector<LinkPrediction>& predictions) {
  for (const auto& p : predictions) {
    out << json({{"concept", p.phrase}, {"ids", p.ranked_ids}}).dump() << '\n';
  }
}

MetricsReport eval_linking(const std::vector<LinkPrediction>& predictions,
                           const std::vector<ConceptLinkGold>& gold) {
  std::map<std::string, const ConceptLinkGold*> by_concept;
  for (const auto& g : gold) {
    if (!by_concept.emplace(text::normalize_phrase(g.phrase), &g).second) {
      throw EvaluationError("duplicate gold concept '" + g.phrase + "'");
    }
  }
  std::set<std::string> predicted_concepts;
  std::size_t answered = 0;
  std::size_t top1_correct = 0;
  std::size_t found = 0;
  for (const auto& p : predictions) {
    const std::string key = text::normalize_phrase(p.phrase);
    auto it = by_concept.find(key);
    if (it == by_concept.end()) throw EvaluationError("prediction for unknown concept '" + p.phrase + "'");
    if (!predicted_concepts.insert(key).second) {
      throw EvaluationError("more than one prediction for concept '" + p.phrase + "'");
    }
    const auto& accepted = it->second->accepted_ids;
    if (p.ranked_ids.empty()) continue;
    ++answered;
    if (accepted.count(p.ranked_ids.front()) > 0) ++top1_correct;
    for (const auto& id : p.ranked_ids) {
      if (accepted.count(id) > 0) {
        ++found;
        break;
      }
    }
  }
  MetricsReport r;
  const double p_at_1 = ratio(top1_correct, answered);
  r.p_at_1 = p_at_1;
  r.precision = p_at_1;
  r.recall = ratio(found, gold.size());
  r.f1 = harmonic_mean(r.precision, r.recall);
  return r;
}

// ---------------------------------------------------------------------------
// Reports

const char* to_string(ReportTask task) {
  switch (task) {
    case ReportTask::Terms:
      return "terms";
    case ReportTask::Definitions:
      return "definitions";
    case ReportTask::Linking:
      return "linking";
  }
  return "unknown";
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string rtrim(const std::string& s) {
  const auto last = s.find_last_not_of(' ');
  return last == std::string::npos ? std::string() : s.substr(0, last + 1);
}

}  // namespace

std::string format_report(const ReportTable& table) {
  std::ostringstream out;
  out << "task: " << to_string(table.task);
  if (!table.normalization.empty()) out << "  normalization: " << table.normalization;
  out << '\n';

  std::size_t label_width = 12;
  for (const auto& r : table.rows) label_width = std::max(label_width, r.label.size() + 2);
  constexpr std::size_t kCell = 6;
  const std::size_t group_width = 3 * kCell;
  const char* first = table.task == ReportTask::Linking ? "P@1" : "P";

  std::string names = pad("", label_width);
  std::string heads = pad("", label_width);
  for (const auto& c : table.columns) {
    names += "| " + pad(c, std::max(group_width, c.size() + 1));
    heads += "| " + pad(pad(first, kCell) + pad("R", kCell) + pad("F1", kCell), std::max(group_width, c.size() + 1));
  }
  out << rtrim(names) << '\n';
  out << rtrim(heads) << '\n';
  for (const auto& row : table.rows) {
    std::string line = pad(row.label, label_width);
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const auto& c = table.columns[i];
      std::string cell;
      if (i < row.cells.size()) {
        const auto& m = row.cells[i];
        const double p = table.task == ReportTask::Linking ? m.p_at_1.value_or(m.precision) : m.precision;
        cell = pad(fixed2(p), kCell) + pad(fixed2(m.recall), kCell) + pad(fixed2(m.f1), kCell);
      }
      line += "| " + pad(cell, std::max(group_width, c.size() + 1));
    }
    out << rtrim(line) << '\n';
  }
  return out.str();
}

std::string report_to_json(const ReportTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json cells = json::array();
    for (const auto& m : r.cells) {
      json cell = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
      if (m.p_at_1) cell["p_at_1"] = *m.p_at_1;
      cells.push_back(cell);
    }
    rows.push_back({{"label", r.label}, {"cells", cells}});
  }
  json root = {{"task", to_string(table.task)}, {"columns", table.columns}, {"rows", rows}};
  if (!table.normalization.empty()) root["normalization"] = table.normalization;
  return root.dump(2) + "\n";
}

ReportTable report_from_json(const std::string& text) {
  ReportTable t;
  try {
    json root = json::parse(text);
    const std::string task = root.at("task").get<std::string>();
    if (task == "terms") {
      t.task = ReportTask::Terms;
    } else if (task == "definitions") {
      t.task = ReportTask::Definitions;
    } else if (task == "linking") {
      t.task = ReportTask::Linking;
    } else {
      throw ParseError("unknown report task '" + task + "'", 0);
    }
    t.normalization = root.value("normalization", "");
    t.columns = root.at("columns").get<std::vector<std::string>>();
    for (const auto& r : root.at("rows")) {
      ReportRow row;
      row.label = r.at("label").get<std::string>();
      for (const auto& c : r.at("cells")) {
        MetricsReport m;
        m.precision = c.at("precision").get<double>();
        m.recall = c.at("recall").get<double>();
        m.f1 = c.at("f1").get<double>();
        if (c.contains("p_at_1")) m.p_at_1 = c.at("p_at_1").get<double>();
        row.cells.push_back(m);
      }
      t.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
  return t;
}

}  // namespace mathlex

#pragma once

// Benchmark loading and scoring for terminology extraction, definition
// extraction and entity linking.
//
// File formats (UTF-8, one record per line):
//   terms        plain phrase per line
//   definitions  {"headword": ..., "definition": ..., "doc_id": ..., "start": n, "end": n}
//   link gold    {"concept": ..., "ids": ["Q1", ...]}
//   link preds   {"concept": ..., "ids": ["Q1", ...]}   (ids in rank order)

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mathlex/corpus.hpp"
#include "mathlex/extract.hpp"

namespace mathlex {

class LemmaIndex;

enum class BenchmarkKind { Keywords, Titles, Glossary, Mwes };

const char* to_string(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view s);

struct TermBenchmark {
  BenchmarkKind kind = BenchmarkKind::Keywords;
  TermSet terms;
  std::vector<std::string> warnings;
};

// Reads one phrase per line. With an index, each phrase is mapped through
// the index's query lemmatizer and the set is lowercase+lemma normalized.
TermSet read_term_lines(std::istream& in, const LemmaIndex* index = nullptr);
TermSet load_term_file(const std::filesystem::path& path, const LemmaIndex* index = nullptr);
TermBenchmark load_term_benchmark(const std::filesystem::path& path, BenchmarkKind kind,
                                  const LemmaIndex* index = nullptr);

// Set-based scoring; an entity counts once however often it occurs.
// Throws EvaluationError if the normalizations differ.
MetricsReport eval_terms(const TermSet& predicted, const TermSet& gold);

// Union of several gold sets (the "Combined" benchmark).
TermSet union_terms(const std::vector<TermSet>& sets);

struct DefinitionRecord {
  std::string headword;
  std::string definition_text;
  std::string doc_id;
  std::size_t start = 0;  // sentence ordinal range [start, end]
  std::size_t end = 0;

  friend bool operator==(const DefinitionRecord&, const DefinitionRecord&) = default;
};

std::vector<DefinitionRecord> read_definitions(std::istream& in);
std::vector<DefinitionRecord> load_definitions(const std::filesystem::path& path);
void write_definitions(std::ostream& out, const std::vector<DefinitionRecord>& records);

// Lowercased word tokens with surrounding punctuation removed.
std::vector<std::string> definition_words(std::string_view text);

// Size of the multiset intersection of two word lists.
std::size_t bag_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Predictions are paired with gold records sharing their normalized headword
// (within a headword, both sides ordered by doc_id, start, end, text and
// paired positionally). Unpaired records only enlarge their own denominator.
// P = sum(matched) / sum(|pred words|), R = sum(matched) / sum(|gold words|).
MetricsReport eval_definitions(const std::vector<DefinitionRecord>& predicted,
                               const std::vector<DefinitionRecord>& gold);

struct ConceptLinkGold {
  std::string phrase;
  std::set<std::string> accepted_ids;

  friend bool operator==(const ConceptLinkGold&, const ConceptLinkGold&) = default;
};

struct LinkPrediction {
  std::string phrase;
  std::vector<std::string> ranked_ids;

  friend bool operator==(const LinkPrediction&, const LinkPrediction&) = default;
};

std::vector<ConceptLinkGold> read_link_gold(std::istream& in);
std::vector<LinkPrediction> read_link_predictions(std::istream& in);
std::vector<ConceptLinkGold> load_link_gold(const std::filesystem::path& path);
std::vector<LinkPrediction> load_link_predictions(const std::filesystem::path& path);
void write_link_predictions(std::ostream& out, const std::vector<LinkPrediction>& predictions);

// P@1 over concepts that returned candidates; recall over all gold concepts;
// F1 is their harmonic mean and `precision` mirrors P@1.
// Throws EvaluationError for a prediction on an unknown concept.
MetricsReport eval_linking(const std::vector<LinkPrediction>& predictions,
                           const std::vector<ConceptLinkGold>& gold);

// ---------------------------------------------------------------------------
// Reports

enum class ReportTask { Terms, Definitions, Linking };

const char* to_string(ReportTask task);

struct ReportRow {
  std::string label;
  std::vector<MetricsReport> cells;  // one per column
};

struct ReportTable {
  ReportTask task = ReportTask::Terms;
  std::string normalization;  // terms only
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
};

// Fixed-width text table, every metric to two decimals.
std::string format_report(const ReportTable& table);

// Lossless JSON form of the same table.
std::string report_to_json(const ReportTable& table);
ReportTable report_from_json(const std::string& json);

}  // namespace mathlex

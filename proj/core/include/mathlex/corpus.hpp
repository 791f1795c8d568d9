#pragma once

// Layered corpus model: tokens carry surface form, lemma, coarse/fine POS and
// a dependency arc; sentences group tokens; documents carry metadata.
// All types are plain values and are treated as immutable once built.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mathlex {

struct Token {
  std::string surface;
  std::string lemma;
  std::string upos;    // Universal Dependencies tag
  std::string xpos;    // Penn-style tag
  std::size_t head = 0;  // 1-based governor index, 0 for the root
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string text;           // surfaces joined by single spaces
  std::size_t doc_offset = 0; // ordinal within the document

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Builds a sentence and derives its text from the token surfaces.
Sentence make_sentence(std::vector<Token> tokens, std::size_t doc_offset);

// Text convention shared by every sentence: surfaces joined by one space.
std::string join_surfaces(const std::vector<Token>& tokens);

struct Document {
  std::string id;
  std::string corpus_id;
  std::string title;
  std::string source_url;
  std::vector<std::string> authors;
  std::string date;  // ISO-8601, opaque
  std::vector<std::string> keywords;
  std::vector<Sentence> sentences;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::string id;
  std::vector<Document> documents;

  std::size_t sentence_count() const;
  std::size_t token_count() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Human-facing name for the well-known corpus keys ("nlab" -> "nLab").
std::string corpus_display_name(std::string_view corpus_id);

struct Violation {
  std::size_t token_index = 0;  // 1-based; 0 for sentence-level problems
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Reports every structural problem of a sentence. An empty result means the
// sentence is valid. Cycles longer than a self-loop are not detected.
std::vector<Violation> validate_sentence(const Sentence& s);

// Validates all sentences and checks that document ids are unique. Returns
// one human-readable line per problem.
std::vector<std::string> validate_corpus(const Corpus& corpus);

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> p_at_1;

  static MetricsReport from_precision_recall(double precision, double recall);

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

double harmonic_mean(double a, double b);

}  // namespace mathlex

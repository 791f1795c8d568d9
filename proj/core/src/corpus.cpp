#include "mathlex/corpus.hpp"

#include <set>

#include "mathlex/text_util.hpp"

namespace mathlex {

std::string join_surfaces(const std::vector<Token>& tokens) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) text.push_back(' ');
    text.append(tokens[i].surface);
  }
  return text;
}

Sentence make_sentence(std::vector<Token> tokens, std::size_t doc_offset) {
  Sentence s;
  s.text = join_surfaces(tokens);
  s.tokens = std::move(tokens);
  s.doc_offset = doc_offset;
  return s;
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) {
    for (const auto& s : d.sentences) n += s.tokens.size();
  }
  return n;
}

std::string corpus_display_name(std::string_view corpus_id) {
  const std::string key = text::to_lower(corpus_id);
  if (key == "tac") return "TAC";
  if (key == "nlab") return "nLab";
  if (key == "bct") return "BCT";
  return std::string(corpus_id);
}

std::vector<Violation> validate_sentence(const Sentence& s) {
  std::vector<Violation> out;
  const std::size_t n = s.tokens.size();
  if (n == 0) {
    out.push_back({0, "empty sentence"});
    return out;
  }
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    const std::size_t idx = i + 1;
    const std::string at = " at index " + std::to_string(idx);
    if (t.surface.empty()) out.push_back({idx, "empty surface" + at});
    if (t.lemma.empty()) out.push_back({idx, "empty lemma" + at});
    if (t.head == idx) out.push_back({idx, "self-head" + at});
    if (t.head > n) out.push_back({idx, "dangling head" + at});
    if (t.head == 0) {
      ++roots;
      if (t.deprel != "root") out.push_back({idx, "root token has deprel '" + t.deprel + "'" + at});
    } else if (t.deprel == "root") {
      out.push_back({idx, "deprel root on non-root token" + at});
    }
  }
  if (roots == 0) out.push_back({0, "no root token"});
  if (roots > 1) out.push_back({0, "multiple root tokens (" + std::to_string(roots) + ")"});
  if (s.text != join_surfaces(s.tokens)) out.push_back({0, "sentence text does not match token surfaces"});
  return out;
}

std::vector<std::string> validate_corpus(const Corpus& corpus) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& doc : corpus.documents) {
    if (!seen.insert(doc.id).second) {
      problems.push_back(corpus.id + "/" + doc.id + ": duplicate document id");
    }
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      for (const auto& v : validate_sentence(doc.sentences[i])) {
        problems.push_back(corpus.id + "/" + doc.id + " sentence " + std::to_string(i) + ": " +
                           v.message);
      }
    }
  }
  return problems;
}

double harmonic_mean(double a, double b) {
  if (a + b == 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

MetricsReport MetricsReport::from_precision_recall(double precision, double recall) {
  MetricsReport r;
  r.precision = precision;
  r.recall = recall;
  r.f1 = harmonic_mean(precision, recall);
  return r;
}

}  // namespace mathlex

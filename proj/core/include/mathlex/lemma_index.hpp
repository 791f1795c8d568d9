#pragma once

// Lemma-keyed inverted index over one or more corpora. Phrase queries are
// lemmatized through the corpus-derived surface->lemma map and matched as
// consecutive lemma runs, case-insensitively.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mathlex/corpus.hpp"

namespace mathlex {

// Positions refer to LemmaIndex::corpora(): corpora are ordered by id and the
// documents of each corpus by document id, so numeric order here is the same
// as (corpus_id, doc_id, sentence, token) order. `token` is 1-based, as in
// CONLL-U.
struct Posting {
  std::size_t corpus = 0;
  std::size_t document = 0;
  std::size_t sentence = 0;
  std::size_t token = 0;

  friend auto operator<=>(const Posting&, const Posting&) = default;
};

// [begin, end) in 1-based token ordinals.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend auto operator<=>(const TokenSpan&, const TokenSpan&) = default;
};

struct SearchHit {
  std::string corpus_id;
  std::string doc_id;
  std::string doc_title;
  std::string source_url;
  std::size_t sentence = 0;  // ordinal within the document
  std::string text;
  std::vector<TokenSpan> spans;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Corpus presentation order: listed ids first (in that order), then any
// others lexicographically. Comparison is case-insensitive.
class DisplayOrder {
 public:
  DisplayOrder() = default;
  explicit DisplayOrder(std::vector<std::string> preferred);

  // BCT, nLab, TAC: introductory, encyclopedic, research.
  static DisplayOrder standard();

  bool before(std::string_view a, std::string_view b) const;
  std::vector<std::string> sorted(std::vector<std::string> ids) const;

 private:
  std::size_t rank(std::string_view id) const;

  std::vector<std::string> preferred_;
};

class LemmaIndex {
 public:
  using PostingMap = std::map<std::string, std::vector<Posting>, std::less<>>;
  using SurfaceMap = std::map<std::string, std::string, std::less<>>;

  LemmaIndex() = default;

  // Throws BuildError on a duplicate (corpus_id, doc_id).
  static LemmaIndex build(std::vector<Corpus> corpora);

  const std::vector<Corpus>& corpora() const { return corpora_; }
  const PostingMap& postings() const { return postings_; }
  const SurfaceMap& surface_to_lemma() const { return surface_to_lemma_; }
  std::vector<std::string> corpus_ids() const;

  // Lowercases, splits on whitespace and maps each word to its modal lemma
  // (or itself when unseen). Throws QueryError for a blank phrase.
  std::vector<std::string> lemmatize_query(std::string_view phrase) const;

  // Sentences containing the phrase's lemma sequence at consecutive token
  // positions. Each hit carries all leftmost non-overlapping occurrences.
  // An empty filter means every corpus; unknown ids throw QueryError.
  std::vector<SearchHit> search(std::string_view phrase,
                                const std::vector<std::string>& corpus_filter = {},
                                const DisplayOrder& order = DisplayOrder::standard()) const;

  const Sentence& sentence_of(const SearchHit& hit) const;

  friend bool operator==(const LemmaIndex&, const LemmaIndex&) = default;

 private:
  std::vector<Corpus> corpora_;
  PostingMap postings_;
  SurfaceMap surface_to_lemma_;
};

// Greedy leftmost non-overlapping occurrences of `lemmas` in `sentence`
// (lemmas compared lowercased).
std::vector<TokenSpan> match_spans(const Sentence& sentence, const std::vector<std::string>& lemmas);

// Snapshot: "MATHLEX-INDEX <version>" header, length-prefixed CONLL-U per
// corpus, then postings and the surface map as tab-separated lines. Output is
// byte-identical for identical indexes.
inline constexpr int kSnapshotVersion = 1;
void save_snapshot(std::ostream& out, const LemmaIndex& index);
// Throws ParseError on a bad header, truncated data, or postings that do not
// agree with the stored corpora.
LemmaIndex load_snapshot(std::istream& in);

}  // namespace mathlex

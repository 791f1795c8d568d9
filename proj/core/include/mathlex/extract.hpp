#pragma once

// Baseline terminology extraction over annotated corpora: POS-pattern
// multi-word expressions and TextRank keyword ranking.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mathlex/corpus.hpp"

namespace mathlex {

enum class Normalization { Lowercase, LowercaseLemma };

const char* to_string(Normalization n);

struct TermSet {
  std::set<std::string> terms;
  Normalization normalization = Normalization::Lowercase;

  // Normalizes (trim, collapse whitespace, lowercase) before inserting.
  // Blank phrases are ignored.
  void add(std::string_view phrase);
  std::size_t size() const { return terms.size(); }
  bool contains(std::string_view phrase) const;

  friend bool operator==(const TermSet&, const TermSet&) = default;
};

struct RankedTerm {
  std::string phrase;
  double score = 0.0;

  friend bool operator==(const RankedTerm&, const RankedTerm&) = default;
};

struct MweOptions {
  std::size_t min_freq = 2;
  std::size_t max_len = 5;
};

// Frequency of every candidate lemma sequence: maximal runs of ADJ/NOUN/PROPN
// tokens, trimmed to end on a NOUN/PROPN, with length in [2, max_len].
// Throws ExtractionError when the corpus is unannotated.
std::map<std::string, std::size_t> count_mwe_candidates(const Corpus& corpus, const MweOptions& opts);

// Candidates seen at least min_freq times, lowercase+lemma normalized.
TermSet extract_mwe(const Corpus& corpus, const MweOptions& opts = {});

struct TextRankOptions {
  std::size_t window = 2;
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
  double keep_ratio = 1.0 / 3.0;
};

// Undirected, unweighted co-occurrence graph. Nodes are sorted; adjacency
// lists hold node indices in ascending order with no self-loops.
struct CooccurrenceGraph {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t index_of(std::string_view node) const;  // SIZE_MAX when absent
};

// Nodes: lowercased lemmas of NOUN/PROPN/ADJ tokens. Two nodes are linked
// when they occur in one sentence less than `window` tokens apart.
CooccurrenceGraph build_cooccurrence_graph(const Corpus& corpus, std::size_t window);

struct GraphRanking {
  std::vector<double> scores;  // parallel to CooccurrenceGraph::nodes
  std::vector<double> deltas;  // max per-node change after each iteration
  bool converged = false;
};

// Synchronous iteration of PR(v) = (1-d) + d * sum_{u in adj(v)} PR(u)/deg(u)
// from PR = 1 until the max change drops below tol or max_iter is reached.
GraphRanking rank_graph(const CooccurrenceGraph& graph, const TextRankOptions& opts);

// Ranks the graph, keeps the top ceil(keep_ratio * |nodes|) nodes and merges
// kept words adjacent in the text into phrases scored by summed node scores.
// Sorted by descending score, ties broken lexicographically.
std::vector<RankedTerm> textrank(const Corpus& corpus, const TextRankOptions& opts = {});

}  // namespace mathlex

#pragma once

// Independent reference implementations used by property tests and the
// acceptance gate. They favour obviousness over speed and share no code with
// the library beyond its plain data types.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mathlex/corpus.hpp"
#include "mathlex/extract.hpp"
#include "mathlex/lemma_index.hpp"

namespace mathlex::oracle {

// Random annotated corpora over a small vocabulary in which some surfaces
// map to more than one lemma. At most `max_sentences` sentences in total.
std::vector<Corpus> random_corpora(std::mt19937_64& rng, std::size_t max_sentences);

// A random 1..3 word query drawn from surfaces present in `corpora` (or,
// occasionally, an unseen word).
std::string random_query(std::mt19937_64& rng, const std::vector<Corpus>& corpora);

// Linear scan: query words mapped to their most frequent lemma (ties to the
// lexicographically smallest), every sentence checked position by position.
std::vector<SearchHit> brute_force_search(const std::vector<Corpus>& corpora, const std::string& query,
                                          const std::vector<std::string>& corpus_filter);

// Random undirected simple graph with 1..max_nodes nodes.
CooccurrenceGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes);

// Dense-matrix power iteration of the TextRank recurrence, run until the
// update is below 1e-14 (or 100000 steps).
std::vector<double> dense_pagerank(const CooccurrenceGraph& graph, double damping);

}  // namespace mathlex::oracle

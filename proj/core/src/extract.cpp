#include "mathlex/extract.hpp"

#include <algorithm>
#include <cmath>

#include "mathlex/conllu.hpp"
#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::Lowercase:
      return "lowercase";
    case Normalization::LowercaseLemma:
      return "lowercase+lemma";
  }
  return "unknown";
}

void TermSet::add(std::string_view phrase) {
  std::string norm = text::normalize_phrase(phrase);
  if (!norm.empty()) terms.insert(std::move(norm));
}

bool TermSet::contains(std::string_view phrase) const {
  return terms.count(text::normalize_phrase(phrase)) > 0;
}

namespace {

void require_annotated(const Corpus& corpus) {
  if (!is_annotated(corpus)) {
    throw ExtractionError("corpus '" + corpus.id + "' has no POS annotation");
  }
}

bool is_nominal(const Token& t) { return t.upos == "NOUN" || t.upos == "PROPN"; }

bool is_candidate(const Token& t) { return is_nominal(t) || t.upos == "ADJ"; }

}  // namespace

std::map<std::string, std::size_t> count_mwe_candidates(const Corpus& corpus, const MweOptions& opts) {
  require_annotated(corpus);
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus.documents) {
    for (const auto& s : doc.sentences) {
      const auto& tokens = s.tokens;
      std::size_t i = 0;
      while (i < tokens.size()) {
        if (!is_candidate(tokens[i])) {
          ++i;
          continue;
        }
        std::size_t end = i;
        while (end < tokens.size() && is_candidate(tokens[end])) ++end;
        std::size_t last = end;
        while (last > i && !is_nominal(tokens[last - 1])) --last;
        const std::size_t len = last - i;
        if (len >= 2 && len <= opts.max_len) {
          std::vector<std::string> lemmas;
          for (std::size_t k = i; k < last; ++k) lemmas.push_back(text::to_lower(tokens[k].lemma));
          ++counts[text::join(lemmas, " ")];
        }
        i = end;
      }
    }
  }
  return counts;
}

TermSet extract_mwe(const Corpus& corpus, const MweOptions& opts) {
  if (opts.min_freq == 0 || opts.max_len == 0) throw ExtractionError("min_freq and max_len must be positive");
  TermSet out;
  out.normalization = Normalization::LowercaseLemma;
  for (const auto& [phrase, n] : count_mwe_candidates(corpus, opts)) {
    if (n >= opts.min_freq) out.add(phrase);
  }
  return out;
}

std::size_t CooccurrenceGraph::index_of(std::string_view node) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
  if (it == nodes.end() || *it != node) return SIZE_MAX;
  return static_cast<std::size_t>(it - nodes.begin());
}

CooccurrenceGraph build_cooccurrence_graph(const Corpus& corpus, std::size_t window) {
  std::set<std::string> node_set;
  for (const auto& doc : corpus.documents) {
    for (const auto& s : doc.sentences) {
      for (const auto& t : s.tokens) {
        if (is_candidate(t)) node_set.insert(text::to_lower(t.lemma));
      }
    }
  }
  CooccurrenceGraph g;
  g.nodes.assign(node_set.begin(), node_set.end());
  std::vector<std::set<std::size_t>> adj(g.nodes.size());
  for (const auto& doc : corpus.documents) {
    for (const auto& s : doc.sentences) {
      const auto& tokens = s.tokens;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!is_candidate(tokens[i])) continue;
        const std::size_t a = g.index_of(text::to_lower(tokens[i].lemma));
        for (std::size_t j = i + 1; j < tokens.size() && j - i < window; ++j) {
          if (!is_candidate(tokens[j])) continue;
          const std::size_t b = g.index_of(text::to_lower(tokens[j].lemma));
          if (a == b) continue;
          adj[a].insert(b);
          adj[b].insert(a);
        }
      }
    }
  }
  for (auto& s : adj) g.adjacency.emplace_back(s.begin(), s.end());
  return g;
}

namespace {

void validate(const TextRankOptions& opts) {
  if (opts.window == 0) throw ExtractionError("window must be positive");
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) throw ExtractionError("damping must lie in (0, 1)");
  if (!(opts.tol > 0.0)) throw ExtractionError("tol must be positive");
  if (opts.max_iter == 0) throw ExtractionError("max_iter must be positive");
  if (!(opts.keep_ratio > 0.0 && opts.keep_ratio <= 1.0)) {
    throw ExtractionError("keep_ratio must lie in (0, 1]");
  }
}

}  // namespace

GraphRanking rank_graph(const CooccurrenceGraph& graph, const TextRankOptions& opts) {
  validate(opts);
  const std::size_t n = graph.nodes.size();
  GraphRanking r;
  r.scores.assign(n, 1.0);
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> next(n);
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0.0;
      for (std::size_t u : graph.adjacency[v]) {
        sum += r.scores[u] / static_cast<double>(graph.adjacency[u].size());
      }
      next[v] = (1.0 - opts.damping) + opts.damping * sum;
      delta = std::max(delta, std::abs(next[v] - r.scores[v]));
    }
    r.scores.swap(next);
    r.deltas.push_back(delta);
    if (delta < opts.tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::vector<RankedTerm> textrank(const Corpus& corpus, const TextRankOptions& opts) {
  validate(opts);
  require_annotated(corpus);
  const CooccurrenceGraph graph = build_cooccurrence_graph(corpus, opts.window);
  if (graph.nodes.empty()) return {};
  const GraphRanking ranking = rank_graph(graph, opts);

  std::vector<std::size_t> order(graph.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranking.scores[a] != ranking.scores[b]) return ranking.scores[a] > ranking.scores[b];
    return graph.nodes[a] < graph.nodes[b];
  });
  const auto keep_count = static_cast<std::size_t>(
      std::ceil(opts.keep_ratio * static_cast<double>(graph.nodes.size()) - 1e-9));
  std::vector<bool> kept(graph.nodes.size(), false);
  for (std::size_t i = 0; i < keep_count && i < order.size(); ++i) kept[order[i]] = true;

  std::map<std::string, double> phrases;
  for (const auto& doc : corpus.documents) {
    for (const auto& s : doc.sentences) {
      std::vector<std::string> words;
      double score = 0.0;
      auto flush = [&] {
        if (!words.empty()) phrases.emplace(text::join(words, " "), score);
        words.clear();
        score = 0.0;
      };
      for (const auto& t : s.tokens) {
        std::size_t node = is_candidate(t) ? graph.index_of(text::to_lower(t.lemma)) : SIZE_MAX;
        if (node != SIZE_MAX && kept[node]) {
          words.push_back(graph.nodes[node]);
          score += ranking.scores[node];
        } else {
          flush();
        }
      }
      flush();
    }
  }

  std::vector<RankedTerm> out;
  for (auto& [phrase, score] : phrases) out.push_back({phrase, score});
  std::sort(out.begin(), out.end(), [](const RankedTerm& a, const RankedTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.phrase < b.phrase;
  });
  return out;
}

}  // namespace mathlex

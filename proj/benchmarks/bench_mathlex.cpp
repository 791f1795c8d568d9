#include <benchmark/benchmark.h>

#include <random>

#include "mathlex/benchmark.hpp"
#include "mathlex/corpus.hpp"
#include "mathlex/extract.hpp"
#include "mathlex/lemma_index.hpp"
#include "mathlex/markup.hpp"

namespace {

using namespace mathlex;

struct Word {
  const char* surface;
  const char* lemma;
  const char* upos;
};

const Word kWords[] = {
    {"double", "double", "ADJ"},   {"category", "category", "NOUN"}, {"categories", "category", "NOUN"},
    {"sifted", "sift", "VERB"},    {"colimits", "colimit", "NOUN"},  {"colimit", "colimit", "NOUN"},
    {"a", "a", "DET"},             {"the", "the", "DET"},            {"of", "of", "ADP"},
    {"free", "free", "ADJ"},       {"monad", "monad", "NOUN"},       {"preserves", "preserve", "VERB"},
    {"finite", "finite", "ADJ"},   {"products", "product", "NOUN"},  {"is", "be", "AUX"},
    {"functor", "functor", "NOUN"}, {"adjoint", "adjoint", "ADJ"},   {"left", "left", "ADJ"},
};

// Deterministic synthetic corpora with `sentences` sentences of 12 tokens.
std::vector<Corpus> synthetic(std::size_t sentences) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> word(0, std::size(kWords) - 1);
  std::vector<Corpus> corpora{{"bct", {}}, {"nlab", {}}, {"tac", {}}};
  for (std::size_t s = 0; s < sentences; ++s) {
    Corpus& c = corpora[s % 3];
    if (c.documents.empty() || c.documents.back().sentences.size() == 20) {
      Document d;
      d.id = c.id + "-" + std::to_string(c.documents.size());
      d.corpus_id = c.id;
      d.title = d.id;
      c.documents.push_back(std::move(d));
    }
    std::vector<Token> tokens;
    for (std::size_t i = 0; i < 12; ++i) {
      const Word& w = kWords[word(rng)];
      tokens.push_back({w.surface, w.lemma, w.upos, "", i == 0 ? 0u : 1u, i == 0 ? "root" : "dep"});
    }
    auto& doc = c.documents.back();
    doc.sentences.push_back(make_sentence(std::move(tokens), doc.sentences.size()));
  }
  return corpora;
}

void BM_IndexBuild(benchmark::State& state) {
  const auto corpora = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(LemmaIndex::build(corpora));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000);

void BM_PhraseSearch(benchmark::State& state) {
  const auto index = LemmaIndex::build(synthetic(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(index.search("double categories"));
}
BENCHMARK(BM_PhraseSearch)->Arg(1000)->Arg(10000);

void BM_RareWordSearch(benchmark::State& state) {
  const auto index = LemmaIndex::build(synthetic(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(index.search("left adjoint functor"));
}
BENCHMARK(BM_RareWordSearch)->Arg(10000);

void BM_TextRank(benchmark::State& state) {
  auto corpora = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(textrank(corpora[2]));
}
BENCHMARK(BM_TextRank)->Arg(1000)->Arg(10000);

void BM_Mwe(benchmark::State& state) {
  auto corpora = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_mwe(corpora[2]));
}
BENCHMARK(BM_Mwe)->Arg(10000);

void BM_Plaintextify(benchmark::State& state) {
  const std::string fragment =
      R"(\mathrm{Hom}_{\mathcal{C}}(\mathbb{Z}^n, \prod_{i \in I} A_i) \cong \frac{\alpha}{\beta} \to \infty)";
  for (auto _ : state) benchmark::DoNotOptimize(plaintextify_math(fragment));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(fragment.size()));
}
BENCHMARK(BM_Plaintextify);

void BM_StripMarkdown(benchmark::State& state) {
  std::string page;
  for (int i = 0; i < 200; ++i) {
    page += "## Section\n\nA **double category** is a [[category]] internal to $\\mathbf{Cat}$, see "
            "[the page](https://ncatlab.org/nlab/show/double+category).\n\n";
  }
  for (auto _ : state) benchmark::DoNotOptimize(strip_markdown(page));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(page.size()));
}
BENCHMARK(BM_StripMarkdown);

void BM_EvalTerms(benchmark::State& state) {
  TermSet pred;
  TermSet gold;
  for (int i = 0; i < state.range(0); ++i) {
    pred.add("term " + std::to_string(i * 2));
    gold.add("term " + std::to_string(i * 3));
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval_terms(pred, gold));
}
BENCHMARK(BM_EvalTerms)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "math_cases.hpp"
#include "mathlex/benchmark.hpp"
#include "mathlex/conllu.hpp"
#include "mathlex/extract.hpp"
#include "mathlex/lemma_index.hpp"
#include "mathlex/linker.hpp"
#include "mathlex/markup.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mathlex;

namespace {

const fs::path kSource = MATHLEX_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Collects the first few failure details of a criterion.
struct Check {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  bool ok() const { return problems.empty(); }
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(12);
  o << x;
  return o.str();
}

void metric_exactness(Check& c) {
  const auto pred = load_term_file(kSource / "tests/fixtures/terms_pred.txt");
  const auto gold = load_term_file(kSource / "tests/fixtures/terms_gold.txt");
  const auto m = eval_terms(pred, gold);
  c.expect(m.precision == 0.5 && m.recall == 0.5 && m.f1 == 0.5,
           "4-vs-4 terms gave " + fmt(m.precision) + "/" + fmt(m.recall) + "/" + fmt(m.f1));

  std::mt19937_64 rng(1001);
  for (int i = 0; i < 200; ++i) {
    TermSet s;
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    for (int k = 0; k < n; ++k) s.add("t" + std::to_string(rng() % 1000) + " x" + std::to_string(rng() % 7));
    const auto self = eval_terms(s, s);
    c.expect(self.precision == 1.0 && self.recall == 1.0 && self.f1 == 1.0, "identity set " + std::to_string(i));
  }

  const auto lm = eval_linking(load_link_predictions(kSource / "tests/fixtures/link_pred.jsonl"),
                               load_link_gold(kSource / "tests/fixtures/link_gold.jsonl"));
  c.expect(lm.p_at_1 && near(*lm.p_at_1, 2.0 / 3.0, 1e-9), "P@1 " + fmt(lm.p_at_1.value_or(-1)));
  c.expect(lm.recall == 1.0, "linking recall " + fmt(lm.recall));
  c.expect(near(lm.f1, 0.8, 1e-9), "linking F1 " + fmt(lm.f1));
}

void index_oracle(Check& c) {
  std::mt19937_64 rng(2002);
  for (int round = 0; round < 200; ++round) {
    const auto corpora = oracle::random_corpora(rng, 50);
    const auto index = LemmaIndex::build(corpora);
    for (int q = 0; q < 5; ++q) {
      const auto query = oracle::random_query(rng, corpora);
      std::vector<std::string> filter;
      if (q % 2) filter.push_back(corpora[rng() % corpora.size()].id);
      c.expect(index.search(query, filter) == oracle::brute_force_search(corpora, query, filter),
               "round " + std::to_string(round) + " query '" + query + "'");
    }
  }
}

void figure1_roundtrip(Check& c) {
  const std::string source = slurp(kSource / "tests/fixtures/figure1.conllu");
  const auto docs = parse_conllu(std::string_view(source), "tac");
  c.expect(docs.size() == 1 && docs[0].sentences.size() == 1, "expected one sentence");
  if (!c.ok()) return;
  const auto& tokens = docs[0].sentences[0].tokens;
  std::string lemmas, upos, xpos, deprels, heads;
  for (const auto& t : tokens) {
    lemmas += (lemmas.empty() ? "" : " ") + t.lemma;
    upos += (upos.empty() ? "" : " ") + t.upos;
    xpos += (xpos.empty() ? "" : " ") + t.xpos;
    deprels += (deprels.empty() ? "" : "/") + t.deprel;
    heads += (heads.empty() ? "" : ",") + std::to_string(t.head);
  }
  c.expect(lemmas == "reflexive coequalizer be sift colimit", "lemmas: " + lemmas);
  c.expect(upos == "ADJ NOUN AUX VERB NOUN", "upos: " + upos);
  c.expect(xpos == "JJ NNS VBP VBN NNS", "xpos: " + xpos);
  c.expect(deprels == "amod/nsubj/cop/amod/root", "deprels: " + deprels);
  c.expect(heads == "2,5,5,5,0", "heads: " + heads);
  c.expect(docs[0].sentences[0].text == "Reflexive coequalizers are sifted colimits", "text");
  std::ostringstream out;
  write_conllu(out, docs);
  c.expect(parse_conllu(std::string_view(out.str()), "tac") == docs, "serialize -> parse changed the document");
  c.expect(out.str() == source, "serialization is not byte-identical to the fixture");
}

void math_plaintext(Check& c) {
  c.expect(plaintextify_math(R"(\mathbb{Z}^n)") == "Z^n", "\\mathbb{Z}^n gave " + plaintextify_math(R"(\mathbb{Z}^n)"));
  c.expect(std::size(testing::kMathCases) >= 21, "fewer than 20 extra cases");
  for (const auto& mc : testing::kMathCases) {
    const auto got = plaintextify_math(mc.input);
    c.expect(got == mc.expected, std::string(mc.input) + " gave " + got);
    c.expect(got.find('\\') == std::string::npos, std::string(mc.input) + " kept a backslash");
  }
}

void textrank_oracle(Check& c) {
  std::mt19937_64 rng(3003);
  const TextRankOptions opts;  // defaults: tol 1e-6, damping 0.85
  for (int round = 0; round < 50; ++round) {
    const auto g = oracle::random_graph(rng, 12);
    const auto r = rank_graph(g, opts);
    c.expect(r.converged, "graph " + std::to_string(round) + " did not converge");
    const auto want = oracle::dense_pagerank(g, opts.damping);
    for (std::size_t i = 0; i < want.size(); ++i) {
      c.expect(near(r.scores[i], want[i], 1e-5),
               "graph " + std::to_string(round) + " node " + std::to_string(i) + ": " + fmt(r.scores[i]) +
                   " vs " + fmt(want[i]));
    }
  }
  CooccurrenceGraph two;
  two.nodes = {"a", "b"};
  two.adjacency = {{1}, {0}};
  const auto r = rank_graph(two, opts);
  c.expect(r.scores[0] == r.scores[1], "two-node scores differ");
}

void linker_exclusion(Check& c) {
  auto kb = FixtureKbClient::load(kSource / "data/demo/kb.jsonl", kSource / "data/demo/class_graph.tsv");
  const auto exclusions = ExclusionList::standard();
  c.expect(kb->records().size() >= 30, "fixture KB has " + std::to_string(kb->records().size()) + " entries");

  std::size_t excluded_entries = 0;
  std::set<std::string> classes_hit;
  for (const auto& rec : kb->records()) {
    const auto classes = kb->classes_to_depth2(rec.classes);
    bool hit = false;
    for (const auto& cls : classes) {
      if (exclusions.excludes(cls)) {
        classes_hit.insert(cls);
        hit = true;
      }
    }
    excluded_entries += hit;
  }
  c.expect(excluded_entries >= 10, std::to_string(excluded_entries) + " excluded-class entries");
  c.expect(classes_hit.size() == exclusions.classes().size(),
           "excluded entries cover " + std::to_string(classes_hit.size()) + " of the ten classes");

  for (const auto& rec : kb->records()) {
    std::vector<std::string> phrases{rec.label};
    phrases.insert(phrases.end(), rec.aliases.begin(), rec.aliases.end());
    for (const auto& p : phrases) {
      for (const auto& cand : link_concept(p, *kb, exclusions)) {
        c.expect(!exclusions.excludes_any(cand.classes), "'" + p + "' returned excluded " + cand.kb_id);
      }
    }
  }
  const auto ranked = link_concept("double category", *kb, exclusions);
  c.expect(!ranked.empty() && ranked.front().kb_id == "Q99613675", "double category did not rank Q99613675 first");
}

int run_cli(std::vector<std::string> args, std::string& out) {
  args.insert(args.begin(), "mathlex");
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(args, o, e, {});
  out = o.str();
  if (code != 0) out += e.str();
  return code;
}

void end_to_end(Check& c) {
  const fs::path dir = fs::temp_directory_path() / ("mathlex-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string manifest = (dir / "manifest.json").string();
  std::string out;
  for (const char* id : {"tac", "nlab", "bct"}) {
    const auto raw = (kSource / "data/demo/raw" / (std::string(id) + ".conllu")).string();
    c.expect(run_cli({"ingest", "--corpus-id", id, "--input", raw, "--out", manifest}, out) == 0, "ingest: " + out);
  }
  const std::string snapshot = (dir / "demo.idx").string();
  c.expect(run_cli({"index", "--manifest", manifest, "--out", snapshot}, out) == 0, "index: " + out);

  const std::vector<std::string> search = {"search", "--snapshot", snapshot, "--q", "double category",
                                           "--linker", "fixture",
                                           "--kb", (kSource / "data/demo/kb.jsonl").string(),
                                           "--class-graph", (kSource / "data/demo/class_graph.tsv").string()};
  std::string first, second;
  c.expect(run_cli(search, first) == 0, "search: " + first);
  c.expect(run_cli(search, second) == 0, "search (second run): " + second);
  c.expect(first == second, "output differs between runs");

  auto section = [&](const std::string& name) {
    const auto start = first.find("== " + name + " ==\n");
    if (start == std::string::npos) return std::string("<missing>");
    const auto body = start + name.size() + 7;
    const auto end = first.find("\n\n", body);
    return first.substr(body, end == std::string::npos ? std::string::npos : end - body + 1);
  };
  const std::string entities = section("Entities");
  c.expect(entities.find("Q99613675") != std::string::npos, "no Q99613675 entity card");
  c.expect(section("BCT") == "(no results)\n", "BCT section is not empty: " + section("BCT"));
  c.expect(section("nLab").find("[[") != std::string::npos, "no nLab hits");
  c.expect(section("TAC").find("[[") != std::string::npos, "no TAC hits");
  const auto order = std::vector<std::size_t>{first.find("== Entities =="), first.find("== BCT =="),
                                              first.find("== nLab =="), first.find("== TAC ==")};
  c.expect(std::is_sorted(order.begin(), order.end()), "sections out of order");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> body;
    double budget_s;
  };
  const std::vector<Criterion> criteria = {
      {"metric-exactness", metric_exactness, 1.0},
      {"index-oracle-equivalence", index_oracle, 30.0},
      {"figure1-roundtrip", figure1_roundtrip, 0.0},
      {"math-plaintextification", math_plaintext, 0.0},
      {"textrank-oracle", textrank_oracle, 0.0},
      {"linker-exclusion-soundness", linker_exclusion, 0.0},
      {"end-to-end-demo", end_to_end, 0.0},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      crit.body(check);
    } catch (const std::exception& e) {
      check.problems.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (crit.budget_s > 0 && secs >= crit.budget_s) {
      check.problems.push_back("took " + fmt(secs) + " s (budget " + fmt(crit.budget_s) + " s)");
    }
    std::ostringstream line;
    line << (check.ok() ? "PASS " : "FAIL ") << crit.name << " (" << std::fixed;
    line.precision(3);
    line << secs << " s)";
    for (std::size_t i = 0; i < check.problems.size() && i < 3; ++i) line << "; " << check.problems[i];
    if (check.problems.size() > 3) line << "; +" << check.problems.size() - 3 << " more";
    std::cout << line.str() << std::endl;
    failed += !check.ok();
  }
  return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "mathlex/manifest.hpp"
#include "mathlex/service.hpp"
#include "scratch_dir.hpp"
#include "test_support.hpp"

namespace mathlex {
namespace {

using testing::ScratchDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome mathlex(std::vector<std::string> args, const std::map<std::string, std::string>& env = {}) {
  args.insert(args.begin(), "mathlex");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

void write(const std::filesystem::path& path, const std::string& content) { std::ofstream(path) << content; }

// Ingests the three demo corpora into `dir` and returns the manifest path.
std::filesystem::path ingest_demo(const ScratchDir& dir) {
  const auto manifest = dir / "manifest.json";
  for (const char* id : {"tac", "nlab", "bct"}) {
    const auto r = mathlex({"ingest", "--corpus-id", id, "--input",
                            p(testing::demo(std::string("raw/") + id + ".conllu")), "--out", p(manifest)});
    EXPECT_EQ(r.code, 0) << r.err;
  }
  return manifest;
}

TEST(CliIngest, Figure1) {
  ScratchDir dir;
  const auto r = mathlex({"ingest", "--corpus-id", "TAC", "--input", p(testing::fixture("figure1.conllu")), "--out",
                          p(dir / "manifest.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ingested tac: 1 documents, 1 sentences\n");
  const auto m = read_manifest(dir / "manifest.json");
  ASSERT_EQ(m.corpora.size(), 1u);
  EXPECT_EQ(m.corpora[0].display_name, "TAC");
  EXPECT_EQ(testing::slurp(dir / "tac.conllu"), testing::slurp(testing::fixture("figure1.conllu")));
}

TEST(CliIngest, NoInputsIsAUsageError) {
  ScratchDir dir;
  const auto r = mathlex({"ingest", "--corpus-id", "tac", "--out", p(dir / "manifest.json")});
  EXPECT_EQ(r.code, cli::kUserError);
  EXPECT_NE(r.err.find("no inputs"), std::string::npos);
}

TEST(CliIngest, ReportsEveryBadFileAndWritesNothing) {
  ScratchDir dir;
  const auto r = mathlex({"ingest", "--corpus-id", "tac", "--input", p(testing::fixture("figure1.conllu")),
                          p(testing::fixture("corrupt.conllu")), p(dir / "missing.conllu"), "--out",
                          p(dir / "manifest.json")});
  EXPECT_EQ(r.code, cli::kUserError);
  EXPECT_NE(r.err.find("corrupt.conllu:4:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("missing.conllu"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("2 problem(s)"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "tac.conllu"));
}

TEST(CliIngest, MarkdownAndLatexSources) {
  ScratchDir dir;
  write(dir / "monad.md", "# Monad\n\nA **monad** on a category $\\mathcal{C}$ is a monoid in endofunctors.\n");
  write(dir / "list.md", "# List of notation\n\nSymbols used here.\n");
  write(dir / "note.tex",
        "\\title{Spans}\n\\begin{document}\n\\begin{definition}A \\emph{span} is a pair of maps with a "
        "common domain.\\end{definition}\nSpans compose by pullback.\n\\end{document}\n");
  const auto r = mathlex({"ingest", "--corpus-id", "nlab", "--input", p(dir / "monad.md"), p(dir / "list.md"),
                          p(dir / "note.tex"), "--out", p(dir / "manifest.json"), "--definitions-out",
                          p(dir / "defs.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1 dropped"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("note: corpus has no POS annotation"), std::string::npos);
  const auto store = testing::slurp(dir / "nlab.conllu");
  EXPECT_NE(store.find("# text = A monad on a category C is a monoid in endofunctors ."), std::string::npos)
      << store;
  EXPECT_EQ(store.find('\\'), std::string::npos);
  const auto defs = load_definitions(dir / "defs.jsonl");
  ASSERT_EQ(defs.size(), 1u);
  EXPECT_EQ(defs[0].headword, "span");
  EXPECT_EQ(defs[0].doc_id, "nlab-note");
}

TEST(CliSearch, MissingSnapshotHasAnActionableError) {
  ScratchDir dir;
  const auto r = mathlex({"search", "--snapshot", p(dir / "index.snap"), "--q", "monad"});
  EXPECT_EQ(r.code, cli::kUserError);
  EXPECT_NE(r.err.find("mathlex index --manifest"), std::string::npos) << r.err;
  const auto none = mathlex({"search", "--q", "monad"});
  EXPECT_EQ(none.code, cli::kUserError);
  EXPECT_NE(none.err.find("--snapshot"), std::string::npos);
}

TEST(CliSearch, TextOutputAndEmptySections) {
  ScratchDir dir;
  const auto manifest = ingest_demo(dir);
  ASSERT_EQ(mathlex({"index", "--manifest", p(manifest), "--out", p(dir / "index.snap")}).code, 0);
  const auto r = mathlex({"search", "--snapshot", p(dir / "index.snap"), "--q", "double category", "--kb",
                          p(testing::demo("kb.jsonl")), "--class-graph", p(testing::demo("class_graph.tsv")),
                          "--linker", "fixture"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("== BCT ==\n(no results)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Q99613675"), std::string::npos);
  EXPECT_NE(r.out.find("A [[double category]] is an internal category"), std::string::npos);
}

TEST(CliSearch, JsonMatchesTheApi) {
  ScratchDir dir;
  const auto manifest = ingest_demo(dir);
  const auto cli = mathlex({"search", "--manifest", p(manifest), "--q", "sifted colimits", "--format", "json"});
  ASSERT_EQ(cli.code, 0) << cli.err;
  ServiceConfig cfg;
  cfg.manifest = manifest;
  SearchService svc(load_index(cfg), nullptr);
  const auto api = svc.search(std::string("sifted colimits"), std::nullopt);
  ASSERT_EQ(api.status, 200);
  EXPECT_EQ(search_response_from_json(cli.out), search_response_from_json(api.body));
}

TEST(CliSearch, FlagsBeatEnvironmentBeatConfig) {
  ScratchDir dir;
  const auto conf = testing::demo("demo.conf");
  auto entities = [](const Outcome& r) {
    return nlohmann::json::parse(r.out).contains("entities");
  };
  const auto from_file = mathlex({"search", "--config", p(conf), "--q", "monad", "--format", "json"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_TRUE(entities(from_file));
  const std::map<std::string, std::string> env{{"MATHLEX_LINKER_MODE", "off"}};
  const auto from_env = mathlex({"search", "--config", p(conf), "--q", "monad", "--format", "json"}, env);
  EXPECT_FALSE(entities(from_env));
  const auto from_flag =
      mathlex({"search", "--config", p(conf), "--q", "monad", "--format", "json", "--linker", "fixture"}, env);
  EXPECT_TRUE(entities(from_flag));
  const auto bad_env = mathlex({"search", "--config", p(conf), "--q", "monad"}, {{"MATHLEX_PORT", "x"}});
  EXPECT_EQ(bad_env.code, cli::kUserError);
}

TEST(CliEvaluate, TermsTableAndJson) {
  const auto r = mathlex({"evaluate", "--task", "terms", "--pred", "baseline=" + p(testing::fixture("terms_pred.txt")),
                          "--gold", "keywords=" + p(testing::fixture("terms_gold.txt")), "--per-benchmark"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("keywords"), std::string::npos);
  EXPECT_NE(r.out.find("Combined"), std::string::npos);
  EXPECT_NE(r.out.find("0.50"), std::string::npos) << r.out;

  const auto j = mathlex({"evaluate", "--task", "terms", "--pred", p(testing::fixture("terms_pred.txt")), "--gold",
                          p(testing::fixture("terms_gold.txt")), "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto table = report_from_json(j.out);
  ASSERT_EQ(table.columns, (std::vector<std::string>{"Combined"}));
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(table.rows[0].cells[0].f1, 0.5);
}

TEST(CliEvaluate, LinkingAndDefinitions) {
  const auto link = mathlex({"evaluate", "--task", "linking", "--pred", p(testing::fixture("link_pred.jsonl")),
                             "--gold", p(testing::fixture("link_gold.jsonl")), "--format", "json"});
  ASSERT_EQ(link.code, 0) << link.err;
  const auto lt = report_from_json(link.out);
  EXPECT_NEAR(*lt.rows.at(0).cells.at(0).p_at_1, 2.0 / 3.0, 1e-9);
  const auto defs = mathlex({"evaluate", "--task", "definitions", "--pred", p(testing::fixture("defs_pred.jsonl")),
                             "--gold", p(testing::fixture("defs_gold.jsonl"))});
  ASSERT_EQ(defs.code, 0) << defs.err;
  EXPECT_NE(defs.out.find("0.58"), std::string::npos) << defs.out;
  const auto bad = mathlex({"evaluate", "--task", "terms", "--pred", "/nonexistent", "--gold", "/nonexistent"});
  EXPECT_EQ(bad.code, cli::kUserError);
}

TEST(CliExtract, MweAndTextRank) {
  const auto mwe = mathlex({"extract", "--method", "mwe", "--manifest", p(testing::demo("store/manifest.json")),
                            "--corpus", "tac"});
  ASSERT_EQ(mwe.code, 0) << mwe.err;
  EXPECT_NE(mwe.out.find("double category\n"), std::string::npos) << mwe.out;
  const auto tr = mathlex({"extract", "--method", "textrank", "--input", p(testing::demo("store/tac.conllu")),
                           "--top", "3"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  std::istringstream lines(tr.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    EXPECT_NE(line.find('\t'), std::string::npos);
  }
  EXPECT_EQ(n, 3);
  EXPECT_EQ(mathlex({"extract", "--method", "textrank", "--input", p(testing::demo("store/tac.conllu")),
                     "--damping", "1.5"})
                .code,
            cli::kUserError);
}

TEST(CliLink, DuplicatesAreLookedUpOnce) {
  ScratchDir dir;
  write(dir / "concepts.txt", "monad\nMonad\n\ndouble category\nmonad\n");
  const auto r = mathlex({"link", "--concepts", p(dir / "concepts.txt"), "--mode", "fixture", "--kb",
                          p(testing::demo("kb.jsonl")), "--class-graph", p(testing::demo("class_graph.tsv")),
                          "--out", p(dir / "pred.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("linked 4 concepts: 2 lookups, 2 cache hits, 0 retries"), std::string::npos) << r.err;
  const auto preds = load_link_predictions(dir / "pred.jsonl");
  ASSERT_EQ(preds.size(), 4u);
  EXPECT_EQ(preds[2].ranked_ids.front(), "Q99613675");
}

TEST(CliServe, ConfigurationErrorsExitBeforeServing) {
  ScratchDir dir;
  write(dir / "bad.conf", "manifest = nowhere/manifest.json\n");
  const auto r = mathlex({"serve", "--config", p(dir / "bad.conf"), "--port", "0"});
  EXPECT_EQ(r.code, cli::kUserError);
  EXPECT_TRUE(r.out.empty());
  write(dir / "empty.conf", "# nothing\n");
  EXPECT_EQ(mathlex({"serve", "--config", p(dir / "empty.conf")}).code, cli::kUserError);
}

TEST(Cli, UsageAndHelp) {
  EXPECT_EQ(mathlex({}).code, cli::kUserError);
  EXPECT_EQ(mathlex({"frobnicate"}).code, cli::kUserError);
  const auto help = mathlex({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("search"), std::string::npos);
}

}  // namespace
}  // namespace mathlex

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mathlex/errors.hpp"
#include "mathlex/manifest.hpp"
#include "mathlex/service.hpp"
#include "test_support.hpp"

namespace mathlex {
namespace {

const LemmaIndex& demo_index() {
  static const LemmaIndex index = LemmaIndex::build(load_corpora(testing::demo("store/manifest.json")));
  return index;
}

std::shared_ptr<Linker> demo_linker() {
  return std::make_shared<Linker>(
      FixtureKbClient::load(testing::demo("kb.jsonl"), testing::demo("class_graph.tsv")),
      ExclusionList::standard());
}

class DownClient : public KbClient {
 public:
  std::vector<EntityCandidate> lookup(std::string_view) override { throw LinkingError("connection refused", true); }
  std::string mode() const override { return "live"; }
};

TEST(CharRanges, CountCodePoints) {
  const auto s = testing::sentence_of("für/für/ADP alle/alle/DET Kategorien/kategorie/NOUN");
  EXPECT_EQ(char_ranges(s, {{1, 2}, {3, 4}}), (std::vector<CharRange>{{0, 3}, {9, 19}}));
  EXPECT_EQ(char_ranges(s, {{1, 4}}), (std::vector<CharRange>{{0, 19}}));
}

TEST(SearchResponse, HighlightsEveryOccurrence) {
  const auto r = build_search_response(demo_index(), nullptr, "categories", {"nlab"});
  ASSERT_EQ(r.per_corpus.size(), 1u);
  const auto& doc = r.per_corpus[0].documents.at(0);
  EXPECT_EQ(doc.doc_id, "nlab-0001");
  const auto& first = doc.sentences.at(0);
  EXPECT_EQ(first.text, "A double category is an internal category in the category of categories .");
  EXPECT_EQ(first.highlights, (std::vector<CharRange>{{9, 17}, {33, 41}, {49, 57}, {61, 71}}));
  EXPECT_EQ(r.lemmas, (std::vector<std::string>{"category"}));
  EXPECT_FALSE(r.entities.has_value());
}

TEST(SearchResponse, SectionsInDisplayOrderWithEntities) {
  auto linker = demo_linker();
  const auto r = build_search_response(demo_index(), linker.get(), "double category", {});
  std::vector<std::string> ids;
  for (const auto& s : r.per_corpus) ids.push_back(s.corpus_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"bct", "nlab", "tac"}));
  EXPECT_TRUE(r.per_corpus[0].documents.empty());
  EXPECT_EQ(r.per_corpus[1].display_name, "nLab");
  ASSERT_TRUE(r.entities.has_value());
  ASSERT_GE(r.entities->size(), 2u);
  EXPECT_EQ(r.entities->at(0).kb_id, "Q99613675");
  EXPECT_EQ(r.entities->at(0).url, "https://www.wikidata.org/wiki/Q99613675");
  const auto enc = std::find_if(r.entities->begin(), r.entities->end(),
                                [](const EntityCard& e) { return e.kind == "encyclopedia"; });
  ASSERT_NE(enc, r.entities->end());
  EXPECT_EQ(enc->label, "double category");
  EXPECT_TRUE(r.warnings.empty());
}

TEST(SearchResponse, LinkerOutageOmitsEntitiesAndWarns) {
  Linker linker(std::make_shared<DownClient>(), ExclusionList::standard(), {0, {}});
  const auto r = build_search_response(demo_index(), &linker, "double category", {});
  EXPECT_FALSE(r.entities.has_value());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("entity linking unavailable"), std::string::npos);
  EXPECT_FALSE(r.per_corpus[2].documents.empty());
}

TEST(SearchResponse, SentenceCapTruncatesWithAWarning) {
  SearchOptions opts;
  opts.sentence_cap = 1;
  const auto r = build_search_response(demo_index(), nullptr, "double category", {"tac"}, opts);
  const auto& docs = r.per_corpus.at(0).documents;
  const auto capped = std::find_if(docs.begin(), docs.end(), [](const DocumentCard& d) { return d.truncated; });
  ASSERT_NE(capped, docs.end());
  EXPECT_EQ(capped->sentences.size(), 1u);
  EXPECT_GT(capped->total_sentences, 1u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(SearchResponse, JsonRoundTripAndSchema) {
  auto linker = demo_linker();
  const auto r = build_search_response(demo_index(), linker.get(), "sifted colimits", {});
  const auto json = to_json(r);
  EXPECT_EQ(search_response_from_json(json), r);
  const auto parsed = nlohmann::json::parse(json);
  for (const char* key : {"query", "lemmas", "entities", "per_corpus", "warnings"}) {
    EXPECT_TRUE(parsed.contains(key)) << key;
  }
  const auto no_entities = build_search_response(demo_index(), nullptr, "sifted colimits", {});
  EXPECT_EQ(search_response_from_json(to_json(no_entities)), no_entities);
}

TEST(SearchResponse, RenderText) {
  const auto r = build_search_response(demo_index(), nullptr, "sifted colimits", {"bct", "tac"});
  const auto text = render_text(r);
  EXPECT_NE(text.find("Reflexive coequalizers are [[sifted colimits]] ."), std::string::npos) << text;
  EXPECT_NE(text.find("== BCT ==\n(no results)"), std::string::npos) << text;
}

TEST(SearchResponse, BadQueries) {
  EXPECT_THROW(build_search_response(demo_index(), nullptr, " ", {}), QueryError);
  EXPECT_THROW(build_search_response(demo_index(), nullptr, "monad", {"arxiv"}), QueryError);
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

TEST(ServiceConfig, FileThenEnvironment) {
  const auto path = write_temp("mathlex-test.conf",
                               "# comment\nport = 9001\nmanifest = store/manifest.json\nlinker_mode = fixture\n");
  auto cfg = read_service_config(path);
  EXPECT_EQ(cfg.port, 9001);
  EXPECT_EQ(cfg.manifest, path.parent_path() / "store/manifest.json");
  apply_env_overrides(cfg, {{"MATHLEX_PORT", "9002"}, {"MATHLEX_LINKER_MODE", "off"}, {"HOME", "/root"}});
  EXPECT_EQ(cfg.port, 9002);
  EXPECT_EQ(cfg.linker_mode, "off");
  std::filesystem::remove(path);
}

TEST(ServiceConfig, BadValuesAreConfigErrors) {
  ServiceConfig cfg;
  EXPECT_THROW(cfg.set("port", "eighty"), ConfigError);
  EXPECT_THROW(cfg.set("linker_mode", "sometimes"), ConfigError);
  EXPECT_THROW(cfg.set("colour", "blue"), ConfigError);
  const auto bad = write_temp("mathlex-bad.conf", "port 80\n");
  EXPECT_THROW(read_service_config(bad), ConfigError);
  std::filesystem::remove(bad);
  EXPECT_THROW(load_index(ServiceConfig{}), ConfigError);
}

TEST(ServiceConfig, LinkerModes) {
  ServiceConfig cfg;
  EXPECT_EQ(make_linker(cfg), nullptr);
  cfg.linker_mode = "fixture";
  EXPECT_THROW(make_linker(cfg), ConfigError);
  cfg.kb_path = testing::demo("kb.jsonl");
  cfg.class_graph_path = testing::demo("class_graph.tsv");
  EXPECT_EQ(make_linker(cfg)->client().mode(), "fixture");
  cfg.linker_mode = "live";
  EXPECT_THROW(make_linker(cfg), ConfigError);  // no user agent
}

TEST(SearchService, RepliesAndHealth) {
  SearchService svc(demo_index(), demo_linker());
  EXPECT_EQ(svc.search(std::nullopt, std::nullopt).status, 400);
  EXPECT_EQ(svc.search(std::string("  "), std::nullopt).status, 400);
  EXPECT_EQ(svc.search(std::string("monad"), std::string("nope")).status, 400);
  const auto ok = svc.search(std::string("monad"), std::string("bct,tac"));
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(search_response_from_json(ok.body).per_corpus.size(), 2u);

  const auto health = nlohmann::json::parse(svc.health().body);
  EXPECT_EQ(health["status"], "ok");
  EXPECT_EQ(health["linker"], "fixture");
  EXPECT_EQ(health["schema_version"], kSearchSchemaVersion);
  const std::string before = svc.built_at();
  svc.swap_index(demo_index());
  EXPECT_GT(svc.built_at(), before);
  EXPECT_EQ(svc.generation(), 2u);
}

TEST(SearchService, NoCorporaLoaded) {
  SearchService svc(LemmaIndex{}, nullptr);
  EXPECT_EQ(svc.corpora().body, "[]");
  EXPECT_EQ(nlohmann::json::parse(svc.health().body)["linker"], "disabled");
}

}  // namespace
}  // namespace mathlex

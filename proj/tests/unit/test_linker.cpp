#include <gtest/gtest.h>

#include <deque>
#include <sstream>
#include <thread>

#include "mathlex/errors.hpp"
#include "mathlex/linker.hpp"
#include "mathlex/text_util.hpp"
#include "test_support.hpp"

namespace mathlex {
namespace {

std::shared_ptr<FixtureKbClient> demo_kb() {
  return FixtureKbClient::load(testing::demo("kb.jsonl"), testing::demo("class_graph.tsv"));
}

std::vector<std::string> ids_of(const std::vector<EntityCandidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.kb_id);
  return out;
}

TEST(Exclusions, StandardListHasTenClasses) {
  const auto standard = ExclusionList::standard();
  EXPECT_EQ(standard.classes().size(), 10u);
  std::istringstream in(testing::slurp(testing::demo("exclusions.tsv")));
  EXPECT_EQ(ExclusionList::parse(in).classes(), standard.classes());
  EXPECT_TRUE(standard.excludes("Q17334923"));
  EXPECT_FALSE(standard.excludes_any({"Q24034552", "Q9200020"}));
}

TEST(FixtureKb, ClassesExpandToDepthTwo) {
  const auto kb = demo_kb();
  EXPECT_EQ(kb->classes_to_depth2({"Q9200009"}), (std::set<std::string>{"Q9200009", "Q9200012"}));
  EXPECT_EQ(kb->classes_to_depth2({"Q9200004"}), (std::set<std::string>{"Q9200004", "Q17334923"}));
}

TEST(FixtureKb, LookupMatchesLabelsAndAliasesIgnoringCase) {
  auto kb = demo_kb();
  const auto found = kb->lookup("DOUBLE category");
  EXPECT_EQ(ids_of(found), (std::vector<std::string>{"Q99613675", "Q9000030", "Q9000101"}));
  EXPECT_EQ(found[0].matched_via, MatchVia::Label);
  EXPECT_EQ(found[1].matched_via, MatchVia::Alias);
  EXPECT_EQ(kb->lookup_count(), 1u);
  EXPECT_TRUE(kb->lookup("no such phrase").empty());
}

TEST(Linking, DoubleCategoryRanksTheMathEntryFirst) {
  auto kb = demo_kb();
  const auto ranked = link_concept("double category", *kb, ExclusionList::standard());
  EXPECT_EQ(ids_of(ranked), (std::vector<std::string>{"Q99613675", "Q9000030"}));
}

TEST(Linking, PhysicalLocationIsDropped) {
  auto kb = std::make_shared<FixtureKbClient>(
      std::vector<KbRecord>{{"Q7", "square", {}, "polygon", {"Q24034552"}},
                            {"Q3", "Square", {}, "plaza", {"Q17334923"}}},
      std::map<std::string, std::vector<std::string>>{});
  EXPECT_EQ(ids_of(link_concept("square", *kb, ExclusionList::standard())), (std::vector<std::string>{"Q7"}));
  EXPECT_EQ(ids_of(link_concept("square", *kb, ExclusionList{})), (std::vector<std::string>{"Q3", "Q7"}));
}

TEST(Linking, ExclusionStopsAtTheImmediateSuperclass) {
  auto kb = demo_kb();
  // Q9000112's artistic-concept ancestor is three steps up, so it survives;
  // the town square is one step from a physical location and does not.
  EXPECT_EQ(ids_of(link_concept("square", *kb, ExclusionList::standard())),
            (std::vector<std::string>{"Q9000112"}));
}

TEST(Linking, NumericIdOrdering) {
  EXPECT_EQ(kb_numeric_id("Q99613675"), 99613675u);
  EXPECT_EQ(kb_numeric_id("Q"), SIZE_MAX);
  EXPECT_LT(kb_numeric_id("Q9"), kb_numeric_id("Q10"));
}

// No surviving candidate for any label or alias in the KB carries an
// excluded class within two steps.
TEST(LinkingProperty, ExclusionSoundnessOverTheWholeKb) {
  auto kb = demo_kb();
  const auto exclusions = ExclusionList::standard();
  for (const auto& rec : kb->records()) {
    std::vector<std::string> phrases{rec.label};
    phrases.insert(phrases.end(), rec.aliases.begin(), rec.aliases.end());
    for (const auto& p : phrases) {
      for (const auto& c : link_concept(p, *kb, exclusions)) {
        EXPECT_FALSE(exclusions.excludes_any(c.classes)) << p << " -> " << c.kb_id;
        EXPECT_TRUE(text::normalize_phrase(c.label) == text::normalize_phrase(p) ||
                    c.matched_via == MatchVia::Alias);
      }
    }
  }
}

// Adding entries that match nothing else leaves every other result intact,
// and repeated runs agree.
TEST(LinkingProperty, StableAndDeterministic) {
  auto kb = demo_kb();
  auto records = kb->records();
  std::map<std::string, std::vector<std::string>> parents;
  std::istringstream graph(testing::slurp(testing::demo("class_graph.tsv")));
  parents = FixtureKbClient::read_class_graph(graph);
  FixtureKbClient extended(records, parents);
  records.push_back({"Q1", "unrelated phrase", {"another one"}, "", {"Q24034552"}});
  records.push_back({"Q2", "Town hall", {}, "", {"Q17334923"}});
  FixtureKbClient bigger(records, parents);
  const auto exclusions = ExclusionList::standard();
  for (const auto& rec : kb->records()) {
    const auto base = link_concept(rec.label, *kb, exclusions);
    EXPECT_EQ(link_concept(rec.label, extended, exclusions), base);
    EXPECT_EQ(link_concept(rec.label, bigger, exclusions), base) << rec.label;
  }
}

// Replays a script of outcomes: an empty optional means "throw retryable".
class ScriptedClient : public KbClient {
 public:
  explicit ScriptedClient(std::deque<std::optional<std::vector<EntityCandidate>>> script)
      : script_(std::move(script)) {}

  std::vector<EntityCandidate> lookup(std::string_view) override {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls;
    if (script_.empty()) throw LinkingError("script exhausted", true);
    auto next = script_.front();
    script_.pop_front();
    if (!next) throw LinkingError("timeout", true);
    return *next;
  }
  std::string mode() const override { return "fixture"; }

  std::size_t calls = 0;

 private:
  std::mutex mutex_;
  std::deque<std::optional<std::vector<EntityCandidate>>> script_;
};

const EntityCandidate kMonad{"Q9000004", "monad", MatchVia::Label, "", {"Q24034552"}};

TEST(Linker, CachesByNormalizedPhrase) {
  auto kb = demo_kb();
  Linker linker(kb, ExclusionList::standard());
  const auto preds = linker.link_all({"monad", "Monad", " monad "});
  EXPECT_EQ(kb->lookup_count(), 1u);
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_EQ(preds[1].phrase, "Monad");
  EXPECT_EQ(preds[2].ranked_ids, (std::vector<std::string>{"Q9000004"}));
  EXPECT_EQ(linker.log().cache_hits, 2u);
  EXPECT_EQ(linker.log().client_calls, 1u);
}

TEST(Linker, RetriesTransientFailures) {
  auto client = std::make_shared<ScriptedClient>(
      std::deque<std::optional<std::vector<EntityCandidate>>>{std::nullopt, std::vector{kMonad}});
  Linker linker(client, ExclusionList::standard(), {3, std::chrono::milliseconds(1)});
  EXPECT_EQ(ids_of(linker.link("monad")), (std::vector<std::string>{"Q9000004"}));
  EXPECT_EQ(linker.log().retries, 1u);
  EXPECT_EQ(client->calls, 2u);
}

TEST(Linker, ExhaustedRetriesYieldAnEmptyPrediction) {
  auto client = std::make_shared<ScriptedClient>(std::deque<std::optional<std::vector<EntityCandidate>>>{});
  Linker linker(client, ExclusionList::standard(), {2, std::chrono::milliseconds(0)});
  EXPECT_THROW(linker.link("monad"), LinkingError);
  const auto preds = linker.link_all({"monad"});
  ASSERT_EQ(preds.size(), 1u);
  EXPECT_TRUE(preds[0].ranked_ids.empty());
  EXPECT_FALSE(linker.log().messages.empty());
  // Failures are not cached: each attempt reaches the client (1 + 2 retries).
  EXPECT_EQ(client->calls, 6u);
}

TEST(Linker, ConcurrentUseIsSafe) {
  auto kb = demo_kb();
  Linker linker(kb, ExclusionList::standard());
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(linker.link("double category").front().kb_id, "Q99613675");
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(linker.log().cache_hits + linker.log().client_calls, 400u);
}

TEST(LiveKb, ParsesSparqlResults) {
  const std::string body = R"({"head": {"vars": []}, "results": {"bindings": [
    {"item": {"type": "uri", "value": "http://www.wikidata.org/entity/Q99613675"},
     "label": {"value": "double category"}, "via": {"value": "label"},
     "class": {"value": "http://www.wikidata.org/entity/Q24034552"}},
    {"item": {"type": "uri", "value": "http://www.wikidata.org/entity/Q99613675"},
     "class": {"value": "http://www.wikidata.org/entity/Q9200020"}},
    {"item": {"value": "http://www.wikidata.org/entity/Q5"}, "via": {"value": "alias"}}]}})";
  const auto cs = LiveKbClient::parse_response(body);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].classes, (std::set<std::string>{"Q24034552", "Q9200020"}));
  EXPECT_EQ(cs[0].matched_via, MatchVia::Label);
  EXPECT_EQ(cs[1].label, "Q5");
  EXPECT_EQ(cs[1].matched_via, MatchVia::Alias);
  try {
    LiveKbClient::parse_response("<html>");
    FAIL();
  } catch (const LinkingError& e) {
    EXPECT_FALSE(e.retryable());
  }
}

TEST(LiveKb, QueryEscapesAndRequiresUserAgent) {
  EXPECT_THROW(LiveKbClient(LiveKbConfig{"http://localhost/sparql", "  "}), ConfigError);
  LiveKbClient client(LiveKbConfig{"http://localhost/sparql", "mathlex-tests/0.1 (ops@example.org)"});
  const auto q = client.build_query("say \"hi\"");
  EXPECT_NE(q.find(R"("say \"hi\""@en)"), std::string::npos) << q;
  EXPECT_NE(q.find("skos:altLabel"), std::string::npos);
  EXPECT_EQ(client.reachability(), "unknown");
}

}  // namespace
}  // namespace mathlex

#pragma once

// Concept -> knowledge-base linking by exact (case-insensitive) label or
// alias match, dropping entries whose classes fall in an exclusion list.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mathlex/benchmark.hpp"

namespace mathlex {

enum class MatchVia { Label, Alias };

const char* to_string(MatchVia via);

struct EntityCandidate {
  std::string kb_id;
  std::string label;
  MatchVia matched_via = MatchVia::Label;
  std::string description;
  std::set<std::string> classes;  // direct classes and their immediate superclasses

  friend bool operator==(const EntityCandidate&, const EntityCandidate&) = default;
};

class ExclusionList {
 public:
  ExclusionList() = default;
  explicit ExclusionList(std::map<std::string, std::string> classes) : classes_(std::move(classes)) {}

  // The ten broad non-mathematical classes: physical objects, concrete
  // objects, physical locations, Wikimedia categories, activities, human
  // behaviors, artistic concepts, points in time, time intervals, currencies.
  static ExclusionList standard();

  // "<class id>\t<name>" per line.
  static ExclusionList parse(std::istream& in);

  bool excludes(const std::string& class_id) const { return classes_.count(class_id) > 0; }
  bool excludes_any(const std::set<std::string>& class_ids) const;
  const std::map<std::string, std::string>& classes() const { return classes_; }
  bool empty() const { return classes_.empty(); }

 private:
  std::map<std::string, std::string> classes_;  // id -> human-readable name
};

// Source of candidate entries. Implementations must be callable from
// several threads at once.
class KbClient {
 public:
  virtual ~KbClient() = default;

  // Entries whose label or any alias equals `phrase` ignoring case, with
  // classes expanded to depth 2. Throws LinkingError; retryable() marks
  // transport-level failures.
  virtual std::vector<EntityCandidate> lookup(std::string_view phrase) = 0;

  // "fixture" or "live".
  virtual std::string mode() const = 0;
};

struct KbRecord {
  std::string kb_id;
  std::string label;
  std::vector<std::string> aliases;
  std::string description;
  std::vector<std::string> classes;

  friend bool operator==(const KbRecord&, const KbRecord&) = default;
};

// Offline client over a KB snapshot:
//   entries:      {"kb_id": ..., "label": ..., "aliases": [...], "description": ..., "classes": [...]}
//   class graph:  "<child id>\t<parent id>,<parent id>" per line
class FixtureKbClient : public KbClient {
 public:
  FixtureKbClient(std::vector<KbRecord> records, std::map<std::string, std::vector<std::string>> parents);

  static std::shared_ptr<FixtureKbClient> load(const std::filesystem::path& entries,
                                               const std::filesystem::path& class_graph);
  static std::vector<KbRecord> read_records(std::istream& in);
  static std::map<std::string, std::vector<std::string>> read_class_graph(std::istream& in);

  std::vector<EntityCandidate> lookup(std::string_view phrase) override;
  std::string mode() const override { return "fixture"; }

  const std::vector<KbRecord>& records() const { return records_; }
  std::set<std::string> classes_to_depth2(const std::vector<std::string>& direct) const;
  std::size_t lookup_count() const { return lookups_.load(); }

 private:
  std::vector<KbRecord> records_;
  std::map<std::string, std::vector<std::string>> parents_;
  std::atomic<std::size_t> lookups_{0};
};

struct LiveKbConfig {
  std::string endpoint = "https://query.wikidata.org/sparql";
  std::string user_agent;  // required by the public endpoint
  std::chrono::milliseconds timeout{10000};
  double requests_per_second = 1.0;
  std::string language = "en";
};

// SPARQL client. Outbound requests are serialized through a rate limiter.
class LiveKbClient : public KbClient {
 public:
  explicit LiveKbClient(LiveKbConfig config);  // throws ConfigError without a user agent

  std::vector<EntityCandidate> lookup(std::string_view phrase) override;
  std::string mode() const override { return "live"; }

  // Query text sent for a phrase; exposed for inspection.
  std::string build_query(std::string_view phrase) const;
  // Parses a SPARQL JSON result set. Throws LinkingError (non-retryable).
  static std::vector<EntityCandidate> parse_response(const std::string& body);

  // Outcome of the most recent request: "unknown", "reachable", "unreachable".
  std::string reachability() const;

 private:
  void wait_for_slot();

  LiveKbConfig config_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
  mutable std::mutex state_mutex_;
  std::string reachability_ = "unknown";
};

// Candidates for `phrase`, minus excluded entries, ranked label matches
// first and then by the numeric part of the id.
std::vector<EntityCandidate> link_concept(std::string_view phrase, KbClient& client,
                                          const ExclusionList& exclusions);

// Ranking key helper: 99613675 for "Q99613675"; SIZE_MAX without digits.
std::size_t kb_numeric_id(std::string_view kb_id);

struct LinkOptions {
  std::size_t retry_budget = 3;
  std::chrono::milliseconds backoff{0};  // doubled after each retry
};

struct LinkRunLog {
  std::size_t client_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::vector<std::string> messages;
};

// Caching, retrying front end over a client; safe for concurrent use.
class Linker {
 public:
  Linker(std::shared_ptr<KbClient> client, ExclusionList exclusions, LinkOptions options = {});

  // Throws LinkingError once retries are exhausted or on a non-retryable error.
  std::vector<EntityCandidate> link(std::string_view phrase);

  // One prediction per concept, in input order. Concepts that keep failing
  // with retryable errors yield empty predictions and a log message.
  std::vector<LinkPrediction> link_all(const std::vector<std::string>& concepts);

  LinkRunLog log() const;
  KbClient& client() { return *client_; }
  const std::shared_ptr<KbClient>& client_ptr() const { return client_; }

 private:
  void note(std::string message);

  std::shared_ptr<KbClient> client_;
  ExclusionList exclusions_;
  LinkOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<EntityCandidate>> cache_;
  LinkRunLog log_;
};

}  // namespace mathlex

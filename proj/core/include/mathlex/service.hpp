#pragma once

// Search facade shared by the HTTP service and the CLI: one response model,
// one JSON encoding, one text rendering.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mathlex/lemma_index.hpp"
#include "mathlex/linker.hpp"

namespace mathlex {

inline constexpr int kSearchSchemaVersion = 1;

// Code-point offsets into the sentence text, [begin, end).
struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const CharRange&, const CharRange&) = default;
};

// Character ranges of token spans within `sentence.text`. Relies on the text
// being the token surfaces joined by single spaces.
std::vector<CharRange> char_ranges(const Sentence& sentence, const std::vector<TokenSpan>& spans);

struct EntityCard {
  std::string kind;  // "kb" or "encyclopedia"
  std::string kb_id;  // empty for encyclopedia cards
  std::string label;
  std::string description;
  std::string matched_via;
  std::string url;

  friend bool operator==(const EntityCard&, const EntityCard&) = default;
};

struct SentenceCard {
  std::size_t ordinal = 0;
  std::string text;
  std::vector<CharRange> highlights;
  std::vector<TokenSpan> token_spans;

  friend bool operator==(const SentenceCard&, const SentenceCard&) = default;
};

struct DocumentCard {
  std::string doc_id;
  std::string title;
  std::string source_url;
  std::vector<SentenceCard> sentences;
  std::size_t total_sentences = 0;  // before the per-document cap
  bool truncated = false;

  friend bool operator==(const DocumentCard&, const DocumentCard&) = default;
};

struct CorpusSection {
  std::string corpus_id;
  std::string display_name;
  std::vector<DocumentCard> documents;

  friend bool operator==(const CorpusSection&, const CorpusSection&) = default;
};

struct SearchResponse {
  std::string query;
  std::vector<std::string> lemmas;
  // Absent when the linker is disabled or unavailable.
  std::optional<std::vector<EntityCard>> entities;
  std::vector<CorpusSection> per_corpus;
  std::vector<std::string> warnings;

  friend bool operator==(const SearchResponse&, const SearchResponse&) = default;
};

struct SearchOptions {
  std::size_t sentence_cap = 50;  // per document
  std::string encyclopedia_corpus = "nlab";
};

// Runs the query. An empty `corpora` list means every loaded corpus; each
// requested corpus gets a section, empty or not, in display order.
// Throws QueryError for a blank query or unknown corpus. Linker failures are
// reported as warnings and leave `entities` unset.
SearchResponse build_search_response(const LemmaIndex& index, Linker* linker, std::string_view query,
                                     const std::vector<std::string>& corpora,
                                     const SearchOptions& opts = {});

std::string to_json(const SearchResponse& response);
SearchResponse search_response_from_json(const std::string& json);

// Plain-text rendering with the matched words wrapped in [[...]].
std::string render_text(const SearchResponse& response);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path manifest;
  std::filesystem::path snapshot;
  std::string linker_mode = "off";  // fixture | live | off
  std::filesystem::path kb_path;
  std::filesystem::path class_graph_path;
  std::filesystem::path exclusions_path;  // empty: the standard list
  std::string endpoint = "https://query.wikidata.org/sparql";
  int timeout_ms = 10000;
  std::size_t retry_budget = 3;
  double rate_per_sec = 1.0;
  std::string user_agent;
  std::size_t sentence_cap = 50;

  // Applies one key/value; throws ConfigError for unknown keys or bad values.
  // Relative paths resolve against `base`.
  void set(std::string_view key, std::string_view value, const std::filesystem::path& base = {});
};

// Flat "key = value" lines; '#' starts a comment line.
ServiceConfig read_service_config(const std::filesystem::path& path);

// MATHLEX_<KEY> variables (uppercase key) override values already set.
void apply_env_overrides(ServiceConfig& config, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> current_environment();

// Loads the index named by the config (snapshot preferred over manifest).
LemmaIndex load_index(const ServiceConfig& config);
// The configured linker, or null when linker_mode is "off".
std::shared_ptr<Linker> make_linker(const ServiceConfig& config);

// Holds the current index snapshot. Readers take a shared_ptr and keep using
// it while a reload swaps in a new one.
class SearchService {
 public:
  SearchService(LemmaIndex index, std::shared_ptr<Linker> linker, SearchOptions opts = {});

  std::shared_ptr<const LemmaIndex> index() const;
  void swap_index(LemmaIndex index);

  struct Reply {
    int status = 200;
    std::string body;  // JSON
  };

  Reply search(const std::optional<std::string>& q, const std::optional<std::string>& corpora) const;
  Reply corpora() const;
  Reply health() const;

  std::string built_at() const;  // ISO-8601 UTC with milliseconds
  std::size_t generation() const;

 private:
  std::shared_ptr<Linker> linker_;
  SearchOptions opts_;
  mutable std::mutex mutex_;
  std::shared_ptr<const LemmaIndex> index_;
  std::chrono::system_clock::time_point built_at_;
  std::size_t generation_ = 0;
};

// HTTP/1.1 front end: GET /api/search, /api/corpora, /api/health.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<SearchService> service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Throws ConfigError when the address cannot be bound.
  void start(const std::string& host, int port);
  // Blocks until stop() is called from another thread.
  void run(const std::string& host, int port);
  // run() in two steps, so the bound port is known before serving.
  void bind(const std::string& host, int port);
  void listen();
  void stop();
  int bound_port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mathlex

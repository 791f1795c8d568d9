#include "mathlex/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mathlex/errors.hpp"
#include "mathlex/manifest.hpp"
#include "mathlex/text_util.hpp"

extern char** environ;

namespace mathlex {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::vector<CharRange> char_ranges(const Sentence& sentence, const std::vector<TokenSpan>& spans) {
  // starts[i] is the code-point offset of token i (0-based); starts[n] is the
  // text length plus one, as if another token followed.
  std::vector<std::size_t> starts(sentence.tokens.size() + 1, 0);
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    starts[i + 1] = starts[i] + text::utf8_length(sentence.tokens[i].surface) + 1;
  }
  std::vector<CharRange> out;
  for (const auto& s : spans) {
    if (s.begin < 1 || s.end <= s.begin || s.end > sentence.tokens.size() + 1) {
      throw QueryError("token span out of range");
    }
    out.push_back({starts[s.begin - 1], starts[s.end - 1] - 1});
  }
  return out;
}

namespace {

std::vector<EntityCard> encyclopedia_cards(const LemmaIndex& index, std::string_view query,
                                           const std::string& corpus_id) {
  std::vector<EntityCard> cards;
  const std::string key = text::normalize_phrase(query);
  for (const auto& corpus : index.corpora()) {
    if (text::to_lower(corpus.id) != corpus_id) continue;
    for (const auto& doc : corpus.documents) {
      if (text::normalize_phrase(doc.title) != key) continue;
      cards.push_back({"encyclopedia", "", doc.title, corpus_display_name(corpus.id) + " article", "title",
                       doc.source_url});
    }
  }
  return cards;
}

std::string kb_url(const std::string& kb_id) { return "https://www.wikidata.org/wiki/" + kb_id; }

}  // namespace

SearchResponse build_search_response(const LemmaIndex& index, Linker* linker, std::string_view query,
                                     const std::vector<std::string>& corpora, const SearchOptions& opts) {
  SearchResponse r;
  r.query = std::string(text::trim(query));
  r.lemmas = index.lemmatize_query(query);

  const DisplayOrder order = DisplayOrder::standard();
  std::vector<std::string> wanted;
  if (corpora.empty()) {
    wanted = index.corpus_ids();
  } else {
    for (const auto& c : corpora) wanted.push_back(text::to_lower(text::trim(c)));
  }
  const auto hits = index.search(query, wanted, order);

  std::vector<std::string> ids;
  for (const auto& w : wanted) {
    if (std::find(ids.begin(), ids.end(), w) == ids.end()) ids.push_back(w);
  }
  for (const auto& id : order.sorted(ids)) {
    CorpusSection section{id, corpus_display_name(id), {}};
    for (const auto& hit : hits) {
      if (text::to_lower(hit.corpus_id) != id) continue;
      if (section.documents.empty() || section.documents.back().doc_id != hit.doc_id) {
        section.documents.push_back({hit.doc_id, hit.doc_title, hit.source_url, {}, 0, false});
      }
      auto& doc = section.documents.back();
      ++doc.total_sentences;
      if (doc.sentences.size() >= opts.sentence_cap) {
        doc.truncated = true;
        continue;
      }
      doc.sentences.push_back({hit.sentence, hit.text, char_ranges(index.sentence_of(hit), hit.spans), hit.spans});
    }
    for (const auto& doc : section.documents) {
      if (doc.truncated) {
        r.warnings.push_back("showing " + std::to_string(doc.sentences.size()) + " of " +
                             std::to_string(doc.total_sentences) + " sentences for " + id + "/" + doc.doc_id);
      }
    }
    r.per_corpus.push_back(std::move(section));
  }

  std::vector<EntityCard> entities;
  bool linked = linker != nullptr;
  if (linker) {
    try {
      for (const auto& c : linker->link(query)) {
        entities.push_back({"kb", c.kb_id, c.label, c.description, to_string(c.matched_via), kb_url(c.kb_id)});
      }
    } catch (const LinkingError& e) {
      linked = false;
      r.warnings.push_back(std::string("entity linking unavailable: ") + e.what());
    }
  }
  if (linked) {
    for (auto& card : encyclopedia_cards(index, query, opts.encyclopedia_corpus)) {
      entities.push_back(std::move(card));
    }
    r.entities = std::move(entities);
  }
  return r;
}

namespace {

ordered_json span_json(std::size_t b, std::size_t e) { return ordered_json{{"begin", b}, {"end", e}}; }

}  // namespace

std::string to_json(const SearchResponse& response) {
  ordered_json j;
  j["schema_version"] = kSearchSchemaVersion;
  j["query"] = response.query;
  j["lemmas"] = response.lemmas;
  if (response.entities) {
    ordered_json list = ordered_json::array();
    for (const auto& e : *response.entities) {
      ordered_json card;
      card["kind"] = e.kind;
      card["kb_id"] = e.kb_id;
      card["label"] = e.label;
      card["description"] = e.description;
      card["matched_via"] = e.matched_via;
      card["url"] = e.url;
      list.push_back(std::move(card));
    }
    j["entities"] = std::move(list);
  }
  ordered_json sections = ordered_json::array();
  for (const auto& s : response.per_corpus) {
    ordered_json docs = ordered_json::array();
    for (const auto& d : s.documents) {
      ordered_json sentences = ordered_json::array();
      for (const auto& sc : d.sentences) {
        ordered_json hl = ordered_json::array();
        for (const auto& h : sc.highlights) hl.push_back(span_json(h.begin, h.end));
        ordered_json ts = ordered_json::array();
        for (const auto& t : sc.token_spans) ts.push_back(span_json(t.begin, t.end));
        sentences.push_back(ordered_json{{"ordinal", sc.ordinal}, {"text", sc.text}, {"highlights", hl},
                                         {"token_spans", ts}});
      }
      docs.push_back(ordered_json{{"doc_id", d.doc_id},
                                  {"title", d.title},
                                  {"source_url", d.source_url},
                                  {"total_sentences", d.total_sentences},
                                  {"truncated", d.truncated},
                                  {"sentences", sentences}});
    }
    sections.push_back(
        ordered_json{{"corpus_id", s.corpus_id}, {"display_name", s.display_name}, {"documents", docs}});
  }
  j["per_corpus"] = std::move(sections);
  j["warnings"] = response.warnings;
  return j.dump();
}

SearchResponse search_response_from_json(const std::string& body) {
  try {
    const json j = json::parse(body);
    if (j.at("schema_version").get<int>() != kSearchSchemaVersion) {
      throw ParseError("unsupported search schema version", 0);
    }
    SearchResponse r;
    r.query = j.at("query").get<std::string>();
    r.lemmas = j.at("lemmas").get<std::vector<std::string>>();
    if (j.contains("entities")) {
      std::vector<EntityCard> cards;
      for (const auto& e : j["entities"]) {
        cards.push_back({e.at("kind"), e.at("kb_id"), e.at("label"), e.at("description"), e.at("matched_via"),
                         e.at("url")});
      }
      r.entities = std::move(cards);
    }
    for (const auto& s : j.at("per_corpus")) {
      CorpusSection section{s.at("corpus_id"), s.at("display_name"), {}};
      for (const auto& d : s.at("documents")) {
        DocumentCard doc{d.at("doc_id"), d.at("title"), d.at("source_url"), {}, d.at("total_sentences"),
                         d.at("truncated")};
        for (const auto& sc : d.at("sentences")) {
          SentenceCard card{sc.at("ordinal"), sc.at("text"), {}, {}};
          for (const auto& h : sc.at("highlights")) card.highlights.push_back({h.at("begin"), h.at("end")});
          for (const auto& t : sc.at("token_spans")) card.token_spans.push_back({t.at("begin"), t.at("end")});
          doc.sentences.push_back(std::move(card));
        }
        section.documents.push_back(std::move(doc));
      }
      r.per_corpus.push_back(std::move(section));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad search response: ") + e.what(), 0);
  }
}

namespace {

// Byte offset of code point `cp` in UTF-8 `s`.
std::size_t byte_offset(std::string_view s, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) continue;
    if (seen == cp) return i;
    ++seen;
  }
  return s.size();
}

std::string emphasize(const SentenceCard& sc) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& h : sc.highlights) {
    const auto b = byte_offset(sc.text, h.begin);
    const auto e = byte_offset(sc.text, h.end);
    out += sc.text.substr(pos, b - pos);
    out += "[[" + sc.text.substr(b, e - b) + "]]";
    pos = e;
  }
  out += sc.text.substr(pos);
  return out;
}

}  // namespace

std::string render_text(const SearchResponse& r) {
  std::ostringstream out;
  out << "query: " << r.query << "\n";
  out << "lemmas: " << text::join(r.lemmas, " ") << "\n";
  out << "\n== Entities ==\n";
  if (!r.entities) {
    out << "(unavailable)\n";
  } else if (r.entities->empty()) {
    out << "(no results)\n";
  } else {
    for (const auto& e : *r.entities) {
      if (e.kind == "kb") {
        out << e.kb_id << "  " << e.label << "  (" << e.matched_via << ")  " << e.url << "\n";
      } else {
        out << e.description << "  " << e.label << "  " << e.url << "\n";
      }
      if (e.kind == "kb" && !e.description.empty()) out << "    " << e.description << "\n";
    }
  }
  for (const auto& s : r.per_corpus) {
    out << "\n== " << s.display_name << " ==\n";
    if (s.documents.empty()) {
      out << "(no results)\n";
      continue;
    }
    for (const auto& d : s.documents) {
      out << d.doc_id << "  " << d.title;
      if (!d.source_url.empty()) out << "  <" << d.source_url << ">";
      out << "\n";
      for (const auto& sc : d.sentences) out << "  " << sc.ordinal << ": " << emphasize(sc) << "\n";
      if (d.truncated) {
        out << "  (" << d.total_sentences - d.sentences.size() << " more sentences not shown)\n";
      }
    }
  }
  for (const auto& w : r.warnings) out << "\nwarning: " << w << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  T v{};
  in >> v;
  if (!in || !in.eof()) throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  return v;
}

}  // namespace

void ServiceConfig::set(std::string_view key_in, std::string_view value_in, const std::filesystem::path& base) {
  const std::string key = text::to_lower(text::trim(key_in));
  const std::string_view value = text::trim(value_in);
  if (key == "host") {
    host = value;
  } else if (key == "port") {
    port = parse_number<int>(key, value);
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
  } else if (key == "manifest") {
    manifest = resolve(value, base);
  } else if (key == "snapshot") {
    snapshot = resolve(value, base);
  } else if (key == "linker_mode") {
    const std::string mode = text::to_lower(value);
    if (mode != "fixture" && mode != "live" && mode != "off") {
      throw ConfigError("linker_mode must be fixture, live or off");
    }
    linker_mode = mode;
  } else if (key == "kb_path") {
    kb_path = resolve(value, base);
  } else if (key == "class_graph_path") {
    class_graph_path = resolve(value, base);
  } else if (key == "exclusions_path") {
    exclusions_path = resolve(value, base);
  } else if (key == "endpoint") {
    endpoint = value;
  } else if (key == "timeout_ms") {
    timeout_ms = parse_number<int>(key, value);
    if (timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
  } else if (key == "retry_budget") {
    retry_budget = parse_number<std::size_t>(key, value);
  } else if (key == "rate_per_sec") {
    rate_per_sec = parse_number<double>(key, value);
    if (!(rate_per_sec > 0.0)) throw ConfigError("rate_per_sec must be positive");
  } else if (key == "user_agent") {
    user_agent = value;
  } else if (key == "sentence_cap") {
    sentence_cap = parse_number<std::size_t>(key, value);
    if (sentence_cap == 0) throw ConfigError("sentence_cap must be positive");
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

ServiceConfig read_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  ServiceConfig config;
  const auto base = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      config.set(t.substr(0, eq), t.substr(eq + 1), base);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void apply_env_overrides(ServiceConfig& config, const std::map<std::string, std::string>& env) {
  static const char* const keys[] = {"host",         "port",        "manifest",         "snapshot",
                                     "linker_mode",  "kb_path",     "class_graph_path", "exclusions_path",
                                     "endpoint",     "timeout_ms",  "retry_budget",     "rate_per_sec",
                                     "user_agent",   "sentence_cap"};
  for (const char* key : keys) {
    std::string name = "MATHLEX_";
    for (const char* c = key; *c; ++c) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*c))));
    auto it = env.find(name);
    if (it != env.end()) config.set(key, it->second);
  }
}

std::map<std::string, std::string> current_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return env;
}

LemmaIndex load_index(const ServiceConfig& config) {
  if (!config.snapshot.empty()) {
    std::ifstream in(config.snapshot, std::ios::binary);
    if (!in) {
      throw IoError("cannot read index snapshot " + config.snapshot.string() +
                    " (build one with 'mathlex index --manifest <manifest> --out <snapshot>')");
    }
    return load_snapshot(in);
  }
  if (!config.manifest.empty()) return LemmaIndex::build(load_corpora(config.manifest));
  throw ConfigError("no index configured: set 'snapshot' or 'manifest'");
}

std::shared_ptr<Linker> make_linker(const ServiceConfig& config) {
  if (config.linker_mode == "off") return nullptr;
  ExclusionList exclusions = ExclusionList::standard();
  if (!config.exclusions_path.empty()) {
    std::ifstream in(config.exclusions_path);
    if (!in) throw IoError("cannot read exclusions " + config.exclusions_path.string());
    exclusions = ExclusionList::parse(in);
  }
  LinkOptions options;
  options.retry_budget = config.retry_budget;
  std::shared_ptr<KbClient> client;
  if (config.linker_mode == "fixture") {
    if (config.kb_path.empty()) throw ConfigError("linker_mode fixture needs kb_path");
    client = FixtureKbClient::load(config.kb_path, config.class_graph_path);
  } else {
    LiveKbConfig live;
    live.endpoint = config.endpoint;
    live.user_agent = config.user_agent;
    live.timeout = std::chrono::milliseconds(config.timeout_ms);
    live.requests_per_second = config.rate_per_sec;
    client = std::make_shared<LiveKbClient>(live);
    options.backoff = std::chrono::milliseconds(500);
  }
  return std::make_shared<Linker>(std::move(client), std::move(exclusions), options);
}

// ---------------------------------------------------------------------------
// SearchService

SearchService::SearchService(LemmaIndex index, std::shared_ptr<Linker> linker, SearchOptions opts)
    : linker_(std::move(linker)),
      opts_(std::move(opts)),
      index_(std::make_shared<const LemmaIndex>(std::move(index))),
      built_at_(std::chrono::system_clock::now()),
      generation_(1) {}

std::shared_ptr<const LemmaIndex> SearchService::index() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return index_;
}

void SearchService::swap_index(LemmaIndex index) {
  auto fresh = std::make_shared<const LemmaIndex>(std::move(index));
  std::lock_guard<std::mutex> lock(mutex_);
  index_ = std::move(fresh);
  // Timestamps are compared as strings at millisecond precision, so a swap
  // always moves the reported time forward.
  built_at_ = std::max(std::chrono::system_clock::now(), built_at_ + std::chrono::milliseconds(1));
  ++generation_;
}

std::size_t SearchService::generation() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return generation_;
}

std::string SearchService::built_at() const {
  std::chrono::system_clock::time_point t;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    t = built_at_;
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms % 1000 << 'Z';
  return out.str();
}

namespace {

SearchService::Reply error_reply(int status, const std::string& message) {
  return {status, ordered_json{{"error", message}}.dump()};
}

}  // namespace

SearchService::Reply SearchService::search(const std::optional<std::string>& q,
                                           const std::optional<std::string>& corpora) const {
  if (!q || text::trim(*q).empty()) return error_reply(400, "missing query parameter 'q'");
  std::vector<std::string> wanted;
  if (corpora) {
    for (const auto& c : text::split(*corpora, ',')) {
      const auto t = text::trim(c);
      if (!t.empty()) wanted.emplace_back(t);
    }
  }
  const auto idx = index();
  try {
    return {200, to_json(build_search_response(*idx, linker_.get(), *q, wanted, opts_))};
  } catch (const QueryError& e) {
    return error_reply(400, e.what());
  }
}

SearchService::Reply SearchService::corpora() const {
  const auto idx = index();
  std::vector<std::string> ids;
  for (const auto& c : idx->corpora()) ids.push_back(c.id);
  ordered_json list = ordered_json::array();
  for (const auto& id : DisplayOrder::standard().sorted(ids)) {
    for (const auto& c : idx->corpora()) {
      if (c.id != id) continue;
      list.push_back(ordered_json{{"id", c.id},
                                  {"display_name", corpus_display_name(c.id)},
                                  {"documents", c.documents.size()},
                                  {"sentences", c.sentence_count()}});
    }
  }
  return {200, list.dump()};
}

SearchService::Reply SearchService::health() const {
  std::string linker = "disabled";
  if (linker_) {
    if (auto* live = dynamic_cast<LiveKbClient*>(&linker_->client())) {
      linker = live->reachability();
    } else {
      linker = linker_->client().mode();
    }
  }
  ordered_json j{{"status", "ok"},
                 {"schema_version", kSearchSchemaVersion},
                 {"index_built_at", built_at()},
                 {"index_generation", generation()},
                 {"linker", linker}};
  return {200, j.dump()};
}

// ---------------------------------------------------------------------------
// HttpServer

struct HttpServer::Impl {
  std::shared_ptr<SearchService> service;
  httplib::Server server;
  std::thread thread;
  int port = -1;
};

HttpServer::HttpServer(std::shared_ptr<SearchService> service) : impl_(std::make_unique<Impl>()) {
  if (!service) throw ConfigError("HTTP server needs a search service");
  impl_->service = std::move(service);
  auto& server = impl_->server;
  auto* svc = impl_->service.get();

  auto send = [](httplib::Response& res, const SearchService::Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  };
  auto param = [](const httplib::Request& req, const char* name) -> std::optional<std::string> {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  };

  // httplib's default also sets SO_REUSEPORT, which would let a second
  // server share the port instead of failing to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });

  server.Get("/api/search", [=](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->search(param(req, "q"), param(req, "corpora")));
  });
  server.Get("/api/corpora",
             [=](const httplib::Request&, httplib::Response& res) { send(res, svc->corpora()); });
  server.Get("/api/health",
             [=](const httplib::Request&, httplib::Response& res) { send(res, svc->health()); });
  server.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    }
    send(res, error_reply(500, message));
  });
  server.set_error_handler([=](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send(res, error_reply(res.status, res.status == 404 ? "not found" : "request failed"));
  });
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start(const std::string& host, int port) {
  bind(host, port);
  auto& server = impl_->server;
  impl_->thread = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
}

void HttpServer::run(const std::string& host, int port) {
  bind(host, port);
  listen();
}

void HttpServer::bind(const std::string& host, int port) {
  auto& server = impl_->server;
  impl_->port = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (impl_->port < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) impl_->thread.join();
}

int HttpServer::bound_port() const { return impl_->port; }

}  // namespace mathlex

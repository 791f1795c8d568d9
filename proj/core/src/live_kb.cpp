#include <httplib.h>

#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "mathlex/errors.hpp"
#include "mathlex/linker.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme: " + scheme);
#ifndef MATHLEX_HAVE_OPENSSL
  if (scheme == "https") throw ConfigError("built without TLS support; cannot reach " + url);
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string sparql_literal(std::string_view s, const std::string& lang) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n' || c == '\r') {
      out.push_back(' ');
      continue;
    }
    out.push_back(c);
  }
  out += "\"@" + lang;
  return out;
}

std::string last_path_segment(const std::string& uri) {
  const auto slash = uri.find_last_of('/');
  return slash == std::string::npos ? uri : uri.substr(slash + 1);
}

}  // namespace

LiveKbClient::LiveKbClient(LiveKbConfig config) : config_(std::move(config)) {
  if (text::trim(config_.user_agent).empty()) {
    throw ConfigError("the live KB client requires a user agent identifying the operator");
  }
  if (!(config_.requests_per_second > 0.0)) throw ConfigError("requests_per_second must be positive");
  split_endpoint(config_.endpoint);
}

std::string LiveKbClient::build_query(std::string_view phrase) const {
  // Label matching in SPARQL is exact, so the usual capitalizations of the
  // phrase are all offered.
  const std::string lower = text::normalize_phrase(phrase);
  std::set<std::string> variants = {std::string(text::trim(phrase)), lower};
  if (!lower.empty()) {
    std::string capital = lower;
    capital[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(capital[0])));
    variants.insert(capital);
  }
  std::string values;
  for (const auto& v : variants) values += " " + sparql_literal(v, config_.language);
  const std::string lang = "\"" + config_.language + "\"";
  return "SELECT ?item ?label ?description ?via ?class WHERE {\n"
         "  VALUES ?text {" + values + " }\n"
         "  { ?item rdfs:label ?text . BIND(\"label\" AS ?via) }\n"
         "  UNION\n"
         "  { ?item skos:altLabel ?text . BIND(\"alias\" AS ?via) }\n"
         "  OPTIONAL { ?item rdfs:label ?label . FILTER(LANG(?label) = " + lang + ") }\n"
         "  OPTIONAL { ?item schema:description ?description . FILTER(LANG(?description) = " + lang + ") }\n"
         "  OPTIONAL { { ?item wdt:P31 ?class } UNION { ?item wdt:P31/wdt:P279 ?class } }\n"
         "}\n"
         "LIMIT 2000\n";
}

std::vector<EntityCandidate> LiveKbClient::parse_response(const std::string& body) {
  std::map<std::string, EntityCandidate> by_id;
  std::vector<std::string> order;
  try {
    const json root = json::parse(body);
    for (const auto& row : root.at("results").at("bindings")) {
      const std::string id = last_path_segment(row.at("item").at("value").get<std::string>());
      auto [it, inserted] = by_id.try_emplace(id);
      EntityCandidate& c = it->second;
      if (inserted) {
        order.push_back(id);
        c.kb_id = id;
        c.matched_via = MatchVia::Alias;
      }
      if (row.contains("label") && c.label.empty()) c.label = row["label"].at("value").get<std::string>();
      if (row.contains("description") && c.description.empty()) {
        c.description = row["description"].at("value").get<std::string>();
      }
      if (row.contains("via") && row["via"].at("value").get<std::string>() == "label") {
        c.matched_via = MatchVia::Label;
      }
      if (row.contains("class")) c.classes.insert(last_path_segment(row["class"].at("value").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw LinkingError(std::string("malformed KB response: ") + e.what(), false);
  }
  std::vector<EntityCandidate> out;
  for (const auto& id : order) {
    auto& c = by_id[id];
    if (c.label.empty()) c.label = id;
    out.push_back(std::move(c));
  }
  return out;
}

void LiveKbClient::wait_for_slot() {
  std::lock_guard<std::mutex> lock(rate_mutex_);
  const auto now = std::chrono::steady_clock::now();
  if (next_slot_ > now) std::this_thread::sleep_until(next_slot_);
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config_.requests_per_second));
  next_slot_ = std::max(now, next_slot_) + interval;
}

std::string LiveKbClient::reachability() const {
  std::lock_guard<std::mutex> lock(state_mutex_);
  return reachability_;
}

std::vector<EntityCandidate> LiveKbClient::lookup(std::string_view phrase) {
  const Endpoint ep = split_endpoint(config_.endpoint);
  wait_for_slot();

  httplib::Client client(ep.origin);
  const auto secs = config_.timeout.count() / 1000;
  const auto usecs = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Params params{{"query", build_query(phrase)}, {"format", "json"}};
  httplib::Headers headers{{"User-Agent", config_.user_agent},
                           {"Accept", "application/sparql-results+json"}};
  auto res = client.Get(ep.path, params, headers);
  auto set_state = [this](const char* s) {
    std::lock_guard<std::mutex> lock(state_mutex_);
    reachability_ = s;
  };
  if (!res) {
    set_state("unreachable");
    throw LinkingError("KB request failed: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    set_state("unreachable");
    throw LinkingError("KB endpoint returned HTTP " + std::to_string(res->status), true);
  }
  set_state("reachable");
  if (res->status != 200) {
    throw LinkingError("KB endpoint returned HTTP " + std::to_string(res->status), false);
  }
  return parse_response(res->body);
}

}  // namespace mathlex

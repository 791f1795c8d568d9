#include "mathlex/linker.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

using nlohmann::json;

const char* to_string(MatchVia via) { return via == MatchVia::Label ? "label" : "alias"; }

ExclusionList ExclusionList::standard() {
  // TODO: the ids for "human behavior" and "artistic concept" were picked by
  // label; confirm them against the live KB's class hierarchy.
  return ExclusionList({
      {"Q223557", "physical object"},
      {"Q4406616", "concrete object"},
      {"Q17334923", "physical location"},
      {"Q4167836", "Wikimedia category"},
      {"Q1914636", "activity"},
      {"Q3769299", "human behavior"},
      {"Q2198855", "artistic concept"},
      {"Q186408", "point in time"},
      {"Q186081", "time interval"},
      {"Q8142", "currency"},
  });
}

ExclusionList ExclusionList::parse(std::istream& in) {
  std::map<std::string, std::string> classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.rfind("# ", 0) == 0) continue;
    auto tab = line.find('\t');
    std::string id(text::trim(line.substr(0, tab)));
    if (id.empty()) throw ParseError("empty class id", line_no);
    classes[id] = tab == std::string::npos ? id : std::string(text::trim(line.substr(tab + 1)));
  }
  return ExclusionList(std::move(classes));
}

bool ExclusionList::excludes_any(const std::set<std::string>& class_ids) const {
  return std::any_of(class_ids.begin(), class_ids.end(),
                     [this](const std::string& c) { return excludes(c); });
}

// ---------------------------------------------------------------------------
// Fixture client

FixtureKbClient::FixtureKbClient(std::vector<KbRecord> records,
                                 std::map<std::string, std::vector<std::string>> parents)
    : records_(std::move(records)), parents_(std::move(parents)) {
  std::set<std::string> ids;
  for (const auto& r : records_) {
    if (r.kb_id.empty()) throw ParseError("KB record without kb_id", 0);
    if (!ids.insert(r.kb_id).second) throw ParseError("duplicate KB id '" + r.kb_id + "'", 0);
  }
}

std::vector<KbRecord> FixtureKbClient::read_records(std::istream& in) {
  std::vector<KbRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      KbRecord r;
      r.kb_id = j.at("kb_id").get<std::string>();
      r.label = j.at("label").get<std::string>();
      r.aliases = j.value("aliases", std::vector<std::string>{});
      r.description = j.value("description", "");
      r.classes = j.value("classes", std::vector<std::string>{});
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad KB record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::map<std::string, std::vector<std::string>> FixtureKbClient::read_class_graph(std::istream& in) {
  std::map<std::string, std::vector<std::string>> parents;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.rfind("# ", 0) == 0) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected '<child>\\t<parents>'", line_no);
    auto& list = parents[std::string(text::trim(line.substr(0, tab)))];
    for (const auto& p : text::split(line.substr(tab + 1), ',')) {
      auto t = text::trim(p);
      if (!t.empty()) list.emplace_back(t);
    }
  }
  return parents;
}

std::shared_ptr<FixtureKbClient> FixtureKbClient::load(const std::filesystem::path& entries,
                                                       const std::filesystem::path& class_graph) {
  std::ifstream kb(entries);
  if (!kb) throw IoError("cannot read KB fixture " + entries.string());
  auto records = read_records(kb);
  std::map<std::string, std::vector<std::string>> parents;
  if (!class_graph.empty()) {
    std::ifstream graph(class_graph);
    if (!graph) throw IoError("cannot read class graph " + class_graph.string());
    parents = read_class_graph(graph);
  }
  return std::make_shared<FixtureKbClient>(std::move(records), std::move(parents));
}

std::set<std::string> FixtureKbClient::classes_to_depth2(const std::vector<std::string>& direct) const {
  std::set<std::string> out(direct.begin(), direct.end());
  for (const auto& c : direct) {
    auto it = parents_.find(c);
    if (it != parents_.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<EntityCandidate> FixtureKbClient::lookup(std::string_view phrase) {
  ++lookups_;
  const std::string key = text::normalize_phrase(phrase);
  std::vector<EntityCandidate> out;
  for (const auto& r : records_) {
    std::optional<MatchVia> via;
    if (text::normalize_phrase(r.label) == key) {
      via = MatchVia::Label;
    } else {
      for (const auto& a : r.aliases) {
        if (text::normalize_phrase(a) == key) {
          via = MatchVia::Alias;
          break;
        }
      }
    }
    if (!via) continue;
    out.push_back({r.kb_id, r.label, *via, r.description, classes_to_depth2(r.classes)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linking

std::size_t kb_numeric_id(std::string_view kb_id) {
  std::size_t i = 0;
  while (i < kb_id.size() && !std::isdigit(static_cast<unsigned char>(kb_id[i]))) ++i;
  if (i == kb_id.size()) return SIZE_MAX;
  std::size_t value = 0;
  for (; i < kb_id.size() && std::isdigit(static_cast<unsigned char>(kb_id[i])); ++i) {
    value = value * 10 + static_cast<std::size_t>(kb_id[i] - '0');
  }
  return value;
}

std::vector<EntityCandidate> link_concept(std::string_view phrase, KbClient& client,
                                          const ExclusionList& exclusions) {
  if (text::trim(phrase).empty()) throw LinkingError("cannot link an empty phrase", false);
  std::map<std::string, EntityCandidate> by_id;
  for (auto& c : client.lookup(phrase)) {
    if (c.kb_id.empty()) throw LinkingError("KB returned a candidate without an id", false);
    if (exclusions.excludes_any(c.classes)) continue;
    auto [it, inserted] = by_id.try_emplace(c.kb_id, c);
    if (!inserted) {
      if (c.matched_via == MatchVia::Label) it->second.matched_via = MatchVia::Label;
      it->second.classes.insert(c.classes.begin(), c.classes.end());
    }
  }
  std::vector<EntityCandidate> out;
  for (auto& [_, c] : by_id) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const EntityCandidate& a, const EntityCandidate& b) {
    if (a.matched_via != b.matched_via) return a.matched_via == MatchVia::Label;
    const auto na = kb_numeric_id(a.kb_id);
    const auto nb = kb_numeric_id(b.kb_id);
    if (na != nb) return na < nb;
    return a.kb_id < b.kb_id;
  });
  return out;
}

Linker::Linker(std::shared_ptr<KbClient> client, ExclusionList exclusions, LinkOptions options)
    : client_(std::move(client)), exclusions_(std::move(exclusions)), options_(options) {
  if (!client_) throw ConfigError("linker needs a KB client");
}

void Linker::note(std::string message) {
  std::lock_guard<std::mutex> lock(mutex_);
  log_.messages.push_back(std::move(message));
}

std::vector<EntityCandidate> Linker::link(std::string_view phrase) {
  const std::string key = text::normalize_phrase(phrase);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++log_.cache_hits;
      return it->second;
    }
  }
  auto backoff = options_.backoff;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        ++log_.client_calls;
      }
      auto result = link_concept(phrase, *client_, exclusions_);
      std::lock_guard<std::mutex> lock(mutex_);
      cache_.emplace(key, result);
      return result;
    } catch (const LinkingError& e) {
      if (!e.retryable() || attempt >= options_.retry_budget) throw;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        ++log_.retries;
        log_.messages.push_back("retry " + std::to_string(attempt + 1) + " for '" + key + "': " + e.what());
      }
      if (backoff.count() > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
  }
}

std::vector<LinkPrediction> Linker::link_all(const std::vector<std::string>& concepts) {
  std::vector<LinkPrediction> out;
  for (const auto& item : concepts) {
    LinkPrediction p;
    p.phrase = item;
    try {
      for (const auto& c : link(item)) p.ranked_ids.push_back(c.kb_id);
    } catch (const LinkingError& e) {
      if (!e.retryable()) throw;
      note("giving up on '" + item + "' after " + std::to_string(options_.retry_budget) +
           " retries: " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

LinkRunLog Linker::log() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

}  // namespace mathlex

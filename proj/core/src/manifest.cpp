#include "mathlex/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mathlex/conllu.hpp"
#include "mathlex/errors.hpp"

namespace mathlex {

using nlohmann::json;

const CorpusRecord* Manifest::find(const std::string& corpus_id) const {
  for (const auto& c : corpora) {
    if (c.id == corpus_id) return &c;
  }
  return nullptr;
}

void Manifest::upsert(CorpusRecord record) {
  for (auto& c : corpora) {
    if (c.id == record.id) {
      c = std::move(record);
      return;
    }
  }
  corpora.push_back(std::move(record));
}

std::string manifest_to_json(const Manifest& manifest) {
  json corpora = json::array();
  for (const auto& c : manifest.corpora) {
    json dropped = json::array();
    for (const auto& d : c.dropped) dropped.push_back({{"doc_id", d.doc_id}, {"reason", d.reason}});
    corpora.push_back({{"id", c.id},
                       {"display_name", c.display_name},
                       {"paths", c.paths},
                       {"annotated", c.annotated},
                       {"documents", c.documents},
                       {"sentences", c.sentences},
                       {"dropped", dropped}});
  }
  json root = {{"version", Manifest::kVersion}, {"corpora", corpora}};
  return root.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    json root = json::parse(text);
    if (root.value("version", 0) != Manifest::kVersion) {
      throw ParseError("unsupported manifest version", 0);
    }
    for (const auto& c : root.at("corpora")) {
      CorpusRecord r;
      r.id = c.at("id").get<std::string>();
      r.display_name = c.value("display_name", corpus_display_name(r.id));
      r.paths = c.at("paths").get<std::vector<std::string>>();
      r.annotated = c.value("annotated", true);
      r.documents = c.at("documents").get<std::size_t>();
      r.sentences = c.at("sentences").get<std::size_t>();
      if (c.contains("dropped")) {
        for (const auto& d : c.at("dropped")) {
          r.dropped.push_back({d.at("doc_id").get<std::string>(), d.at("reason").get<std::string>()});
        }
      }
      m.corpora.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what(), 0);
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << manifest_to_json(manifest);
}

std::vector<Corpus> load_corpora(const std::filesystem::path& manifest_path) {
  const Manifest manifest = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  std::vector<Corpus> out;
  for (const auto& record : manifest.corpora) {
    Corpus corpus;
    corpus.id = record.id;
    for (const auto& rel : record.paths) {
      const auto path = base / rel;
      std::ifstream in(path);
      if (!in) throw IoError("cannot read corpus file " + path.string());
      try {
        auto docs = parse_conllu(in, record.id);
        for (auto& d : docs) corpus.documents.push_back(std::move(d));
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
      }
    }
    if (corpus.documents.size() != record.documents || corpus.sentence_count() != record.sentences) {
      throw BuildError("corpus '" + record.id + "' does not match its manifest: expected " +
                       std::to_string(record.documents) + " documents / " +
                       std::to_string(record.sentences) + " sentences, found " +
                       std::to_string(corpus.documents.size()) + " / " +
                       std::to_string(corpus.sentence_count()));
    }
    out.push_back(std::move(corpus));
  }
  return out;
}

}  // namespace mathlex

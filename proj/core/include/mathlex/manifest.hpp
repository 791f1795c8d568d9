#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mathlex/corpus.hpp"

namespace mathlex {

struct DroppedDocument {
  std::string doc_id;
  std::string reason;

  friend bool operator==(const DroppedDocument&, const DroppedDocument&) = default;
};

struct CorpusRecord {
  std::string id;
  std::string display_name;
  std::vector<std::string> paths;  // CONLL-U files, relative to the manifest
  bool annotated = true;
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::vector<DroppedDocument> dropped;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct Manifest {
  static constexpr int kVersion = 1;

  std::vector<CorpusRecord> corpora;

  const CorpusRecord* find(const std::string& corpus_id) const;
  // Replaces the record with the same id, or appends.
  void upsert(CorpusRecord record);

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& json);

// Parses every corpus listed in the manifest and checks the recorded document
// and sentence counts. Throws BuildError on a count mismatch.
std::vector<Corpus> load_corpora(const std::filesystem::path& manifest_path);

}  // namespace mathlex

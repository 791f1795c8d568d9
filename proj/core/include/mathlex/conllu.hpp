#pragma once

// CONLL-U reader/writer. Document metadata travels in comment lines:
//
//   # newdoc id = tac-0001
//   # title = ...
//   # source_url = ...
//   # authors = A. Author, B. Author
//   # date = 2019-04-01
//   # keywords = double category, free construction
//
// Token lines carry ten tab-separated columns. FEATS, DEPS and MISC must be
// present but are discarded; ID is checked for contiguity.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mathlex/corpus.hpp"

namespace mathlex {

// Throws ParseError (with a 1-based line number) on malformed input.
std::vector<Document> parse_conllu(std::istream& in, std::string_view corpus_id);
std::vector<Document> parse_conllu(std::string_view text, std::string_view corpus_id);

void write_conllu(std::ostream& out, const std::vector<Document>& documents);
std::string to_conllu(const std::vector<Document>& documents);

// Tokenizes raw plain text into a document without linguistic annotation:
// sentences end at '.', '!' or '?' followed by whitespace, tokens split on
// whitespace with trailing punctuation peeled off, lemma = lowercased surface,
// upos = "X", and every token attached to the first one.
Document document_from_plain_text(std::string id, std::string corpus_id, std::string title,
                                  std::string_view text);

// True when the corpus carries real POS annotation, i.e. not every token is
// tagged "X". Empty corpora count as annotated.
bool is_annotated(const Corpus& corpus);

}  // namespace mathlex

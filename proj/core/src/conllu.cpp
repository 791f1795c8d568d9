#include "mathlex/conllu.hpp"

#include <charconv>
#include <istream>
#include <set>
#include <sstream>

#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

namespace {

constexpr std::size_t kColumns = 10;

bool parse_size(std::string_view s, std::size_t& value) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  for (const auto& part : text::split(value, ',')) {
    auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string absent_to_empty(const std::string& s) { return s == "_" ? std::string() : s; }

std::string empty_to_absent(const std::string& s) { return s.empty() ? std::string("_") : s; }

class Reader {
 public:
  explicit Reader(std::string_view corpus_id) : corpus_id_(corpus_id) {}

  void line(std::string_view raw, std::size_t line_no) {
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (text::trim(raw).empty()) {
      flush_sentence();
      return;
    }
    if (raw.front() == '#') {
      comment(raw.substr(1), line_no);
      return;
    }
    token(raw, line_no);
  }

  std::vector<Document> finish() {
    flush_sentence();
    return std::move(docs_);
  }

 private:
  void comment(std::string_view body, std::size_t line_no) {
    body = text::trim(body);
    std::string key;
    std::string_view value;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      key = text::trim(body);
    } else {
      key = text::trim(body.substr(0, eq));
      value = text::trim(body.substr(eq + 1));
    }
    if (key == "newdoc id" || key == "newdoc") {
      flush_sentence();
      std::string id = value.empty() ? corpus_id_ + "-" + std::to_string(docs_.size() + 1)
                                     : std::string(value);
      if (!doc_ids_.insert(id).second) {
        throw ParseError("duplicate document id '" + id + "'", line_no);
      }
      Document d;
      d.id = std::move(id);
      d.corpus_id = corpus_id_;
      docs_.push_back(std::move(d));
      return;
    }
    // Sentence-level comments (sent_id, text, ...) are not stored; text is
    // always derived from the token surfaces.
    if (key == "title") {
      current_doc().title = value;
    } else if (key == "source_url") {
      current_doc().source_url = value;
    } else if (key == "authors") {
      current_doc().authors = parse_list(value);
    } else if (key == "date") {
      current_doc().date = value;
    } else if (key == "keywords") {
      current_doc().keywords = parse_list(value);
    }
  }

  void token(std::string_view raw, std::size_t line_no) {
    auto cols = text::split(raw, '\t');
    if (cols.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (cols[c].empty()) throw ParseError("empty column " + std::to_string(c + 1), line_no);
    }
    const std::string& id = cols[0];
    // Multi-word token ranges and empty nodes are not part of the basic tree.
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) return;

    std::size_t ordinal = 0;
    if (!parse_size(id, ordinal)) throw ParseError("non-numeric token ID '" + id + "'", line_no);
    if (ordinal != pending_.size() + 1) {
      throw ParseError("token ID " + id + " is not contiguous (expected " +
                           std::to_string(pending_.size() + 1) + ")",
                       line_no);
    }
    std::size_t head = 0;
    if (!parse_size(cols[6], head)) throw ParseError("non-numeric HEAD '" + cols[6] + "'", line_no);

    Token t;
    t.surface = cols[1];
    t.lemma = cols[2];
    t.upos = absent_to_empty(cols[3]);
    t.xpos = absent_to_empty(cols[4]);
    t.head = head;
    t.deprel = absent_to_empty(cols[7]);
    pending_.push_back(std::move(t));
  }

  Document& current_doc() {
    if (docs_.empty()) {
      std::string id = corpus_id_ + "-1";
      doc_ids_.insert(id);
      Document d;
      d.id = std::move(id);
      d.corpus_id = corpus_id_;
      docs_.push_back(std::move(d));
    }
    return docs_.back();
  }

  void flush_sentence() {
    if (pending_.empty()) return;
    Document& doc = current_doc();
    doc.sentences.push_back(make_sentence(std::move(pending_), doc.sentences.size()));
    pending_.clear();
  }

  std::string corpus_id_;
  std::vector<Document> docs_;
  std::set<std::string> doc_ids_;
  std::vector<Token> pending_;
};

}  // namespace

std::vector<Document> parse_conllu(std::istream& in, std::string_view corpus_id) {
  Reader reader(corpus_id);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) reader.line(line, ++line_no);
  return reader.finish();
}

std::vector<Document> parse_conllu(std::string_view text, std::string_view corpus_id) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in, corpus_id);
}

void write_conllu(std::ostream& out, const std::vector<Document>& documents) {
  for (const auto& doc : documents) {
    out << "# newdoc id = " << doc.id << '\n';
    if (!doc.title.empty()) out << "# title = " << doc.title << '\n';
    if (!doc.source_url.empty()) out << "# source_url = " << doc.source_url << '\n';
    if (!doc.authors.empty()) out << "# authors = " << text::join(doc.authors, ", ") << '\n';
    if (!doc.date.empty()) out << "# date = " << doc.date << '\n';
    if (!doc.keywords.empty()) out << "# keywords = " << text::join(doc.keywords, ", ") << '\n';
    for (const auto& s : doc.sentences) {
      out << "# sent_id = " << doc.id << '-' << s.doc_offset << '\n';
      out << "# text = " << s.text << '\n';
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const Token& t = s.tokens[i];
        out << (i + 1) << '\t' << empty_to_absent(t.surface) << '\t' << empty_to_absent(t.lemma)
            << '\t' << empty_to_absent(t.upos) << '\t' << empty_to_absent(t.xpos) << "\t_\t"
            << t.head << '\t' << empty_to_absent(t.deprel) << "\t_\t_\n";
      }
      out << '\n';
    }
  }
}

std::string to_conllu(const std::vector<Document>& documents) {
  std::ostringstream out;
  write_conllu(out, documents);
  return out.str();
}

namespace {

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')';
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      // A blank line ends a sentence even without terminal punctuation.
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
      if (j < text.size() && text[j] == '\n') {
        auto piece = text::trim(text.substr(start, i - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = j;
        i = j;
      }
      continue;
    }
    if (!is_sentence_end(text[i])) continue;
    const bool at_end = i + 1 == text.size();
    const bool before_space =
        !at_end && (text[i + 1] == ' ' || text[i + 1] == '\n' || text[i + 1] == '\t');
    if (at_end || before_space) {
      auto piece = text::trim(text.substr(start, i + 1 - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = i + 1;
    }
  }
  auto rest = text::trim(text.substr(std::min(start, text.size())));
  if (!rest.empty()) out.emplace_back(rest);
  return out;
}

}  // namespace

Document document_from_plain_text(std::string id, std::string corpus_id, std::string title,
                                  std::string_view text) {
  Document doc;
  doc.id = std::move(id);
  doc.corpus_id = std::move(corpus_id);
  doc.title = std::move(title);
  for (const auto& sentence_text : split_sentences(text)) {
    std::vector<std::string> surfaces;
    for (auto word : text::split_whitespace(sentence_text)) {
      std::vector<std::string> trailing;
      while (word.size() > 1 && is_trailing_punct(word.back())) {
        trailing.insert(trailing.begin(), std::string(1, word.back()));
        word.pop_back();
      }
      surfaces.push_back(std::move(word));
      for (auto& p : trailing) surfaces.push_back(std::move(p));
    }
    if (surfaces.empty()) continue;
    std::vector<Token> tokens;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      Token t;
      t.surface = surfaces[i];
      t.lemma = text::to_lower(surfaces[i]);
      t.upos = "X";
      t.head = i == 0 ? 0 : 1;
      t.deprel = i == 0 ? "root" : "dep";
      tokens.push_back(std::move(t));
    }
    doc.sentences.push_back(make_sentence(std::move(tokens), doc.sentences.size()));
  }
  return doc;
}

bool is_annotated(const Corpus& corpus) {
  bool any = false;
  for (const auto& d : corpus.documents) {
    for (const auto& s : d.sentences) {
      for (const auto& t : s.tokens) {
        any = true;
        if (t.upos != "X") return true;
      }
    }
  }
  return !any;
}

}  // namespace mathlex

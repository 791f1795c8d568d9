#include "mathlex/lemma_index.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "mathlex/conllu.hpp"
#include "mathlex/errors.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex {

// ---------------------------------------------------------------------------
// DisplayOrder

DisplayOrder::DisplayOrder(std::vector<std::string> preferred) {
  for (auto& p : preferred) preferred_.push_back(text::to_lower(p));
}

DisplayOrder DisplayOrder::standard() { return DisplayOrder({"bct", "nlab", "tac"}); }

std::size_t DisplayOrder::rank(std::string_view id) const {
  const std::string key = text::to_lower(id);
  for (std::size_t i = 0; i < preferred_.size(); ++i) {
    if (preferred_[i] == key) return i;
  }
  return preferred_.size();
}

bool DisplayOrder::before(std::string_view a, std::string_view b) const {
  const auto ra = rank(a);
  const auto rb = rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

std::vector<std::string> DisplayOrder::sorted(std::vector<std::string> ids) const {
  std::stable_sort(ids.begin(), ids.end(),
                   [this](const std::string& a, const std::string& b) { return before(a, b); });
  return ids;
}

// ---------------------------------------------------------------------------
// Build

LemmaIndex LemmaIndex::build(std::vector<Corpus> corpora) {
  // Corpora sharing an id are merged before duplicate documents are checked.
  std::map<std::string, Corpus> merged;
  for (auto& c : corpora) {
    auto [it, inserted] = merged.try_emplace(c.id);
    if (inserted) it->second.id = c.id;
    for (auto& d : c.documents) it->second.documents.push_back(std::move(d));
  }

  LemmaIndex index;
  for (auto& [id, corpus] : merged) {
    std::sort(corpus.documents.begin(), corpus.documents.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < corpus.documents.size(); ++i) {
      if (corpus.documents[i].id == corpus.documents[i - 1].id) {
        throw BuildError("duplicate document '" + corpus.documents[i].id + "' in corpus '" + id + "'");
      }
    }
    index.corpora_.push_back(std::move(corpus));
  }

  std::map<std::string, std::map<std::string, std::size_t>> surface_counts;
  for (std::size_t c = 0; c < index.corpora_.size(); ++c) {
    const auto& docs = index.corpora_[c].documents;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto& sentences = docs[d].sentences;
      for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto& tokens = sentences[s].tokens;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          std::string lemma = text::to_lower(tokens[t].lemma);
          ++surface_counts[text::to_lower(tokens[t].surface)][lemma];
          index.postings_[lemma].push_back({c, d, s, t + 1});
        }
      }
    }
  }
  // Postings are generated in sorted order already.
  for (const auto& [surface, counts] : surface_counts) {
    // std::map iterates lemmas lexicographically, so the first maximum wins ties.
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [lemma, n] : counts) {
      if (n > best_count) {
        best = &lemma;
        best_count = n;
      }
    }
    index.surface_to_lemma_.emplace(surface, *best);
  }
  return index;
}

std::vector<std::string> LemmaIndex::corpus_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : corpora_) ids.push_back(c.id);
  return ids;
}

std::vector<std::string> LemmaIndex::lemmatize_query(std::string_view phrase) const {
  auto words = text::split_whitespace(text::to_lower(phrase));
  if (words.empty()) throw QueryError("query phrase is empty");
  for (auto& w : words) {
    auto it = surface_to_lemma_.find(w);
    if (it != surface_to_lemma_.end()) w = it->second;
  }
  return words;
}

std::vector<TokenSpan> match_spans(const Sentence& sentence, const std::vector<std::string>& lemmas) {
  std::vector<TokenSpan> spans;
  const auto& tokens = sentence.tokens;
  if (lemmas.empty() || lemmas.size() > tokens.size()) return spans;
  std::size_t i = 0;
  while (i + lemmas.size() <= tokens.size()) {
    bool ok = true;
    for (std::size_t k = 0; k < lemmas.size() && ok; ++k) {
      ok = text::to_lower(tokens[i + k].lemma) == lemmas[k];
    }
    if (ok) {
      spans.push_back({i + 1, i + 1 + lemmas.size()});
      i += lemmas.size();
    } else {
      ++i;
    }
  }
  return spans;
}

std::vector<SearchHit> LemmaIndex::search(std::string_view phrase,
                                          const std::vector<std::string>& corpus_filter,
                                          const DisplayOrder& order) const {
  const auto lemmas = lemmatize_query(phrase);

  std::vector<bool> allowed(corpora_.size(), corpus_filter.empty());
  for (const auto& wanted : corpus_filter) {
    const std::string key = text::to_lower(text::trim(wanted));
    bool found = false;
    for (std::size_t c = 0; c < corpora_.size(); ++c) {
      if (text::to_lower(corpora_[c].id) == key) {
        allowed[c] = true;
        found = true;
      }
    }
    if (!found) throw QueryError("unknown corpus '" + wanted + "'");
  }

  std::vector<SearchHit> hits;
  auto it = postings_.find(lemmas.front());
  if (it == postings_.end()) return hits;

  std::tuple<std::size_t, std::size_t, std::size_t> last{SIZE_MAX, SIZE_MAX, SIZE_MAX};
  for (const auto& p : it->second) {
    if (!allowed[p.corpus]) continue;
    std::tuple<std::size_t, std::size_t, std::size_t> key{p.corpus, p.document, p.sentence};
    if (key == last) continue;
    last = key;
    const auto& corpus = corpora_[p.corpus];
    const auto& doc = corpus.documents[p.document];
    const auto& sentence = doc.sentences[p.sentence];
    auto spans = match_spans(sentence, lemmas);
    if (spans.empty()) continue;
    hits.push_back({corpus.id, doc.id, doc.title, doc.source_url, sentence.doc_offset, sentence.text,
                    std::move(spans)});
  }
  std::stable_sort(hits.begin(), hits.end(), [&order](const SearchHit& a, const SearchHit& b) {
    if (a.corpus_id != b.corpus_id) return order.before(a.corpus_id, b.corpus_id);
    return false;
  });
  return hits;
}

const Sentence& LemmaIndex::sentence_of(const SearchHit& hit) const {
  for (const auto& corpus : corpora_) {
    if (corpus.id != hit.corpus_id) continue;
    auto doc = std::lower_bound(corpus.documents.begin(), corpus.documents.end(), hit.doc_id,
                                [](const Document& d, const std::string& id) { return d.id < id; });
    if (doc != corpus.documents.end() && doc->id == hit.doc_id) {
      for (const auto& s : doc->sentences) {
        if (s.doc_offset == hit.sentence) return s;
      }
    }
  }
  throw QueryError("hit does not refer to an indexed sentence");
}

// ---------------------------------------------------------------------------
// Snapshot

namespace {

constexpr std::string_view kMagic = "MATHLEX-INDEX";

std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string("snapshot truncated before ") + what, 0);
  return line;
}

std::size_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(std::string("snapshot: bad ") + what + " '" + s + "'", 0);
  }
}

std::pair<std::string, std::string> split_header(const std::string& line, const char* expected) {
  auto parts = text::split(line, ' ');
  if (parts.empty() || parts[0] != expected) {
    throw ParseError(std::string("snapshot: expected '") + expected + "' section", 0);
  }
  std::string rest = line.size() > parts[0].size() ? line.substr(parts[0].size() + 1) : "";
  return {parts[0], rest};
}

}  // namespace

void save_snapshot(std::ostream& out, const LemmaIndex& index) {
  out << kMagic << ' ' << kSnapshotVersion << '\n';
  out << "corpora " << index.corpora().size() << '\n';
  for (const auto& c : index.corpora()) {
    const std::string body = to_conllu(c.documents);
    out << "corpus " << body.size() << ' ' << c.id << '\n' << body;
  }
  out << "postings " << index.postings().size() << '\n';
  for (const auto& [lemma, list] : index.postings()) {
    out << lemma << '\t';
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& p = list[i];
      if (i > 0) out << ' ';
      out << p.corpus << ':' << p.document << ':' << p.sentence << ':' << p.token;
    }
    out << '\n';
  }
  out << "surfaces " << index.surface_to_lemma().size() << '\n';
  for (const auto& [surface, lemma] : index.surface_to_lemma()) out << surface << '\t' << lemma << '\n';
  out << "end\n";
}

LemmaIndex load_snapshot(std::istream& in) {
  const std::string header = read_line(in, "header");
  const std::string expected = std::string(kMagic) + ' ' + std::to_string(kSnapshotVersion);
  if (header.rfind(std::string(kMagic) + ' ', 0) != 0) throw ParseError("not an index snapshot", 1);
  if (header != expected) throw ParseError("unsupported snapshot version: " + header, 1);

  const std::size_t n_corpora = parse_count(split_header(read_line(in, "corpora"), "corpora").second, "corpus count");
  std::vector<Corpus> corpora;
  for (std::size_t i = 0; i < n_corpora; ++i) {
    const auto rest = split_header(read_line(in, "corpus"), "corpus").second;
    const auto space = rest.find(' ');
    if (space == std::string::npos) throw ParseError("snapshot: malformed corpus header", 0);
    const std::size_t bytes = parse_count(rest.substr(0, space), "corpus length");
    Corpus c;
    c.id = rest.substr(space + 1);
    std::string body(bytes, '\0');
    if (!in.read(body.data(), static_cast<std::streamsize>(bytes))) {
      throw ParseError("snapshot truncated inside corpus '" + c.id + "'", 0);
    }
    c.documents = parse_conllu(body, c.id);
    corpora.push_back(std::move(c));
  }
  LemmaIndex index = LemmaIndex::build(std::move(corpora));

  LemmaIndex::PostingMap postings;
  const std::size_t n_lemmas = parse_count(split_header(read_line(in, "postings"), "postings").second, "posting count");
  for (std::size_t i = 0; i < n_lemmas; ++i) {
    const std::string line = read_line(in, "posting");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("snapshot: malformed posting line", 0);
    auto& list = postings[line.substr(0, tab)];
    for (const auto& item : text::split_whitespace(std::string_view(line).substr(tab + 1))) {
      auto f = text::split(item, ':');
      if (f.size() != 4) throw ParseError("snapshot: malformed posting '" + item + "'", 0);
      list.push_back({parse_count(f[0], "posting"), parse_count(f[1], "posting"),
                      parse_count(f[2], "posting"), parse_count(f[3], "posting")});
    }
  }
  LemmaIndex::SurfaceMap surfaces;
  const std::size_t n_surfaces = parse_count(split_header(read_line(in, "surfaces"), "surfaces").second, "surface count");
  for (std::size_t i = 0; i < n_surfaces; ++i) {
    const std::string line = read_line(in, "surface");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("snapshot: malformed surface line", 0);
    surfaces.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  if (read_line(in, "end marker") != "end") throw ParseError("snapshot: missing end marker", 0);
  if (postings != index.postings() || surfaces != index.surface_to_lemma()) {
    throw ParseError("snapshot postings do not agree with its corpora", 0);
  }
  return index;
}

}  // namespace mathlex

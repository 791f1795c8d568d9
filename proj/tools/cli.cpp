#include "cli.hpp"

#include <CLI11.hpp>

#include <pthread.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <csignal>
#include <sstream>
#include <thread>

#include "mathlex/benchmark.hpp"
#include "mathlex/conllu.hpp"
#include "mathlex/doc_filter.hpp"
#include "mathlex/errors.hpp"
#include "mathlex/extract.hpp"
#include "mathlex/lemma_index.hpp"
#include "mathlex/linker.hpp"
#include "mathlex/manifest.hpp"
#include "mathlex/markup.hpp"
#include "mathlex/service.hpp"
#include "mathlex/text_util.hpp"

namespace mathlex::cli {

namespace fs = std::filesystem;

namespace {

// Errors the operator can fix: bad flags, unreadable or malformed inputs.
struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string corpus_id;
  std::vector<std::string> inputs;
  std::string out;
  std::string filter_rules;
  std::string math_rules;
  std::string definitions_out;
};

std::string markdown_title(std::string_view source) {
  for (const auto& line : text::split(source, '\n')) {
    const auto t = text::trim(line);
    if (t.rfind("# ", 0) == 0) return std::string(text::trim(t.substr(2)));
  }
  return {};
}

std::string latex_title(const std::string& source, const MathRuleTable& rules) {
  static const std::regex title_re(R"(\\title\s*\{([^{}]*)\})");
  std::smatch m;
  if (std::regex_search(source, m, title_re)) return strip_latex(m[1].str(), rules);
  return {};
}

// Sentence range of `body` inside `doc`, matched on the plain-text tokenizer's
// sentence texts.
std::optional<std::pair<std::size_t, std::size_t>> locate_sentences(const Document& doc, std::string_view body) {
  const auto probe = document_from_plain_text("probe", doc.corpus_id, "", body);
  const auto& want = probe.sentences;
  if (want.empty() || want.size() > doc.sentences.size()) return std::nullopt;
  for (std::size_t i = 0; i + want.size() <= doc.sentences.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < want.size() && ok; ++k) ok = doc.sentences[i + k].text == want[k].text;
    if (ok) return std::make_pair(i, i + want.size() - 1);
  }
  return std::nullopt;
}

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  if (a.inputs.empty()) throw UsageError("no inputs");
  const std::string corpus_id = text::to_lower(text::trim(a.corpus_id));
  if (corpus_id.empty()) throw UsageError("--corpus-id must not be empty");

  std::vector<FilterRule> filter = default_filter_rules();
  if (!a.filter_rules.empty()) {
    std::ifstream in(a.filter_rules);
    if (!in) throw IoError("cannot read " + a.filter_rules);
    filter = parse_filter_rules(in);
  }
  MathRuleTable rules = default_math_rules();
  if (!a.math_rules.empty()) {
    std::ifstream in(a.math_rules);
    if (!in) throw IoError("cannot read " + a.math_rules);
    auto extra = parse_math_rules(in);
    // Configured rules take precedence over the defaults.
    extra.insert(extra.end(), rules.begin(), rules.end());
    rules = std::move(extra);
  }

  std::vector<std::string> failures;
  std::vector<Document> docs;
  std::vector<DefinitionRecord> definitions;
  for (const auto& input : a.inputs) {
    const fs::path path(input);
    try {
      const std::string source = read_file(path);
      const std::string ext = text::to_lower(path.extension().string());
      if (ext == ".conllu") {
        for (auto& d : parse_conllu(std::string_view(source), corpus_id)) docs.push_back(std::move(d));
      } else if (ext == ".md" || ext == ".markdown") {
        std::string title = markdown_title(source);
        if (title.empty()) title = path.stem().string();
        docs.push_back(document_from_plain_text(corpus_id + "-" + path.stem().string(), corpus_id,
                                                strip_markdown(title, rules), strip_markdown(source, rules)));
      } else if (ext == ".tex") {
        std::string title = latex_title(source, rules);
        if (title.empty()) title = path.stem().string();
        auto doc = document_from_plain_text(corpus_id + "-" + path.stem().string(), corpus_id, title,
                                            strip_latex(source, rules));
        for (const auto& def : find_latex_definitions(source, rules)) {
          const auto range = locate_sentences(doc, def.text);
          if (!range) {
            err << "warning: " << path.string() << ": definition of '" << def.headword
                << "' does not align with sentence boundaries; skipped\n";
            continue;
          }
          definitions.push_back({def.headword, def.text, doc.id, range->first, range->second});
        }
        docs.push_back(std::move(doc));
      } else {
        throw UsageError("unsupported input type '" + ext + "' (expected .conllu, .md or .tex)");
      }
    } catch (const ParseError& e) {
      // ParseError messages start with "line N: ".
      const std::string msg = e.what();
      if (e.line() > 0) {
        failures.push_back(path.string() + ":" + std::to_string(e.line()) + ":" + msg.substr(msg.find(':') + 1));
      } else {
        failures.push_back(path.string() + ": " + msg);
      }
    } catch (const NormalizationError& e) {
      failures.push_back(path.string() + ": " + e.what());
    } catch (const IoError& e) {
      failures.push_back(e.what());
    } catch (const UsageError& e) {
      failures.push_back(path.string() + ": " + e.what());
    }
  }

  CorpusRecord record;
  record.id = corpus_id;
  record.display_name = corpus_display_name(corpus_id);
  Corpus corpus{corpus_id, {}};
  for (auto& d : docs) {
    const auto decision = filter_document(d, filter);
    if (!decision.keep) {
      record.dropped.push_back({d.id, decision.reason});
      continue;
    }
    corpus.documents.push_back(std::move(d));
  }
  for (const auto& problem : validate_corpus(corpus)) failures.push_back(problem);

  if (!failures.empty()) {
    for (const auto& f : failures) err << "error: " << f << "\n";
    err << "ingest failed: " << failures.size() << " problem(s); nothing written\n";
    return kUserError;
  }

  const fs::path manifest_path(a.out);
  const fs::path store = manifest_path.parent_path() / (corpus_id + ".conllu");
  {
    auto f = open_out(store);
    write_conllu(f, corpus.documents);
  }
  Manifest manifest;
  if (fs::exists(manifest_path)) manifest = read_manifest(manifest_path);
  record.paths = {store.filename().string()};
  record.annotated = is_annotated(corpus);
  record.documents = corpus.documents.size();
  record.sentences = corpus.sentence_count();
  manifest.upsert(record);
  write_manifest(manifest_path, manifest);

  if (!a.definitions_out.empty()) {
    auto f = open_out(a.definitions_out);
    write_definitions(f, definitions);
  }
  out << "ingested " << corpus_id << ": " << record.documents << " documents, " << record.sentences
      << " sentences";
  if (!record.dropped.empty()) out << ", " << record.dropped.size() << " dropped";
  out << "\n";
  for (const auto& d : record.dropped) out << "  dropped " << d.doc_id << " (" << d.reason << ")\n";
  if (!record.annotated) out << "  note: corpus has no POS annotation; extraction methods will refuse it\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// shared configuration for search, link and serve

struct ServiceFlags {
  std::string config;
  std::string snapshot;
  std::string manifest;
  std::string linker;
  std::string kb;
  std::string class_graph;
  std::string exclusions;
  std::string user_agent;
  std::string endpoint;
  std::optional<std::size_t> sentence_cap;
};

void add_service_flags(CLI::App* cmd, ServiceFlags& f, bool with_index) {
  cmd->add_option("--config", f.config, "Flat key = value configuration file");
  if (with_index) {
    cmd->add_option("--snapshot", f.snapshot, "Index snapshot written by 'mathlex index'");
    cmd->add_option("--manifest", f.manifest, "Corpus manifest (index is built in memory)");
  }
  cmd->add_option("--kb", f.kb, "KB fixture (JSON lines)");
  cmd->add_option("--class-graph", f.class_graph, "Class graph for the KB fixture");
  cmd->add_option("--exclusions", f.exclusions, "Excluded-class list (default: the standard ten)");
  cmd->add_option("--user-agent", f.user_agent, "Client identification for the live KB");
  cmd->add_option("--endpoint", f.endpoint, "Live KB SPARQL endpoint");
}

ServiceConfig resolve_config(const ServiceFlags& f, const std::map<std::string, std::string>& env) {
  ServiceConfig c = f.config.empty() ? ServiceConfig{} : read_service_config(f.config);
  apply_env_overrides(c, env);
  auto set = [&c](const char* key, const std::string& v) {
    if (!v.empty()) c.set(key, v);
  };
  if (!f.snapshot.empty() || !f.manifest.empty()) {
    // An index flag replaces whatever index the config named.
    c.snapshot.clear();
    c.manifest.clear();
  }
  set("snapshot", f.snapshot);
  set("manifest", f.manifest);
  set("linker_mode", f.linker);
  set("kb_path", f.kb);
  set("class_graph_path", f.class_graph);
  set("exclusions_path", f.exclusions);
  set("user_agent", f.user_agent);
  set("endpoint", f.endpoint);
  if (f.sentence_cap) c.set("sentence_cap", std::to_string(*f.sentence_cap));
  return c;
}

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
  ServiceFlags service;
  std::string q;
  std::string corpora;
  std::string format = "text";
};

int cmd_search(const SearchArgs& a, std::ostream& out, std::ostream& err,
               const std::map<std::string, std::string>& env) {
  const ServiceConfig config = resolve_config(a.service, env);
  if (config.snapshot.empty() && config.manifest.empty()) {
    throw UsageError("no index given: pass --snapshot <file> (see 'mathlex index') or --manifest <file>");
  }
  if (!config.snapshot.empty() && !fs::exists(config.snapshot)) {
    throw UsageError("index snapshot " + config.snapshot.string() +
                     " not found; build it with 'mathlex index --manifest <manifest> --out " +
                     config.snapshot.string() + "'");
  }
  const LemmaIndex index = load_index(config);
  const auto linker = make_linker(config);
  std::vector<std::string> corpora;
  for (const auto& c : text::split(a.corpora, ',')) {
    if (!text::trim(c).empty()) corpora.emplace_back(text::trim(c));
  }
  SearchOptions opts;
  opts.sentence_cap = config.sentence_cap;
  const auto response = build_search_response(index, linker.get(), a.q, corpora, opts);
  if (a.format == "json") {
    out << to_json(response) << "\n";
  } else {
    out << render_text(response);
  }
  if (linker) {
    for (const auto& m : linker->log().messages) err << "linker: " << m << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// index

int cmd_index(const std::string& manifest, const std::string& out_path, std::ostream& out) {
  const auto index = LemmaIndex::build(load_corpora(manifest));
  {
    auto f = open_out(out_path);
    save_snapshot(f, index);
  }
  std::size_t sentences = 0;
  for (const auto& c : index.corpora()) sentences += c.sentence_count();
  out << "indexed " << index.corpora().size() << " corpora, " << sentences << " sentences, "
      << index.postings().size() << " lemmas -> " << out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string task;
  std::vector<std::string> pred;
  std::vector<std::string> gold;
  bool per_benchmark = false;
  std::string format = "table";
  std::string snapshot;
};

std::pair<std::string, fs::path> labelled(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) return {fs::path(arg).stem().string(), fs::path(arg)};
  return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.pred.empty() || a.gold.empty()) throw UsageError("--pred and --gold are required");
  ReportTable table;
  if (a.task == "terms") {
    table.task = ReportTask::Terms;
    std::optional<LemmaIndex> index;
    if (!a.snapshot.empty()) {
      std::ifstream in(a.snapshot, std::ios::binary);
      if (!in) throw IoError("cannot read " + a.snapshot);
      index = load_snapshot(in);
    }
    const LemmaIndex* lemmatizer = index ? &*index : nullptr;
    std::vector<std::pair<std::string, TermSet>> golds;
    for (const auto& g : a.gold) {
      auto [label, path] = labelled(g);
      const auto kind = parse_benchmark_kind(label);
      auto bench = load_term_benchmark(path, kind.value_or(BenchmarkKind::Keywords), lemmatizer);
      for (const auto& w : bench.warnings) err << "warning: " << w << "\n";
      golds.emplace_back(label, std::move(bench.terms));
    }
    std::vector<TermSet> sets;
    for (const auto& [_, s] : golds) sets.push_back(s);
    const TermSet combined = union_terms(sets);
    table.normalization = to_string(combined.normalization);
    if (a.per_benchmark) {
      for (const auto& [label, _] : golds) table.columns.push_back(label);
    }
    table.columns.push_back("Combined");
    for (const auto& p : a.pred) {
      auto [label, path] = labelled(p);
      const TermSet pred = load_term_file(path, lemmatizer);
      ReportRow row{label, {}};
      if (a.per_benchmark) {
        for (const auto& [_, g] : golds) row.cells.push_back(eval_terms(pred, g));
      }
      row.cells.push_back(eval_terms(pred, combined));
      table.rows.push_back(std::move(row));
    }
  } else if (a.task == "definitions") {
    table.task = ReportTask::Definitions;
    std::vector<std::pair<std::string, std::vector<DefinitionRecord>>> golds;
    for (const auto& g : a.gold) {
      auto [label, path] = labelled(g);
      golds.emplace_back(label, load_definitions(path));
    }
    for (const auto& [label, _] : golds) table.columns.push_back(label);
    for (const auto& p : a.pred) {
      auto [label, path] = labelled(p);
      const auto pred = load_definitions(path);
      ReportRow row{label, {}};
      for (const auto& [_, g] : golds) row.cells.push_back(eval_definitions(pred, g));
      table.rows.push_back(std::move(row));
    }
  } else if (a.task == "linking") {
    table.task = ReportTask::Linking;
    std::vector<std::pair<std::string, std::vector<ConceptLinkGold>>> golds;
    for (const auto& g : a.gold) {
      auto [label, path] = labelled(g);
      golds.emplace_back(label, load_link_gold(path));
    }
    for (const auto& [label, _] : golds) table.columns.push_back(label);
    for (const auto& p : a.pred) {
      auto [label, path] = labelled(p);
      const auto pred = load_link_predictions(path);
      ReportRow row{label, {}};
      for (const auto& [_, g] : golds) row.cells.push_back(eval_linking(pred, g));
      table.rows.push_back(std::move(row));
    }
  } else {
    throw UsageError("--task must be terms, definitions or linking");
  }
  out << (a.format == "json" ? report_to_json(table) + "\n" : format_report(table));
  return kOk;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string method;
  std::string input;
  std::string manifest;
  std::string corpus;
  std::size_t min_freq = 2;
  std::size_t max_len = 5;
  std::size_t window = 2;
  double damping = 0.85;
  double keep_ratio = 1.0 / 3.0;
  std::size_t top = 0;
};

Corpus extraction_corpus(const ExtractArgs& a) {
  if (!a.input.empty()) {
    Corpus c{a.corpus.empty() ? "input" : text::to_lower(a.corpus), {}};
    const std::string source = read_file(a.input);
    c.documents = parse_conllu(std::string_view(source), c.id);
    return c;
  }
  if (a.manifest.empty()) throw UsageError("pass --input <conllu> or --manifest <file> --corpus <id>");
  Corpus merged{text::to_lower(a.corpus), {}};
  for (auto& c : load_corpora(a.manifest)) {
    if (a.corpus.empty() || text::to_lower(c.id) == merged.id) {
      for (auto& d : c.documents) merged.documents.push_back(std::move(d));
      if (a.corpus.empty()) merged.id = "all";
    }
  }
  if (merged.documents.empty()) throw UsageError("no documents for corpus '" + a.corpus + "'");
  return merged;
}

int cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const Corpus corpus = extraction_corpus(a);
  if (a.method == "mwe") {
    const auto terms = extract_mwe(corpus, MweOptions{a.min_freq, a.max_len});
    std::size_t n = 0;
    for (const auto& t : terms.terms) {
      if (a.top > 0 && n++ >= a.top) break;
      out << t << "\n";
    }
  } else if (a.method == "textrank") {
    TextRankOptions opts;
    opts.window = a.window;
    opts.damping = a.damping;
    opts.keep_ratio = a.keep_ratio;
    const auto ranked = textrank(corpus, opts);
    std::size_t n = 0;
    for (const auto& r : ranked) {
      if (a.top > 0 && n++ >= a.top) break;
      out << r.phrase << "\t" << std::fixed << std::setprecision(6) << r.score << "\n";
    }
  } else {
    throw UsageError("--method must be mwe or textrank");
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// link

struct LinkArgs {
  ServiceFlags service;
  std::string concepts;
  std::string mode;
  std::string out;
};

int cmd_link(const LinkArgs& a, std::ostream& out, std::ostream& err,
             const std::map<std::string, std::string>& env) {
  ServiceFlags flags = a.service;
  flags.linker = a.mode;
  ServiceConfig config = resolve_config(flags, env);
  if (config.linker_mode == "off") throw UsageError("--mode must be fixture or live");
  const auto linker = make_linker(config);

  std::vector<std::string> concepts;
  {
    std::istringstream in(read_file(a.concepts));
    std::string line;
    while (std::getline(in, line)) {
      const auto t = text::trim(line);
      if (!t.empty()) concepts.emplace_back(t);
    }
  }
  const auto predictions = linker->link_all(concepts);
  if (a.out.empty()) {
    write_link_predictions(out, predictions);
  } else {
    auto f = open_out(a.out);
    write_link_predictions(f, predictions);
  }
  const auto log = linker->log();
  err << "linked " << concepts.size() << " concepts: " << log.client_calls << " lookups, " << log.cache_hits
      << " cache hits, " << log.retries << " retries\n";
  for (const auto& m : log.messages) err << "linker: " << m << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  ServiceFlags service;
  std::string host;
  std::optional<int> port;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, const std::map<std::string, std::string>& env) {
  ServiceConfig config = resolve_config(a.service, env);
  if (!a.host.empty()) config.set("host", a.host);
  if (a.port) config.set("port", std::to_string(*a.port));
  SearchOptions opts;
  opts.sentence_cap = config.sentence_cap;
  auto service = std::make_shared<SearchService>(load_index(config), make_linker(config), opts);
  HttpServer server(service);
  server.bind(config.host, config.port);
  out << "serving on http://" << config.host << ":" << server.bound_port() << "\n" << std::flush;

  // SIGINT/SIGTERM are taken synchronously by a waiter thread; the mask is
  // set before listen() so httplib's worker threads inherit it.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });
  server.listen();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  CLI::App app{"Corpus workbench for mathematical language", "mathlex"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mathlex 0.1.0");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse inputs into a corpus store and update the manifest");
  c_ingest->add_option("--corpus-id", ingest.corpus_id, "Corpus key, e.g. tac, nlab, bct")->required();
  c_ingest->add_option("--input", ingest.inputs, "CONLL-U, Markdown or LaTeX files")->expected(0, -1);
  c_ingest->add_option("--out", ingest.out, "Manifest to create or update")->required();
  c_ingest->add_option("--filter-rules", ingest.filter_rules, "Document filter rules");
  c_ingest->add_option("--math-rules", ingest.math_rules, "Extra math rewrite rules");
  c_ingest->add_option("--definitions-out", ingest.definitions_out, "Write LaTeX definitions as JSON lines");

  std::string index_manifest;
  std::string index_out;
  auto* c_index = app.add_subcommand("index", "Build an index snapshot from a manifest");
  c_index->add_option("--manifest", index_manifest)->required();
  c_index->add_option("--out", index_out)->required();

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "Phrase search with per-corpus results");
  add_service_flags(c_search, search.service, true);
  c_search->add_option("--q", search.q, "Query phrase")->required();
  c_search->add_option("--corpora", search.corpora, "Comma-separated corpus ids (default: all)");
  c_search->add_option("--linker", search.service.linker, "fixture, live or off");
  c_search->add_option("--sentence-cap", search.service.sentence_cap, "Sentences shown per document");
  c_search->add_option("--format", search.format)->check(CLI::IsMember({"text", "json"}));

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Score predictions against benchmarks");
  c_eval->add_option("--task", evaluate.task)->required()->check(CLI::IsMember({"terms", "definitions", "linking"}));
  c_eval->add_option("--pred", evaluate.pred, "[label=]path, repeatable")->required();
  c_eval->add_option("--gold", evaluate.gold, "[benchmark=]path, repeatable")->required();
  c_eval->add_flag("--per-benchmark", evaluate.per_benchmark, "One column per gold file plus Combined");
  c_eval->add_option("--format", evaluate.format)->check(CLI::IsMember({"table", "json"}));
  c_eval->add_option("--snapshot", evaluate.snapshot, "Lemma-normalize terms through this index");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Baseline terminology extraction");
  c_extract->add_option("--method", extract.method)->required()->check(CLI::IsMember({"mwe", "textrank"}));
  c_extract->add_option("--input", extract.input, "CONLL-U file");
  c_extract->add_option("--manifest", extract.manifest);
  c_extract->add_option("--corpus", extract.corpus);
  c_extract->add_option("--min-freq", extract.min_freq);
  c_extract->add_option("--max-len", extract.max_len);
  c_extract->add_option("--window", extract.window);
  c_extract->add_option("--damping", extract.damping);
  c_extract->add_option("--keep-ratio", extract.keep_ratio);
  c_extract->add_option("--top", extract.top, "Limit output lines (0: all)");

  LinkArgs link;
  auto* c_link = app.add_subcommand("link", "Link concept phrases to KB entries");
  add_service_flags(c_link, link.service, false);
  c_link->add_option("--concepts", link.concepts, "One concept per line")->required();
  c_link->add_option("--mode", link.mode)->check(CLI::IsMember({"fixture", "live"}));
  c_link->add_option("--out", link.out, "Predictions file (default: stdout)");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP service");
  add_service_flags(c_serve, serve.service, true);
  c_serve->add_option("--host", serve.host);
  c_serve->add_option("--port", serve.port);
  c_serve->add_option("--linker", serve.service.linker, "fixture, live or off");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(std::move(argv_rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (*c_ingest) return cmd_ingest(ingest, out, err);
    if (*c_index) return cmd_index(index_manifest, index_out, out);
    if (*c_search) return cmd_search(search, out, err, env);
    if (*c_eval) return cmd_evaluate(evaluate, out, err);
    if (*c_extract) return cmd_extract(extract, out);
    if (*c_link) return cmd_link(link, out, err, env);
    if (*c_serve) return cmd_serve(serve, out, env);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace mathlex::cli

#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <unordered_set>

#include "symsearch/completion.hpp"
#include "symsearch/corpus.hpp"
#include "symsearch/error.hpp"
#include "symsearch/evaluation.hpp"
#include "symsearch/language.hpp"
#include "symsearch/pipeline_config.hpp"
#include "symsearch/query.hpp"
#include "symsearch/questionnaire.hpp"
#include "symsearch/retrieval.hpp"
#include "symsearch/synthgen.hpp"
#include "symsearch/text_util.hpp"
#include "symsearch/vector_store.hpp"

namespace symsearch::cli {

namespace fs = std::filesystem;

namespace {

std::optional<PipelineConfig> load_config(const Globals& g) {
  if (g.config.empty()) return std::nullopt;
  if (!fs::exists(g.config)) throw DataError("config file '" + g.config + "' does not exist");
  return PipelineConfig::load(g.config);
}

// Flag value when given, else the manifest value.
std::string pick(const std::string& flag, const std::optional<PipelineConfig>& cfg,
                 std::string PipelineConfig::*field) {
  if (!flag.empty() || !cfg) return flag;
  return (*cfg).*field;
}

std::string require(const std::string& value, const char* what) {
  if (value.empty()) throw DataError(std::string("missing ") + what);
  return value;
}

void require_exists(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw DataError(std::string(what) + " '" + path + "' does not exist");
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<QueryText> load_all_queries(const Questionnaire& q, const std::string& generated_path) {
  auto queries = original_queries(q);
  if (!generated_path.empty()) {
    require_exists(generated_path, "query file");
    auto gen = read_queries(text::read_file(generated_path), generated_path);
    validate_queries(gen, q);
    std::unordered_set<std::string> ids;
    for (const auto& x : queries) ids.insert(x.query_id);
    for (auto& x : gen) {
      if (ids.count(x.query_id)) continue;  // original queries listed in the file
      queries.push_back(std::move(x));
    }
  }
  return queries;
}

// Drops corpus embeddings whose sentence was filtered out at ingest.
EmbeddingStore restrict_to_kept(const EmbeddingStore& store, const std::string& corpus_path) {
  auto records = read_corpus(text::read_file(corpus_path), corpus_path);
  std::unordered_set<std::string> kept;
  for (const auto& r : records) {
    if (r.kept) kept.insert(r.doc_id);
  }
  EmbeddingFile f;
  f.dim = store.dim();
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (!kept.count(store.id(i))) continue;
    f.ids.push_back(store.id(i));
    auto v = store.vector(i);
    f.values.insert(f.values.end(), v.begin(), v.end());
  }
  if (f.ids.size() != store.size()) {
    spdlog::info("ignoring {} corpus embeddings of sentences dropped at ingest", store.size() - f.ids.size());
  }
  return EmbeddingStore::from_file(std::move(f));
}

EmbeddingStore load_store_logged(const std::string& path) {
  require_exists(path, "embedding file");
  auto s = EmbeddingStore::load(path);
  for (const auto& w : s.warnings()) spdlog::warn("{}: {}", path, w);
  return s;
}

}  // namespace

int cmd_ingest(const Globals& g, IngestArgs a) {
  const auto cfg = load_config(g);
  a.corpus_dir = require(pick(a.corpus_dir, cfg, &PipelineConfig::corpus_dir), "--corpus-dir");
  a.out = require(pick(a.out, cfg, &PipelineConfig::corpus), "--out");
  if (a.detector.empty()) a.detector = cfg ? cfg->detector : "builtin";
  if (!fs::is_directory(a.corpus_dir)) throw DataError("corpus directory '" + a.corpus_dir + "' does not exist");
  if (!g.force && fs::exists(a.out)) throw DataError("refusing to overwrite existing '" + a.out + "' (use --force)");

  auto detector = make_detector(a.detector);
  auto result = ingest_directory(a.corpus_dir, *detector, g.jobs);
  ensure_parent(a.out);
  text::write_file(a.out, write_corpus(result.records), g.force);
  const std::string stats = result.stats.to_json();
  if (!a.stats.empty()) {
    ensure_parent(a.stats);
    text::write_file(a.stats, stats, g.force);
  }
  std::cout << stats;
  return kOk;
}

int cmd_generate(const Globals& g, GenerateArgs a) {
  const auto cfg = load_config(g);
  a.questionnaire = require(pick(a.questionnaire, cfg, &PipelineConfig::questionnaire), "--questionnaire");
  a.out = require(pick(a.out, cfg, &PipelineConfig::queries), "--out");
  require_exists(a.questionnaire, "questionnaire");
  const auto q = Questionnaire::load(a.questionnaire);

  GenerationConfig gen = cfg ? cfg->generation : GenerationConfig{};
  if (a.n) gen.n_per_option = *a.n;
  if (a.model) gen.model_name = *a.model;
  if (a.temperature) gen.temperature = *a.temperature;
  if (a.max_tokens) gen.max_tokens = *a.max_tokens;
  if (a.retries) gen.retries = *a.retries;
  if (a.in_flight) gen.in_flight = *a.in_flight;
  if (a.seed) gen.seed = *a.seed;
  gen.validate();

  const PromptTemplate tmpl = a.prompt_template.empty() ? PromptTemplate::standard()
                                                        : PromptTemplate::load(a.prompt_template);
  std::unique_ptr<CompletionClient> client;
  if (a.mock) {
    client = std::make_unique<MockCompletionClient>(gen.seed.value_or(0));
  } else {
    client = HttpCompletionClient::from_env();
  }

  if (g.force && fs::exists(a.out)) fs::remove(a.out);
  ensure_parent(a.out);
  auto result = generate_to_file(a.out, q, tmpl, *client, gen);
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  ensure_parent(report_path);
  // The report describes the latest invocation, so a resumed run replaces it.
  text::write_file(report_path, result.report.to_json(), true);
  std::cout << "generated " << result.report.total_texts() << " texts for " << result.report.options.size()
            << " options (" << result.report.shortfall_options() << " short, " << result.report.failed_options()
            << " failed, " << result.report.duplicate_texts << " duplicates) -> " << a.out << "\n";
  return kOk;
}

int cmd_texts(const Globals& g, TextsArgs a) {
  const auto cfg = load_config(g);
  a.questionnaire = pick(a.questionnaire, cfg, &PipelineConfig::questionnaire);
  a.queries = pick(a.queries, cfg, &PipelineConfig::queries);
  a.corpus = pick(a.corpus, cfg, &PipelineConfig::corpus);
  if (a.out_queries.empty() && a.out_corpus.empty()) throw DataError("nothing to do: give --out-queries and/or --out-corpus");

  if (!a.out_queries.empty()) {
    require(a.questionnaire, "--questionnaire");
    require_exists(a.questionnaire, "questionnaire");
    const auto q = Questionnaire::load(a.questionnaire);
    std::string out;
    for (const auto& x : load_all_queries(q, a.queries)) out += x.query_id + '\t' + text::escape_field(x.text) + '\n';
    ensure_parent(a.out_queries);
    text::write_file(a.out_queries, out, g.force);
  }
  if (!a.out_corpus.empty()) {
    require(a.corpus, "--corpus");
    require_exists(a.corpus, "corpus file");
    std::string out;
    for (const auto& r : read_corpus(text::read_file(a.corpus), a.corpus)) {
      if (r.kept) out += r.doc_id + '\t' + text::escape_field(r.text) + '\n';
    }
    ensure_parent(a.out_corpus);
    text::write_file(a.out_corpus, out, g.force);
  }
  return kOk;
}

int cmd_retrieve(const Globals& g, RetrieveArgs a) {
  auto cfg = load_config(g);
  PipelineConfig pc = cfg ? *cfg : PipelineConfig{};
  if (!a.questionnaire.empty()) pc.questionnaire = a.questionnaire;
  if (!a.queries.empty()) pc.queries = a.queries;
  if (!a.corpus.empty()) pc.corpus = a.corpus;
  if (!a.out_dir.empty()) pc.output_dir = a.out_dir;

  // Flags describing a single run replace the manifest's run list.
  if (!a.tag.empty() || !a.corpus_emb.empty() || !a.query_emb.empty()) {
    pc.encoders[a.encoder] = EncoderPaths{require(a.corpus_emb, "--corpus-emb"), require(a.query_emb, "--query-emb")};
    RunConfig rc;
    rc.run_tag = require(a.tag, "--tag");
    rc.query_origin_filter = parse_origin_filter(a.origin);
    rc.encoder_label = a.encoder;
    pc.runs = {rc};
  }
  for (auto& r : pc.runs) {
    if (a.k) r.per_query_k = *a.k;
    if (a.cap) r.cap = *a.cap;
  }
  if (pc.runs.empty()) throw DataError("no runs configured: pass --config or --tag/--corpus-emb/--query-emb");
  pc.validate();
  require(pc.questionnaire, "--questionnaire");
  require(pc.output_dir, "--out-dir");
  require_exists(pc.questionnaire, "questionnaire");

  const auto q = Questionnaire::load(pc.questionnaire);
  const auto queries = load_all_queries(q, pc.queries);
  const bool has_generated = std::any_of(queries.begin(), queries.end(),
                                         [](const QueryText& x) { return x.origin == QueryOrigin::Generated; });

  for (const auto& r : pc.runs) {
    const auto path = (fs::path(pc.output_dir) / (r.run_tag + ".run")).string();
    if (!g.force && fs::exists(path)) throw DataError("refusing to overwrite existing '" + path + "' (use --force)");
    if (r.query_origin_filter == OriginFilter::Generated && !has_generated) {
      throw DataError("run '" + r.run_tag + "' needs generated queries but no query file was given");
    }
  }

  struct Stores {
    EmbeddingStore corpus;
    EmbeddingStore queries;
  };
  std::map<std::string, Stores> stores;
  fs::create_directories(pc.output_dir);
  for (const auto& r : pc.runs) {
    auto it = stores.find(r.encoder_label);
    if (it == stores.end()) {
      const auto& paths = pc.encoders.at(r.encoder_label);
      Stores s{load_store_logged(require(paths.corpus, "encoder corpus path")),
               load_store_logged(require(paths.queries, "encoder queries path"))};
      if (s.corpus.dim() != s.queries.dim()) {
        throw DataError("encoder '" + r.encoder_label + "': corpus embeddings have dim " +
                        std::to_string(s.corpus.dim()) + " but query embeddings have dim " +
                        std::to_string(s.queries.dim()));
      }
      if (!pc.corpus.empty()) {
        require_exists(pc.corpus, "corpus file");
        s.corpus = restrict_to_kept(s.corpus, pc.corpus);
      }
      it = stores.emplace(r.encoder_label, std::move(s)).first;
    }
    const auto entries = build_run(q, queries, it->second.corpus, it->second.queries, r, g.jobs);
    const auto path = (fs::path(pc.output_dir) / (r.run_tag + ".run")).string();
    text::write_file(path, write_run(entries, r.cap), g.force);
    std::cout << r.run_tag << ": " << entries.size() << " entries -> " << path << "\n";
  }
  return kOk;
}

int cmd_evaluate(const Globals& g, EvaluateArgs a) {
  const auto cfg = load_config(g);
  require(a.run, "--run");
  a.qrels = require(pick(a.qrels, cfg, &PipelineConfig::qrels), "--qrels");
  require_exists(a.run, "run file");
  require_exists(a.qrels, "qrels file");
  const auto mode = parse_aggregation_mode(a.mode);
  const auto run = read_run_file(a.run);
  const auto qrels = aggregate(read_qrels_file(a.qrels), mode);
  const auto report = evaluate_run(run, qrels, Questionnaire::kSymptomCount).to_text();
  if (a.out.empty()) {
    std::cout << report;
  } else {
    ensure_parent(a.out);
    text::write_file(a.out, report, g.force);
  }
  return kOk;
}

int cmd_pool(const Globals& g, PoolArgs a) {
  if (a.runs.empty()) throw DataError("missing --runs");
  if (a.k < 1) throw DataError("--k must be >= 1");
  std::vector<std::vector<RunEntry>> runs;
  for (const auto& p : a.runs) {
    require_exists(p, "run file");
    runs.push_back(read_run_file(p));
  }
  const auto out = write_pool(pool_runs(runs, a.k));
  if (a.out.empty()) {
    std::cout << out;
  } else {
    ensure_parent(a.out);
    text::write_file(a.out, out, g.force);
  }
  return kOk;
}

}  // namespace symsearch::cli

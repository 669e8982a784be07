#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "commands.hpp"
#include "symsearch/error.hpp"

using namespace symsearch;
using namespace symsearch::cli;

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("symsearch"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Rank social-media sentences by relevance to depression-inventory symptoms"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline manifest; flags override its values");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--force", g.force, "Overwrite existing outputs");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse per-user TREC files, strip URLs, drop non-English sentences");
  c_ingest->add_option("--corpus-dir", ingest.corpus_dir, "Directory of per-user TREC files");
  c_ingest->add_option("--out", ingest.out, "Canonical corpus file to write");
  c_ingest->add_option("--stats", ingest.stats, "Also write the stats report here");
  c_ingest->add_option("--detector", ingest.detector, "builtin | accept-all | external:<command>");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate synthetic queries for every response option");
  c_gen->add_option("--questionnaire", gen.questionnaire, "Questionnaire file");
  c_gen->add_option("--out", gen.out, "Query file (appended; an interrupted run resumes)");
  c_gen->add_option("--report", gen.report, "Generation report (default: <out>.report.json)");
  c_gen->add_option("--template", gen.prompt_template, "Prompt template file with {N}, {symptom}, {item}");
  c_gen->add_flag("--mock", gen.mock, "Use the offline seeded mock instead of the completion service");
  c_gen->add_option("--seed", gen.seed, "Seed for the mock and the service");
  c_gen->add_option("--n", gen.n, "Texts per response option")->check(CLI::PositiveNumber);
  c_gen->add_option("--model", gen.model, "Completion model name");
  c_gen->add_option("--temperature", gen.temperature, "Sampling temperature");
  c_gen->add_option("--max-tokens", gen.max_tokens, "Completion length limit");
  c_gen->add_option("--retries", gen.retries, "Transport retries per call");
  c_gen->add_option("--in-flight", gen.in_flight, "Concurrent option requests");

  TextsArgs texts;
  auto* c_texts = app.add_subcommand("texts", "Write `id \\t text` files for the embedding exporter");
  c_texts->add_option("--questionnaire", texts.questionnaire, "Questionnaire file");
  c_texts->add_option("--queries", texts.queries, "Generated query file");
  c_texts->add_option("--corpus", texts.corpus, "Canonical corpus file");
  c_texts->add_option("--out-queries", texts.out_queries, "Query texts output");
  c_texts->add_option("--out-corpus", texts.out_corpus, "Kept corpus sentences output");

  RetrieveArgs ret;
  auto* c_ret = app.add_subcommand("retrieve", "Build TREC run files by exact cosine search");
  c_ret->add_option("--questionnaire", ret.questionnaire, "Questionnaire file");
  c_ret->add_option("--queries", ret.queries, "Generated query file");
  c_ret->add_option("--corpus", ret.corpus, "Canonical corpus file (restricts search to kept sentences)");
  c_ret->add_option("--out-dir", ret.out_dir, "Directory for <tag>.run files");
  c_ret->add_option("--corpus-emb", ret.corpus_emb, "Corpus embeddings (single-run mode)");
  c_ret->add_option("--query-emb", ret.query_emb, "Query embeddings (single-run mode)");
  c_ret->add_option("--tag", ret.tag, "Run tag (single-run mode)");
  c_ret->add_option("--origin", ret.origin, "original | generated | all (single-run mode)");
  c_ret->add_option("--encoder", ret.encoder, "Encoder label (single-run mode)");
  c_ret->add_option("--k", ret.k, "Hits kept per query")->check(CLI::PositiveNumber);
  c_ret->add_option("--cap", ret.cap, "Entries kept per symptom")->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score a run against annotator judgments");
  c_eval->add_option("--run", ev.run, "TREC run file");
  c_eval->add_option("--qrels", ev.qrels, "Extended or standard qrels file");
  c_eval->add_option("--mode", ev.mode, "majority | unanimity")->check(CLI::IsMember({"majority", "unanimity"}));
  c_eval->add_option("--out", ev.out, "Report file (default: stdout)");

  PoolArgs pool;
  auto* c_pool = app.add_subcommand("pool", "Union of every run's top-k per symptom");
  c_pool->add_option("--runs", pool.runs, "Run files")->delimiter(',')->required();
  c_pool->add_option("--k", pool.k, "Pool depth")->check(CLI::PositiveNumber);
  c_pool->add_option("--out", pool.out, "Pool file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (g.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*c_ingest) return cmd_ingest(g, ingest);
    if (*c_gen) return cmd_generate(g, gen);
    if (*c_texts) return cmd_texts(g, texts);
    if (*c_ret) return cmd_retrieve(g, ret);
    if (*c_eval) return cmd_evaluate(g, ev);
    if (*c_pool) return cmd_pool(g, pool);
  } catch (const ServiceError& e) {
    spdlog::error("{}", e.what());
    return kServiceError;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kDataError;
  }
  return kUsage;
}

#include "symsearch/pipeline_config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

namespace {

std::string resolve(const std::string& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (p.is_absolute() || base.empty()) return p.lexically_normal().string();
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

template <typename T>
T number(std::string_view v, const std::string& source, std::size_t line, std::string_view key) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ParseError(source, line, "'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

double real(std::string_view v, const std::string& source, std::size_t line, std::string_view key) {
  std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError(source, line, "'" + std::string(key) + "' expects a real number, got '" + s + "'");
  }
  return d;
}

}  // namespace

void PipelineConfig::validate() const {
  std::set<std::string> tags;
  for (const auto& r : runs) {
    r.validate();
    if (!tags.insert(r.run_tag).second) throw DataError("duplicate run tag '" + r.run_tag + "'");
    if (!encoders.count(r.encoder_label)) {
      throw DataError("run '" + r.run_tag + "' names unknown encoder '" + r.encoder_label + "'");
    }
  }
  generation.validate();
}

PipelineConfig PipelineConfig::parse(std::string_view contents, const std::string& source,
                                     const std::string& base_dir) {
  PipelineConfig cfg;
  std::size_t default_k = 50;
  std::size_t default_cap = 1000;
  std::set<std::string> run_k_set, run_cap_set;

  enum class Section { Top, Encoder, Run } section = Section::Top;
  std::string current;

  text::for_each_line(contents, [&](std::size_t line_no, std::string_view raw) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) return;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, line_no, "unterminated section header");
      auto parts = text::split_ws(line.substr(1, line.size() - 2));
      if (parts.size() != 2) throw ParseError(source, line_no, "expected [encoder <label>] or [run <tag>]");
      current = std::string(parts[1]);
      if (parts[0] == "encoder") {
        if (cfg.encoders.count(current)) throw ParseError(source, line_no, "encoder '" + current + "' defined twice");
        section = Section::Encoder;
        cfg.encoders[current];
      } else if (parts[0] == "run") {
        section = Section::Run;
        RunConfig rc;
        rc.run_tag = current;
        cfg.runs.push_back(rc);
      } else {
        throw ParseError(source, line_no, "unknown section '" + std::string(parts[0]) + "'");
      }
      return;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    auto unknown = [&] { throw ParseError(source, line_no, "unknown key '" + key + "'"); };

    switch (section) {
      case Section::Top:
        if (key == "questionnaire") cfg.questionnaire = resolve(base_dir, value);
        else if (key == "queries") cfg.queries = resolve(base_dir, value);
        else if (key == "corpus_dir") cfg.corpus_dir = resolve(base_dir, value);
        else if (key == "corpus") cfg.corpus = resolve(base_dir, value);
        else if (key == "output_dir") cfg.output_dir = resolve(base_dir, value);
        else if (key == "qrels") cfg.qrels = resolve(base_dir, value);
        else if (key == "detector") cfg.detector = std::string(value);
        else if (key == "jobs") cfg.jobs = number<unsigned>(value, source, line_no, key);
        else if (key == "per_query_k") default_k = number<std::size_t>(value, source, line_no, key);
        else if (key == "cap") default_cap = number<std::size_t>(value, source, line_no, key);
        else if (key == "model") cfg.generation.model_name = std::string(value);
        else if (key == "n_per_option") cfg.generation.n_per_option = number<std::size_t>(value, source, line_no, key);
        else if (key == "temperature") cfg.generation.temperature = real(value, source, line_no, key);
        else if (key == "max_tokens") cfg.generation.max_tokens = number<int>(value, source, line_no, key);
        else if (key == "retries") cfg.generation.retries = number<int>(value, source, line_no, key);
        else if (key == "in_flight") cfg.generation.in_flight = number<std::size_t>(value, source, line_no, key);
        else if (key == "seed") cfg.generation.seed = number<std::uint64_t>(value, source, line_no, key);
        else unknown();
        break;
      case Section::Encoder: {
        auto& enc = cfg.encoders[current];
        if (key == "corpus") enc.corpus = resolve(base_dir, value);
        else if (key == "queries") enc.queries = resolve(base_dir, value);
        else unknown();
        break;
      }
      case Section::Run: {
        auto& rc = cfg.runs.back();
        try {
          if (key == "origin") rc.query_origin_filter = parse_origin_filter(value);
          else if (key == "encoder") rc.encoder_label = std::string(value);
          else if (key == "per_query_k") {
            rc.per_query_k = number<std::size_t>(value, source, line_no, key);
            run_k_set.insert(rc.run_tag);
          } else if (key == "cap") {
            rc.cap = number<std::size_t>(value, source, line_no, key);
            run_cap_set.insert(rc.run_tag);
          } else unknown();
        } catch (const ParseError&) {
          throw;
        } catch (const DataError& e) {
          throw ParseError(source, line_no, e.what());
        }
        break;
      }
    }
  });

  for (auto& r : cfg.runs) {
    if (!run_k_set.count(r.run_tag)) r.per_query_k = default_k;
    if (!run_cap_set.count(r.run_tag)) r.cap = default_cap;
  }
  try {
    cfg.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse(text::read_file(path), path, base);
}

}  // namespace symsearch

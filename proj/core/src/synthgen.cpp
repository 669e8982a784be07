#include "symsearch/synthgen.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

namespace {

constexpr std::string_view kStandardPrompt =
    R"(You are asked to come up with a set of "{N}" diverse reddit posts
that are examples to the BDI depression questionnaire for the
"{symptom}" symptom. For this symptom, the BDI answer of
interest is "{item}".
These examples will be given to a ranking model that will compute
the similarity between the answer item text and the reddit post.

Here are the requirements:
1. The language used for the reddit posts should be diverse. For
example, you should combine descriptions of past experiences with
feelings or events.
2. The reddit posts should be in English.
3. The reddit posts should be 2 to 3 sentences long.
4. The reddit posts should provide substantial content to make
ranking feasible.
5. The reddit posts should be specific and not just describe
general situations, but rather specific personal experiences and
self-disclosure.
6. The reddit posts should, as much as possible, not contain the
exact words of the BDI item.

List of "{N}" reddit posts:
)";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// "12." or "12)" followed by whitespace or end of line.
bool strip_enumeration(std::string_view& s) {
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i >= s.size() || (s[i] != '.' && s[i] != ')')) return false;
  if (i + 1 < s.size() && s[i + 1] != ' ' && s[i + 1] != '\t') return false;
  s.remove_prefix(i + 1);
  s = text::trim(s);
  return true;
}

bool strip_quotes(std::string_view& s) {
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
  for (auto [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
        s.substr(s.size() - close.size()) == close) {
      s = text::trim(s.substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
  }
  // A lone trailing quote left behind by truncated output.
  if (!s.empty() && (s.back() == '"') && std::count(s.begin(), s.end(), '"') == 1) {
    s.remove_suffix(1);
    s = text::trim(s);
    return true;
  }
  return false;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  for (std::string_view ph : {"{N}", "{symptom}", "{item}"}) {
    if (text_.find(ph) == std::string::npos) {
      throw DataError("prompt template is missing the " + std::string(ph) + " placeholder");
    }
  }
}

PromptTemplate PromptTemplate::standard() { return PromptTemplate(std::string(kStandardPrompt)); }

PromptTemplate PromptTemplate::load(const std::string& path) { return PromptTemplate(text::read_file(path)); }

std::string build_prompt(const PromptTemplate& tmpl, std::size_t n, const Symptom& symptom,
                         const ResponseOption& option) {
  std::string p = tmpl.text();
  replace_all(p, "{N}", std::to_string(n));
  replace_all(p, "{symptom}", symptom.name);
  replace_all(p, "{item}", option.text);
  return p;
}

std::vector<std::string> postprocess_completion(std::string_view raw) {
  std::vector<std::string> out;
  text::for_each_line(raw, [&](std::size_t, std::string_view line) {
    std::string_view s = text::trim(line);
    // Repeat to a fixed point so that a second pass never changes anything.
    while (strip_enumeration(s) || strip_quotes(s)) {
    }
    if (!s.empty()) out.emplace_back(s);
  });
  return out;
}

void GenerationConfig::validate() const {
  if (n_per_option < 1) throw DataError("n_per_option must be >= 1");
  if (temperature < 0.0) throw DataError("temperature must be >= 0");
  if (max_tokens < 1) throw DataError("max_tokens must be >= 1");
  if (retries < 0 || extra_calls < 0) throw DataError("retries and extra_calls must be >= 0");
  if (in_flight < 1) throw DataError("in_flight must be >= 1");
}

std::size_t GenerationReport::total_texts() const {
  std::size_t n = 0;
  for (const auto& o : options) n += o.produced;
  return n;
}

std::size_t GenerationReport::shortfall_options() const {
  return static_cast<std::size_t>(std::count_if(options.begin(), options.end(),
                                                [&](const OptionReport& o) { return o.produced < n_per_option; }));
}

std::size_t GenerationReport::failed_options() const {
  return static_cast<std::size_t>(
      std::count_if(options.begin(), options.end(), [](const OptionReport& o) { return !o.error.empty(); }));
}

std::string GenerationReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["n_per_option"] = n_per_option;
  std::size_t calls = 0, retries = 0, tokens = 0;
  nlohmann::ordered_json opts = nlohmann::ordered_json::array();
  for (const auto& o : options) {
    calls += static_cast<std::size_t>(o.calls);
    retries += static_cast<std::size_t>(o.retries);
    tokens += o.total_tokens;
    nlohmann::ordered_json e;
    e["symptom_index"] = o.symptom_index;
    e["option_index"] = o.option_index;
    e["produced"] = o.produced;
    e["shortfall"] = o.produced < n_per_option ? n_per_option - o.produced : 0;
    e["calls"] = o.calls;
    e["retries"] = o.retries;
    e["total_tokens"] = o.total_tokens;
    e["resumed"] = o.resumed;
    if (!o.error.empty()) e["error"] = o.error;
    opts.push_back(std::move(e));
  }
  j["total_texts"] = total_texts();
  j["total_calls"] = calls;
  j["total_retries"] = retries;
  j["total_tokens"] = tokens;
  j["shortfall_options"] = shortfall_options();
  j["failed_options"] = failed_options();
  j["duplicate_texts"] = duplicate_texts;
  j["options"] = std::move(opts);
  return j.dump(2) + "\n";
}

GenerationResult generate_dataset(const Questionnaire& q, const PromptTemplate& tmpl, CompletionClient& client,
                                  const GenerationConfig& cfg, const OptionSink& sink,
                                  const std::vector<std::pair<int, int>>& skip) {
  cfg.validate();
  const std::set<std::pair<int, int>> skipped(skip.begin(), skip.end());
  std::vector<ResponseOption> todo;
  for (const auto& o : q.all_response_options()) {
    if (!skipped.count({o.symptom_index, o.option_index})) todo.push_back(o);
  }

  struct Slot {
    OptionReport report;
    std::vector<QueryText> texts;
    bool done = false;
  };
  std::vector<Slot> slots(todo.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex emit_mu;
  std::size_t next_emit = 0;
  std::exception_ptr fatal;

  auto run_option = [&](std::size_t i) {
    const ResponseOption& opt = todo[i];
    Slot& slot = slots[i];
    slot.report.symptom_index = opt.symptom_index;
    slot.report.option_index = opt.option_index;
    const std::string label =
        "symptom " + std::to_string(opt.symptom_index) + " option " + std::to_string(opt.option_index);

    CompletionRequest req;
    req.model = cfg.model_name;
    req.prompt = build_prompt(tmpl, cfg.n_per_option, q.symptom(opt.symptom_index), opt);
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    req.seed = cfg.seed;

    std::vector<std::string> texts;
    try {
      for (int call = 0; call <= cfg.extra_calls && texts.size() < cfg.n_per_option; ++call) {
        auto res = complete_with_retry(client, req, cfg.retries, cfg.backoff);
        ++slot.report.calls;
        slot.report.retries += res.retries;
        slot.report.total_tokens += res.total_tokens;
        for (auto& t : postprocess_completion(res.text)) {
          if (texts.size() == cfg.n_per_option) break;
          texts.push_back(std::move(t));
        }
      }
    } catch (const AuthError& e) {
      throw AuthError(label + ": " + e.what());
    } catch (const ServiceError& e) {
      slot.report.error = e.what();
      spdlog::warn("{}: generation failed: {}", label, e.what());
    }
    if (texts.size() < cfg.n_per_option && slot.report.error.empty()) {
      spdlog::warn("{}: only {} of {} texts after {} calls", label, texts.size(), cfg.n_per_option,
                   slot.report.calls);
    }
    slot.report.produced = texts.size();
    for (std::size_t k = 0; k < texts.size(); ++k) {
      slot.texts.push_back({generated_query_id(opt.symptom_index, opt.option_index, static_cast<int>(k)),
                            opt.symptom_index, opt.option_index, QueryOrigin::Generated, std::move(texts[k])});
    }
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size() && !abort; i = next++) {
      try {
        run_option(i);
        std::lock_guard lock(emit_mu);
        slots[i].done = true;
        while (next_emit < slots.size() && slots[next_emit].done) {
          if (sink) sink(slots[next_emit].texts);
          ++next_emit;
        }
      } catch (...) {
        std::lock_guard lock(emit_mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(cfg.in_flight, todo.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  GenerationResult result;
  result.report.model_name = cfg.model_name;
  result.report.n_per_option = cfg.n_per_option;
  std::unordered_set<std::string_view> seen;
  for (auto& slot : slots) {
    result.report.options.push_back(slot.report);
    for (auto& t : slot.texts) result.queries.push_back(std::move(t));
  }
  for (const auto& t : result.queries) {
    if (!seen.insert(t.text).second) ++result.report.duplicate_texts;
  }
  if (!todo.empty() && result.report.failed_options() == todo.size()) {
    throw ServiceError("completion service failed for all " + std::to_string(todo.size()) +
                       " options; last error: " + result.report.options.back().error);
  }
  return result;
}

GenerationResult generate_to_file(const std::string& path, const Questionnaire& q, const PromptTemplate& tmpl,
                                  CompletionClient& client, const GenerationConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<QueryText> existing;
  if (fs::exists(path)) {
    std::string contents = text::read_file(path);
    if (!contents.empty() && contents.back() != '\n') {
      const auto cut = contents.rfind('\n');
      contents.resize(cut == std::string::npos ? 0 : cut + 1);
      spdlog::warn("{}: discarding torn trailing record from an interrupted run", path);
      text::write_file(path, contents, true);
    }
    existing = read_queries(contents, path);
    validate_queries(existing, q);
  }
  std::map<std::pair<int, int>, std::size_t> have;
  for (const auto& e : existing) ++have[{e.symptom_index, e.option_index}];
  std::vector<std::pair<int, int>> skip;
  for (const auto& [key, n] : have) skip.push_back(key);

  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot open '" + path + "' for appending");
  auto sink = [&](const std::vector<QueryText>& texts) {
    std::string block;
    for (const auto& t : texts) block += write_query_line(t);
    out << block;
    out.flush();
    if (!out) throw DataError("write failed for '" + path + "'");
  };
  GenerationResult fresh = generate_dataset(q, tmpl, client, cfg, sink, skip);

  // Merge resumed options back into questionnaire order.
  GenerationResult result;
  result.report = fresh.report;
  result.report.options.clear();
  std::size_t fi = 0;
  for (const auto& o : q.all_response_options()) {
    auto it = have.find({o.symptom_index, o.option_index});
    if (it != have.end()) {
      OptionReport r;
      r.symptom_index = o.symptom_index;
      r.option_index = o.option_index;
      r.produced = it->second;
      r.resumed = true;
      result.report.options.push_back(r);
    } else {
      result.report.options.push_back(fresh.report.options.at(fi++));
    }
  }
  result.queries = std::move(existing);
  for (auto& t : fresh.queries) result.queries.push_back(std::move(t));
  std::unordered_set<std::string_view> seen;
  result.report.duplicate_texts = 0;
  for (const auto& t : result.queries) {
    if (!seen.insert(t.text).second) ++result.report.duplicate_texts;
  }
  return result;
}

}  // namespace symsearch

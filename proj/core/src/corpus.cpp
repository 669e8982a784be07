#include "symsearch/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <atomic>
#include <filesystem>
#include <istream>
#include <iterator>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

namespace {

// Case-insensitive search for `needle` in `hay` starting at `from`.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (text::iequals(hay.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

struct Tag {
  std::size_t begin;  // offset of '<'
  std::size_t end;    // one past '>'
  std::string name;   // lower-cased
  bool closing;
};

// Next tag at or after `from`; nullopt when none remain. A '<' only opens a
// tag when followed by a letter or '/', so text such as "<3" is skipped.
std::optional<Tag> next_tag(std::string_view buf, std::size_t from, const std::string& source) {
  std::size_t lt = from;
  while (true) {
    lt = buf.find('<', lt);
    if (lt == std::string_view::npos || lt + 1 >= buf.size()) return std::nullopt;
    const unsigned char c = static_cast<unsigned char>(buf[lt + 1]);
    if (std::isalpha(c) || c == '/') break;
    ++lt;
  }
  std::size_t gt = buf.find('>', lt);
  if (gt == std::string_view::npos) throw ParseError(source, lt, "unterminated tag");
  std::string_view inner = text::trim(buf.substr(lt + 1, gt - lt - 1));
  Tag t{lt, gt + 1, {}, false};
  if (!inner.empty() && inner.front() == '/') {
    t.closing = true;
    inner.remove_prefix(1);
  }
  auto sp = inner.find_first_of(" \t\r\n");
  t.name = text::to_lower_ascii(text::trim(inner.substr(0, sp)));
  return t;
}

// Finds the closing tag matching `open` that starts before `limit`.
std::optional<Tag> find_close(std::string_view buf, const Tag& open, std::size_t limit,
                              const std::string& source) {
  const std::string close = "</" + open.name;
  std::size_t pos = open.end;
  while (true) {
    std::size_t c = ifind(buf.substr(0, limit), close, pos);
    if (c == std::string_view::npos) return std::nullopt;
    auto tag = next_tag(buf, c, source);
    if (tag && tag->closing && tag->name == open.name) return tag;
    pos = c + 1;
  }
}

}  // namespace

std::string CorpusStats::to_json() const {
  nlohmann::ordered_json j;
  j["users"] = users;
  j["sentences_total"] = sentences_total;
  j["sentences_kept"] = sentences_kept;
  j["dropped_non_english"] = dropped_non_english;
  j["dropped_empty"] = dropped_empty;
  return j.dump(2) + "\n";
}

std::vector<SentenceRecord> parse_trec(std::string_view buf, const std::string& user_id,
                                       const std::string& source) {
  std::vector<SentenceRecord> out;
  std::unordered_set<std::string> seen;
  std::size_t pos = 0;
  while (auto tag = next_tag(buf, pos, source)) {
    if (tag->closing || tag->name != "doc") {
      pos = tag->end;
      continue;
    }
    const std::size_t doc_offset = tag->begin;
    std::optional<std::string> docno;
    std::string body_text;
    std::size_t inner = tag->end;
    bool closed = false;
    // Child elements may not extend past this DOC's own closing tag.
    const auto doc_close = find_close(buf, *tag, buf.size(), source);
    const std::size_t limit = doc_close ? doc_close->begin : buf.size();
    while (auto child = next_tag(buf, inner, source)) {
      if (child->closing) {
        inner = child->end;
        if (child->name == "doc") {
          closed = true;
          break;
        }
        continue;
      }
      if (child->name == "doc") break;  // a new DOC before this one closed
      auto close = find_close(buf, *child, limit, source);
      if (child->name == "docno" || child->name == "text") {
        if (!close) throw ParseError(source, child->begin, "unterminated <" + child->name + "> element");
        std::string value(text::trim(buf.substr(child->end, close->begin - child->end)));
        if (child->name == "docno") {
          if (docno) throw ParseError(source, child->begin, "DOC block has more than one DOCNO");
          docno = std::move(value);
        } else {
          body_text = std::move(value);
        }
      }
      // Unknown elements are skipped whole when closed, else just the tag.
      inner = close ? close->end : child->end;
    }
    if (!closed) throw ParseError(source, doc_offset, "unterminated DOC block");
    if (!docno || docno->empty()) throw ParseError(source, doc_offset, "DOC block without DOCNO");
    if (!text::is_token(*docno)) {
      throw ParseError(source, doc_offset, "DOCNO '" + *docno + "' contains whitespace");
    }
    if (!seen.insert(*docno).second) {
      throw ParseError(source, doc_offset, "duplicate DOCNO '" + *docno + "'");
    }
    out.push_back(SentenceRecord{std::move(*docno), user_id, std::move(body_text), true});
    pos = inner;
  }
  return out;
}

std::vector<SentenceRecord> parse_trec_file(std::istream& in, const std::string& user_id,
                                            const std::string& source) {
  std::string buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_trec(buf, user_id, source);
}

std::string write_trec(const std::vector<SentenceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += "<DOC>\n<DOCNO>";
    out += r.doc_id;
    out += "</DOCNO>\n<TEXT>";
    out += r.text;
    out += "</TEXT>\n</DOC>\n";
  }
  return out;
}

std::string strip_urls(std::string_view s) {
  std::string out;
  std::string token;
  bool first = true;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i == start) break;
    std::string_view tok = s.substr(start, i - start);
    // `www.` only counts at the start of a token; schemes may appear anywhere.
    if (tok.size() >= 4 && text::iequals(tok.substr(0, 4), "www.")) continue;
    std::size_t cut = std::min(ifind(tok, "http://", 0), ifind(tok, "https://", 0));
    if (cut != std::string_view::npos) tok = tok.substr(0, cut);
    if (tok.empty()) continue;
    if (!first) out += ' ';
    out.append(tok);
    first = false;
  }
  return out;
}

std::vector<SentenceRecord> preprocess_corpus(std::vector<SentenceRecord> records,
                                              const LanguageDetector& detector, CorpusStats* stats) {
  CorpusStats st;
  std::unordered_set<std::string_view> users;
  std::vector<std::size_t> candidates;
  std::vector<std::string> candidate_texts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    users.insert(r.user_id);
    r.text = strip_urls(r.text);
    if (text::split_ws(r.text).size() < kMinTokens) {
      r.kept = false;
      ++st.dropped_empty;
      continue;
    }
    candidates.push_back(i);
    candidate_texts.push_back(r.text);
  }
  const std::vector<bool> english = detector.classify(candidate_texts);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    auto& r = records[candidates[j]];
    r.kept = english[j];
    if (r.kept) {
      ++st.sentences_kept;
    } else {
      ++st.dropped_non_english;
    }
  }
  st.users = users.size();
  st.sentences_total = records.size();
  if (stats) *stats = st;
  return records;
}

void check_unique_doc_ids(const std::vector<SentenceRecord>& records) {
  std::unordered_map<std::string_view, const SentenceRecord*> seen;
  seen.reserve(records.size());
  for (const auto& r : records) {
    auto [it, inserted] = seen.emplace(r.doc_id, &r);
    if (!inserted) {
      throw DataError("doc_id '" + r.doc_id + "' appears for user '" + it->second->user_id +
                      "' and user '" + r.user_id + "'");
    }
  }
}

IngestResult ingest_directory(const std::string& dir, const LanguageDetector& detector,
                              unsigned jobs) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("corpus directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<SentenceRecord>> parsed(files.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const auto& f = files[i];
        parsed[i] = parse_trec(text::read_file(f.string()), f.stem().string(), f.string());
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SentenceRecord> merged;
  for (auto& p : parsed) std::move(p.begin(), p.end(), std::back_inserter(merged));
  check_unique_doc_ids(merged);

  IngestResult result;
  result.records = preprocess_corpus(std::move(merged), detector, &result.stats);
  // Users with empty files still count.
  result.stats.users = files.size();
  return result;
}

std::string write_corpus(const std::vector<SentenceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.doc_id;
    out += '\t';
    out += r.user_id;
    out += '\t';
    out += r.kept ? '1' : '0';
    out += '\t';
    out += text::escape_field(r.text);
    out += '\n';
  }
  return out;
}

std::vector<SentenceRecord> read_corpus(std::string_view contents, const std::string& source) {
  std::vector<SentenceRecord> out;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto f = text::split(line, '\t');
    if (f.size() != 4) throw ParseError(source, line_no, "expected 4 tab-separated fields");
    if (!text::is_token(f[0])) throw ParseError(source, line_no, "invalid doc_id");
    if (!text::is_token(f[1])) throw ParseError(source, line_no, "invalid user_id");
    if (f[2] != "0" && f[2] != "1") throw ParseError(source, line_no, "kept flag must be 0 or 1");
    out.push_back(SentenceRecord{std::string(f[0]), std::string(f[1]),
                                 text::unescape_field(f[3]), f[2] == "1"});
  });
  check_unique_doc_ids(out);
  return out;
}

}  // namespace symsearch

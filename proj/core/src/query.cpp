#include "symsearch/query.hpp"

#include <charconv>
#include <cstdio>
#include <unordered_set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

std::string_view to_string(QueryOrigin o) noexcept {
  return o == QueryOrigin::Original ? "original" : "generated";
}

QueryOrigin parse_query_origin(std::string_view s) {
  if (s == "original") return QueryOrigin::Original;
  if (s == "generated") return QueryOrigin::Generated;
  throw DataError("unknown query origin '" + std::string(s) + "'");
}

std::string original_query_id(int symptom_index, int option_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "bdi-%02d-%d", symptom_index, option_index);
  return buf;
}

std::string generated_query_id(int symptom_index, int option_index, int ordinal) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "gen-%02d-%d-%03d", symptom_index, option_index, ordinal);
  return buf;
}

std::vector<QueryText> original_queries(const Questionnaire& q) {
  std::vector<QueryText> out;
  for (const auto& o : q.all_response_options()) {
    out.push_back({original_query_id(o.symptom_index, o.option_index), o.symptom_index,
                   o.option_index, QueryOrigin::Original, o.text});
  }
  return out;
}

std::string write_query_line(const QueryText& q) {
  std::string out = q.query_id;
  out += '\t';
  out += std::to_string(q.symptom_index);
  out += '\t';
  out += std::to_string(q.option_index);
  out += '\t';
  out += to_string(q.origin);
  out += '\t';
  out += text::escape_field(q.text);
  out += '\n';
  return out;
}

std::string write_queries(const std::vector<QueryText>& queries) {
  std::string out;
  for (const auto& q : queries) out += write_query_line(q);
  return out;
}

namespace {
int parse_int(std::string_view s, const std::string& source, std::size_t line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(source, line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}
}  // namespace

std::vector<QueryText> read_queries(std::string_view contents, const std::string& source) {
  std::vector<QueryText> out;
  std::unordered_set<std::string> seen;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto f = text::split(line, '\t');
    if (f.size() != 5) throw ParseError(source, line_no, "expected 5 tab-separated fields");
    QueryText q;
    if (!text::is_token(f[0])) throw ParseError(source, line_no, "invalid query_id");
    q.query_id = std::string(f[0]);
    q.symptom_index = parse_int(f[1], source, line_no, "symptom_index");
    q.option_index = parse_int(f[2], source, line_no, "option_index");
    try {
      q.origin = parse_query_origin(f[3]);
    } catch (const DataError& e) {
      throw ParseError(source, line_no, e.what());
    }
    q.text = text::unescape_field(f[4]);
    if (text::trim(q.text).empty()) throw ParseError(source, line_no, "empty query text");
    if (!seen.insert(q.query_id).second) {
      throw ParseError(source, line_no, "duplicate query_id '" + q.query_id + "'");
    }
    out.push_back(std::move(q));
  });
  return out;
}

void validate_queries(const std::vector<QueryText>& queries, const Questionnaire& q) {
  for (const auto& qt : queries) {
    if (!q.has_option(qt.symptom_index, qt.option_index)) {
      throw DataError("query '" + qt.query_id + "' references unknown option (" +
                      std::to_string(qt.symptom_index) + ", " + std::to_string(qt.option_index) + ")");
    }
  }
}

}  // namespace symsearch

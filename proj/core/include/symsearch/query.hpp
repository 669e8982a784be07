#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "symsearch/questionnaire.hpp"

namespace symsearch {

enum class QueryOrigin { Original, Generated };

std::string_view to_string(QueryOrigin o) noexcept;
QueryOrigin parse_query_origin(std::string_view s);

/// A search query bound to one response option.
struct QueryText {
  std::string query_id;
  int symptom_index = 0;
  int option_index = 0;
  QueryOrigin origin = QueryOrigin::Original;
  std::string text;

  friend bool operator==(const QueryText&, const QueryText&) = default;
};

/// Ids are "bdi-SS-O" for questionnaire options and "gen-SS-O-KKK" for
/// generated texts.
std::string original_query_id(int symptom_index, int option_index);
std::string generated_query_id(int symptom_index, int option_index, int ordinal);

/// One query per response option, in questionnaire order.
std::vector<QueryText> original_queries(const Questionnaire& q);

/// Query file: `query_id \t symptom_index \t option_index \t origin \t text`.
std::string write_query_line(const QueryText& q);
std::string write_queries(const std::vector<QueryText>& queries);
std::vector<QueryText> read_queries(std::string_view contents, const std::string& source = "<memory>");

/// Rejects queries whose (symptom, option) pair is not in `q`.
void validate_queries(const std::vector<QueryText>& queries, const Questionnaire& q);

}  // namespace symsearch

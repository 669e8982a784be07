#include "symsearch/questionnaire.hpp"

#include <charconv>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

Questionnaire::Questionnaire(std::vector<Symptom> symptoms) : symptoms_(std::move(symptoms)) {
  if (symptoms_.size() != kSymptomCount) {
    throw DataError("expected " + std::to_string(kSymptomCount) + " symptoms, got " +
                    std::to_string(symptoms_.size()));
  }
  for (std::size_t i = 0; i < symptoms_.size(); ++i) {
    const Symptom& s = symptoms_[i];
    const int want_index = static_cast<int>(i) + 1;
    if (s.index != want_index) {
      throw DataError("symptom " + std::to_string(s.index) + ": expected index " +
                      std::to_string(want_index) + " (items must be contiguous 1.." +
                      std::to_string(kSymptomCount) + ")");
    }
    if (s.name.empty()) throw DataError("symptom " + std::to_string(s.index) + ": empty name");
    const int want_opts = expected_option_count(s.index);
    if (static_cast<int>(s.options.size()) != want_opts) {
      throw DataError("symptom " + std::to_string(s.index) + ": expected " +
                      std::to_string(want_opts) + " options, got " +
                      std::to_string(s.options.size()));
    }
    for (std::size_t j = 0; j < s.options.size(); ++j) {
      const ResponseOption& o = s.options[j];
      if (o.symptom_index != s.index || o.option_index != static_cast<int>(j)) {
        throw DataError("symptom " + std::to_string(s.index) + ": option " + std::to_string(j) +
                        " carries mismatched indices");
      }
      if (text::trim(o.text).empty()) {
        throw DataError("symptom " + std::to_string(s.index) + ": option " + std::to_string(j) +
                        " has empty text");
      }
    }
  }
}

Questionnaire Questionnaire::parse(std::string_view contents, const std::string& source) {
  std::vector<Symptom> symptoms;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    std::string_view t = text::trim(line);
    if (t.empty() || t.front() == '#') return;
    auto fields = text::split(line, '\t');
    if (fields.size() < 3) {
      throw ParseError(source, line_no, "expected '<index>\\t<name>\\t<option>...'");
    }
    Symptom s;
    auto idx_field = text::trim(fields[0]);
    auto [p, ec] = std::from_chars(idx_field.data(), idx_field.data() + idx_field.size(), s.index);
    if (ec != std::errc() || p != idx_field.data() + idx_field.size()) {
      throw ParseError(source, line_no, "invalid symptom index '" + std::string(fields[0]) + "'");
    }
    s.name = text::unescape_field(text::trim(fields[1]));
    for (std::size_t j = 2; j < fields.size(); ++j) {
      s.options.push_back(ResponseOption{s.index, static_cast<int>(j - 2),
                                         text::unescape_field(text::trim(fields[j]))});
    }
    symptoms.push_back(std::move(s));
  });
  try {
    return Questionnaire(std::move(symptoms));
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

Questionnaire Questionnaire::load(const std::string& path) {
  return parse(text::read_file(path), path);
}

std::string Questionnaire::serialize() const {
  std::string out = "# index\tname\toption 0 (absence)\toption 1\t...\n";
  for (const Symptom& s : symptoms_) {
    out += std::to_string(s.index);
    out += '\t';
    out += text::escape_field(s.name);
    for (const ResponseOption& o : s.options) {
      out += '\t';
      out += text::escape_field(o.text);
    }
    out += '\n';
  }
  return out;
}

const Symptom& Questionnaire::symptom(int index) const {
  if (index < 1 || index > kSymptomCount) {
    throw DataError("unknown symptom index " + std::to_string(index));
  }
  return symptoms_[static_cast<std::size_t>(index - 1)];
}

bool Questionnaire::has_option(int symptom_index, int option_index) const noexcept {
  if (symptom_index < 1 || symptom_index > kSymptomCount) return false;
  const auto& opts = symptoms_[static_cast<std::size_t>(symptom_index - 1)].options;
  return option_index >= 0 && option_index < static_cast<int>(opts.size());
}

const ResponseOption& Questionnaire::option(int symptom_index, int option_index) const {
  if (!has_option(symptom_index, option_index)) {
    throw DataError("unknown response option (" + std::to_string(symptom_index) + ", " +
                    std::to_string(option_index) + ")");
  }
  return symptoms_[static_cast<std::size_t>(symptom_index - 1)]
      .options[static_cast<std::size_t>(option_index)];
}

std::vector<ResponseOption> Questionnaire::all_response_options() const {
  std::vector<ResponseOption> out;
  out.reserve(kOptionCount);
  for (const Symptom& s : symptoms_) out.insert(out.end(), s.options.begin(), s.options.end());
  return out;
}

}  // namespace symsearch

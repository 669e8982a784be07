#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace symsearch {

/// One graded answer of a questionnaire item. Option 0 is the absence of
/// the symptom; higher indices are more severe.
struct ResponseOption {
  int symptom_index = 0;
  int option_index = 0;
  std::string text;

  friend bool operator==(const ResponseOption&, const ResponseOption&) = default;
};

struct Symptom {
  int index = 0;
  std::string name;
  std::vector<ResponseOption> options;

  friend bool operator==(const Symptom&, const Symptom&) = default;
};

/// The 21-item depression inventory. Immutable once loaded.
///
/// File format (UTF-8, one record per line):
///
///     # comment
///     <index> \t <name> \t <option 0> \t <option 1> ...
///
/// Blank lines and lines starting with '#' are ignored. Items must appear
/// in order 1..21. Items 16 and 18 carry 7 options, every other item 4.
/// Fields use the backslash escapes of text::escape_field.
class Questionnaire {
 public:
  static constexpr int kSymptomCount = 21;
  static constexpr int kOptionCount = 90;

  /// Number of options item `index` must have.
  static int expected_option_count(int index) noexcept {
    return (index == 16 || index == 18) ? 7 : 4;
  }

  /// Throws DataError naming the offending item when an invariant fails.
  explicit Questionnaire(std::vector<Symptom> symptoms);

  static Questionnaire parse(std::string_view contents, const std::string& source = "<memory>");
  static Questionnaire load(const std::string& path);
  std::string serialize() const;

  const std::vector<Symptom>& symptoms() const noexcept { return symptoms_; }
  const Symptom& symptom(int index) const;
  const ResponseOption& option(int symptom_index, int option_index) const;
  bool has_option(int symptom_index, int option_index) const noexcept;

  /// All options ordered by (symptom_index, option_index).
  std::vector<ResponseOption> all_response_options() const;

  friend bool operator==(const Questionnaire&, const Questionnaire&) = default;

 private:
  std::vector<Symptom> symptoms_;
};

}  // namespace symsearch

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace symsearch {

/// Decides whether a sentence is English. Implementations must be
/// deterministic for a fixed instance and input.
class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  virtual bool is_english(std::string_view text) const = 0;

  /// Batch form; the default loops over is_english. External detectors
  /// override it to amortize process start-up.
  virtual std::vector<bool> classify(const std::vector<std::string>& texts) const;

  virtual std::string name() const = 0;
};

/// Dependency-free default. A sentence is English when
///   - at most `max_non_latin_ratio` of its letters fall outside ASCII
///     (character-class profile), and
///   - at least `min_stopword_ratio` of its word tokens are English
///     function words, and
///   - no competing language's function-word table scores strictly higher.
class StopwordDetector final : public LanguageDetector {
 public:
  struct Options {
    double min_stopword_ratio = 0.15;
    double max_non_latin_ratio = 0.30;
  };

  StopwordDetector();
  explicit StopwordDetector(Options opts);

  bool is_english(std::string_view text) const override;
  std::string name() const override { return "builtin"; }

  /// Function-word hit rates, exposed for diagnostics and tests.
  double english_ratio(std::string_view text) const;
  double best_competitor_ratio(std::string_view text) const;

 private:
  Options opts_;
};

/// Delegates to an external program. The command receives every sentence
/// on stdin, one per line (backslash-escaped), and must print exactly one
/// line per sentence: "1"/"en" for English, anything else otherwise.
class ExternalCommandDetector final : public LanguageDetector {
 public:
  explicit ExternalCommandDetector(std::string command);

  bool is_english(std::string_view text) const override;
  std::vector<bool> classify(const std::vector<std::string>& texts) const override;
  std::string name() const override { return "external:" + command_; }

 private:
  std::string command_;
};

/// Accepts every nonempty sentence. Handy as a relaxed detector.
class AcceptAllDetector final : public LanguageDetector {
 public:
  bool is_english(std::string_view text) const override;
  std::string name() const override { return "accept-all"; }
};

/// "builtin", "accept-all" or "external:<command>".
std::unique_ptr<LanguageDetector> make_detector(std::string_view spec);

}  // namespace symsearch

#include "symsearch/language.hpp"

#include <spdlog/spdlog.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <unordered_set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& english_words() {
  static const WordSet words = {
      "a",       "about",   "above",  "after",  "again",   "against", "all",     "am",
      "an",      "and",     "any",    "are",    "as",      "at",      "be",      "because",
      "been",    "before",  "being",  "below",  "between", "both",    "but",     "by",
      "can",     "could",   "did",    "do",     "does",    "doing",   "down",    "during",
      "each",    "few",     "for",    "from",   "further", "had",     "has",     "have",
      "having",  "he",      "her",    "here",   "hers",    "herself", "him",     "himself",
      "his",     "how",     "i",      "if",     "in",      "into",    "is",      "it",
      "its",     "itself",  "just",   "me",     "more",    "most",    "my",      "myself",
      "no",      "nor",     "not",    "now",    "of",      "off",     "on",      "once",
      "only",    "or",      "other",  "our",    "ours",    "ourselves", "out",   "over",
      "own",     "same",    "she",    "should", "so",      "some",    "such",    "than",
      "that",    "the",     "their",  "theirs", "them",    "themselves", "then", "there",
      "these",   "they",    "this",   "those",  "through", "to",      "too",     "under",
      "until",   "up",      "very",   "was",    "we",      "were",    "what",    "when",
      "where",   "which",   "while",  "who",    "whom",    "why",     "will",    "with",
      "would",   "you",     "your",   "yours",  "yourself", "yourselves", "i'm", "i've",
      "i'd",     "i'll",    "don't",  "can't",  "it's",    "didn't",  "doesn't", "isn't",
      "wasn't",  "won't",   "that's", "there's", "been",   "im",      "dont",    "cant",
      "really",  "like",    "get",    "got",    "feel",    "much",    "even",    "also",
      "still",   "never",   "always", "every",  "anything", "something", "nothing",
  };
  return words;
}

// Competing function-word tables. English wins ties.
const std::array<WordSet, 6>& competitor_words() {
  static const std::array<WordSet, 6> tables = {
      // Spanish
      WordSet{"el",   "la",   "los",  "las",  "de",    "del",  "que",   "y",    "en",
              "un",   "una",  "es",   "por",  "con",   "para", "como",  "pero", "mi",
              "me",   "se",   "su",   "lo",   "todo",  "todos", "muy",  "yo",   "estoy",
              "siento", "tengo", "esta", "este", "más", "ya",   "cuando", "sin", "porque"},
      // French
      WordSet{"le",   "la",   "les",  "de",   "des",   "du",   "et",    "un",   "une",
              "est",  "je",   "tu",   "il",   "elle",  "nous", "vous",  "ils",  "pas",
              "ne",   "que",  "qui",  "dans", "pour",  "sur",  "avec",  "mais", "mon",
              "ma",   "mes",  "suis", "tout", "très",  "ce",   "cette", "au",   "aux"},
      // German
      WordSet{"der",  "die",  "das",  "und",  "ist",   "nicht", "ich",  "du",   "er",
              "sie",  "es",   "wir",  "ihr",  "ein",   "eine",  "zu",   "mit",  "auf",
              "für",  "den",  "dem",  "mein", "meine", "aber",  "auch", "sehr", "wie",
              "noch", "bin",  "habe", "immer", "nur",  "wenn",  "dass", "von",  "sich"},
      // Portuguese
      WordSet{"o",    "os",   "a",    "as",   "de",    "do",   "da",    "que",  "e",
              "em",   "um",   "uma",  "é",    "não",   "eu",   "com",   "para", "por",
              "mas",  "meu",  "minha", "muito", "se",  "ao",   "na",    "no",   "tudo",
              "estou", "sinto", "tenho", "quando", "mais", "isso", "como", "ele",  "ela"},
      // Italian
      WordSet{"il",   "lo",   "la",   "gli",  "le",    "di",   "che",   "e",    "è",
              "un",   "una",  "non",  "per",  "con",   "mi",   "sono",  "ho",   "ma",
              "mio",  "mia",  "molto", "sempre", "tutto", "quando", "come", "anche", "ci",
              "si",   "della", "nel", "sento", "io",   "questo", "questa", "perché"},
      // Dutch
      WordSet{"de",   "het",  "een",  "en",   "van",   "ik",   "je",    "niet", "is",
              "dat",  "die",  "op",   "te",   "met",   "voor", "zijn",  "maar", "mijn",
              "ook",  "heb",  "ben",  "er",   "wel",   "nog",  "als",   "al",   "heel",
              "altijd", "wat", "naar", "omdat", "dit",  "zo",   "geen",  "hij",  "zij"},
  };
  return tables;
}

bool is_ascii_letter(unsigned char c) { return std::isalpha(c) != 0 && c < 0x80; }

struct Profile {
  std::vector<std::string> tokens;
  std::size_t ascii_letters = 0;
  std::size_t non_ascii_letters = 0;
};

// Tokens are maximal runs of letters and apostrophes; bytes >= 0x80 count
// as letters so that accented words stay whole. UTF-8 continuation bytes
// are not counted twice in the character profile.
Profile profile(std::string_view text) {
  Profile p;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    std::size_t lead = 0;
    while (lead < cur.size() && cur[lead] == '\'') ++lead;
    if (lead < cur.size()) p.tokens.push_back(cur.substr(lead));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_ascii_letter(c)) {
      ++p.ascii_letters;
      cur += static_cast<char>(std::tolower(c));
    } else if (c >= 0x80) {
      if ((c & 0xC0) != 0x80) ++p.non_ascii_letters;
      cur += static_cast<char>(c);
    } else if (c == '\'' && !cur.empty()) {
      cur += '\'';
    } else {
      flush();
    }
  }
  flush();
  return p;
}

double hit_ratio(const std::vector<std::string>& tokens, const WordSet& words) {
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += words.count(t);
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

}  // namespace

std::vector<bool> LanguageDetector::classify(const std::vector<std::string>& texts) const {
  std::vector<bool> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(is_english(t));
  return out;
}

StopwordDetector::StopwordDetector() : opts_{} {}
StopwordDetector::StopwordDetector(Options opts) : opts_(opts) {}

double StopwordDetector::english_ratio(std::string_view text) const {
  return hit_ratio(profile(text).tokens, english_words());
}

double StopwordDetector::best_competitor_ratio(std::string_view text) const {
  const auto tokens = profile(text).tokens;
  double best = 0.0;
  for (const auto& table : competitor_words()) best = std::max(best, hit_ratio(tokens, table));
  return best;
}

bool StopwordDetector::is_english(std::string_view text) const {
  const Profile p = profile(text);
  if (p.tokens.empty()) return false;
  const std::size_t letters = p.ascii_letters + p.non_ascii_letters;
  if (letters == 0) return false;
  const double non_latin = static_cast<double>(p.non_ascii_letters) / static_cast<double>(letters);
  if (non_latin > opts_.max_non_latin_ratio) return false;
  const double en = hit_ratio(p.tokens, english_words());
  if (en < opts_.min_stopword_ratio) return false;
  for (const auto& table : competitor_words()) {
    if (hit_ratio(p.tokens, table) > en) return false;
  }
  return true;
}

bool AcceptAllDetector::is_english(std::string_view text) const {
  return !text::trim(text).empty();
}

ExternalCommandDetector::ExternalCommandDetector(std::string command) : command_(std::move(command)) {
  if (text::trim(command_).empty()) throw DataError("external detector: empty command");
}

bool ExternalCommandDetector::is_english(std::string_view text) const {
  return classify({std::string(text)}).front();
}

std::vector<bool> ExternalCommandDetector::classify(const std::vector<std::string>& texts) const {
  namespace fs = std::filesystem;
  std::vector<bool> out(texts.size(), false);
  if (texts.empty()) return out;

  std::random_device rd;
  const fs::path dir = fs::temp_directory_path();
  const std::string stem = "symsearch-lang-" + std::to_string(::getpid()) + "-" + std::to_string(rd());
  const fs::path in_path = dir / (stem + ".in");
  const fs::path out_path = dir / (stem + ".out");
  {
    std::ofstream in(in_path, std::ios::binary);
    for (const auto& t : texts) in << text::escape_field(t) << '\n';
  }
  const std::string cmd = command_ + " < '" + in_path.string() + "' > '" + out_path.string() + "'";
  const int rc = std::system(cmd.c_str());
  std::error_code ec;
  if (rc != 0) {
    fs::remove(in_path, ec);
    fs::remove(out_path, ec);
    spdlog::warn("external language detector '{}' exited with status {}; treating batch as non-English",
                 command_, rc);
    return out;
  }
  std::string answers;
  try {
    answers = text::read_file(out_path.string());
  } catch (const DataError&) {
  }
  fs::remove(in_path, ec);
  fs::remove(out_path, ec);

  std::size_t i = 0;
  text::for_each_line(answers, [&](std::size_t, std::string_view line) {
    if (i >= out.size()) return;
    const auto v = text::to_lower_ascii(text::trim(line));
    out[i++] = (v == "1" || v == "en" || v == "true");
  });
  if (i != texts.size()) {
    spdlog::warn("external language detector returned {} answers for {} sentences; missing ones default to non-English",
                 i, texts.size());
  }
  return out;
}

std::unique_ptr<LanguageDetector> make_detector(std::string_view spec) {
  if (spec.empty() || spec == "builtin") return std::make_unique<StopwordDetector>();
  if (spec == "accept-all") return std::make_unique<AcceptAllDetector>();
  constexpr std::string_view prefix = "external:";
  if (spec.substr(0, prefix.size()) == prefix) {
    return std::make_unique<ExternalCommandDetector>(std::string(spec.substr(prefix.size())));
  }
  throw DataError("unknown detector '" + std::string(spec) + "' (builtin, accept-all, external:<cmd>)");
}

}  // namespace symsearch

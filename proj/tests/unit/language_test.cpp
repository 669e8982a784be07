#include <gtest/gtest.h>

#include "symsearch/error.hpp"
#include "symsearch/language.hpp"

using namespace symsearch;

TEST(StopwordDetector, ClassifiesSpecExamples) {
  StopwordDetector d;
  EXPECT_TRUE(d.is_english("I feel sad all the time."));
  EXPECT_FALSE(d.is_english("Me siento triste todo el tiempo."));
  EXPECT_FALSE(d.is_english(""));
}

TEST(StopwordDetector, SpanishSentenceIsDecidedByCompetitorTable) {
  // "me" alone clears the English threshold; the Spanish table must win.
  StopwordDetector d;
  const std::string s = "Me siento triste todo el tiempo.";
  EXPECT_GE(d.english_ratio(s), 0.15);
  EXPECT_GT(d.best_competitor_ratio(s), d.english_ratio(s));
}

TEST(StopwordDetector, OtherLanguagesAndScripts) {
  StopwordDetector d;
  EXPECT_FALSE(d.is_english("Je suis très fatigué et je ne dors pas."));
  EXPECT_FALSE(d.is_english("Ich bin immer müde und habe keine Energie."));
  EXPECT_FALSE(d.is_english("\xD0\xAF \xD0\xBE\xD1\x87\xD0\xB5\xD0\xBD\xD1\x8C \xD1\x83\xD1\x81\xD1\x82\xD0\xB0\xD0\xBB"));
  EXPECT_TRUE(d.is_english("My cat passed away last week and I miss her."));
  EXPECT_TRUE(d.is_english("I can't sleep anymore, it's been weeks."));
  EXPECT_FALSE(d.is_english("12345 !!! ???"));
}

TEST(StopwordDetector, Deterministic) {
  StopwordDetector d;
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(d.is_english("I have been so tired lately."));
}

TEST(Detectors, Factory) {
  EXPECT_EQ(make_detector("builtin")->name(), "builtin");
  EXPECT_EQ(make_detector("accept-all")->name(), "accept-all");
  EXPECT_EQ(make_detector("external:cat")->name(), "external:cat");
  EXPECT_THROW(make_detector("polyglot"), DataError);
  EXPECT_THROW(make_detector("external:"), DataError);
}

TEST(ExternalCommandDetector, UsesSubprocessAnswers) {
  // Answers "1" for lines containing "yes", "0" otherwise.
  ExternalCommandDetector d("awk '{ print (index($0, \"yes\") ? \"1\" : \"0\") }'");
  auto out = d.classify({"yes this one", "not that", "yes again"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0]);
  EXPECT_FALSE(out[1]);
  EXPECT_TRUE(out[2]);
}

TEST(ExternalCommandDetector, FailureDefaultsToNonEnglish) {
  ExternalCommandDetector d("exit 3");
  auto out = d.classify({"I feel sad all the time."});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0]);
}

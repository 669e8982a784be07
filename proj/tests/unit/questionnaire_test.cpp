#include <gtest/gtest.h>

#include "symsearch/error.hpp"
#include "symsearch/questionnaire.hpp"
#include "symsearch/text_util.hpp"
#include "test_support.hpp"

using namespace symsearch;

namespace {

std::string make_file(int symptoms, int bad_index = 0, int bad_count = 0) {
  std::string out = "# fixture\n";
  for (int i = 1; i <= symptoms; ++i) {
    int n = Questionnaire::expected_option_count(i);
    if (i == bad_index) n = bad_count;
    out += std::to_string(i) + "\tItem " + std::to_string(i);
    for (int j = 0; j < n; ++j) out += "\toption " + std::to_string(j) + " of item " + std::to_string(i);
    out += "\n";
  }
  return out;
}

}  // namespace

TEST(Questionnaire, ShippedFixtureHasNinetyOptions) {
  const auto q = Questionnaire::load(symsearch::testing::data_path("questionnaire_placeholder.tsv"));
  EXPECT_EQ(q.symptoms().size(), 21u);
  const auto opts = q.all_response_options();
  EXPECT_EQ(opts.size(), 90u);
  EXPECT_EQ(opts.front().symptom_index, 1);
  EXPECT_EQ(opts.front().option_index, 0);
  EXPECT_EQ(q.symptom(16).options.size(), 7u);
  EXPECT_EQ(q.symptom(18).options.size(), 7u);
  int fours = 0;
  for (const auto& s : q.symptoms()) fours += s.options.size() == 4;
  EXPECT_EQ(fours, 19);
}

TEST(Questionnaire, OptionsAreOrderedBySymptomThenOption) {
  const auto q = Questionnaire::parse(make_file(21));
  const auto opts = q.all_response_options();
  for (std::size_t i = 1; i < opts.size(); ++i) {
    EXPECT_LT(std::pair(opts[i - 1].symptom_index, opts[i - 1].option_index),
              std::pair(opts[i].symptom_index, opts[i].option_index));
  }
  EXPECT_EQ(q.all_response_options(), opts);
}

TEST(Questionnaire, RejectsWrongSymptomCount) {
  try {
    Questionnaire::parse(make_file(20));
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 21 symptoms"), std::string::npos) << e.what();
  }
}

TEST(Questionnaire, RejectsWrongOptionCountNamingSymptom) {
  try {
    Questionnaire::parse(make_file(21, 5, 7));
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("symptom 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Questionnaire::parse(make_file(21, 16, 4)), DataError);
}

TEST(Questionnaire, RejectsMalformedLines) {
  EXPECT_THROW(Questionnaire::parse("x\tName\topt\n"), ParseError);
  EXPECT_THROW(Questionnaire::parse("1\tName\n"), ParseError);
  std::string swapped = make_file(21);
  // Out-of-order index.
  swapped.replace(swapped.find("\n1\t") + 1, 1, "2");
  EXPECT_THROW(Questionnaire::parse(swapped), DataError);
}

TEST(Questionnaire, SerializeRoundTrips) {
  const auto q = Questionnaire::load(symsearch::testing::data_path("questionnaire_placeholder.tsv"));
  const auto again = Questionnaire::parse(q.serialize());
  EXPECT_EQ(again, q);
  EXPECT_EQ(again.serialize(), q.serialize());
}

TEST(Questionnaire, LookupErrors) {
  const auto q = Questionnaire::parse(make_file(21));
  EXPECT_TRUE(q.has_option(16, 6));
  EXPECT_FALSE(q.has_option(15, 4));
  EXPECT_THROW(q.option(22, 0), DataError);
  EXPECT_THROW(q.symptom(0), DataError);
}

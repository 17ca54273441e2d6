#include <gtest/gtest.h>

#include <random>

#include "foresight/types.hpp"
#include "testutil.hpp"

using namespace foresight;

TEST(Probability, RejectsOutOfRange) {
    EXPECT_NO_THROW(Probability(0.0));
    EXPECT_NO_THROW(Probability(1.0));
    EXPECT_THROW(Probability(-0.01), ValidationError);
    EXPECT_THROW(Probability(1.01), ValidationError);
}

TEST(Probability, RejectsAllRandomInvalidValues) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        double u = testutil::uniform01(rng);
        double above = 1.0 + u * 100.0 + 1e-9;
        double below = -u * 100.0 - 1e-9;
        EXPECT_THROW((void)Probability(above), ValidationError);
        EXPECT_THROW((void)Probability(below), ValidationError);
    }
}

TEST(Probability, ClampedReportsFlag) {
    auto [high, clamped_high] = Probability::clamped(1.5);
    EXPECT_DOUBLE_EQ(high.value(), 1.0);
    EXPECT_TRUE(clamped_high);
    auto [ok, clamped_ok] = Probability::clamped(0.3);
    EXPECT_DOUBLE_EQ(ok.value(), 0.3);
    EXPECT_FALSE(clamped_ok);
}

TEST(Outcome, BinaryOnly) {
    EXPECT_EQ(Outcome(0).value(), 0);
    EXPECT_EQ(Outcome(1).value(), 1);
    EXPECT_THROW(Outcome(2), ValidationError);
    EXPECT_THROW(Outcome(-1), ValidationError);
}

TEST(ValidateQuestion, SampleQuestionIsValid) {
    // The worked sample: begin 2023-04-17, close 2023-04-30, resolved early.
    auto q = testutil::make_question("starship", Date(2023, 4, 17), Date(2023, 4, 30),
                                     Date(2023, 4, 20), 1);
    EXPECT_TRUE(validate_question(q).empty());
}

TEST(ValidateQuestion, EqualBeginCloseViolatesOrdering) {
    auto q = testutil::make_question("q", Date(2023, 4, 17), Date(2023, 4, 17));
    auto violations = validate_question(q);
    ASSERT_EQ(violations.size(), 1u);
    EXPECT_NE(violations[0].find("strictly before"), std::string::npos);
}

TEST(ValidateQuestion, ResolutionWithoutResolveDate) {
    auto q = testutil::make_question("q", Date(2023, 4, 17), Date(2023, 4, 30));
    q.resolution = Outcome(1);
    auto violations = validate_question(q);
    ASSERT_EQ(violations.size(), 1u);
    EXPECT_NE(violations[0].find("resolution"), std::string::npos);
}

TEST(ValidateQuestion, ResolveBeforeBegin) {
    auto q = testutil::make_question("q", Date(2023, 4, 17), Date(2023, 4, 30),
                                     Date(2023, 4, 10), 1);
    EXPECT_FALSE(validate_question(q).empty());
}

TEST(ValidateQuestion, UnorderedSeriesCaught) {
    auto q = testutil::make_question("q", Date(2023, 4, 17), Date(2023, 4, 30));
    testutil::add_series_point(q, Date(2023, 4, 20), 0.5);
    testutil::add_series_point(q, Date(2023, 4, 18), 0.6);
    EXPECT_FALSE(validate_question(q).empty());
}

TEST(Category, ParseAcceptsAliases) {
    EXPECT_EQ(parse_category("Science & Tech"), Category::ScienceTech);
    EXPECT_EQ(parse_category("Science & Technology"), Category::ScienceTech);
    EXPECT_EQ(parse_category("Security & Defenses"), Category::SecurityDefense);
    EXPECT_EQ(parse_category("no such label"), Category::Other);
    EXPECT_EQ(category_labels().size(), 11u);
}

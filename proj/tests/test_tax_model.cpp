#include "reviewcoin/error.hpp"
#include "reviewcoin/tax_model.hpp"

#include <gtest/gtest.h>

using namespace reviewcoin;

TEST(TaxModel, NeuripsScheduleSumsTo1125) {
    // 0.5 + 0.25 + 0.125 + 0.2 + 0.05 RC
    EXPECT_EQ(compute_tau(neurips_db_schedule()), Amount(500 + 250 + 125 + 200 + 50));
}

TEST(TaxModel, EmptyScheduleIsZero) { EXPECT_EQ(compute_tau(TaxSchedule{}), Amount(0)); }

TEST(TaxModel, TenRolesAtHundred) {
    TaxSchedule s;
    std::int64_t oracle = 0;
    for (int i = 0; i < 10; ++i) {
        s.roles.push_back({"role" + std::to_string(i), Amount(100), 1});
        oracle += 100;
    }
    EXPECT_EQ(compute_tau(s).millicoins(), oracle);
}

TEST(TaxModel, RoundTau) {
    EXPECT_EQ(round_tau(Amount(1125)), Amount(1000));
    EXPECT_EQ(round_tau(Amount(0)), Amount(0));
    EXPECT_EQ(round_tau(Amount(1500)), Amount(2000));
    EXPECT_EQ(round_tau(Amount(2500)), Amount(2000));
    EXPECT_EQ(round_tau(Amount(2501)), Amount(3000));
    EXPECT_EQ(round_tau(Amount(499)), Amount(0));
}

TEST(TaxModel, SubmissionCost) {
    EXPECT_EQ(submission_cost({3, Amount(1000), 0}), Amount(4000));
    EXPECT_EQ(submission_cost({1, Amount(0), 0}), Amount(1000));
    EXPECT_EQ(submission_cost({5, Amount(1125), 0}), Amount(5 * 1000 + 1125));
}

TEST(TaxModel, CostMinusTauIsReviewCoins) {
    for (std::int64_t rho = 1; rho <= 7; ++rho)
        for (std::int64_t tau : {0, 1, 999, 1125, 40000})
            EXPECT_EQ(submission_cost({rho, Amount(tau), 0}) - Amount(tau), Amount(rho * 1000));
}

TEST(TaxModel, TotalOutlay) {
    EXPECT_EQ(total_outlay({3, Amount(1000), 2800}), Amount(11'200'000));
    EXPECT_EQ(total_outlay({3, Amount(1125), 100}), Amount(100 * (3000 + 1125)));
    EXPECT_EQ(total_outlay({3, Amount(1125), 0}), Amount(0));
}

TEST(TaxModel, Validation) {
    EXPECT_THROW(submission_cost({0, Amount(0), 0}), Error);
    EXPECT_THROW(total_outlay({3, Amount(0), -1}), Error);
    EXPECT_THROW(round_tau(Amount(-1)), Error);
    TaxSchedule dup{{{"a", Amount(1), 1}, {"a", Amount(2), 1}}, {}, {}};
    EXPECT_THROW(dup.validate(), Error);
    TaxSchedule zero_split{{{"a", Amount(1), 0}}, {}, {}};
    EXPECT_THROW(zero_split.validate(), Error);
    EXPECT_NO_THROW(neurips_db_schedule().validate());
}

#include "reviewcoin/apportion.hpp"
#include "reviewcoin/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace reviewcoin;

namespace {

// Checks the defining properties of largest-remainder apportionment directly:
// exact sum, every share is floor(quota) or floor(quota) + 1, and nobody
// rounded up has a smaller remainder than somebody rounded down (ties to the
// lower index).
void check_largest_remainder(std::int64_t total, const std::vector<std::int64_t>& w) {
    auto shares = apportion(Amount(total), w);
    ASSERT_EQ(shares.size(), w.size());
    __int128 sum_w = 0;
    for (auto x : w) sum_w += x;
    std::int64_t sum = 0;
    for (auto s : shares) sum += s.millicoins();
    if (sum_w == 0) {
        EXPECT_EQ(sum, 0);
        return;
    }
    EXPECT_EQ(sum, total);
    std::vector<__int128> rem(w.size());
    std::vector<bool> up(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const __int128 scaled = static_cast<__int128>(total) * w[i];
        const auto floor_q = static_cast<std::int64_t>(scaled / sum_w);
        rem[i] = scaled % sum_w;
        const auto s = shares[i].millicoins();
        ASSERT_TRUE(s == floor_q || s == floor_q + 1) << "index " << i;
        up[i] = s == floor_q + 1;
    }
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            if (up[i] && !up[j]) {
                EXPECT_GE(rem[i], rem[j]);
                if (rem[i] == rem[j]) {
                    EXPECT_LT(i, j);
                }
            }
}

}  // namespace

TEST(Apportion, TrackChairPoolSplitThree) {
    auto s = apportion(Amount(125 * 20), std::vector<std::int64_t>{1, 1, 1});
    EXPECT_EQ(s[0], Amount(834));
    EXPECT_EQ(s[1], Amount(833));
    EXPECT_EQ(s[2], Amount(833));
}

TEST(Apportion, EdgeCases) {
    EXPECT_TRUE(apportion(Amount(10), std::vector<std::int64_t>{}).empty());
    auto zero = apportion(Amount(10), std::vector<std::int64_t>{0, 0});
    EXPECT_EQ(zero[0], Amount(0));
    EXPECT_THROW(apportion(Amount(10), std::vector<std::int64_t>{1, -1}), Error);
    EXPECT_THROW(apportion(Amount(-10), std::vector<std::int64_t>{1}), Error);
}

TEST(Apportion, AreaChairRosterByAssignmentCounts) {
    // Ten chairs handled 100 papers unevenly; pool is 500 mRC x 100.
    std::vector<std::int64_t> counts{19, 17, 13, 11, 10, 9, 8, 7, 4, 2};
    check_largest_remainder(50'000, counts);
    auto s = apportion(Amount(50'000), counts);
    for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_EQ(s[i], Amount(500 * counts[i]));
}

TEST(Apportion, RandomPropertyOracle) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::int64_t> w(1 + gen() % 12);
        for (auto& x : w) x = static_cast<std::int64_t>(gen() % 50);
        check_largest_remainder(static_cast<std::int64_t>(gen() % 1'000'000), w);
    }
    check_largest_remainder(INT64_MAX / 2, {INT64_MAX / 3, 1, 7});
}

#pragma once

#include "reviewcoin/amount.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace reviewcoin {

/// Largest-remainder (Hamilton) apportionment of `total` mRC in proportion to
/// non-negative integer weights. Every whole quota is granted first; leftover
/// units go one each to the largest fractional remainders, ties broken by
/// lower index. The result always sums to `total` when any weight is positive;
/// with all-zero weights every share is zero.
std::vector<Amount> apportion(Amount total, std::span<const std::int64_t> weights);

}  // namespace reviewcoin

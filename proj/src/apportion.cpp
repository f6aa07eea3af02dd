#include "reviewcoin/apportion.hpp"

#include "reviewcoin/error.hpp"

#include <algorithm>
#include <numeric>

namespace reviewcoin {

std::vector<Amount> apportion(Amount total, std::span<const std::int64_t> weights) {
    if (total.millicoins() < 0) throw Error(ErrorCode::ConfigInvalid, "cannot apportion a negative total");
    std::vector<Amount> shares(weights.size());
    __int128 weight_sum = 0;
    for (auto w : weights) {
        if (w < 0) throw Error(ErrorCode::ConfigInvalid, "negative apportionment weight");
        weight_sum += w;
    }
    if (weight_sum == 0) return shares;

    const __int128 t = total.millicoins();
    std::vector<std::pair<__int128, std::size_t>> remainders;
    remainders.reserve(weights.size());
    __int128 granted = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const __int128 scaled = t * weights[i];
        const __int128 quota = scaled / weight_sum;
        shares[i] = Amount(static_cast<std::int64_t>(quota));
        granted += quota;
        remainders.emplace_back(scaled % weight_sum, i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (__int128 left = t - granted, k = 0; left > 0; --left, ++k)
        shares[remainders[static_cast<std::size_t>(k)].second] += Amount(1);
    return shares;
}

}  // namespace reviewcoin

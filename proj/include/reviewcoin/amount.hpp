#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace reviewcoin {

/// Exact coin quantity in millicoins (1 RC = 1000 mRC).
class Amount {
public:
    static constexpr std::int64_t kPerCoin = 1000;

    constexpr Amount() = default;
    constexpr explicit Amount(std::int64_t millicoins) : mrc_(millicoins) {}

    static constexpr Amount mrc(std::int64_t v) { return Amount(v); }
    static constexpr Amount coins(std::int64_t v) { return Amount(v * kPerCoin); }

    constexpr std::int64_t millicoins() const { return mrc_; }

    constexpr auto operator<=>(const Amount&) const = default;

    constexpr Amount operator-() const { return Amount(-mrc_); }
    constexpr Amount& operator+=(Amount o) { mrc_ += o.mrc_; return *this; }
    constexpr Amount& operator-=(Amount o) { mrc_ -= o.mrc_; return *this; }
    friend constexpr Amount operator+(Amount a, Amount b) { return Amount(a.mrc_ + b.mrc_); }
    friend constexpr Amount operator-(Amount a, Amount b) { return Amount(a.mrc_ - b.mrc_); }
    friend constexpr Amount operator*(Amount a, std::int64_t k) { return Amount(a.mrc_ * k); }
    friend constexpr Amount operator*(std::int64_t k, Amount a) { return Amount(a.mrc_ * k); }

private:
    std::int64_t mrc_ = 0;
};

inline constexpr Amount kOneReview = Amount::coins(1);

/// "1.125", "4", "-0.5": RC with trailing zeros trimmed, always exact.
std::string format_rc(Amount a);

/// "1.125", "4.000": RC with exactly three decimals.
std::string format_rc_fixed(Amount a);

inline std::ostream& operator<<(std::ostream& os, Amount a) {
    return os << a.millicoins() << " mRC";
}

}  // namespace reviewcoin

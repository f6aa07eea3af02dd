#include "reviewcoin/tax_model.hpp"

#include "reviewcoin/error.hpp"

#include <set>

namespace reviewcoin {

void TaxSchedule::validate() const {
    std::set<std::string> names;
    for (const auto& role : roles) {
        if (role.role_name.empty()) throw Error(ErrorCode::ConfigInvalid, "role without a name");
        if (!names.insert(role.role_name).second)
            throw Error(ErrorCode::ConfigInvalid, "duplicate role " + role.role_name);
        if (role.per_paper_rate <= Amount{})
            throw Error(ErrorCode::ConfigInvalid, "role " + role.role_name + " needs a positive rate");
        if (role.split_ways < 1)
            throw Error(ErrorCode::ConfigInvalid, "role " + role.role_name + " needs split_ways >= 1");
    }
    if (extra_review_rate < Amount{} || default_reserve_rate < Amount{})
        throw Error(ErrorCode::ConfigInvalid, "tax components must be non-negative");
}

Amount TaxSchedule::role_rate_sum() const {
    Amount sum;
    for (const auto& role : roles) sum += role.per_paper_rate;
    return sum;
}

TaxSchedule neurips_db_schedule() {
    return TaxSchedule{
        .roles = {{"area_chair", Amount(500), 1},
                  {"senior_area_chair", Amount(250), 1},
                  {"track_chair", Amount(125), 3}},
        .extra_review_rate = Amount(200),
        .default_reserve_rate = Amount(50),
    };
}

void PricingParams::validate() const {
    if (rho < 1) throw Error(ErrorCode::ConfigInvalid, "rho must be at least 1");
    if (tau < Amount{}) throw Error(ErrorCode::ConfigInvalid, "tau must be non-negative");
    if (n < 0) throw Error(ErrorCode::ConfigInvalid, "n must be non-negative");
}

Amount compute_tau(const TaxSchedule& schedule) {
    return schedule.role_rate_sum() + schedule.extra_review_rate + schedule.default_reserve_rate;
}

Amount round_tau(Amount tau_exact) {
    if (tau_exact < Amount{}) throw Error(ErrorCode::ConfigInvalid, "tau must be non-negative");
    const std::int64_t v = tau_exact.millicoins();
    std::int64_t whole = v / Amount::kPerCoin;
    const std::int64_t frac = v % Amount::kPerCoin;
    if (frac > 500 || (frac == 500 && whole % 2 == 1)) ++whole;
    return Amount::coins(whole);
}

Amount submission_cost(const PricingParams& params) {
    params.validate();
    return kOneReview * params.rho + params.tau;
}

Amount total_outlay(const PricingParams& params) {
    return submission_cost(params) * params.n;
}

}  // namespace reviewcoin

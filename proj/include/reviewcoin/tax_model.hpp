#pragma once

#include "reviewcoin/amount.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reviewcoin {

/// One paid position in the conference hierarchy, accruing `per_paper_rate`
/// for every submitted paper. A pooled role shares that accrual `split_ways`.
struct RoleRate {
    std::string role_name;
    Amount per_paper_rate;
    std::int64_t split_ways = 1;

    friend bool operator==(const RoleRate&, const RoleRate&) = default;
};

struct TaxSchedule {
    std::vector<RoleRate> roles;
    Amount extra_review_rate;
    Amount default_reserve_rate;

    /// Throws Error(ConfigInvalid) on a non-positive role rate, split_ways < 1,
    /// a negative component or duplicate role names.
    void validate() const;

    /// Sum of the per-paper role rates only.
    Amount role_rate_sum() const;

    friend bool operator==(const TaxSchedule&, const TaxSchedule&) = default;
};

/// The NeurIPS 2024 Datasets & Benchmarks track schedule: area chairs 0.5,
/// senior area chairs 0.25, track chairs 0.125 (pooled over three), extra
/// reviews 0.2 and loan defaults 0.05 RC per paper.
TaxSchedule neurips_db_schedule();

struct PricingParams {
    std::int64_t rho = 3;  // reviews per paper
    Amount tau;            // per-paper tax
    std::int64_t n = 0;    // papers submitted

    void validate() const;
};

/// Exact per-paper tax: every role rate plus the extra-review and default-reserve components.
Amount compute_tau(const TaxSchedule& schedule);

/// Nearest whole coin, ties to even.
Amount round_tau(Amount tau_exact);

/// rho coins for the reviews plus the tax.
Amount submission_cost(const PricingParams& params);

/// n times the submission cost.
Amount total_outlay(const PricingParams& params);

}  // namespace reviewcoin

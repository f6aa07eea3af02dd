#pragma once

#include "reviewcoin/amount.hpp"
#include "reviewcoin/ledger.hpp"
#include "reviewcoin/tax_model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace reviewcoin {

/// Volunteer work in one conference: reviews written plus papers handled per role.
struct WorkRecord {
    AccountId account;
    std::int64_t reviews = 0;
    std::map<std::string, std::int64_t> role_papers;
};

struct BootstrapHistory {
    /// Prices role work; a pooled role's per-paper rate is divided by its split.
    TaxSchedule schedule;
    /// The most recent unpaid conference(s).
    std::vector<WorkRecord> recent;
    /// The last free conference. May be empty when planning ahead of it.
    std::vector<WorkRecord> free_conference;
    std::string free_conference_id = "free";
};

struct Grant {
    AccountId account;
    Amount amount;

    friend bool operator==(const Grant&, const Grant&) = default;
};

struct BootstrapPlan {
    Amount sigma;
    std::vector<Grant> phase1_grants;
    std::vector<Grant> phase2_grants;
    /// Extra coin minted when the free conference's work exceeds what is left of sigma.
    Amount top_up;
    std::string free_conference_id;

    Amount phase1_total() const;
    Amount phase2_total() const;
};

/// 2 * n * (rho + tau): twice the cost of running one conference.
Amount compute_sigma(std::int64_t n, std::int64_t rho, Amount tau);

/// reviews * 1 RC + sum over roles of floor(papers * rate / split_ways).
Amount work_value(const WorkRecord& record, const TaxSchedule& schedule);

/// Phase 1 hands floor(sigma / 2) to the recent volunteers pro rata by work
/// value (largest remainder). Phase 2 spreads the rest of sigma over the free
/// conference's work, or pays that work at face value and records a top-up
/// mint when it is worth more than what is left.
/// Throws Error(EmptyHistory) when the recent conference carries no work.
BootstrapPlan plan_bootstrap(const BootstrapHistory& history, Amount sigma);

/// Mints sigma (and any top-up) into `treasury` and pays every grant from it.
std::vector<Transaction> execute_bootstrap(Ledger& ledger, const AccountId& treasury, const BootstrapPlan& plan);

/// Growth mint sized by the same formula on the increase in submissions.
Transaction mint_growth(Ledger& ledger, const AccountId& treasury, std::int64_t added_papers, std::int64_t rho,
                        Amount tau);

}  // namespace reviewcoin

#include "reviewcoin/bootstrap.hpp"

#include "reviewcoin/apportion.hpp"
#include "reviewcoin/error.hpp"

#include <algorithm>
#include <set>

namespace reviewcoin {

namespace {

Amount sum_grants(const std::vector<Grant>& grants) {
    Amount sum;
    for (const auto& g : grants) sum += g.amount;
    return sum;
}

std::vector<Amount> values_of(const std::vector<WorkRecord>& records, const TaxSchedule& schedule) {
    std::set<AccountId> seen;
    std::vector<Amount> out;
    for (const auto& r : records) {
        if (!seen.insert(r.account).second)
            throw Error(ErrorCode::ConfigInvalid, "duplicate work record for " + r.account.str());
        out.push_back(work_value(r, schedule));
    }
    return out;
}

std::vector<Grant> pro_rata(const std::vector<WorkRecord>& records, const std::vector<Amount>& values,
                            Amount total) {
    std::vector<std::int64_t> weights;
    for (auto v : values) weights.push_back(v.millicoins());
    auto shares = apportion(total, weights);
    std::vector<Grant> grants;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (shares[i] > Amount{}) grants.push_back({records[i].account, shares[i]});
    return grants;
}

}  // namespace

Amount BootstrapPlan::phase1_total() const { return sum_grants(phase1_grants); }

Amount BootstrapPlan::phase2_total() const { return sum_grants(phase2_grants); }

Amount compute_sigma(std::int64_t n, std::int64_t rho, Amount tau) {
    if (n < 0) throw Error(ErrorCode::ConfigInvalid, "n must be non-negative");
    return submission_cost(PricingParams{rho, tau, n}) * (2 * n);
}

Amount work_value(const WorkRecord& record, const TaxSchedule& schedule) {
    if (record.reviews < 0) throw Error(ErrorCode::ConfigInvalid, "negative review count");
    Amount value = kOneReview * record.reviews;
    for (const auto& [role, papers] : record.role_papers) {
        auto it = std::find_if(schedule.roles.begin(), schedule.roles.end(),
                               [&](const RoleRate& r) { return r.role_name == role; });
        if (it == schedule.roles.end()) throw Error(ErrorCode::ConfigInvalid, "unknown role " + role);
        if (papers < 0) throw Error(ErrorCode::ConfigInvalid, "negative paper count for " + role);
        value += Amount(papers * it->per_paper_rate.millicoins() / it->split_ways);
    }
    return value;
}

BootstrapPlan plan_bootstrap(const BootstrapHistory& history, Amount sigma) {
    if (sigma < Amount{}) throw Error(ErrorCode::ConfigInvalid, "sigma must be non-negative");
    history.schedule.validate();

    const auto recent_values = values_of(history.recent, history.schedule);
    Amount recent_total;
    for (auto v : recent_values) recent_total += v;
    if (history.recent.empty() || recent_total == Amount{})
        throw Error(ErrorCode::EmptyHistory, "no recorded work to seed phase one");

    BootstrapPlan plan;
    plan.sigma = sigma;
    plan.free_conference_id = history.free_conference_id;
    plan.phase1_grants = pro_rata(history.recent, recent_values, Amount(sigma.millicoins() / 2));

    const Amount remaining = sigma - plan.phase1_total();
    const auto free_values = values_of(history.free_conference, history.schedule);
    Amount free_total;
    for (auto v : free_values) free_total += v;
    if (free_total == Amount{}) return plan;

    if (free_total >= remaining) {
        for (std::size_t i = 0; i < history.free_conference.size(); ++i)
            if (free_values[i] > Amount{}) plan.phase2_grants.push_back({history.free_conference[i].account, free_values[i]});
        plan.top_up = free_total - remaining;
    } else {
        plan.phase2_grants = pro_rata(history.free_conference, free_values, remaining);
    }
    return plan;
}

std::vector<Transaction> execute_bootstrap(Ledger& ledger, const AccountId& treasury, const BootstrapPlan& plan) {
    std::vector<Transaction> out;
    ledger.ensure_account(treasury);
    if (plan.sigma > Amount{})
        out.push_back(ledger.mint(treasury, plan.sigma, Memo{{}, {}, {}, "bootstrap supply"}));
    for (const auto& g : plan.phase1_grants) {
        ledger.ensure_account(g.account);
        out.push_back(ledger.transfer(TxKind::Transfer, treasury, g.account, g.amount,
                                      Memo{{}, {}, {}, "bootstrap phase 1"}));
    }
    if (plan.top_up > Amount{})
        out.push_back(ledger.mint(treasury, plan.top_up, Memo{plan.free_conference_id, {}, {}, "bootstrap top-up"}));
    for (const auto& g : plan.phase2_grants) {
        ledger.ensure_account(g.account);
        out.push_back(ledger.transfer(TxKind::Transfer, treasury, g.account, g.amount,
                                      Memo{plan.free_conference_id, {}, {}, "bootstrap phase 2"}));
    }
    return out;
}

Transaction mint_growth(Ledger& ledger, const AccountId& treasury, std::int64_t added_papers, std::int64_t rho,
                        Amount tau) {
    if (added_papers <= 0) throw Error(ErrorCode::ConfigInvalid, "growth mint needs a positive paper increase");
    ledger.ensure_account(treasury);
    return ledger.mint(treasury, compute_sigma(added_papers, rho, tau), Memo{{}, {}, {}, "growth mint"});
}

}  // namespace reviewcoin

#pragma once

#include "reviewcoin/amount.hpp"
#include "reviewcoin/bootstrap.hpp"
#include "reviewcoin/conference.hpp"
#include "reviewcoin/ledger.hpp"
#include "reviewcoin/tax_model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reviewcoin {

struct AgentProfile {
    /// Expected papers per cycle: floor(rate) always, plus one more with probability frac(rate).
    double submission_rate = 1.0;
    double review_accept_prob = 1.0;
    double review_completion_prob = 1.0;
    /// Chance that a loan-funded author turns delinquent and defaults.
    double default_prob = 0.0;
    /// Share of each cycle's income handed to the group's sponsor account.
    double sponsor_transfer_fraction = 0.0;

    void validate() const;
};

struct PopulationGroup {
    std::string name;
    std::int64_t count = 0;
    AgentProfile profile;
    /// Minted into the treasury and handed to every member before cycle 1.
    Amount initial_balance;
};

/// Stochastic: hard papers and defaults happen with their modeled
/// probabilities. Modeled: each cycle realizes exactly the tax schedule's
/// extra-review and default-reserve budgets (floored to whole reviews).
enum class ExceptionMode { Stochastic, Modeled };

struct ConferenceTemplate {
    std::int64_t rho = 3;
    TaxSchedule schedule = neurips_db_schedule();
    /// Explicit tau; when absent, compute_tau(schedule), rounded if round_tau.
    std::optional<Amount> tau;
    bool round_tau = false;
    bool loans_enabled = false;
    bool strict_default_reserve = false;
    /// Roster size per role; defaults to the role's split_ways.
    std::map<std::string, std::int64_t> roster_sizes;
    double challenge_prob = 0.0;
    double challenge_uphold_prob = 0.5;

    Amount effective_tau() const;
};

struct ScenarioConfig {
    std::string name = "sim";
    std::vector<PopulationGroup> population;
    std::int64_t cycles = 1;
    ConferenceTemplate conference;
    bool bootstrap = true;
    /// Minted into the treasury before cycle 1, e.g. as loan capital.
    Amount treasury_reserve;
    ExceptionMode exception_mode = ExceptionMode::Stochastic;
    std::uint64_t rng_seed = 0;

    std::int64_t agent_count() const;
    /// Throws Error(ConfigInvalid).
    void validate() const;
};

struct CycleReport {
    std::int64_t cycle = 0;
    std::int64_t submissions = 0;  // attempted papers
    std::int64_t blocked_submissions = 0;
    std::int64_t papers = 0;  // settled, i.e. not withdrawn
    std::int64_t loan_funded = 0;
    std::int64_t reviews_paid = 0;  // review coins paid out, redirected ones included
    std::int64_t extra_reviews = 0;
    std::int64_t replacement_hires = 0;
    std::int64_t revisions = 0;
    std::int64_t challenges_filed = 0;
    std::int64_t challenges_upheld = 0;
    std::int64_t defaults = 0;
    Amount default_writeoffs;
    Amount role_disbursements;
    Amount treasury;
    Amount escrow;
    Amount loans_outstanding;
    /// Change in treasury balance plus outstanding loans over the cycle.
    Amount treasury_drift;
    Amount total_supply;
    Amount sponsor_holdings;
    bool supply_conserved = true;
    double gini = 0.0;

    friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

struct AgentRecord {
    AccountId account;
    std::size_t group = 0;
    std::int64_t bootstrap_recent_reviews = 0;
    std::int64_t bootstrap_free_reviews = 0;
    std::vector<std::int64_t> attempted;  // per cycle
    std::vector<std::int64_t> blocked;    // per cycle
};

struct MetricSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;

    friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct SimulationReport {
    std::int64_t cycles = 0;
    std::map<std::string, MetricSummary> metrics;
    bool supply_conserved = false;
    bool chain_verified = false;
};

class Simulation {
public:
    /// Throws Error(ConfigInvalid).
    explicit Simulation(ScenarioConfig config);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs every remaining cycle and returns all reports.
    const std::vector<CycleReport>& run();
    /// Runs a single cycle.
    const CycleReport& step();

    const ScenarioConfig& config() const { return config_; }
    const std::vector<CycleReport>& reports() const { return reports_; }
    const std::vector<SettlementReport>& settlements() const { return settlements_; }
    const std::vector<AgentRecord>& agents() const { return agents_; }
    const std::optional<BootstrapPlan>& bootstrap_plan() const { return bootstrap_plan_; }
    const Ledger& ledger() const { return ledger_; }
    const LoanBook& loans() const { return loans_; }
    AccountId treasury() const;

private:
    struct Impl;

    ScenarioConfig config_;
    Ledger ledger_;
    LoanBook loans_;
    std::vector<AgentRecord> agents_;
    std::vector<CycleReport> reports_;
    std::vector<SettlementReport> settlements_;
    std::optional<BootstrapPlan> bootstrap_plan_;
    std::unique_ptr<Impl> impl_;
};

/// Deterministic in the config: identical configs give identical reports.
std::vector<CycleReport> run_scenario(const ScenarioConfig& config);

/// Standard Gini coefficient; 0 for equal (or all-zero) holdings.
/// Throws Error(EmptyPopulation) on an empty list.
double compute_gini(std::span<const Amount> balances);

/// Per-metric min/max/mean plus the final audit: the log verifies and its
/// replayed balances sum to the minted supply reported by the last cycle.
SimulationReport summarize(std::span<const CycleReport> reports, std::span<const Transaction> log);

}  // namespace reviewcoin

#include "reviewcoin/simulator.hpp"

#include "reviewcoin/error.hpp"
#include "reviewcoin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace reviewcoin {

namespace {

// Stream domains for derive_seed(rng_seed, {domain, cycle, index}).
enum Domain : std::uint64_t {
    kSetup = 1,
    kRecentConference = 2,
    kFreeConference = 3,
    kAgent = 4,
    kEditor = 5,
};

constexpr int kMaxRevisions = 3;
constexpr int kMaxReplacementTries = 64;

std::int64_t papers_this_cycle(Rng& rng, double rate) {
    const double whole = std::floor(rate);
    return static_cast<std::int64_t>(whole) + (rng.bernoulli(rate - whole) ? 1 : 0);
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// Reviewers are drawn uniformly among agents that still owe reviews: each
/// agent owes rho reviews per paper it tried to submit. Falls back to any
/// eligible agent once the owing pool has nobody without a conflict.
class ReviewerPool {
public:
    ReviewerPool(std::size_t agents, const std::vector<std::int64_t>& capacity)
        : capacity_(capacity), slot_(agents, kNone), agents_(agents) {
        for (std::size_t i = 0; i < agents; ++i) {
            if (capacity_[i] > 0) {
                slot_[i] = pool_.size();
                pool_.push_back(i);
            }
        }
    }

    template <typename Eligible>
    std::size_t pick(Rng& rng, Eligible&& eligible) {
        for (int attempt = 0; attempt < 32 && !pool_.empty(); ++attempt) {
            auto who = pool_[rng.below(pool_.size())];
            if (eligible(who)) return take(who);
        }
        std::vector<std::size_t> owing;
        for (auto who : pool_)
            if (eligible(who)) owing.push_back(who);
        if (!owing.empty()) return take(owing[rng.below(owing.size())]);
        std::vector<std::size_t> anyone;
        for (std::size_t i = 0; i < agents_; ++i)
            if (eligible(i)) anyone.push_back(i);
        if (anyone.empty()) throw Error(ErrorCode::ConfigInvalid, "population too small to staff reviews");
        return anyone[rng.below(anyone.size())];
    }

private:
    static constexpr std::size_t kNone = ~std::size_t{0};

    std::size_t take(std::size_t who) {
        if (--capacity_[who] == 0) {
            auto pos = slot_[who];
            auto last = pool_.back();
            pool_[pos] = last;
            slot_[last] = pos;
            pool_.pop_back();
            slot_[who] = kNone;
        }
        return who;
    }

    std::vector<std::int64_t> capacity_;
    std::vector<std::size_t> slot_;
    std::vector<std::size_t> pool_;
    std::size_t agents_;
};

template <typename Eligible>
std::optional<std::size_t> pick_any(Rng& rng, std::size_t agents, Eligible&& eligible) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        auto who = static_cast<std::size_t>(rng.below(agents));
        if (eligible(who)) return who;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < agents; ++i)
        if (eligible(i)) candidates.push_back(i);
    if (candidates.empty()) return std::nullopt;
    return candidates[rng.below(candidates.size())];
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ConfigInvalid, std::string(what) + " must be in [0,1]");
}

}  // namespace

// --- configuration --------------------------------------------------------------------

void AgentProfile::validate() const {
    if (!(submission_rate >= 0.0) || !std::isfinite(submission_rate))
        throw Error(ErrorCode::ConfigInvalid, "submission_rate must be a finite non-negative number");
    check_probability(review_accept_prob, "review_accept_prob");
    check_probability(review_completion_prob, "review_completion_prob");
    check_probability(default_prob, "default_prob");
    check_probability(sponsor_transfer_fraction, "sponsor_transfer_fraction");
}

Amount ConferenceTemplate::effective_tau() const {
    if (tau) return *tau;
    const Amount exact = compute_tau(schedule);
    return round_tau ? reviewcoin::round_tau(exact) : exact;
}

std::int64_t ScenarioConfig::agent_count() const {
    std::int64_t n = 0;
    for (const auto& g : population) n += g.count;
    return n;
}

void ScenarioConfig::validate() const {
    if (cycles < 1) throw Error(ErrorCode::ConfigInvalid, "cycles must be at least 1");
    if (population.empty()) throw Error(ErrorCode::ConfigInvalid, "population is empty");
    std::set<std::string> names;
    for (const auto& g : population) {
        if (g.count < 0) throw Error(ErrorCode::ConfigInvalid, "negative group count");
        if (g.initial_balance < Amount{}) throw Error(ErrorCode::ConfigInvalid, "negative initial balance");
        if (!g.name.empty() && !names.insert(g.name).second)
            throw Error(ErrorCode::ConfigInvalid, "duplicate group name " + g.name);
        g.profile.validate();
    }
    const auto agents = agent_count();
    if (agents == 0) throw Error(ErrorCode::ConfigInvalid, "population has no researchers");
    if (conference.rho < 1) throw Error(ErrorCode::ConfigInvalid, "rho must be at least 1");
    if (agents < conference.rho + 2)
        throw Error(ErrorCode::ConfigInvalid, "need at least rho + 2 researchers to staff reviews");
    conference.schedule.validate();
    if (conference.effective_tau() < Amount{}) throw Error(ErrorCode::ConfigInvalid, "tau must be non-negative");
    check_probability(conference.challenge_prob, "challenge_prob");
    check_probability(conference.challenge_uphold_prob, "challenge_uphold_prob");
    for (const auto& [role, size] : conference.roster_sizes) {
        auto known = std::any_of(conference.schedule.roles.begin(), conference.schedule.roles.end(),
                                 [&](const RoleRate& r) { return r.role_name == role; });
        if (!known) throw Error(ErrorCode::ConfigInvalid, "roster size for unknown role " + role);
        if (size < 0 || size > agents) throw Error(ErrorCode::ConfigInvalid, "roster size out of range for " + role);
    }
    for (const auto& role : conference.schedule.roles)
        if (!conference.roster_sizes.contains(role.role_name) && role.split_ways > agents)
            throw Error(ErrorCode::ConfigInvalid, "not enough researchers for role " + role.role_name);
    if (treasury_reserve < Amount{}) throw Error(ErrorCode::ConfigInvalid, "negative treasury reserve");
}

// --- simulation -------------------------------------------------------------------------

struct Simulation::Impl {
    std::map<std::string, std::vector<std::size_t>> rosters;
    std::vector<std::optional<AccountId>> group_sponsor;
    std::map<AccountId, std::size_t> agent_index;
    Amount position;  // treasury balance + receivables at the end of the last cycle
    std::int64_t cycle = 0;
};

Simulation::~Simulation() = default;

AccountId Simulation::treasury() const { return AccountId::treasury(config_.name); }

Simulation::Simulation(ScenarioConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
    config_.validate();
    const auto& tmpl = config_.conference;
    const auto treasury_id = treasury();
    ledger_.open_account(treasury_id);

    std::size_t index = 0;
    for (std::size_t g = 0; g < config_.population.size(); ++g) {
        const auto& group = config_.population[g];
        if (group.profile.sponsor_transfer_fraction > 0.0) {
            auto sponsor = AccountId::sponsor(group.name.empty() ? "g" + std::to_string(g + 1) : group.name);
            ledger_.open_account(sponsor);
            impl_->group_sponsor.push_back(sponsor);
        } else {
            impl_->group_sponsor.push_back(std::nullopt);
        }
        for (std::int64_t k = 0; k < group.count; ++k, ++index) {
            char name[32];
            std::snprintf(name, sizeof name, "a%05zu", index + 1);
            AgentRecord rec;
            rec.account = AccountId::researcher(name);
            rec.group = g;
            ledger_.open_account(rec.account);
            impl_->agent_index.emplace(rec.account, agents_.size());
            agents_.push_back(std::move(rec));
        }
    }

    if (config_.treasury_reserve > Amount{})
        ledger_.mint(treasury_id, config_.treasury_reserve, Memo{{}, {}, {}, "treasury reserve"});

    Amount endowments;
    for (const auto& a : agents_) endowments += config_.population[a.group].initial_balance;
    if (endowments > Amount{}) {
        ledger_.mint(treasury_id, endowments, Memo{{}, {}, {}, "initial endowments"});
        for (const auto& a : agents_) {
            auto amount = config_.population[a.group].initial_balance;
            if (amount > Amount{})
                ledger_.transfer(TxKind::Transfer, treasury_id, a.account, amount, Memo{{}, {}, {}, "endowment"});
        }
    }

    Rng setup(derive_seed(config_.rng_seed, {kSetup}));
    for (const auto& role : tmpl.schedule.roles) {
        auto it = tmpl.roster_sizes.find(role.role_name);
        const auto size = static_cast<std::size_t>(it != tmpl.roster_sizes.end() ? it->second : role.split_ways);
        std::vector<std::size_t> order(agents_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        setup.shuffle(order);
        order.resize(size);
        impl_->rosters[role.role_name] = std::move(order);
    }

    if (config_.bootstrap) {
        const auto rho = tmpl.rho;
        const auto n_agents = agents_.size();

        // An unpaid conference: the same submission, assignment and no-show
        // behaviour as a paid cycle, recorded as work instead of payments.
        auto unpaid_conference = [&](Domain domain, std::int64_t& n_out) {
            std::vector<WorkRecord> work(n_agents);
            for (std::size_t i = 0; i < n_agents; ++i) work[i].account = agents_[i].account;
            std::vector<Rng> agent_rng;
            agent_rng.reserve(n_agents);
            for (std::size_t i = 0; i < n_agents; ++i) agent_rng.emplace_back(derive_seed(config_.rng_seed, {domain, 0, i}));
            Rng editor(derive_seed(config_.rng_seed, {domain, 1}));

            std::vector<std::size_t> authors;
            std::vector<std::int64_t> capacity(n_agents, 0);
            for (std::size_t i = 0; i < n_agents; ++i) {
                auto s = papers_this_cycle(agent_rng[i], config_.population[agents_[i].group].profile.submission_rate);
                capacity[i] = s * rho;
                for (std::int64_t k = 0; k < s; ++k) authors.push_back(i);
            }
            ReviewerPool pool(n_agents, capacity);
            for (auto author : authors) {
                std::vector<std::size_t> on_paper;
                for (std::int64_t slot = 0; slot < rho; ++slot) {
                    auto who = pool.pick(editor, [&](std::size_t c) { return c != author && !contains(on_paper, c); });
                    on_paper.push_back(who);
                }
                for (std::size_t slot = 0; slot < static_cast<std::size_t>(rho); ++slot) {
                    auto who = on_paper[slot];
                    int tries = 0;
                    while (!agent_rng[who].bernoulli(config_.population[agents_[who].group].profile.review_completion_prob) &&
                           tries++ < kMaxReplacementTries) {
                        auto next = pick_any(editor, n_agents, [&](std::size_t c) { return c != author && !contains(on_paper, c); });
                        if (!next) break;  // nobody left, the last one writes it anyway
                        who = *next;
                        on_paper.push_back(who);
                    }
                    ++work[who].reviews;
                }
            }
            const auto n = static_cast<std::int64_t>(authors.size());
            for (const auto& role : tmpl.schedule.roles) {
                const auto& roster = impl_->rosters[role.role_name];
                if (roster.empty()) continue;
                if (role.split_ways > 1) {
                    for (auto m : roster) work[m].role_papers[role.role_name] += n;
                } else {
                    for (std::int64_t p = 0; p < n; ++p) work[roster[editor.below(roster.size())]].role_papers[role.role_name] += 1;
                }
            }
            n_out = n;
            std::vector<WorkRecord> out;
            for (auto& w : work)
                if (w.reviews > 0 || !w.role_papers.empty()) out.push_back(std::move(w));
            return out;
        };

        BootstrapHistory history;
        history.schedule = tmpl.schedule;
        std::int64_t n_recent = 0;
        std::int64_t n_free = 0;
        history.recent = unpaid_conference(kRecentConference, n_recent);
        history.free_conference = unpaid_conference(kFreeConference, n_free);
        history.free_conference_id = config_.name + "-free";
        for (const auto& w : history.recent) agents_[impl_->agent_index.at(w.account)].bootstrap_recent_reviews = w.reviews;
        for (const auto& w : history.free_conference) agents_[impl_->agent_index.at(w.account)].bootstrap_free_reviews = w.reviews;

        const Amount sigma = compute_sigma(n_recent, rho, tmpl.effective_tau());
        if (sigma > Amount{} && !history.recent.empty()) {
            bootstrap_plan_ = plan_bootstrap(history, sigma);
            execute_bootstrap(ledger_, treasury_id, *bootstrap_plan_);
        }
    }

    impl_->position = ledger_.balance(treasury_id) + loans_.receivables(treasury_id);
}

const std::vector<CycleReport>& Simulation::run() {
    while (impl_->cycle < config_.cycles) step();
    return reports_;
}

const CycleReport& Simulation::step() {
    if (impl_->cycle >= config_.cycles) throw Error(ErrorCode::WrongPhase, "scenario already finished");
    const std::int64_t cycle = ++impl_->cycle;
    const auto& tmpl = config_.conference;
    const auto n_agents = agents_.size();
    const auto rho = tmpl.rho;
    const auto treasury_id = treasury();
    const std::size_t log_start = ledger_.size();

    auto profile = [&](std::size_t i) -> const AgentProfile& { return config_.population[agents_[i].group].profile; };

    std::vector<Rng> agent_rng;
    agent_rng.reserve(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i)
        agent_rng.emplace_back(derive_seed(config_.rng_seed, {kAgent, static_cast<std::uint64_t>(cycle), i}));
    Rng editor(derive_seed(config_.rng_seed, {kEditor, static_cast<std::uint64_t>(cycle)}));

    ConferenceConfig cc;
    cc.conference_id = config_.name + "-c" + std::to_string(cycle);
    cc.treasury_id = config_.name;
    cc.rho = rho;
    cc.tau = tmpl.effective_tau();
    cc.tax_schedule = tmpl.schedule;
    cc.loan_policy.enabled = tmpl.loans_enabled;
    cc.strict_default_reserve = tmpl.strict_default_reserve;
    for (const auto& [role, members] : impl_->rosters) {
        auto& roster = cc.role_rosters[role];
        for (auto m : members) roster.push_back(agents_[m].account);
    }
    Conference conf(ledger_, cc, loans_);
    conf.open_submissions();

    CycleReport report;
    report.cycle = cycle;
    const Amount cost = cc.submission_cost();

    // Submissions, in agent order.
    struct PaperPlan {
        std::string paper_id;
        std::size_t author;
        bool defaults = false;
        std::int64_t default_after = 0;  // approved reviews before the default surfaces
        bool hard = false;
    };
    std::vector<PaperPlan> papers;
    std::vector<std::int64_t> capacity(n_agents, 0);
    std::vector<bool> delinquent(n_agents, false);
    for (std::size_t i = 0; i < n_agents; ++i) {
        auto& rec = agents_[i];
        const auto s = papers_this_cycle(agent_rng[i], profile(i).submission_rate);
        rec.attempted.push_back(s);
        rec.blocked.push_back(0);
        capacity[i] = s * rho;
        report.submissions += s;
        for (std::int64_t k = 0; k < s; ++k) {
            const auto& sponsor = impl_->group_sponsor[rec.group];
            const Amount balance = ledger_.balance(rec.account);
            if (balance < cost && sponsor && ledger_.balance(*sponsor) > Amount{}) {
                const Amount help = std::min(cost - balance, ledger_.balance(*sponsor));
                conf.transfer_contribution(*sponsor, rec.account, help);
            }
            const bool short_of_coin = ledger_.balance(rec.account) < cost;
            if (short_of_coin && (!tmpl.loans_enabled || ledger_.balance(treasury_id) < cost - ledger_.balance(rec.account))) {
                ++rec.blocked.back();
                ++report.blocked_submissions;
                continue;
            }
            const auto& paper = conf.submit_paper(rec.account, short_of_coin);
            PaperPlan plan{paper.paper_id, i};
            if (paper.funded_by_loan && agent_rng[i].bernoulli(profile(i).default_prob)) {
                plan.defaults = true;
                plan.default_after = rho;
                delinquent[i] = true;
            }
            papers.push_back(std::move(plan));
        }
    }
    conf.close_submissions();

    // Exception schedule.
    std::vector<std::size_t> active;
    std::vector<std::size_t> defaulting;
    for (std::size_t p = 0; p < papers.size(); ++p) (papers[p].defaults ? defaulting : active).push_back(p);
    const auto n_active = static_cast<std::int64_t>(active.size());
    if (config_.exception_mode == ExceptionMode::Modeled) {
        auto hard_count = static_cast<std::size_t>(tmpl.schedule.extra_review_rate.millicoins() * n_active / Amount::kPerCoin);
        auto order = active;
        editor.shuffle(order);
        for (std::size_t k = 0; k < std::min(hard_count, order.size()); ++k) papers[order[k]].hard = true;
        std::int64_t loss_reviews = tmpl.schedule.default_reserve_rate.millicoins() * n_active / Amount::kPerCoin;
        for (auto p : defaulting) {
            papers[p].default_after = std::min(rho, loss_reviews);
            loss_reviews -= papers[p].default_after;
        }
    } else {
        const double hard_prob = static_cast<double>(tmpl.schedule.extra_review_rate.millicoins()) / Amount::kPerCoin;
        for (auto p : active) papers[p].hard = editor.bernoulli(std::min(1.0, hard_prob));
    }

    // Reviewer assignment.
    ReviewerPool pool(n_agents, capacity);
    for (const auto& plan : papers) {
        std::vector<std::size_t> chosen;
        std::vector<AccountId> accounts;
        for (std::int64_t slot = 0; slot < rho; ++slot) {
            auto who = pool.pick(editor, [&](std::size_t c) { return c != plan.author && !contains(chosen, c); });
            chosen.push_back(who);
            accounts.push_back(agents_[who].account);
        }
        conf.assign_reviewers(plan.paper_id, std::move(accounts));
    }

    auto on_paper = [&](const std::string& pid) {
        std::vector<std::size_t> out;
        const auto& p = conf.paper(pid);
        for (const auto& a : p.assigned_reviewers) out.push_back(impl_->agent_index.at(a));
        for (const auto& a : p.extra_reviewers) out.push_back(impl_->agent_index.at(a));
        return out;
    };
    auto hire = [&](const std::string& pid, std::size_t author, std::span<const std::size_t> also_taken = {}) {
        auto taken = on_paper(pid);
        taken.insert(taken.end(), also_taken.begin(), also_taken.end());
        return pick_any(editor, n_agents,
                        [&](std::size_t c) { return c != author && !delinquent[c] && !contains(taken, c); });
    };
    auto write_and_approve = [&](std::size_t who, const std::string& pid) {
        const auto review_id = conf.submit_review(agents_[who].account, pid).review_id;
        for (int round = 0; round < kMaxRevisions && !agent_rng[who].bernoulli(profile(who).review_accept_prob); ++round) {
            conf.request_revision(review_id);
            conf.submit_review(agents_[who].account, pid);
        }
        conf.approve_review(review_id);
        return review_id;
    };

    // Stochastic extras past the schedule's budget need treasury backing at settle.
    const std::int64_t extra_budget = tmpl.schedule.extra_review_rate.millicoins() * n_active / Amount::kPerCoin;
    std::int64_t extras_hired = 0;

    // Reviewing.
    for (const auto& plan : papers) {
        std::int64_t approved = 0;
        bool withdrawn = false;
        auto maybe_default = [&] {
            if (plan.defaults && !withdrawn && approved >= plan.default_after) {
                conf.withdraw_on_default(plan.paper_id);
                withdrawn = true;
            }
        };
        maybe_default();
        for (std::int64_t slot = 0; slot < rho && !withdrawn; ++slot) {
            auto who = impl_->agent_index.at(conf.paper(plan.paper_id).assigned_reviewers[slot]);
            int tries = 0;
            while ((delinquent[who] || !agent_rng[who].bernoulli(profile(who).review_completion_prob)) &&
                   tries++ < kMaxReplacementTries) {
                auto replacement = hire(plan.paper_id, plan.author);
                if (!replacement) break;
                conf.replace_reviewer(plan.paper_id, agents_[who].account, agents_[*replacement].account);
                who = *replacement;
            }
            write_and_approve(who, plan.paper_id);
            ++approved;
            maybe_default();
        }
        if (plan.defaults && !withdrawn) {
            conf.withdraw_on_default(plan.paper_id);
            withdrawn = true;
        }
        const bool backed = extras_hired < extra_budget ||
                            ledger_.balance(treasury_id) >= kOneReview * (extras_hired - extra_budget + 1);
        if (plan.hard && !withdrawn && backed) {
            if (auto who = hire(plan.paper_id, plan.author)) {
                ++extras_hired;
                conf.add_extra_reviewer(plan.paper_id, agents_[*who].account);
                write_and_approve(*who, plan.paper_id);
            }
        }
    }

    // Decisions and challenges.
    conf.begin_decisions();
    for (auto p : active) conf.record_decision(papers[p].paper_id, "decided");
    const auto max_challenged = cc.max_challenge_count();
    for (auto p : active) {
        const auto& plan = papers[p];
        const auto author = plan.author;
        if (!agent_rng[author].bernoulli(tmpl.challenge_prob) || max_challenged < 1) continue;
        const auto affordable = ledger_.balance(agents_[author].account).millicoins() / Amount::kPerCoin;
        auto count = std::min<std::int64_t>(1 + static_cast<std::int64_t>(editor.below(max_challenged)), affordable);
        std::vector<std::size_t> hires;
        while (static_cast<std::int64_t>(hires.size()) < count) {
            auto who = hire(plan.paper_id, author, hires);
            if (!who) break;
            hires.push_back(*who);
        }
        count = static_cast<std::int64_t>(hires.size());
        if (count < 1 || ledger_.balance(cc.escrow()) < kOneReview * count) continue;
        std::vector<std::string> originals;
        for (const auto* r : conf.reviews_for(plan.paper_id))
            if (!r->extra) originals.push_back(r->review_id);
        editor.shuffle(originals);
        originals.resize(static_cast<std::size_t>(count));
        const auto challenge_id = conf.file_challenge(agents_[author].account, plan.paper_id, originals).challenge_id;
        for (auto who : hires) {
            conf.add_extra_reviewer(plan.paper_id, agents_[who].account, challenge_id);
            write_and_approve(who, plan.paper_id);
        }
        const bool upheld = editor.bernoulli(tmpl.challenge_uphold_prob);
        try {
            conf.resolve_challenge(challenge_id, upheld);
        } catch (const Error& e) {
            // Unfundable penalty loans: the challenge cannot be upheld.
            if (e.code() != ErrorCode::ReviewerInsolvent) throw;
            conf.resolve_challenge(challenge_id, false);
        }
    }

    // Role work is credited per settled paper.
    for (const auto& role : tmpl.schedule.roles) {
        const auto& roster = impl_->rosters[role.role_name];
        if (roster.empty() || n_active == 0) continue;
        if (role.split_ways > 1) {
            for (auto m : roster) conf.record_role_assignment(role.role_name, agents_[m].account, n_active);
        } else {
            for (std::int64_t k = 0; k < n_active; ++k)
                conf.record_role_assignment(role.role_name, agents_[roster[editor.below(roster.size())]].account);
        }
    }

    conf.begin_settlement();
    auto settlement = conf.settle();

    // Sponsors collect a share of what their members earned this cycle.
    std::vector<Amount> income(n_agents);
    const auto log = ledger_.log();
    for (std::size_t t = log_start; t < log.size(); ++t) {
        const auto& tx = log[t];
        if (tx.kind != TxKind::ReviewPayment && tx.kind != TxKind::TaxDisbursement && tx.kind != TxKind::LoanRepayment)
            continue;
        for (const auto& e : tx.entries) {
            auto it = impl_->agent_index.find(e.account);
            if (it != impl_->agent_index.end() && e.delta > Amount{}) income[it->second] += e.delta;
        }
    }
    for (std::size_t i = 0; i < n_agents; ++i) {
        const auto& sponsor = impl_->group_sponsor[agents_[i].group];
        if (!sponsor || income[i] <= Amount{}) continue;
        const Amount share(static_cast<std::int64_t>(
            std::floor(profile(i).sponsor_transfer_fraction * static_cast<double>(income[i].millicoins()))));
        const Amount amount = std::min(share, ledger_.balance(agents_[i].account));
        if (amount > Amount{})
            ledger_.transfer(TxKind::Transfer, agents_[i].account, *sponsor, amount,
                             Memo{cc.conference_id, {}, {}, "sponsor transfer"});
    }

    const auto& stats = conf.stats();
    report.papers = settlement.papers;
    report.loan_funded = stats.loan_funded;
    report.reviews_paid = stats.reviews_paid + stats.reviews_redirected;
    report.extra_reviews = stats.extra_reviews;
    report.replacement_hires = stats.replacement_hires;
    report.revisions = stats.revisions;
    report.challenges_filed = stats.challenges_filed;
    report.challenges_upheld = stats.challenges_upheld;
    report.defaults = stats.defaults;
    report.default_writeoffs = stats.default_writeoffs;
    report.role_disbursements = settlement.role_total();
    report.treasury = ledger_.balance(treasury_id);
    report.escrow = ledger_.balance(cc.escrow());
    report.loans_outstanding = loans_.receivables(treasury_id);
    const Amount position = report.treasury + report.loans_outstanding;
    report.treasury_drift = position - impl_->position;
    impl_->position = position;
    report.total_supply = ledger_.total_minted();

    Amount held;
    for (const auto& id : ledger_.accounts()) held += ledger_.balance(id);
    report.supply_conserved = held == ledger_.total_minted();

    std::vector<Amount> holdings;
    for (const auto& a : agents_) holdings.push_back(ledger_.balance(a.account));
    for (const auto& s : impl_->group_sponsor) {
        if (!s) continue;
        holdings.push_back(ledger_.balance(*s));
        report.sponsor_holdings += ledger_.balance(*s);
    }
    report.gini = compute_gini(holdings);

    settlements_.push_back(std::move(settlement));
    reports_.push_back(report);
    return reports_.back();
}

std::vector<CycleReport> run_scenario(const ScenarioConfig& config) {
    Simulation sim(config);
    return sim.run();
}

// --- metrics ------------------------------------------------------------------------------

double compute_gini(std::span<const Amount> balances) {
    if (balances.empty()) throw Error(ErrorCode::EmptyPopulation, "gini of an empty population");
    std::vector<std::int64_t> v;
    v.reserve(balances.size());
    for (auto b : balances) {
        if (b < Amount{}) throw Error(ErrorCode::ConfigInvalid, "negative holding");
        v.push_back(b.millicoins());
    }
    std::sort(v.begin(), v.end());
    // G = sum_i (2i - n - 1) x_(i) / (n * sum x), i = 1..n over sorted values,
    // accumulated exactly in integers.
    __int128 weighted = 0;
    __int128 total = 0;
    const auto n = static_cast<std::int64_t>(v.size());
    for (std::int64_t i = 0; i < n; ++i) {
        weighted += static_cast<__int128>(2 * (i + 1) - n - 1) * v[static_cast<std::size_t>(i)];
        total += v[static_cast<std::size_t>(i)];
    }
    if (total == 0) return 0.0;
    return static_cast<double>(weighted) / (static_cast<double>(n) * static_cast<double>(total));
}

SimulationReport summarize(std::span<const CycleReport> reports, std::span<const Transaction> log) {
    SimulationReport out;
    out.cycles = static_cast<std::int64_t>(reports.size());
    if (reports.empty()) return out;

    auto track = [&](const std::string& name, auto&& get) {
        MetricSummary m{get(reports.front()), get(reports.front()), 0.0};
        double sum = 0.0;
        for (const auto& r : reports) {
            const double x = get(r);
            m.min = std::min(m.min, x);
            m.max = std::max(m.max, x);
            sum += x;
        }
        m.mean = sum / static_cast<double>(reports.size());
        out.metrics[name] = m;
    };
    auto mrc = [](Amount a) { return static_cast<double>(a.millicoins()); };
    track("submissions", [](const CycleReport& r) { return static_cast<double>(r.submissions); });
    track("blocked_submissions", [](const CycleReport& r) { return static_cast<double>(r.blocked_submissions); });
    track("papers", [](const CycleReport& r) { return static_cast<double>(r.papers); });
    track("reviews_paid", [](const CycleReport& r) { return static_cast<double>(r.reviews_paid); });
    track("extra_reviews", [](const CycleReport& r) { return static_cast<double>(r.extra_reviews); });
    track("challenges_filed", [](const CycleReport& r) { return static_cast<double>(r.challenges_filed); });
    track("challenges_upheld", [](const CycleReport& r) { return static_cast<double>(r.challenges_upheld); });
    track("defaults", [](const CycleReport& r) { return static_cast<double>(r.defaults); });
    track("treasury_mrc", [&](const CycleReport& r) { return mrc(r.treasury); });
    track("treasury_drift_mrc", [&](const CycleReport& r) { return mrc(r.treasury_drift); });
    track("loans_outstanding_mrc", [&](const CycleReport& r) { return mrc(r.loans_outstanding); });
    track("supply_mrc", [&](const CycleReport& r) { return mrc(r.total_supply); });
    track("gini", [](const CycleReport& r) { return r.gini; });

    out.chain_verified = static_cast<bool>(verify_chain(log));
    bool conserved = std::all_of(reports.begin(), reports.end(), [](const CycleReport& r) { return r.supply_conserved; });
    if (out.chain_verified) {
        auto state = replay(log);
        conserved = conserved && state.balance_sum() == state.total_minted &&
                    state.total_minted == reports.back().total_supply;
    } else {
        conserved = false;
    }
    out.supply_conserved = conserved;
    return out;
}

}  // namespace reviewcoin

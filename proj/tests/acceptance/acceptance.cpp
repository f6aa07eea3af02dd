// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "reviewcoin/bootstrap.hpp"
#include "reviewcoin/conference.hpp"
#include "reviewcoin/config_io.hpp"
#include "reviewcoin/error.hpp"
#include "reviewcoin/ledger.hpp"
#include "reviewcoin/simulator.hpp"
#include "reviewcoin/tax_model.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace reviewcoin;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failure notes for one criterion.
struct Check {
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok && notes.size() < 5) notes.push_back(what);
        if (!ok && notes.size() == 5) notes.push_back("...");
    }
    bool ok() const { return notes.empty(); }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

AccountId R(int i) { return AccountId::researcher("r" + std::to_string(i)); }

// Treasury with a reserve, `people` researchers holding `each` mRC, one seat per role.
struct Desk {
    Ledger ledger;
    ConferenceConfig config;

    Desk(int people, std::int64_t each, std::int64_t tau, bool loans = false) {
        config.conference_id = "desk";
        config.rho = 3;
        config.tau = Amount(tau);
        config.tax_schedule = neurips_db_schedule();
        config.loan_policy.enabled = loans;
        config.role_rosters = {{"area_chair", {R(900)}}, {"senior_area_chair", {R(901)}},
                               {"track_chair", {R(902), R(903), R(904)}}};
        ledger.open_account(config.treasury());
        ledger.mint(config.treasury(), Amount(1'000'000));
        for (int i = 0; i < people; ++i) {
            ledger.open_account(R(i));
            if (each > 0) ledger.transfer(TxKind::Transfer, config.treasury(), R(i), Amount(each));
        }
        for (int i = 900; i <= 904; ++i) ledger.open_account(R(i));
    }

    Amount bal(const AccountId& who) const { return ledger.balance(who); }
    bool conserved() const { return ledger.state().balance_sum() == ledger.total_minted(); }
};

void review_all(Conference& c, const std::string& pid) {
    for (const auto& who : c.paper(pid).assigned_reviewers) c.approve_review(c.submit_review(who, pid).review_id);
}

// --- criteria -------------------------------------------------------------------------------

Check tax_reproduction() {
    Check k;
    const auto start = Clock::now();
    const Amount tau = compute_tau(neurips_db_schedule());
    const Amount rounded = round_tau(tau);
    const double elapsed = seconds_since(start);
    k.expect(tau == Amount(1125), "tau = " + std::to_string(tau.millicoins()));
    k.expect(rounded == Amount(1000), "rounded = " + std::to_string(rounded.millicoins()));
    k.expect(elapsed < 0.001, "took " + std::to_string(elapsed) + " s");
    return k;
}

Check outlay_reproduction() {
    Check k;
    PricingParams p;
    p.n = 2800;
    p.rho = 3;
    p.tau = Amount(1000);
    k.expect(total_outlay(p) == Amount(11'200'000), "outlay = " + std::to_string(total_outlay(p).millicoins()));
    return k;
}

Check supply_formula() {
    Check k;
    const Amount sigma = compute_sigma(2800, 3, Amount(1000));
    k.expect(sigma == Amount(22'400'000), "sigma = " + std::to_string(sigma.millicoins()));
    return k;
}

Check conservation() {
    Check k;
    const auto start = Clock::now();
    std::mt19937_64 gen(4);
    Ledger ledger;
    std::vector<AccountId> ids{AccountId::treasury("t")};
    for (int i = 1; i < 100; ++i) ids.push_back(R(i));
    for (const auto& id : ids) ledger.open_account(id);
    std::map<AccountId, std::int64_t> oracle;
    std::int64_t minted = 0;

    auto pick = [&](std::size_t lo) { return lo + gen() % (ids.size() - lo); };
    for (int t = 0; t < 10'000; ++t) {
        const auto roll = gen() % 10;
        if (roll == 0 || oracle[ids[0]] == 0) {
            const std::int64_t amount = 1 + static_cast<std::int64_t>(gen() % 50'000);
            ledger.mint(ids[0], Amount(amount));
            oracle[ids[0]] += amount;
            minted += amount;
        } else if (roll < 7) {
            const auto from = pick(0);
            auto to = pick(1);
            if (to == from) to = from == 1 ? 2 : 1;
            const std::int64_t have = oracle[ids[from]];
            if (have == 0) {
                --t;
                continue;
            }
            const std::int64_t amount = 1 + static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(have));
            ledger.transfer(TxKind::Transfer, ids[from], ids[to], Amount(amount));
            oracle[ids[from]] -= amount;
            oracle[ids[to]] += amount;
        } else {
            // One payer split across several payees.
            const auto from = pick(0);
            const std::int64_t have = oracle[ids[from]];
            if (have < 3) {
                --t;
                continue;
            }
            std::vector<Entry> entries;
            std::int64_t paid = 0;
            std::vector<std::size_t> used{from};
            for (int e = 0; e < 3; ++e) {
                std::size_t to;
                do to = pick(1);
                while (std::find(used.begin(), used.end(), to) != used.end());
                used.push_back(to);
                const std::int64_t amount = 1 + static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(have / 3));
                entries.push_back({ids[to], Amount(amount)});
                oracle[ids[to]] += amount;
                paid += amount;
            }
            entries.push_back({ids[from], Amount(-paid)});
            oracle[ids[from]] -= paid;
            ledger.append(TxKind::Transfer, std::move(entries));
        }
        std::int64_t sum = 0;
        for (const auto& [id, bal] : ledger.state().balances) sum += bal.millicoins();
        k.expect(sum == ledger.total_minted().millicoins() && sum == minted,
                 "sum mismatch after tx " + std::to_string(ledger.size()));
    }
    for (const auto& [id, bal] : oracle) k.expect(ledger.balance(id) == Amount(bal), "balance of " + id.str());
    k.expect(ledger.size() == 10'000, "log holds " + std::to_string(ledger.size()));
    k.expect(replay(ledger.log()) == ledger.state(), "replay differs from live state");
    const double elapsed = seconds_since(start);
    k.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
    return k;
}

Check tamper_detection() {
    Check k;
    std::mt19937_64 gen(5);
    Ledger ledger;
    const auto treasury = AccountId::treasury("t");
    ledger.open_account(treasury);
    for (int i = 0; i < 10; ++i) ledger.open_account(R(i));
    ledger.mint(treasury, Amount(10'000'000));
    while (ledger.size() < 500) {
        const auto to = R(static_cast<int>(gen() % 10));
        ledger.transfer(TxKind::ReviewPayment, treasury, to, Amount(1 + static_cast<std::int64_t>(gen() % 5000)),
                        Memo{"c1", "p" + std::to_string(ledger.size()), "r1", {}});
    }
    const std::vector<Transaction> clean(ledger.log().begin(), ledger.log().end());
    k.expect(static_cast<bool>(verify_chain(clean)), "clean log fails");

    // In-memory flips across every hashed field and the stored hash itself.
    int samples = 0;
    for (int s = 0; s < 300; ++s) {
        auto log = clean;
        const auto at = static_cast<std::size_t>(gen() % log.size());
        auto& tx = log[at];
        const unsigned bit = static_cast<unsigned>(gen() % 8);
        switch (gen() % 6) {
            case 0: tx.seq ^= std::uint64_t{1} << (gen() % 64); break;
            case 1: tx.kind = static_cast<TxKind>(static_cast<std::uint8_t>(tx.kind) ^ (1u << bit)); break;
            case 2: {
                auto& e = tx.entries[gen() % tx.entries.size()];
                e.delta = Amount(e.delta.millicoins() ^ (std::int64_t{1} << (gen() % 63)));
                break;
            }
            case 3:
                if (tx.memo.empty()) tx.memo = "x";
                else tx.memo[gen() % tx.memo.size()] ^= static_cast<char>(1u << bit);
                break;
            case 4: tx.prev_hash[gen() % tx.prev_hash.size()] ^= static_cast<std::uint8_t>(1u << bit); break;
            default: tx.hash[gen() % tx.hash.size()] ^= static_cast<std::uint8_t>(1u << bit); break;
        }
        const auto r = verify_chain(log);
        ++samples;
        k.expect(!r && r.failed_seq >= 1 && r.failed_seq <= at + 1,
                 "struct flip at seq " + std::to_string(at + 1) + " reported " + std::to_string(r.failed_seq));
    }

    // Flips in the serialized JSON-lines log.
    std::ostringstream out;
    write_log(out, clean);
    const std::string text = out.str();
    std::vector<std::size_t> line_start{0};
    for (std::size_t i = 0; i + 1 < text.size(); ++i)
        if (text[i] == '\n') line_start.push_back(i + 1);
    for (int s = 0; s < 300; ++s) {
        auto copy = text;
        const auto pos = static_cast<std::size_t>(gen() % copy.size());
        copy[pos] = static_cast<char>(copy[pos] ^ (1u << (gen() % 8)));
        const auto line = static_cast<std::uint64_t>(std::upper_bound(line_start.begin(), line_start.end(), pos) -
                                                     line_start.begin());
        std::istringstream in(copy);
        const auto r = verify_log_stream(in);
        ++samples;
        k.expect(!r && r.failed_seq >= 1 && r.failed_seq <= line,
                 "text flip on line " + std::to_string(line) + " reported " + std::to_string(r.failed_seq));
    }
    k.expect(samples >= 100, "only " + std::to_string(samples) + " samples");
    return k;
}

Check desk_walkthrough() {
    Check k;
    constexpr int n = 20;
    Desk d(n, 4125, 1125);
    Conference c(d.ledger, d.config);
    const auto treasury0 = d.bal(d.config.treasury());
    c.open_submissions();
    std::vector<std::string> papers;
    for (int i = 0; i < n; ++i) papers.push_back(c.submit_paper(R(i)).paper_id);
    c.close_submissions();
    for (int i = 0; i < n; ++i) c.assign_reviewers(papers[i], {R((i + 1) % n), R((i + 2) % n), R((i + 3) % n)});
    for (const auto& p : papers) review_all(c, p);
    c.begin_decisions();
    for (const auto& p : papers) c.record_decision(p, "accept");
    for (int i = 0; i < n; ++i) c.record_role_assignment("area_chair", R(900));
    c.begin_settlement();
    const auto report = c.settle();

    std::int64_t review_pay = 0;
    for (const auto& tx : d.ledger.log())
        if (tx.kind == TxKind::ReviewPayment)
            for (const auto& e : tx.entries)
                if (e.delta > Amount{}) review_pay += e.delta.millicoins();
    const auto to_treasury = d.bal(d.config.treasury()) - treasury0;
    k.expect(d.bal(d.config.escrow()) == Amount(0), "escrow = " + std::to_string(d.bal(d.config.escrow()).millicoins()));
    k.expect(review_pay == 60'000, "reviewers received " + std::to_string(review_pay));
    k.expect(report.role_total() + to_treasury == Amount(1125 * n),
             "roles + reserves = " + std::to_string((report.role_total() + to_treasury).millicoins()));
    k.expect(d.conserved(), "supply not conserved");
    return k;
}

Check challenge_accounting() {
    Check k;
    for (const bool upheld : {true, false}) {
        Desk d(8, 4000, 1000);
        Conference c(d.ledger, d.config);
        d.ledger.transfer(TxKind::Transfer, d.config.treasury(), R(0), Amount(2000));
        c.open_submissions();
        const auto pid = c.submit_paper(R(0)).paper_id;
        c.close_submissions();
        c.assign_reviewers(pid, {R(1), R(2), R(3)});
        review_all(c, pid);
        c.begin_decisions();
        c.record_decision(pid, "reject");
        std::vector<std::string> challenged;
        for (const auto* r : c.reviews_for(pid)) challenged.push_back(r->review_id);
        challenged.resize(2);

        const auto author0 = d.bal(R(0));
        const auto r1 = d.bal(R(1));
        const auto r2 = d.bal(R(2));
        const auto cid = c.file_challenge(R(0), pid, challenged).challenge_id;
        for (int e = 0; e < 2; ++e) {
            c.add_extra_reviewer(pid, R(4 + e), cid);
            c.approve_review(c.submit_review(R(4 + e), pid).review_id);
        }
        c.resolve_challenge(cid, upheld);
        const std::string tag = upheld ? "upheld: " : "denied: ";
        if (upheld) {
            k.expect(d.bal(R(0)) == author0, tag + "author net " + std::to_string((d.bal(R(0)) - author0).millicoins()));
            k.expect(d.bal(R(1)) - r1 == Amount(-1000), tag + "first reviewer");
            k.expect(d.bal(R(2)) - r2 == Amount(-1000), tag + "second reviewer");
        } else {
            k.expect(d.bal(R(0)) - author0 == Amount(-2000),
                     tag + "author net " + std::to_string((d.bal(R(0)) - author0).millicoins()));
            k.expect(d.bal(R(1)) == r1 && d.bal(R(2)) == r2, tag + "reviewers touched");
        }
        k.expect(d.conserved(), tag + "supply not conserved");
        c.begin_settlement();
        c.settle();
        k.expect(d.bal(d.config.escrow()) == Amount(0), tag + "escrow not closed");
        k.expect(d.conserved(), tag + "supply not conserved after settle");
    }
    return k;
}

Check loan_lifecycle() {
    Check k;
    Desk d(8, 5000, 1000, true);
    d.ledger.transfer(TxKind::Transfer, R(7), d.config.treasury(), d.bal(R(7)));
    Conference c(d.ledger, d.config);
    c.open_submissions();
    const auto own = c.submit_paper(R(7), true);
    const auto loan_id = *own.loan_id;
    k.expect(c.loans().at(loan_id).principal == Amount(4000), "principal");
    std::vector<std::string> others;
    for (int a = 0; a < 4; ++a) others.push_back(c.submit_paper(R(a)).paper_id);
    c.close_submissions();
    c.assign_reviewers(own.paper_id, {R(4), R(5), R(6)});
    for (int a = 0; a < 4; ++a) c.assign_reviewers(others[a], {R(7), R((a + 1) % 4), R(4 + a % 3)});
    const auto before = d.bal(R(7));
    for (int a = 0; a < 4; ++a) c.approve_review(c.submit_review(R(7), others[a]).review_id);
    k.expect(c.loans().at(loan_id).status == LoanStatus::Repaid, "loan not repaid");
    k.expect(d.bal(R(7)) == before, "borrower net " + std::to_string((d.bal(R(7)) - before).millicoins()));

    // Default after two approved reviews.
    Desk e(6, 4000, 1000, true);
    e.ledger.transfer(TxKind::Transfer, R(5), e.config.treasury(), Amount(4000));
    Conference f(e.ledger, e.config);
    f.open_submissions();
    const auto pid = f.submit_paper(R(5), true).paper_id;
    f.close_submissions();
    f.assign_reviewers(pid, {R(1), R(2), R(3)});
    std::vector<std::string> paid;
    for (int i = 1; i <= 2; ++i) {
        paid.push_back(f.submit_review(R(i), pid).review_id);
        f.approve_review(paid.back());
    }
    const auto txs = f.withdraw_on_default(pid);
    for (const auto& id : paid) k.expect(f.review(id).status == ReviewStatus::Paid, id + " not Paid");
    k.expect(!txs.empty() && txs[0].kind == TxKind::DefaultWriteOff &&
                 txs[0].delta_for(e.config.treasury()) == Amount(-2000),
             "write-off not drawn from the reserve-holding treasury");
    k.expect(f.stats().default_writeoffs == Amount(2000), "write-off total");
    k.expect(e.bal(e.config.escrow()) == Amount(0), "escrow after default");
    k.expect(e.conserved(), "supply not conserved");
    return k;
}

ScenarioConfig steady_state(bool rounded) {
    ScenarioConfig c;
    c.name = "steady";
    c.cycles = 50;
    c.rng_seed = 9;
    c.bootstrap = false;
    c.exception_mode = ExceptionMode::Modeled;
    c.treasury_reserve = Amount(3'000'000);
    c.conference.loans_enabled = true;
    c.conference.round_tau = rounded;
    c.population = {{"honest", 180, AgentProfile{}, Amount(500'000)},
                    {"borrowers", 20, AgentProfile{1.0, 1.0, 0.0, 1.0, 0.0}, Amount{}}};
    return c;
}

Check steady_state_drift() {
    Check k;
    const auto start = Clock::now();
    for (const bool rounded : {false, true}) {
        auto c = steady_state(rounded);
        k.expect(c.conference.effective_tau() == Amount(rounded ? 1000 : 1125), "tau");
        Simulation sim(c);
        sim.run();
        k.expect(sim.agents().size() == 200, "agent count");
        for (const auto& r : sim.reports()) {
            const std::string at = (rounded ? "rounded cycle " : "exact cycle ") + std::to_string(r.cycle);
            k.expect(r.supply_conserved, at + " supply");
            if (rounded)
                k.expect(r.treasury_drift == Amount(-125 * r.papers),
                         at + " drift " + std::to_string(r.treasury_drift.millicoins()) + " n=" + std::to_string(r.papers));
            else
                k.expect(r.treasury_drift.millicoins() > -1000 && r.treasury_drift.millicoins() < 1000,
                         at + " drift " + std::to_string(r.treasury_drift.millicoins()));
        }
        k.expect(sim.reports().size() == 50, "cycles run");
    }
    const double elapsed = seconds_since(start);
    k.expect(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
    return k;
}

Check bootstrap_feasibility() {
    Check k;
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ScenarioConfig c;
        c.name = "boot" + std::to_string(trial);
        c.rng_seed = gen();
        c.cycles = 1;
        const int groups = 1 + static_cast<int>(gen() % 3);
        // Whole submission rates keep cycle 1 at the historical n. Reviewers
        // who do every assignment are the ones the free conference rewards.
        for (int g = 0; g < groups; ++g) {
            AgentProfile p;
            p.review_accept_prob = 0.5 + 0.5 * u(gen);
            p.submission_rate = static_cast<double>(1 + gen() % 2);
            c.population.push_back({"g" + std::to_string(g), 10 + static_cast<std::int64_t>(gen() % 50), p, Amount{}});
        }
        Simulation sim(c);
        sim.run();
        std::int64_t free_reviewers = 0;
        for (const auto& a : sim.agents()) {
            if (a.bootstrap_free_reviews == 0) continue;
            ++free_reviewers;
            k.expect(a.blocked.at(0) == 0, c.name + " " + a.account.str() + " blocked");
        }
        k.expect(free_reviewers > 0, c.name + " had no free-conference reviewers");
    }
    return k;
}

Check determinism() {
    Check k;
    auto c = steady_state(true);
    c.cycles = 6;
    c.exception_mode = ExceptionMode::Stochastic;
    c.conference.challenge_prob = 0.3;
    c.population.push_back({"lab", 15, AgentProfile{1.4, 0.7, 0.8, 0.2, 0.4}, Amount(6000)});
    auto once = [&] {
        Simulation sim(c);
        sim.run();
        return simulation_report_json(sim, summarize(sim.reports(), sim.ledger().log()));
    };
    const auto a = once();
    const auto b = once();
    k.expect(a == b, "reports differ");
    k.expect(a.size() > 1000, "report suspiciously small");
    return k;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"Tax reproduction", tax_reproduction},
        {"Outlay reproduction", outlay_reproduction},
        {"Supply formula", supply_formula},
        {"Conservation property suite", conservation},
        {"Tamper detection", tamper_detection},
        {"Protocol walk-through at desk scale", desk_walkthrough},
        {"Challenge accounting", challenge_accounting},
        {"Loan lifecycle", loan_lifecycle},
        {"Steady-state simulation", steady_state_drift},
        {"Bootstrap feasibility", bootstrap_feasibility},
        {"Determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check k;
        try {
            k = criteria[i].second();
        } catch (const std::exception& e) {
            k.notes.push_back(std::string("threw: ") + e.what());
        }
        std::printf("%s %zu. %s", k.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first);
        for (const auto& note : k.notes) std::printf(" | %s", note.c_str());
        std::printf("\n");
        if (!k.ok()) ++failed;
    }
    return failed == 0 ? 0 : 1;
}

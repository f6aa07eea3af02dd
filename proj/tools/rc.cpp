// rc: command-line front end for the ReviewCoin library.
// Exit codes: 0 ok, 1 domain failure, 2 usage error.

#include "reviewcoin/bootstrap.hpp"
#include "reviewcoin/config_io.hpp"
#include "reviewcoin/error.hpp"
#include "reviewcoin/ledger.hpp"
#include "reviewcoin/simulator.hpp"
#include "reviewcoin/tax_model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace reviewcoin;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::NotFound, "cannot write " + path.string());
    out << text;
}

int cmd_tax(const std::string& schedule_path, std::optional<std::int64_t> rho_flag, std::optional<std::int64_t> n_flag,
            bool exact) {
    const auto file = parse_schedule(read_file(schedule_path));
    PricingParams p;
    p.rho = rho_flag.value_or(file.rho.value_or(3));
    p.n = n_flag.value_or(file.n.value_or(0));
    const Amount tau = compute_tau(file.schedule);
    const Amount rounded = round_tau(tau);
    p.tau = exact ? tau : rounded;
    std::cout << "tau=" << format_rc(tau) << " RC, rounded=" << format_rc(rounded) << " RC, cost(rho=" << p.rho
              << ")=" << format_rc(submission_cost(p)) << " RC, outlay(n=" << p.n << ")=" << format_rc(total_outlay(p))
              << " RC\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
    auto config = parse_scenario(read_file(scenario_path));
    if (const char* seed = std::getenv("RC_SEED"); seed && *seed) {
        std::size_t used = 0;
        try {
            config.rng_seed = std::stoull(seed, &used, 0);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || seed[used] != '\0') throw UsageError(std::string("RC_SEED is not an integer: ") + seed);
    }
    Simulation sim(config);
    sim.run();
    const auto summary = summarize(sim.reports(), sim.ledger().log());

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "report.json", simulation_report_json(sim, summary));
    write_text(fs::path(out_dir) / "cycles.csv", cycles_csv(sim.reports()));
    std::ostringstream log;
    write_log(log, sim.ledger().log());
    write_text(fs::path(out_dir) / "ledger.jsonl", log.str());

    const auto& last = sim.reports().back();
    std::cout << "cycles=" << summary.cycles << " transactions=" << sim.ledger().size()
              << " treasury=" << format_rc_fixed(last.treasury) << " RC supply=" << format_rc_fixed(last.total_supply)
              << " RC supply_conserved=" << (summary.supply_conserved ? "true" : "false")
              << " chain_verified=" << (summary.chain_verified ? "true" : "false") << "\n";
    return summary.supply_conserved && summary.chain_verified ? 0 : 1;
}

int cmd_ledger_verify(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
    std::size_t count = 0;
    const auto result = verify_log_stream(in, &count);
    if (!result) {
        std::cout << "FAILED at seq " << result.failed_seq << ": " << result.reason << "\n";
        return 1;
    }
    if (count == 0) std::cout << "OK: 0 transactions\n";
    else std::cout << "OK: " << count << " transactions\n";
    return 0;
}

int cmd_ledger_show(const std::string& path, const std::string& account_text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
    auto loaded = read_log(in);
    if (loaded.parse_failure) {
        std::cout << "FAILED at seq " << loaded.parse_failure->failed_seq << ": " << loaded.parse_failure->reason << "\n";
        return 1;
    }
    std::optional<AccountId> filter;
    if (!account_text.empty()) filter = AccountId::parse(account_text);

    std::map<AccountId, Amount> running;
    for (const auto& tx : loaded.transactions) {
        for (const auto& e : tx.entries) running[e.account] += e.delta;
        if (filter && std::none_of(tx.entries.begin(), tx.entries.end(), [&](const Entry& e) { return e.account == *filter; }))
            continue;
        std::cout << tx.seq << ' ' << to_string(tx.kind);
        if (!tx.memo.empty()) std::cout << " [" << tx.memo << "]";
        std::cout << "\n";
        for (const auto& e : tx.entries) {
            if (filter && e.account != *filter) continue;
            std::cout << "  " << e.account.str() << ' ' << (e.delta > Amount{} ? "+" : "") << format_rc_fixed(e.delta)
                      << " RC\n";
        }
    }
    if (filter) std::cout << "balance " << filter->str() << ' ' << format_rc_fixed(running[*filter]) << " RC\n";
    std::cout << loaded.transactions.size() << " transactions\n";
    return 0;
}

int cmd_bootstrap_plan(const std::string& history_path, std::int64_t n, std::int64_t rho, std::int64_t tau) {
    const auto history = parse_history(read_file(history_path));
    const Amount sigma = compute_sigma(n, rho, Amount(tau));
    std::cout << bootstrap_plan_json(plan_bootstrap(history, sigma));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ReviewCoin ledger, pricing, bootstrap and simulation tool", "rc"};
    app.require_subcommand(1);

    auto* tax = app.add_subcommand("tax", "Print tau, submission cost and total outlay for a schedule");
    std::string schedule_path;
    std::optional<std::int64_t> rho_flag;
    std::optional<std::int64_t> n_flag;
    bool exact = false;
    tax->add_option("--schedule", schedule_path, "Schedule JSON file")->required();
    tax->add_option("--rho", rho_flag, "Reviews per paper (default: file, else 3)");
    tax->add_option("--n", n_flag, "Submitted papers (default: file, else 0)");
    tax->add_flag("--exact", exact, "Price with the exact tau instead of the rounded one");

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write report.json, cycles.csv, ledger.jsonl");
    std::string scenario_path;
    std::string out_dir;
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();

    auto* ledger = app.add_subcommand("ledger", "Inspect a JSON-lines ledger log");
    ledger->require_subcommand(1);
    auto* verify = ledger->add_subcommand("verify", "Verify hash chain and invariants");
    std::string log_path;
    verify->add_option("file", log_path, "Ledger log")->required();
    auto* show = ledger->add_subcommand("show", "Print transactions");
    std::string show_path;
    std::string account;
    show->add_option("file", show_path, "Ledger log")->required();
    show->add_option("--account", account, "Only transactions touching this account, e.g. researcher:alice");

    auto* bootstrap = app.add_subcommand("bootstrap", "Initial coin supply");
    bootstrap->require_subcommand(1);
    auto* plan = bootstrap->add_subcommand("plan", "Plan the two-phase disbursement");
    std::string history_path;
    std::int64_t n = 0;
    std::int64_t rho = 3;
    std::int64_t tau = 0;
    plan->add_option("--history", history_path, "History JSON file")->required();
    plan->add_option("--n", n, "Papers at the historical conference")->required();
    plan->add_option("--rho", rho, "Reviews per paper")->required();
    plan->add_option("--tau", tau, "Per-paper tax in millicoins")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*tax) return cmd_tax(schedule_path, rho_flag, n_flag, exact);
        if (*simulate) return cmd_simulate(scenario_path, out_dir);
        if (*verify) return cmd_ledger_verify(log_path);
        if (*show) return cmd_ledger_show(show_path, account);
        if (*plan) return cmd_bootstrap_plan(history_path, n, rho, tau);
    } catch (const UsageError& e) {
        std::cerr << "rc: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "rc: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "rc: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

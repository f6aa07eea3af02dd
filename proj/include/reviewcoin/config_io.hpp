#pragma once

#include "reviewcoin/bootstrap.hpp"
#include "reviewcoin/conference.hpp"
#include "reviewcoin/simulator.hpp"
#include "reviewcoin/tax_model.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace reviewcoin {

// Input files are JSON. Amounts are integer millicoins in keys ending in _mrc.
// Every parser throws Error(ParseError) on malformed JSON or wrong types and
// Error(ConfigInvalid) on values that parse but make no sense.

/// A schedule file may also carry "rho" and "n" for `rc tax`.
struct ScheduleFile {
    TaxSchedule schedule;
    std::optional<std::int64_t> rho;
    std::optional<std::int64_t> n;
};

ScheduleFile parse_schedule(std::string_view text);
ScenarioConfig parse_scenario(std::string_view text);
BootstrapHistory parse_history(std::string_view text);

/// Reads a whole file; throws Error(NotFound) when it cannot be opened.
std::string read_file(const std::string& path);

std::string bootstrap_plan_json(const BootstrapPlan& plan);
std::string settlement_json(const SettlementReport& report);

/// Full simulation report: scenario echo, per-cycle rows, summary, bootstrap plan.
std::string simulation_report_json(const Simulation& sim, const SimulationReport& summary);
/// Header: cycle,submissions,blocked,reviews_paid,challenges_upheld,defaults,treasury_mRC,supply_mRC,gini
std::string cycles_csv(std::span<const CycleReport> reports);

}  // namespace reviewcoin

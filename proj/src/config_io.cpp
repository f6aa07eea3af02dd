#include "reviewcoin/config_io.hpp"

#include "reviewcoin/error.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace reviewcoin {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

// Typo guard: an unexpected key is an error, not a silent default.
void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + " must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.contains(k)) throw Error(ErrorCode::ConfigInvalid, "unknown key '" + k + "' in " + where);
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing '") + key + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ParseError, std::string("bad type for '") + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

std::int64_t get_int(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.contains(key) ? obj.at(key) : json();
    if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an integer in " + where);
    return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const char* key, std::int64_t fallback, const std::string& where) {
    return obj.contains(key) ? get_int(obj, key, where) : fallback;
}

TaxSchedule schedule_from(const json& j) {
    only_keys(j, {"roles", "extra_review_rate_mrc", "default_reserve_rate_mrc", "rho", "n"}, "schedule");
    TaxSchedule s;
    if (j.contains("roles")) {
        if (!j.at("roles").is_array()) throw Error(ErrorCode::ParseError, "schedule.roles must be an array");
        for (const auto& r : j.at("roles")) {
            only_keys(r, {"name", "rate_mrc", "split_ways"}, "role");
            s.roles.push_back(RoleRate{get<std::string>(r, "name", "role"), Amount(get_int(r, "rate_mrc", "role")),
                                       get_int_or(r, "split_ways", 1, "role")});
        }
    }
    s.extra_review_rate = Amount(get_int_or(j, "extra_review_rate_mrc", 0, "schedule"));
    s.default_reserve_rate = Amount(get_int_or(j, "default_reserve_rate_mrc", 0, "schedule"));
    s.validate();
    return s;
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be a number in " + where);
    return obj.at(key).get<double>();
}

std::vector<WorkRecord> work_from(const json& j, const char* where) {
    std::vector<WorkRecord> out;
    if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(where) + " must be an array");
    for (const auto& w : j) {
        only_keys(w, {"account", "reviews", "role_papers"}, where);
        WorkRecord rec;
        rec.account = AccountId::parse(get<std::string>(w, "account", where));
        rec.reviews = get_int_or(w, "reviews", 0, where);
        if (rec.reviews < 0) throw Error(ErrorCode::ConfigInvalid, "negative review count");
        if (w.contains("role_papers")) {
            const auto& rp = w.at("role_papers");
            if (!rp.is_object()) throw Error(ErrorCode::ParseError, "role_papers must be an object");
            for (const auto& [role, count] : rp.items()) {
                if (!count.is_number_integer() || count.get<std::int64_t>() < 0)
                    throw Error(ErrorCode::ConfigInvalid, "role_papers." + role + " must be a non-negative integer");
                rec.role_papers[role] = count.get<std::int64_t>();
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

ordered_json grants_json(const std::vector<Grant>& grants) {
    auto arr = ordered_json::array();
    for (const auto& g : grants)
        arr.push_back(ordered_json{{"account", g.account.str()}, {"amount_mrc", g.amount.millicoins()},
                                   {"amount_rc", format_rc_fixed(g.amount)}});
    return arr;
}

ordered_json plan_object(const BootstrapPlan& plan) {
    ordered_json j;
    j["sigma_mrc"] = plan.sigma.millicoins();
    j["sigma_rc"] = format_rc_fixed(plan.sigma);
    j["phase1_total_mrc"] = plan.phase1_total().millicoins();
    j["phase2_total_mrc"] = plan.phase2_total().millicoins();
    j["top_up_mrc"] = plan.top_up.millicoins();
    j["top_up_rc"] = format_rc_fixed(plan.top_up);
    j["free_conference_id"] = plan.free_conference_id;
    j["phase1_grants"] = grants_json(plan.phase1_grants);
    j["phase2_grants"] = grants_json(plan.phase2_grants);
    return j;
}

ordered_json settlement_object(const SettlementReport& r) {
    ordered_json j;
    j["conference"] = r.conference_id;
    j["papers"] = r.papers;
    auto lines = ordered_json::array();
    for (const auto& d : r.disbursements)
        lines.push_back(ordered_json{{"role", d.role}, {"recipient", d.recipient.str()},
                                     {"amount_mrc", d.amount.millicoins()}, {"amount_rc", format_rc_fixed(d.amount)}});
    j["disbursements"] = std::move(lines);
    j["role_total_mrc"] = r.role_total().millicoins();
    j["unassigned_to_treasury_mrc"] = r.unassigned_to_treasury.millicoins();
    j["shortfall_covered_by_treasury_mrc"] = r.shortfall_covered_by_treasury.millicoins();
    j["reserve_sweep_mrc"] = r.reserve_sweep.millicoins();
    j["default_writeoffs_mrc"] = r.default_writeoffs.millicoins();
    return j;
}

ordered_json schedule_object(const TaxSchedule& s) {
    auto roles = ordered_json::array();
    for (const auto& r : s.roles)
        roles.push_back(ordered_json{{"name", r.role_name}, {"rate_mrc", r.per_paper_rate.millicoins()},
                                     {"split_ways", r.split_ways}});
    return ordered_json{{"roles", roles},
                        {"extra_review_rate_mrc", s.extra_review_rate.millicoins()},
                        {"default_reserve_rate_mrc", s.default_reserve_rate.millicoins()}};
}

}  // namespace

ScheduleFile parse_schedule(std::string_view text) {
    const auto j = parse_json(text);
    ScheduleFile out;
    out.schedule = schedule_from(j);
    if (j.contains("rho")) out.rho = get_int(j, "rho", "schedule");
    if (j.contains("n")) out.n = get_int(j, "n", "schedule");
    return out;
}

ScenarioConfig parse_scenario(std::string_view text) {
    const auto j = parse_json(text);
    only_keys(j, {"name", "cycles", "rng_seed", "bootstrap", "treasury_reserve_mrc", "exception_mode", "conference",
                  "population"},
              "scenario");
    ScenarioConfig c;
    c.name = get_or<std::string>(j, "name", "sim", "scenario");
    c.cycles = get_int_or(j, "cycles", 1, "scenario");
    if (j.contains("rng_seed")) {
        if (!j.at("rng_seed").is_number_integer()) throw Error(ErrorCode::ParseError, "rng_seed must be an integer");
        c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    }
    c.bootstrap = get_or<bool>(j, "bootstrap", true, "scenario");
    c.treasury_reserve = Amount(get_int_or(j, "treasury_reserve_mrc", 0, "scenario"));
    const auto mode = get_or<std::string>(j, "exception_mode", "stochastic", "scenario");
    if (mode == "stochastic") c.exception_mode = ExceptionMode::Stochastic;
    else if (mode == "modeled") c.exception_mode = ExceptionMode::Modeled;
    else throw Error(ErrorCode::ConfigInvalid, "exception_mode must be 'stochastic' or 'modeled'");

    if (j.contains("conference")) {
        const auto& cj = j.at("conference");
        only_keys(cj, {"rho", "schedule", "tau_mrc", "round_tau", "loans_enabled", "strict_default_reserve",
                       "roster_sizes", "challenge_prob", "challenge_uphold_prob"},
                  "conference");
        auto& t = c.conference;
        t.rho = get_int_or(cj, "rho", 3, "conference");
        if (cj.contains("schedule")) t.schedule = schedule_from(cj.at("schedule"));
        if (cj.contains("tau_mrc")) t.tau = Amount(get_int(cj, "tau_mrc", "conference"));
        t.round_tau = get_or<bool>(cj, "round_tau", false, "conference");
        t.loans_enabled = get_or<bool>(cj, "loans_enabled", false, "conference");
        t.strict_default_reserve = get_or<bool>(cj, "strict_default_reserve", false, "conference");
        if (cj.contains("roster_sizes")) {
            const auto& rs = cj.at("roster_sizes");
            if (!rs.is_object()) throw Error(ErrorCode::ParseError, "roster_sizes must be an object");
            for (const auto& [role, size] : rs.items()) {
                if (!size.is_number_integer()) throw Error(ErrorCode::ParseError, "roster size must be an integer");
                t.roster_sizes[role] = size.get<std::int64_t>();
            }
        }
        t.challenge_prob = number(cj, "challenge_prob", 0.0, "conference");
        t.challenge_uphold_prob = number(cj, "challenge_uphold_prob", 0.5, "conference");
    }

    if (!j.contains("population") || !j.at("population").is_array())
        throw Error(ErrorCode::ParseError, "scenario needs a population array");
    for (const auto& gj : j.at("population")) {
        only_keys(gj, {"name", "count", "initial_balance_mrc", "profile"}, "population group");
        PopulationGroup g;
        g.name = get_or<std::string>(gj, "name", "", "population group");
        g.count = get_int(gj, "count", "population group");
        g.initial_balance = Amount(get_int_or(gj, "initial_balance_mrc", 0, "population group"));
        if (gj.contains("profile")) {
            const auto& pj = gj.at("profile");
            only_keys(pj, {"submission_rate", "review_accept_prob", "review_completion_prob", "default_prob",
                           "sponsor_transfer_fraction"},
                      "profile");
            g.profile.submission_rate = number(pj, "submission_rate", 1.0, "profile");
            g.profile.review_accept_prob = number(pj, "review_accept_prob", 1.0, "profile");
            g.profile.review_completion_prob = number(pj, "review_completion_prob", 1.0, "profile");
            g.profile.default_prob = number(pj, "default_prob", 0.0, "profile");
            g.profile.sponsor_transfer_fraction = number(pj, "sponsor_transfer_fraction", 0.0, "profile");
        }
        c.population.push_back(std::move(g));
    }
    c.validate();
    return c;
}

BootstrapHistory parse_history(std::string_view text) {
    const auto j = parse_json(text);
    only_keys(j, {"schedule", "recent", "free_conference", "free_conference_id"}, "history");
    BootstrapHistory h;
    h.schedule = j.contains("schedule") ? schedule_from(j.at("schedule")) : neurips_db_schedule();
    if (j.contains("recent")) h.recent = work_from(j.at("recent"), "recent");
    if (j.contains("free_conference")) h.free_conference = work_from(j.at("free_conference"), "free_conference");
    h.free_conference_id = get_or<std::string>(j, "free_conference_id", "free", "history");
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string bootstrap_plan_json(const BootstrapPlan& plan) { return plan_object(plan).dump(2) + "\n"; }

std::string settlement_json(const SettlementReport& report) { return settlement_object(report).dump(2) + "\n"; }

std::string simulation_report_json(const Simulation& sim, const SimulationReport& summary) {
    const auto& cfg = sim.config();
    ordered_json j;
    j["scenario"] = cfg.name;
    j["rng_seed"] = cfg.rng_seed;
    j["agents"] = cfg.agent_count();
    j["rho"] = cfg.conference.rho;
    j["tau_mrc"] = cfg.conference.effective_tau().millicoins();
    j["exception_mode"] = cfg.exception_mode == ExceptionMode::Modeled ? "modeled" : "stochastic";
    j["schedule"] = schedule_object(cfg.conference.schedule);

    auto cycles = ordered_json::array();
    for (const auto& r : sim.reports()) {
        ordered_json c;
        c["cycle"] = r.cycle;
        c["submissions"] = r.submissions;
        c["blocked_submissions"] = r.blocked_submissions;
        c["papers"] = r.papers;
        c["loan_funded"] = r.loan_funded;
        c["reviews_paid"] = r.reviews_paid;
        c["extra_reviews"] = r.extra_reviews;
        c["replacement_hires"] = r.replacement_hires;
        c["revisions"] = r.revisions;
        c["challenges_filed"] = r.challenges_filed;
        c["challenges_upheld"] = r.challenges_upheld;
        c["defaults"] = r.defaults;
        c["default_writeoffs_mrc"] = r.default_writeoffs.millicoins();
        c["role_disbursements_mrc"] = r.role_disbursements.millicoins();
        c["treasury_mrc"] = r.treasury.millicoins();
        c["treasury_rc"] = format_rc_fixed(r.treasury);
        c["escrow_mrc"] = r.escrow.millicoins();
        c["loans_outstanding_mrc"] = r.loans_outstanding.millicoins();
        c["treasury_drift_mrc"] = r.treasury_drift.millicoins();
        c["total_supply_mrc"] = r.total_supply.millicoins();
        c["sponsor_holdings_mrc"] = r.sponsor_holdings.millicoins();
        c["supply_conserved"] = r.supply_conserved;
        c["gini"] = r.gini;
        cycles.push_back(std::move(c));
    }
    j["cycles"] = std::move(cycles);

    ordered_json s;
    for (const auto& [name, m] : summary.metrics) s[name] = ordered_json{{"min", m.min}, {"max", m.max}, {"mean", m.mean}};
    j["summary"] = ordered_json{{"cycles", summary.cycles},
                                {"supply_conserved", summary.supply_conserved},
                                {"chain_verified", summary.chain_verified},
                                {"metrics", std::move(s)}};

    auto settlements = ordered_json::array();
    for (const auto& r : sim.settlements()) settlements.push_back(settlement_object(r));
    j["settlements"] = std::move(settlements);
    j["bootstrap"] = sim.bootstrap_plan() ? plan_object(*sim.bootstrap_plan()) : ordered_json(nullptr);
    return j.dump(2) + "\n";
}

std::string cycles_csv(std::span<const CycleReport> reports) {
    std::ostringstream out;
    out << "cycle,submissions,blocked,reviews_paid,challenges_upheld,defaults,treasury_mRC,supply_mRC,gini\n";
    for (const auto& r : reports) {
        char gini[32];
        std::snprintf(gini, sizeof gini, "%.6f", r.gini);
        out << r.cycle << ',' << r.submissions << ',' << r.blocked_submissions << ',' << r.reviews_paid << ','
            << r.challenges_upheld << ',' << r.defaults << ',' << r.treasury.millicoins() << ','
            << r.total_supply.millicoins() << ',' << gini << '\n';
    }
    return out.str();
}

}  // namespace reviewcoin

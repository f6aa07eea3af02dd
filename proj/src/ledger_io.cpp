#include "reviewcoin/error.hpp"
#include "reviewcoin/ledger.hpp"

#include <json.hpp>

#include <istream>
#include <limits>
#include <ostream>

namespace reviewcoin {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::int64_t as_int64(const ordered_json& j, const char* field) {
    if (j.is_number_integer() && !j.is_number_unsigned()) return j.get<std::int64_t>();
    if (j.is_number_unsigned()) {
        auto v = j.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            parse_fail(std::string(field) + " out of range");
        return static_cast<std::int64_t>(v);
    }
    parse_fail(std::string(field) + " must be an integer");
}

}  // namespace

std::string to_json_line(const Transaction& tx) {
    ordered_json j;
    j["seq"] = tx.seq;
    j["kind"] = std::string(to_string(tx.kind));
    auto entries = ordered_json::array();
    for (const auto& e : tx.entries) {
        ordered_json entry;
        entry["account"] = e.account.str();
        entry["delta"] = e.delta.millicoins();
        entries.push_back(std::move(entry));
    }
    j["entries"] = std::move(entries);
    j["memo"] = tx.memo;
    j["prev_hash"] = to_hex(tx.prev_hash);
    j["hash"] = to_hex(tx.hash);
    return j.dump();
}

Transaction from_json_line(std::string_view line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        parse_fail(e.what());
    }
    if (!j.is_object() || j.size() != 6) parse_fail("expected an object with 6 fields");

    Transaction tx;
    try {
        const auto& seq = j.at("seq");
        if (!seq.is_number_unsigned()) parse_fail("seq must be a non-negative integer");
        tx.seq = seq.get<std::uint64_t>();

        auto kind = parse_tx_kind(j.at("kind").get<std::string>());
        if (!kind) parse_fail("unknown kind");
        tx.kind = *kind;

        const auto& entries = j.at("entries");
        if (!entries.is_array()) parse_fail("entries must be an array");
        for (const auto& e : entries) {
            if (!e.is_object() || e.size() != 2) parse_fail("entry must have account and delta");
            tx.entries.push_back(
                {AccountId::parse(e.at("account").get<std::string>()), Amount(as_int64(e.at("delta"), "delta"))});
        }

        tx.memo = j.at("memo").get<std::string>();

        auto prev = digest_from_hex(j.at("prev_hash").get<std::string>());
        auto hash = digest_from_hex(j.at("hash").get<std::string>());
        if (!prev || !hash) parse_fail("digests must be 64 lowercase hex characters");
        tx.prev_hash = *prev;
        tx.hash = *hash;
    } catch (const nlohmann::json::exception& e) {
        parse_fail(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        parse_fail(e.what());
    }

    // Only the canonical rendering is accepted, so two different byte strings
    // can never decode to the same transaction.
    if (to_json_line(tx) != line) parse_fail("line is not in canonical form");
    return tx;
}

void write_log(std::ostream& os, std::span<const Transaction> log) {
    for (const auto& tx : log) os << to_json_line(tx) << '\n';
}

LoadedLog read_log(std::istream& is) {
    LoadedLog out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() && is.peek() == std::char_traits<char>::eof()) break;
        try {
            out.transactions.push_back(from_json_line(line));
        } catch (const Error& e) {
            std::uint64_t seq = out.transactions.empty() ? 1 : out.transactions.back().seq + 1;
            out.parse_failure = VerifyResult{false, seq, e.what()};
            break;
        }
    }
    return out;
}

VerifyResult verify_log_stream(std::istream& is, std::size_t* count) {
    auto loaded = read_log(is);
    if (count) *count = loaded.transactions.size();
    auto result = verify_chain(loaded.transactions);
    if (!result) return result;
    if (loaded.parse_failure) return *loaded.parse_failure;
    return result;
}

}  // namespace reviewcoin

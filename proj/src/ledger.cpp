#include "reviewcoin/ledger.hpp"

#include "reviewcoin/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <ostream>
#include <set>

namespace reviewcoin {

namespace {

constexpr std::string_view kRolePrefixes[] = {"researcher", "treasury", "escrow", "sponsor"};

constexpr std::string_view kKindNames[kTxKindCount] = {
    "Mint",           "Transfer",        "SubmissionCharge", "ReviewPayment",
    "TaxDisbursement", "ChallengeStake", "ChallengeRefund",  "ChallengePenalty",
    "LoanIssue",      "LoanRepayment",   "DefaultWriteOff",
};

bool checked_add(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return !__builtin_add_overflow(a, b, &out);
}

struct RuleViolation {
    ErrorCode code;
    std::string reason;
};

/// Shared by live appends and log verification. `current` returns the balance
/// before this transaction for an account.
template <typename BalanceFn>
std::optional<RuleViolation> check_rules(TxKind kind, const std::vector<Entry>& entries,
                                         BalanceFn&& current) {
    if (entries.empty()) return RuleViolation{ErrorCode::InvalidEntries, "no entries"};
    if (static_cast<int>(kind) >= kTxKindCount)
        return RuleViolation{ErrorCode::InvalidEntries, "unknown kind"};

    std::set<AccountId> seen;
    std::int64_t sum = 0;
    for (const auto& e : entries) {
        if (!seen.insert(e.account).second)
            return RuleViolation{ErrorCode::InvalidEntries, "duplicate account " + e.account.str()};
        if (!checked_add(sum, e.delta.millicoins(), sum))
            return RuleViolation{ErrorCode::NonZeroSum, "delta sum overflows"};
    }

    if (kind == TxKind::Mint) {
        for (const auto& e : entries) {
            if (e.account.role() != AccountRole::ConferenceTreasury)
                return RuleViolation{ErrorCode::MintToNonTreasury, "mint credits " + e.account.str()};
            if (e.delta.millicoins() <= 0)
                return RuleViolation{ErrorCode::MintToNonTreasury, "mint entry must be positive"};
        }
    } else if (sum != 0) {
        return RuleViolation{ErrorCode::NonZeroSum,
                             "entries sum to " + std::to_string(sum) + " mRC"};
    }

    for (const auto& e : entries) {
        std::int64_t after = 0;
        if (!checked_add(current(e.account).millicoins(), e.delta.millicoins(), after))
            return RuleViolation{ErrorCode::InsufficientFunds, "balance overflow on " + e.account.str()};
        if (after < 0)
            return RuleViolation{ErrorCode::InsufficientFunds,
                                 e.account.str() + " would hold " + std::to_string(after) + " mRC"};
    }
    return std::nullopt;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_bytes(std::vector<std::uint8_t>& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::string escape_memo_value(std::string_view v) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (char c : v) {
        if (c == '%' || c == ';' || c == '=') {
            out += '%';
            out += kHex[(static_cast<unsigned char>(c) >> 4) & 0xF];
            out += kHex[static_cast<unsigned char>(c) & 0xF];
        } else {
            out += c;
        }
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string unescape_memo_value(std::string_view v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == '%' && i + 2 < v.size()) {
            int hi = hex_value(v[i + 1]);
            int lo = hex_value(v[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
                continue;
            }
        }
        out += v[i];
    }
    return out;
}

}  // namespace

// --- accounts -------------------------------------------------------------

std::string_view to_string(AccountRole role) {
    switch (role) {
        case AccountRole::Researcher: return "researcher";
        case AccountRole::ConferenceTreasury: return "conference-treasury";
        case AccountRole::ConferenceEscrow: return "conference-escrow";
        case AccountRole::Sponsor: return "sponsor";
    }
    return "unknown";
}

AccountId::AccountId(AccountRole role, std::string name) : role_(role), name_(std::move(name)) {
    if (name_.empty()) throw Error(ErrorCode::InvalidAccount, "empty account name");
}

AccountId AccountId::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw Error(ErrorCode::InvalidAccount, "missing role prefix in '" + std::string(text) + "'");
    auto prefix = text.substr(0, colon);
    for (std::size_t i = 0; i < std::size(kRolePrefixes); ++i) {
        if (prefix == kRolePrefixes[i])
            return AccountId(static_cast<AccountRole>(i), std::string(text.substr(colon + 1)));
    }
    throw Error(ErrorCode::InvalidAccount, "unknown role prefix '" + std::string(prefix) + "'");
}

std::string AccountId::str() const {
    return std::string(kRolePrefixes[static_cast<int>(role_)]) + ":" + name_;
}

std::ostream& operator<<(std::ostream& os, const AccountId& id) { return os << id.str(); }

// --- kinds, memo, digests ---------------------------------------------------

std::string_view to_string(TxKind kind) {
    auto i = static_cast<int>(kind);
    return i < kTxKindCount ? kKindNames[i] : "Unknown";
}

std::optional<TxKind> parse_tx_kind(std::string_view text) {
    for (int i = 0; i < kTxKindCount; ++i)
        if (kKindNames[i] == text) return static_cast<TxKind>(i);
    return std::nullopt;
}

std::string Memo::encode() const {
    std::string out;
    auto add = [&](std::string_view key, const std::string& value) {
        if (value.empty()) return;
        if (!out.empty()) out += ';';
        out += key;
        out += '=';
        out += escape_memo_value(value);
    };
    add("conf", conference);
    add("paper", paper);
    add("review", review);
    add("note", note);
    return out;
}

Memo Memo::parse(std::string_view encoded) {
    Memo memo;
    while (!encoded.empty()) {
        auto end = encoded.find(';');
        auto field = encoded.substr(0, end);
        encoded = end == std::string_view::npos ? std::string_view{} : encoded.substr(end + 1);
        auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        auto key = field.substr(0, eq);
        auto value = unescape_memo_value(field.substr(eq + 1));
        if (key == "conf") memo.conference = value;
        else if (key == "paper") memo.paper = value;
        else if (key == "review") memo.review = value;
        else if (key == "note") memo.note = value;
    }
    return memo;
}

std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : d) {
        out += kHex[b >> 4];
        out += kHex[b & 0xF];
    }
    return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
    if (hex.size() != 64) return std::nullopt;
    Digest d{};
    for (std::size_t i = 0; i < 32; ++i) {
        // Lowercase only: the persisted form is canonical.
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            return -1;
        };
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        d[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return d;
}

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw std::runtime_error("EVP_Digest(sha256) failed");
    return out;
}

// --- transactions -----------------------------------------------------------

Amount Transaction::delta_sum() const {
    Amount sum;
    for (const auto& e : entries) sum += e.delta;
    return sum;
}

Amount Transaction::delta_for(const AccountId& account) const {
    for (const auto& e : entries)
        if (e.account == account) return e.delta;
    return Amount{};
}

std::vector<std::uint8_t> canonical_bytes(const Transaction& tx) {
    std::vector<std::uint8_t> out;
    out.reserve(64 + tx.memo.size() + tx.entries.size() * 40);
    put_u64(out, tx.seq);
    out.push_back(static_cast<std::uint8_t>(tx.kind));
    put_u32(out, static_cast<std::uint32_t>(tx.entries.size()));
    for (const auto& e : tx.entries) {
        put_bytes(out, e.account.str());
        put_u64(out, static_cast<std::uint64_t>(e.delta.millicoins()));
    }
    put_bytes(out, tx.memo);
    out.insert(out.end(), tx.prev_hash.begin(), tx.prev_hash.end());
    return out;
}

Digest compute_hash(const Transaction& tx) { return sha256(canonical_bytes(tx)); }

Amount LedgerState::balance_sum() const {
    Amount sum;
    for (const auto& [_, b] : balances) sum += b;
    return sum;
}

// --- verification -------------------------------------------------------------

VerifyResult verify_chain(std::span<const Transaction> log) {
    std::map<AccountId, Amount> balances;
    Digest prev = kZeroDigest;
    std::uint64_t expected_seq = 1;
    auto fail = [](std::uint64_t seq, std::string reason) {
        return VerifyResult{false, seq, std::move(reason)};
    };

    for (const auto& tx : log) {
        // A broken link after a gap is blamed on the later transaction.
        if (tx.prev_hash != prev)
            return fail(std::max(tx.seq, expected_seq), "prev_hash does not match previous hash");
        if (tx.seq != expected_seq)
            return fail(expected_seq, "expected seq " + std::to_string(expected_seq) + ", found " +
                                          std::to_string(tx.seq));
        if (compute_hash(tx) != tx.hash) return fail(tx.seq, "hash does not match contents");
        auto violation = check_rules(tx.kind, tx.entries, [&](const AccountId& id) {
            auto it = balances.find(id);
            return it == balances.end() ? Amount{} : it->second;
        });
        if (violation) return fail(tx.seq, violation->reason);
        for (const auto& e : tx.entries) balances[e.account] += e.delta;
        prev = tx.hash;
        ++expected_seq;
    }
    return {};
}

LedgerState replay(std::span<const Transaction> log) {
    if (auto result = verify_chain(log); !result)
        throw Error(ErrorCode::InvalidLog,
                    "seq " + std::to_string(result.failed_seq) + ": " + result.reason);
    LedgerState state;
    for (const auto& tx : log) {
        for (const auto& e : tx.entries) {
            state.balances[e.account] += e.delta;
            if (tx.kind == TxKind::Mint) state.total_minted += e.delta;
        }
        state.head_hash = tx.hash;
        state.last_seq = tx.seq;
    }
    return state;
}

// --- ledger -------------------------------------------------------------------

void Ledger::open_account(const AccountId& id) {
    if (!balances_.emplace(id, Amount{}).second)
        throw Error(ErrorCode::DuplicateAccount, id.str());
}

void Ledger::ensure_account(const AccountId& id) { balances_.emplace(id, Amount{}); }

bool Ledger::has_account(const AccountId& id) const { return balances_.contains(id); }

void Ledger::check_request(const TxRequest& request) const {
    for (const auto& e : request.entries)
        if (!balances_.contains(e.account)) throw Error(ErrorCode::UnknownAccount, e.account.str());
    auto violation = check_rules(request.kind, request.entries,
                                 [&](const AccountId& id) { return balances_.at(id); });
    if (violation) throw Error(violation->code, violation->reason);
}

Transaction Ledger::append(TxRequest request) {
    check_request(request);

    Transaction tx;
    tx.seq = log_.size() + 1;
    tx.kind = request.kind;
    tx.entries = std::move(request.entries);
    tx.memo = request.memo.encode();
    tx.prev_hash = head_hash_;
    tx.hash = compute_hash(tx);

    for (const auto& e : tx.entries) {
        balances_[e.account] += e.delta;
        touched_[e.account] += e.delta;
        if (tx.kind == TxKind::Mint) total_minted_ += e.delta;
    }
    head_hash_ = tx.hash;
    log_.push_back(tx);
    return tx;
}

Transaction Ledger::append(TxKind kind, std::vector<Entry> entries, Memo memo) {
    return append(TxRequest{kind, std::move(entries), std::move(memo)});
}

Transaction Ledger::transfer(TxKind kind, const AccountId& from, const AccountId& to, Amount amount,
                             Memo memo) {
    return append(kind, {{from, -amount}, {to, amount}}, std::move(memo));
}

Transaction Ledger::mint(const AccountId& treasury, Amount amount, Memo memo) {
    return append(TxKind::Mint, {{treasury, amount}}, std::move(memo));
}

Amount Ledger::balance(const AccountId& id) const {
    auto it = balances_.find(id);
    if (it == balances_.end()) throw Error(ErrorCode::UnknownAccount, id.str());
    return it->second;
}

std::vector<AccountId> Ledger::accounts() const {
    std::vector<AccountId> out;
    out.reserve(balances_.size());
    for (const auto& [id, _] : balances_) out.push_back(id);
    return out;
}

LedgerState Ledger::state() const {
    LedgerState s;
    s.balances = touched_;
    s.head_hash = head_hash_;
    s.total_minted = total_minted_;
    s.last_seq = log_.size();
    return s;
}

}  // namespace reviewcoin

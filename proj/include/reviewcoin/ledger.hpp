#pragma once

#include "reviewcoin/amount.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reviewcoin {

enum class AccountRole : std::uint8_t {
    Researcher,
    ConferenceTreasury,
    ConferenceEscrow,
    Sponsor,
};

std::string_view to_string(AccountRole role);

/// Account identity. The role is part of the identity: the textual form is
/// "<role-prefix>:<name>" (researcher:, treasury:, escrow:, sponsor:), so the
/// role is covered by the transaction hash and can never change.
class AccountId {
public:
    AccountId() = default;
    AccountId(AccountRole role, std::string name);

    static AccountId researcher(std::string name) { return {AccountRole::Researcher, std::move(name)}; }
    static AccountId treasury(std::string name) { return {AccountRole::ConferenceTreasury, std::move(name)}; }
    static AccountId escrow(std::string name) { return {AccountRole::ConferenceEscrow, std::move(name)}; }
    static AccountId sponsor(std::string name) { return {AccountRole::Sponsor, std::move(name)}; }

    /// Throws Error(InvalidAccount) on an unknown prefix or empty name.
    static AccountId parse(std::string_view text);

    AccountRole role() const { return role_; }
    const std::string& name() const { return name_; }
    std::string str() const;

    friend bool operator==(const AccountId&, const AccountId&) = default;
    friend auto operator<=>(const AccountId& a, const AccountId& b) {
        if (auto c = a.role_ <=> b.role_; c != 0) return c;
        return a.name_ <=> b.name_;
    }

private:
    AccountRole role_ = AccountRole::Researcher;
    std::string name_;
};

std::ostream& operator<<(std::ostream& os, const AccountId& id);

enum class TxKind : std::uint8_t {
    Mint = 0,
    Transfer = 1,
    SubmissionCharge = 2,
    ReviewPayment = 3,
    TaxDisbursement = 4,
    ChallengeStake = 5,
    ChallengeRefund = 6,
    ChallengePenalty = 7,
    LoanIssue = 8,
    LoanRepayment = 9,
    DefaultWriteOff = 10,
};

inline constexpr int kTxKindCount = 11;

std::string_view to_string(TxKind kind);
std::optional<TxKind> parse_tx_kind(std::string_view text);

struct Entry {
    AccountId account;
    Amount delta;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// References carried by a transaction. Encoded as "key=value" pairs joined by
/// ';' in fixed key order; '%', ';' and '=' inside values are percent-escaped.
struct Memo {
    std::string conference;
    std::string paper;
    std::string review;
    std::string note;

    std::string encode() const;
    static Memo parse(std::string_view encoded);

    friend bool operator==(const Memo&, const Memo&) = default;
};

using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

std::string to_hex(const Digest& d);
std::optional<Digest> digest_from_hex(std::string_view hex);
Digest sha256(std::span<const std::uint8_t> bytes);

struct Transaction {
    std::uint64_t seq = 0;
    TxKind kind = TxKind::Transfer;
    std::vector<Entry> entries;
    std::string memo;  // encoded Memo
    Digest prev_hash{};
    Digest hash{};

    Memo parsed_memo() const { return Memo::parse(memo); }
    Amount delta_sum() const;
    /// Delta for `account`, or zero when it does not appear.
    Amount delta_for(const AccountId& account) const;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// seq(u64) | kind(u8) | count(u32) | (len(u32) id delta(i64))* | len(u32) memo | prev_hash.
/// All integers big-endian.
std::vector<std::uint8_t> canonical_bytes(const Transaction& tx);
Digest compute_hash(const Transaction& tx);

struct LedgerState {
    std::map<AccountId, Amount> balances;
    Digest head_hash = kZeroDigest;
    Amount total_minted;
    std::uint64_t last_seq = 0;

    Amount balance_sum() const;
    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

struct VerifyResult {
    bool ok = true;
    std::uint64_t failed_seq = 0;  // meaningful only when !ok
    std::string reason;

    explicit operator bool() const { return ok; }
};

/// Checks hash linkage, gapless seq starting at 1, per-kind invariants and
/// non-negative running balances. Reports the first offending seq.
VerifyResult verify_chain(std::span<const Transaction> log);

/// Rebuilds the state from a log. Throws Error(InvalidLog) if the log does not verify.
LedgerState replay(std::span<const Transaction> log);

struct TxRequest {
    TxKind kind = TxKind::Transfer;
    std::vector<Entry> entries;
    Memo memo;
};

/// Single-writer append-only ledger. Accounts must be opened before use.
class Ledger {
public:
    Ledger() = default;

    /// Throws Error(DuplicateAccount) if already open.
    void open_account(const AccountId& id);
    /// Opens the account unless it already exists.
    void ensure_account(const AccountId& id);
    bool has_account(const AccountId& id) const;

    Transaction append(TxRequest request);
    Transaction append(TxKind kind, std::vector<Entry> entries, Memo memo = {});

    /// Convenience two-entry transfer of `amount` from one account to another.
    Transaction transfer(TxKind kind, const AccountId& from, const AccountId& to, Amount amount,
                         Memo memo = {});
    Transaction mint(const AccountId& treasury, Amount amount, Memo memo = {});

    Amount balance(const AccountId& id) const;
    Amount total_minted() const { return total_minted_; }
    const Digest& head_hash() const { return head_hash_; }
    std::span<const Transaction> log() const { return log_; }
    std::size_t size() const { return log_.size(); }
    std::vector<AccountId> accounts() const;

    /// Balances of every account that appears in at least one transaction.
    LedgerState state() const;

private:
    void check_request(const TxRequest& request) const;

    std::map<AccountId, Amount> balances_;
    std::map<AccountId, Amount> touched_;  // accounts named by some entry, as replay sees them
    std::vector<Transaction> log_;
    Digest head_hash_ = kZeroDigest;
    Amount total_minted_;
};

// Persistence: one JSON object per line, keys in the order
// seq, kind, entries, memo, prev_hash, hash.
std::string to_json_line(const Transaction& tx);
/// Throws Error(ParseError) on malformed input.
Transaction from_json_line(std::string_view line);

void write_log(std::ostream& os, std::span<const Transaction> log);

struct LoadedLog {
    std::vector<Transaction> transactions;
    /// Set when a line failed to parse; parsing stops there.
    std::optional<VerifyResult> parse_failure;
};

/// Reads a JSON-lines log. A malformed line is reported at the seq it would
/// have carried (previous seq + 1) instead of throwing.
LoadedLog read_log(std::istream& is);

/// read_log + verify_chain.
VerifyResult verify_log_stream(std::istream& is, std::size_t* count = nullptr);

}  // namespace reviewcoin

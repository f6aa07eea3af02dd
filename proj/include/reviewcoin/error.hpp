#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reviewcoin {

enum class ErrorCode {
    UnknownAccount,
    DuplicateAccount,
    InvalidAccount,
    InvalidEntries,
    NonZeroSum,
    InsufficientFunds,
    MintToNonTreasury,
    InvalidLog,
    WrongPhase,
    LoansDisabled,
    ConflictOfInterest,
    WrongCount,
    NotAssigned,
    AlreadyApproved,
    WrongStatus,
    EscrowShort,
    TooManyChallenged,
    ReviewerInsolvent,
    NotLoanFunded,
    UnresolvedReviews,
    EscrowMismatch,
    EmptyHistory,
    ConfigInvalid,
    EmptyPopulation,
    NotFound,
    ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace reviewcoin

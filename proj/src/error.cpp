#include "reviewcoin/error.hpp"

namespace reviewcoin {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownAccount: return "UnknownAccount";
        case ErrorCode::DuplicateAccount: return "DuplicateAccount";
        case ErrorCode::InvalidAccount: return "InvalidAccount";
        case ErrorCode::InvalidEntries: return "InvalidEntries";
        case ErrorCode::NonZeroSum: return "NonZeroSum";
        case ErrorCode::InsufficientFunds: return "InsufficientFunds";
        case ErrorCode::MintToNonTreasury: return "MintToNonTreasury";
        case ErrorCode::InvalidLog: return "InvalidLog";
        case ErrorCode::WrongPhase: return "WrongPhase";
        case ErrorCode::LoansDisabled: return "LoansDisabled";
        case ErrorCode::ConflictOfInterest: return "ConflictOfInterest";
        case ErrorCode::WrongCount: return "WrongCount";
        case ErrorCode::NotAssigned: return "NotAssigned";
        case ErrorCode::AlreadyApproved: return "AlreadyApproved";
        case ErrorCode::WrongStatus: return "WrongStatus";
        case ErrorCode::EscrowShort: return "EscrowShort";
        case ErrorCode::TooManyChallenged: return "TooManyChallenged";
        case ErrorCode::ReviewerInsolvent: return "ReviewerInsolvent";
        case ErrorCode::NotLoanFunded: return "NotLoanFunded";
        case ErrorCode::UnresolvedReviews: return "UnresolvedReviews";
        case ErrorCode::EscrowMismatch: return "EscrowMismatch";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::EmptyPopulation: return "EmptyPopulation";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace reviewcoin

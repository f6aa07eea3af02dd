#pragma once

#include "reviewcoin/amount.hpp"
#include "reviewcoin/ledger.hpp"
#include "reviewcoin/tax_model.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace reviewcoin {

enum class ConferencePhase {
    Announced,
    SubmissionsOpen,
    ReviewInProgress,
    DecisionAndChallenge,
    Settlement,
    Closed,
};

enum class PaperStatus { Submitted, UnderReview, Decided, Challenged, Withdrawn };
enum class ReviewStatus { PendingApproval, RevisionRequested, Approved, Paid };
enum class ChallengeOutcome { Pending, Upheld, Denied };
enum class LoanStatus { Open, Repaid, Defaulted };
enum class LoanPurpose { Submission, ChallengePenalty };

std::string_view to_string(ConferencePhase phase);
std::string_view to_string(PaperStatus status);
std::string_view to_string(ReviewStatus status);
std::string_view to_string(ChallengeOutcome outcome);
std::string_view to_string(LoanStatus status);

struct LoanPolicy {
    bool enabled = false;
};

struct ConferenceConfig {
    std::string conference_id;
    /// Conferences in one series may share a treasury; defaults to conference_id.
    std::string treasury_id;
    std::int64_t rho = 3;
    Amount tau;
    TaxSchedule tax_schedule;
    LoanPolicy loan_policy;
    /// When set, settle() refuses to close if default write-offs exceed the
    /// default-reserve component collected for the cycle.
    bool strict_default_reserve = true;
    std::map<std::string, std::vector<AccountId>> role_rosters;

    /// min(rho - 1, floor(rho / 2) + 1): never every review.
    std::int64_t max_challenge_count() const;
    Amount submission_cost() const;
    AccountId treasury() const;
    AccountId escrow() const;

    /// Throws Error(ConfigInvalid).
    void validate() const;
};

struct Paper {
    std::string paper_id;
    AccountId corresponding_author;
    PaperStatus status = PaperStatus::Submitted;
    std::vector<AccountId> assigned_reviewers;
    std::vector<AccountId> extra_reviewers;
    bool funded_by_loan = false;
    std::optional<std::string> loan_id;
    Amount charge;
    std::string decision;
};

struct Review {
    std::string review_id;
    std::string paper_id;
    AccountId reviewer;
    ReviewStatus status = ReviewStatus::PendingApproval;
    std::int64_t revision_count = 0;
    bool extra = false;
    std::optional<std::string> challenge_id;
    /// Seq of the transaction that moved the review's coin out of escrow,
    /// either a ReviewPayment or a redirected LoanRepayment.
    std::optional<std::uint64_t> settlement_seq;

    bool settled() const { return settlement_seq.has_value(); }
};

struct Challenge {
    std::string challenge_id;
    std::string paper_id;
    AccountId author;
    std::vector<std::string> challenged_reviews;
    Amount stake;
    std::vector<std::string> extra_reviews;
    ChallengeOutcome outcome = ChallengeOutcome::Pending;
};

struct Loan {
    std::string loan_id;
    AccountId borrower;
    AccountId treasury;
    std::string conference_id;
    std::string paper_id;
    LoanPurpose purpose = LoanPurpose::Submission;
    Amount principal;
    Amount outstanding;
    Amount written_off;
    LoanStatus status = LoanStatus::Open;
};

/// Loans outlive a single conference cycle, so conferences in one series share
/// a book: review payments in any of them are redirected to the oldest open
/// loan of the reviewer.
class LoanBook {
public:
    Loan& issue(const AccountId& borrower, const AccountId& treasury, std::string conference_id,
                std::string paper_id, LoanPurpose purpose, Amount principal);

    Loan& at(const std::string& loan_id);
    const Loan& at(const std::string& loan_id) const;

    /// Open loans of `borrower`, oldest first.
    std::vector<Loan*> open_loans(const AccountId& borrower);
    bool has_open_loan(const AccountId& borrower) const;

    /// Sum of outstanding principal owed to `treasury`.
    Amount receivables(const AccountId& treasury) const;

    const std::deque<Loan>& loans() const { return loans_; }

private:
    std::deque<Loan> loans_;
    std::map<std::string, std::size_t> index_;
};

struct DisbursementLine {
    std::string role;
    AccountId recipient;
    Amount amount;
};

struct SettlementReport {
    std::string conference_id;
    std::int64_t papers = 0;
    std::vector<DisbursementLine> disbursements;
    /// Role accrual with no roster seat to receive it, kept by the treasury.
    Amount unassigned_to_treasury;
    Amount shortfall_covered_by_treasury;
    Amount reserve_sweep;
    Amount default_writeoffs;
    std::vector<Transaction> transactions;

    Amount role_total() const;
};

struct ChallengeResolution {
    std::vector<Transaction> transactions;
    /// Challenged reviewers whose penalty had to be financed with a loan.
    std::vector<std::string> penalty_loans;
};

struct ConferenceStats {
    std::int64_t submissions = 0;
    std::int64_t loan_funded = 0;
    std::int64_t reviews_paid = 0;        // ReviewPayment count
    std::int64_t reviews_redirected = 0;  // settled through loan repayment
    std::int64_t extra_reviews = 0;
    std::int64_t replacement_hires = 0;
    std::int64_t revisions = 0;
    std::int64_t challenges_filed = 0;
    std::int64_t challenges_upheld = 0;
    std::int64_t challenges_denied = 0;
    std::int64_t defaults = 0;
    Amount default_writeoffs;
    Amount awards;
};

/// One conference cycle. Every ledger effect goes through the shared Ledger;
/// the conference tracks what its escrow should hold and refuses to settle if
/// the ledger disagrees.
class Conference {
public:
    Conference(Ledger& ledger, ConferenceConfig config, LoanBook& loans);
    Conference(Ledger& ledger, ConferenceConfig config);

    Conference(const Conference&) = delete;
    Conference& operator=(const Conference&) = delete;

    // Phase transitions, strictly forward.
    void open_submissions();
    void close_submissions();
    void begin_decisions();
    void begin_settlement();
    SettlementReport settle();

    const Paper& submit_paper(const AccountId& author, bool use_loan = false);
    Transaction transfer_contribution(const AccountId& from, const AccountId& to, Amount amount);

    const Paper& assign_reviewers(const std::string& paper_id, std::vector<AccountId> reviewers);
    /// Swaps a no-show for a replacement hire. The no-show must not have reviewed.
    const Paper& replace_reviewer(const std::string& paper_id, const AccountId& no_show,
                                  const AccountId& replacement);
    /// Hires a reviewer beyond rho, for a hard paper or for a challenge.
    const Paper& add_extra_reviewer(const std::string& paper_id, const AccountId& reviewer,
                                    const std::optional<std::string>& challenge_id = std::nullopt);

    const Review& submit_review(const AccountId& reviewer, const std::string& paper_id);
    const Review& request_revision(const std::string& review_id);
    /// Approves and pays one coin: to the reviewer, or to the reviewer's oldest
    /// open loans when they have any.
    Transaction approve_review(const std::string& review_id);
    /// Approves without paying; settle later with pay_approved_review or
    /// repay_loan_via_review.
    const Review& mark_approved(const std::string& review_id);
    Transaction pay_approved_review(const std::string& review_id);
    /// Redirects the approved review's coin to `loan_id`; any excess over the
    /// outstanding balance goes to the reviewer.
    Transaction repay_loan_via_review(const std::string& review_id, const std::string& loan_id);

    const Paper& record_decision(const std::string& paper_id, std::string label);
    const Challenge& file_challenge(const AccountId& author, const std::string& paper_id,
                                    const std::vector<std::string>& challenged_reviews);
    ChallengeResolution resolve_challenge(const std::string& challenge_id, bool upheld);

    std::vector<Transaction> withdraw_on_default(const std::string& paper_id);

    Transaction award(const AccountId& recipient, Amount amount, const std::string& note);

    /// Records that `account` handled `papers` papers in `role`; settlement
    /// then apportions that role by handled counts instead of equal seats.
    void record_role_assignment(const std::string& role, const AccountId& account,
                                std::int64_t papers = 1);

    ConferencePhase phase() const { return phase_; }
    const ConferenceConfig& config() const { return config_; }
    const ConferenceStats& stats() const { return stats_; }
    const Paper& paper(const std::string& paper_id) const;
    const Review& review(const std::string& review_id) const;
    const Challenge& challenge(const std::string& challenge_id) const;
    const std::vector<std::string>& paper_ids() const { return paper_order_; }
    std::vector<const Review*> reviews_for(const std::string& paper_id) const;
    std::int64_t active_papers() const;
    /// What the escrow should hold given every recorded event.
    Amount expected_escrow() const { return expected_escrow_; }
    LoanBook& loans() { return *loans_; }
    const LoanBook& loans() const { return *loans_; }

private:
    Paper& paper_mut(const std::string& paper_id);
    Review& review_mut(const std::string& review_id);
    void require_phase(std::initializer_list<ConferencePhase> allowed, const char* op) const;
    void advance(ConferencePhase from, ConferencePhase to);
    Memo memo(const std::string& paper = {}, const std::string& review = {}, std::string note = {}) const;
    Transaction redirect_to_loans(Review& review, std::vector<Loan*> loans);
    bool is_reviewer_of(const Paper& p, const AccountId& who) const;

    Ledger& ledger_;
    ConferenceConfig config_;
    std::unique_ptr<LoanBook> owned_loans_;
    LoanBook* loans_;
    ConferencePhase phase_ = ConferencePhase::Announced;

    std::map<std::string, Paper> papers_;
    std::vector<std::string> paper_order_;
    std::map<std::string, Review> reviews_;
    std::map<std::string, std::vector<std::string>> reviews_by_paper_;
    std::map<std::string, Challenge> challenges_;
    std::map<std::string, std::vector<std::pair<AccountId, std::int64_t>>> role_assignments_;
    std::map<std::pair<std::string, AccountId>, std::string> challenge_hires_;

    Amount expected_escrow_;
    ConferenceStats stats_;
    std::int64_t next_paper_ = 1;
    std::int64_t next_challenge_ = 1;
};

}  // namespace reviewcoin

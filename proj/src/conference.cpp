#include "reviewcoin/conference.hpp"

#include "reviewcoin/apportion.hpp"
#include "reviewcoin/error.hpp"

#include <algorithm>
#include <set>

namespace reviewcoin {

namespace {

std::string phase_list(std::initializer_list<ConferencePhase> phases) {
    std::string out;
    for (auto p : phases) {
        if (!out.empty()) out += "/";
        out += to_string(p);
    }
    return out;
}

}  // namespace

std::string_view to_string(ConferencePhase phase) {
    switch (phase) {
        case ConferencePhase::Announced: return "Announced";
        case ConferencePhase::SubmissionsOpen: return "SubmissionsOpen";
        case ConferencePhase::ReviewInProgress: return "ReviewInProgress";
        case ConferencePhase::DecisionAndChallenge: return "DecisionAndChallenge";
        case ConferencePhase::Settlement: return "Settlement";
        case ConferencePhase::Closed: return "Closed";
    }
    return "Unknown";
}

std::string_view to_string(PaperStatus status) {
    switch (status) {
        case PaperStatus::Submitted: return "Submitted";
        case PaperStatus::UnderReview: return "UnderReview";
        case PaperStatus::Decided: return "Decided";
        case PaperStatus::Challenged: return "Challenged";
        case PaperStatus::Withdrawn: return "Withdrawn";
    }
    return "Unknown";
}

std::string_view to_string(ReviewStatus status) {
    switch (status) {
        case ReviewStatus::PendingApproval: return "PendingApproval";
        case ReviewStatus::RevisionRequested: return "RevisionRequested";
        case ReviewStatus::Approved: return "Approved";
        case ReviewStatus::Paid: return "Paid";
    }
    return "Unknown";
}

std::string_view to_string(ChallengeOutcome outcome) {
    switch (outcome) {
        case ChallengeOutcome::Pending: return "Pending";
        case ChallengeOutcome::Upheld: return "Upheld";
        case ChallengeOutcome::Denied: return "Denied";
    }
    return "Unknown";
}

std::string_view to_string(LoanStatus status) {
    switch (status) {
        case LoanStatus::Open: return "Open";
        case LoanStatus::Repaid: return "Repaid";
        case LoanStatus::Defaulted: return "Defaulted";
    }
    return "Unknown";
}

// --- config ---------------------------------------------------------------------

std::int64_t ConferenceConfig::max_challenge_count() const {
    return std::max<std::int64_t>(0, std::min(rho - 1, rho / 2 + 1));
}

Amount ConferenceConfig::submission_cost() const {
    return reviewcoin::submission_cost(PricingParams{rho, tau, 0});
}

AccountId ConferenceConfig::treasury() const {
    return AccountId::treasury(treasury_id.empty() ? conference_id : treasury_id);
}

AccountId ConferenceConfig::escrow() const { return AccountId::escrow(conference_id); }

void ConferenceConfig::validate() const {
    if (conference_id.empty()) throw Error(ErrorCode::ConfigInvalid, "conference_id is required");
    if (rho < 1) throw Error(ErrorCode::ConfigInvalid, "rho must be at least 1");
    if (tau < Amount{}) throw Error(ErrorCode::ConfigInvalid, "tau must be non-negative");
    tax_schedule.validate();
    for (const auto& [role, roster] : role_rosters) {
        auto it = std::find_if(tax_schedule.roles.begin(), tax_schedule.roles.end(),
                               [&](const RoleRate& r) { return r.role_name == role; });
        if (it == tax_schedule.roles.end())
            throw Error(ErrorCode::ConfigInvalid, "roster for unknown role " + role);
        std::set<AccountId> unique(roster.begin(), roster.end());
        if (unique.size() != roster.size())
            throw Error(ErrorCode::ConfigInvalid, "duplicate member in roster " + role);
    }
}

// --- loans ------------------------------------------------------------------------

Loan& LoanBook::issue(const AccountId& borrower, const AccountId& treasury, std::string conference_id,
                      std::string paper_id, LoanPurpose purpose, Amount principal) {
    Loan loan;
    loan.loan_id = "L" + std::to_string(loans_.size() + 1);
    loan.borrower = borrower;
    loan.treasury = treasury;
    loan.conference_id = std::move(conference_id);
    loan.paper_id = std::move(paper_id);
    loan.purpose = purpose;
    loan.principal = principal;
    loan.outstanding = principal;
    index_.emplace(loan.loan_id, loans_.size());
    loans_.push_back(std::move(loan));
    return loans_.back();
}

Loan& LoanBook::at(const std::string& loan_id) {
    auto it = index_.find(loan_id);
    if (it == index_.end()) throw Error(ErrorCode::NotFound, "loan " + loan_id);
    return loans_[it->second];
}

const Loan& LoanBook::at(const std::string& loan_id) const {
    auto it = index_.find(loan_id);
    if (it == index_.end()) throw Error(ErrorCode::NotFound, "loan " + loan_id);
    return loans_[it->second];
}

std::vector<Loan*> LoanBook::open_loans(const AccountId& borrower) {
    std::vector<Loan*> out;
    for (auto& loan : loans_)
        if (loan.status == LoanStatus::Open && loan.borrower == borrower) out.push_back(&loan);
    return out;
}

bool LoanBook::has_open_loan(const AccountId& borrower) const {
    return std::any_of(loans_.begin(), loans_.end(), [&](const Loan& l) {
        return l.status == LoanStatus::Open && l.borrower == borrower;
    });
}

Amount LoanBook::receivables(const AccountId& treasury) const {
    Amount sum;
    for (const auto& loan : loans_)
        if (loan.status == LoanStatus::Open && loan.treasury == treasury) sum += loan.outstanding;
    return sum;
}

Amount SettlementReport::role_total() const {
    Amount sum;
    for (const auto& line : disbursements) sum += line.amount;
    return sum;
}

// --- conference ---------------------------------------------------------------------

Conference::Conference(Ledger& ledger, ConferenceConfig config, LoanBook& loans)
    : ledger_(ledger), config_(std::move(config)), loans_(&loans) {
    config_.validate();
    ledger_.ensure_account(config_.treasury());
    ledger_.ensure_account(config_.escrow());
    expected_escrow_ = ledger_.balance(config_.escrow());
}

Conference::Conference(Ledger& ledger, ConferenceConfig config)
    : ledger_(ledger), config_(std::move(config)), owned_loans_(std::make_unique<LoanBook>()) {
    loans_ = owned_loans_.get();
    config_.validate();
    ledger_.ensure_account(config_.treasury());
    ledger_.ensure_account(config_.escrow());
    expected_escrow_ = ledger_.balance(config_.escrow());
}

void Conference::require_phase(std::initializer_list<ConferencePhase> allowed, const char* op) const {
    if (std::find(allowed.begin(), allowed.end(), phase_) == allowed.end())
        throw Error(ErrorCode::WrongPhase, std::string(op) + " needs phase " + phase_list(allowed) +
                                               ", conference is " + std::string(to_string(phase_)));
}

void Conference::advance(ConferencePhase from, ConferencePhase to) {
    if (phase_ != from)
        throw Error(ErrorCode::WrongPhase, "cannot move from " + std::string(to_string(phase_)) +
                                               " to " + std::string(to_string(to)));
    phase_ = to;
}

void Conference::open_submissions() {
    advance(ConferencePhase::Announced, ConferencePhase::SubmissionsOpen);
}

void Conference::close_submissions() {
    advance(ConferencePhase::SubmissionsOpen, ConferencePhase::ReviewInProgress);
}

void Conference::begin_decisions() {
    advance(ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge);
}

void Conference::begin_settlement() {
    for (const auto& [id, ch] : challenges_)
        if (ch.outcome == ChallengeOutcome::Pending)
            throw Error(ErrorCode::UnresolvedReviews, "challenge " + id + " is still pending");
    advance(ConferencePhase::DecisionAndChallenge, ConferencePhase::Settlement);
}

Memo Conference::memo(const std::string& paper, const std::string& review, std::string note) const {
    return Memo{config_.conference_id, paper, review, std::move(note)};
}

Paper& Conference::paper_mut(const std::string& paper_id) {
    auto it = papers_.find(paper_id);
    if (it == papers_.end()) throw Error(ErrorCode::NotFound, "paper " + paper_id);
    return it->second;
}

const Paper& Conference::paper(const std::string& paper_id) const {
    auto it = papers_.find(paper_id);
    if (it == papers_.end()) throw Error(ErrorCode::NotFound, "paper " + paper_id);
    return it->second;
}

Review& Conference::review_mut(const std::string& review_id) {
    auto it = reviews_.find(review_id);
    if (it == reviews_.end()) throw Error(ErrorCode::NotFound, "review " + review_id);
    return it->second;
}

const Review& Conference::review(const std::string& review_id) const {
    auto it = reviews_.find(review_id);
    if (it == reviews_.end()) throw Error(ErrorCode::NotFound, "review " + review_id);
    return it->second;
}

const Challenge& Conference::challenge(const std::string& challenge_id) const {
    auto it = challenges_.find(challenge_id);
    if (it == challenges_.end()) throw Error(ErrorCode::NotFound, "challenge " + challenge_id);
    return it->second;
}

std::vector<const Review*> Conference::reviews_for(const std::string& paper_id) const {
    std::vector<const Review*> out;
    auto it = reviews_by_paper_.find(paper_id);
    if (it == reviews_by_paper_.end()) return out;
    for (const auto& id : it->second) out.push_back(&reviews_.at(id));
    return out;
}

std::int64_t Conference::active_papers() const {
    return std::count_if(papers_.begin(), papers_.end(),
                         [](const auto& kv) { return kv.second.status != PaperStatus::Withdrawn; });
}

bool Conference::is_reviewer_of(const Paper& p, const AccountId& who) const {
    auto has = [&](const std::vector<AccountId>& v) { return std::find(v.begin(), v.end(), who) != v.end(); };
    return has(p.assigned_reviewers) || has(p.extra_reviewers);
}

// --- submissions --------------------------------------------------------------------

const Paper& Conference::submit_paper(const AccountId& author, bool use_loan) {
    require_phase({ConferencePhase::SubmissionsOpen}, "submit_paper");
    if (!ledger_.has_account(author)) throw Error(ErrorCode::UnknownAccount, author.str());
    if (author.role() != AccountRole::Researcher)
        throw Error(ErrorCode::InvalidAccount, "papers are submitted by researchers");

    const Amount cost = config_.submission_cost();
    const Amount balance = ledger_.balance(author);
    const Amount shortfall = balance < cost ? cost - balance : Amount{};

    if (shortfall > Amount{}) {
        if (!use_loan)
            throw Error(ErrorCode::InsufficientFunds, author.str() + " holds " + format_rc(balance) +
                                                          " RC, submission costs " + format_rc(cost) + " RC");
        if (!config_.loan_policy.enabled)
            throw Error(ErrorCode::LoansDisabled, config_.conference_id + " does not lend");
        if (ledger_.balance(config_.treasury()) < shortfall)
            throw Error(ErrorCode::InsufficientFunds, "treasury cannot fund a loan of " +
                                                          format_rc(shortfall) + " RC");
    }

    Paper p;
    p.paper_id = config_.conference_id + "/p" + std::to_string(next_paper_);
    p.corresponding_author = author;
    p.charge = cost;

    if (shortfall > Amount{}) {
        ledger_.transfer(TxKind::LoanIssue, config_.treasury(), author, shortfall,
                         memo(p.paper_id, {}, "submission loan"));
        auto& loan = loans_->issue(author, config_.treasury(), config_.conference_id, p.paper_id,
                                   LoanPurpose::Submission, shortfall);
        p.funded_by_loan = true;
        p.loan_id = loan.loan_id;
        ++stats_.loan_funded;
    }
    ledger_.transfer(TxKind::SubmissionCharge, author, config_.escrow(), cost, memo(p.paper_id));
    expected_escrow_ += cost;

    ++next_paper_;
    ++stats_.submissions;
    paper_order_.push_back(p.paper_id);
    auto id = p.paper_id;
    return papers_.emplace(id, std::move(p)).first->second;
}

Transaction Conference::transfer_contribution(const AccountId& from, const AccountId& to, Amount amount) {
    if (amount <= Amount{}) throw Error(ErrorCode::InvalidEntries, "contribution must be positive");
    return ledger_.transfer(TxKind::Transfer, from, to, amount, memo({}, {}, "contribution"));
}

// --- reviewing -----------------------------------------------------------------------

const Paper& Conference::assign_reviewers(const std::string& paper_id, std::vector<AccountId> reviewers) {
    require_phase({ConferencePhase::SubmissionsOpen, ConferencePhase::ReviewInProgress}, "assign_reviewers");
    auto& p = paper_mut(paper_id);
    if (p.status != PaperStatus::Submitted)
        throw Error(ErrorCode::WrongStatus, paper_id + " already has reviewers");
    std::set<AccountId> unique(reviewers.begin(), reviewers.end());
    if (unique.size() != reviewers.size() || static_cast<std::int64_t>(reviewers.size()) != config_.rho)
        throw Error(ErrorCode::WrongCount, "need exactly " + std::to_string(config_.rho) +
                                               " distinct reviewers, got " + std::to_string(unique.size()) +
                                               " of " + std::to_string(reviewers.size()));
    if (unique.contains(p.corresponding_author))
        throw Error(ErrorCode::ConflictOfInterest, p.corresponding_author.str() + " authored " + paper_id);
    for (const auto& r : reviewers) {
        if (!ledger_.has_account(r)) throw Error(ErrorCode::UnknownAccount, r.str());
        if (r.role() != AccountRole::Researcher)
            throw Error(ErrorCode::InvalidAccount, r.str() + " cannot review");
    }
    p.assigned_reviewers = std::move(reviewers);
    p.status = PaperStatus::UnderReview;
    return p;
}

const Paper& Conference::replace_reviewer(const std::string& paper_id, const AccountId& no_show,
                                          const AccountId& replacement) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge}, "replace_reviewer");
    auto& p = paper_mut(paper_id);
    if (p.status == PaperStatus::Withdrawn) throw Error(ErrorCode::WrongStatus, paper_id + " was withdrawn");
    auto it = std::find(p.assigned_reviewers.begin(), p.assigned_reviewers.end(), no_show);
    if (it == p.assigned_reviewers.end()) throw Error(ErrorCode::NotAssigned, no_show.str());
    for (const auto* r : reviews_for(paper_id))
        if (r->reviewer == no_show) throw Error(ErrorCode::WrongStatus, no_show.str() + " already reviewed");
    if (replacement == p.corresponding_author)
        throw Error(ErrorCode::ConflictOfInterest, replacement.str() + " authored " + paper_id);
    if (is_reviewer_of(p, replacement))
        throw Error(ErrorCode::WrongCount, replacement.str() + " already reviews " + paper_id);
    if (!ledger_.has_account(replacement)) throw Error(ErrorCode::UnknownAccount, replacement.str());
    *it = replacement;
    ++stats_.replacement_hires;
    return p;
}

const Paper& Conference::add_extra_reviewer(const std::string& paper_id, const AccountId& reviewer,
                                            const std::optional<std::string>& challenge_id) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge},
                  "add_extra_reviewer");
    auto& p = paper_mut(paper_id);
    if (p.status == PaperStatus::Withdrawn || p.status == PaperStatus::Submitted)
        throw Error(ErrorCode::WrongStatus, paper_id + " is " + std::string(to_string(p.status)));
    if (reviewer == p.corresponding_author)
        throw Error(ErrorCode::ConflictOfInterest, reviewer.str() + " authored " + paper_id);
    if (is_reviewer_of(p, reviewer))
        throw Error(ErrorCode::WrongCount, reviewer.str() + " already reviews " + paper_id);
    if (!ledger_.has_account(reviewer)) throw Error(ErrorCode::UnknownAccount, reviewer.str());
    if (challenge_id) {
        const auto& ch = challenge(*challenge_id);
        if (ch.paper_id != paper_id || ch.outcome != ChallengeOutcome::Pending)
            throw Error(ErrorCode::WrongStatus, "challenge " + *challenge_id + " is not pending on " + paper_id);
    }
    p.extra_reviewers.push_back(reviewer);
    if (challenge_id) challenge_hires_[{paper_id, reviewer}] = *challenge_id;
    return p;
}

const Review& Conference::submit_review(const AccountId& reviewer, const std::string& paper_id) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge}, "submit_review");
    auto& p = paper_mut(paper_id);
    if (p.status == PaperStatus::Withdrawn) throw Error(ErrorCode::WrongStatus, paper_id + " was withdrawn");
    if (!is_reviewer_of(p, reviewer)) throw Error(ErrorCode::NotAssigned, reviewer.str() + " on " + paper_id);

    auto& ids = reviews_by_paper_[paper_id];
    for (const auto& id : ids) {
        auto& r = reviews_.at(id);
        if (r.reviewer != reviewer) continue;
        switch (r.status) {
            case ReviewStatus::Approved:
            case ReviewStatus::Paid:
                throw Error(ErrorCode::AlreadyApproved, id);
            case ReviewStatus::PendingApproval:
                throw Error(ErrorCode::WrongStatus, id + " is already awaiting approval");
            case ReviewStatus::RevisionRequested:
                r.status = ReviewStatus::PendingApproval;
                ++r.revision_count;
                ++stats_.revisions;
                return r;
        }
    }

    Review r;
    r.review_id = paper_id + "/r" + std::to_string(ids.size() + 1);
    r.paper_id = paper_id;
    r.reviewer = reviewer;
    r.extra = std::find(p.extra_reviewers.begin(), p.extra_reviewers.end(), reviewer) != p.extra_reviewers.end();
    if (auto hire = challenge_hires_.find({paper_id, reviewer}); r.extra && hire != challenge_hires_.end()) {
        r.challenge_id = hire->second;
        challenges_.at(hire->second).extra_reviews.push_back(r.review_id);
    }
    ids.push_back(r.review_id);
    auto id = r.review_id;
    return reviews_.emplace(id, std::move(r)).first->second;
}

const Review& Conference::request_revision(const std::string& review_id) {
    auto& r = review_mut(review_id);
    if (r.status != ReviewStatus::PendingApproval)
        throw Error(ErrorCode::WrongStatus, review_id + " is " + std::string(to_string(r.status)));
    r.status = ReviewStatus::RevisionRequested;
    return r;
}

const Review& Conference::mark_approved(const std::string& review_id) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge}, "approve_review");
    auto& r = review_mut(review_id);
    if (r.status != ReviewStatus::PendingApproval)
        throw Error(ErrorCode::WrongStatus, review_id + " is " + std::string(to_string(r.status)));
    if (paper(r.paper_id).status == PaperStatus::Withdrawn)
        throw Error(ErrorCode::WrongStatus, r.paper_id + " was withdrawn");
    r.status = ReviewStatus::Approved;
    return r;
}

Transaction Conference::approve_review(const std::string& review_id) {
    const auto& r = review(review_id);
    if (r.status == ReviewStatus::PendingApproval && ledger_.balance(config_.escrow()) < kOneReview)
        throw Error(ErrorCode::EscrowShort, "escrow holds " + format_rc(ledger_.balance(config_.escrow())) +
                                                " RC, review payment is 1 RC");
    mark_approved(review_id);
    return pay_approved_review(review_id);
}

Transaction Conference::pay_approved_review(const std::string& review_id) {
    auto& r = review_mut(review_id);
    if (r.status != ReviewStatus::Approved || r.settled())
        throw Error(ErrorCode::WrongStatus, review_id + " is not awaiting payment");
    if (ledger_.balance(config_.escrow()) < kOneReview)
        throw Error(ErrorCode::EscrowShort, "escrow cannot pay " + review_id);

    auto open = loans_->open_loans(r.reviewer);
    if (!open.empty()) return redirect_to_loans(r, std::move(open));

    auto tx = ledger_.transfer(TxKind::ReviewPayment, config_.escrow(), r.reviewer, kOneReview,
                               memo(r.paper_id, r.review_id));
    expected_escrow_ -= kOneReview;
    r.status = ReviewStatus::Paid;
    r.settlement_seq = tx.seq;
    ++stats_.reviews_paid;
    if (r.extra) ++stats_.extra_reviews;
    return tx;
}

Transaction Conference::repay_loan_via_review(const std::string& review_id, const std::string& loan_id) {
    auto& r = review_mut(review_id);
    if (r.status != ReviewStatus::Approved || r.settled())
        throw Error(ErrorCode::WrongStatus, review_id + " is not awaiting payment");
    auto& loan = loans_->at(loan_id);
    if (loan.status != LoanStatus::Open)
        throw Error(ErrorCode::WrongStatus, loan_id + " is " + std::string(to_string(loan.status)));
    if (loan.borrower != r.reviewer)
        throw Error(ErrorCode::WrongStatus, loan_id + " is not owed by " + r.reviewer.str());
    if (ledger_.balance(config_.escrow()) < kOneReview)
        throw Error(ErrorCode::EscrowShort, "escrow cannot pay " + review_id);
    return redirect_to_loans(r, {&loan});
}

Transaction Conference::redirect_to_loans(Review& r, std::vector<Loan*> loans) {
    // Aggregate per account so one transaction carries each account once.
    std::map<AccountId, Amount> credits;
    std::vector<std::pair<Loan*, Amount>> applied;
    Amount left = kOneReview;
    for (auto* loan : loans) {
        if (left <= Amount{}) break;
        Amount part = std::min(left, loan->outstanding);
        if (part <= Amount{}) continue;
        credits[loan->treasury] += part;
        applied.emplace_back(loan, part);
        left -= part;
    }
    if (left > Amount{}) credits[r.reviewer] += left;

    std::vector<Entry> entries{{config_.escrow(), -kOneReview}};
    for (const auto& [account, amount] : credits) entries.push_back({account, amount});
    auto tx = ledger_.append(TxKind::LoanRepayment, std::move(entries),
                             memo(r.paper_id, r.review_id, "redirected review payment"));
    expected_escrow_ -= kOneReview;
    for (auto& [loan, part] : applied) {
        loan->outstanding -= part;
        if (loan->outstanding == Amount{}) loan->status = LoanStatus::Repaid;
    }
    r.settlement_seq = tx.seq;
    ++stats_.reviews_redirected;
    if (r.extra) ++stats_.extra_reviews;
    return tx;
}

// --- decisions and challenges ------------------------------------------------------------

const Paper& Conference::record_decision(const std::string& paper_id, std::string label) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge}, "record_decision");
    auto& p = paper_mut(paper_id);
    if (p.status != PaperStatus::UnderReview && p.status != PaperStatus::Decided)
        throw Error(ErrorCode::WrongStatus, paper_id + " is " + std::string(to_string(p.status)));
    p.decision = std::move(label);
    p.status = PaperStatus::Decided;
    return p;
}

const Challenge& Conference::file_challenge(const AccountId& author, const std::string& paper_id,
                                            const std::vector<std::string>& challenged_reviews) {
    require_phase({ConferencePhase::DecisionAndChallenge}, "file_challenge");
    auto& p = paper_mut(paper_id);
    if (p.corresponding_author != author)
        throw Error(ErrorCode::WrongStatus, author.str() + " is not the corresponding author of " + paper_id);
    if (p.status != PaperStatus::Decided)
        throw Error(ErrorCode::WrongStatus, paper_id + " is " + std::string(to_string(p.status)));

    const auto count = static_cast<std::int64_t>(challenged_reviews.size());
    if (count < 1) throw Error(ErrorCode::WrongCount, "a challenge names at least one review");
    if (count > config_.max_challenge_count())
        throw Error(ErrorCode::TooManyChallenged, std::to_string(count) + " reviews challenged, at most " +
                                                      std::to_string(config_.max_challenge_count()) + " allowed");
    std::set<std::string> unique(challenged_reviews.begin(), challenged_reviews.end());
    if (unique.size() != challenged_reviews.size()) throw Error(ErrorCode::WrongCount, "duplicate review");
    for (const auto& id : challenged_reviews) {
        const auto& r = review(id);
        if (r.paper_id != paper_id || r.extra)
            throw Error(ErrorCode::WrongStatus, id + " is not an original review of " + paper_id);
        if (!r.settled()) throw Error(ErrorCode::WrongStatus, id + " has not been paid");
    }

    const Amount stake = kOneReview * count;
    if (ledger_.balance(author) < stake)
        throw Error(ErrorCode::InsufficientFunds, "challenge stake is " + format_rc(stake) + " RC");

    Challenge ch;
    ch.challenge_id = config_.conference_id + "/ch" + std::to_string(next_challenge_);
    ch.paper_id = paper_id;
    ch.author = author;
    ch.challenged_reviews = challenged_reviews;
    ch.stake = stake;
    ledger_.transfer(TxKind::ChallengeStake, author, config_.escrow(), stake,
                     memo(paper_id, {}, "challenge " + ch.challenge_id));
    expected_escrow_ += stake;
    ++next_challenge_;
    ++stats_.challenges_filed;
    p.status = PaperStatus::Challenged;
    auto id = ch.challenge_id;
    return challenges_.emplace(id, std::move(ch)).first->second;
}

ChallengeResolution Conference::resolve_challenge(const std::string& challenge_id, bool upheld) {
    require_phase({ConferencePhase::DecisionAndChallenge}, "resolve_challenge");
    auto it = challenges_.find(challenge_id);
    if (it == challenges_.end()) throw Error(ErrorCode::NotFound, "challenge " + challenge_id);
    auto& ch = it->second;
    if (ch.outcome != ChallengeOutcome::Pending) throw Error(ErrorCode::WrongStatus, challenge_id + " is resolved");
    if (ch.extra_reviews.empty())
        throw Error(ErrorCode::WrongStatus, challenge_id + " has no extra reviews yet");
    std::size_t hires = 0;
    for (const auto& [key, cid] : challenge_hires_)
        if (cid == challenge_id) ++hires;
    if (hires != ch.extra_reviews.size())
        throw Error(ErrorCode::WrongStatus, challenge_id + " still waits for a hired extra review");
    for (const auto& id : ch.extra_reviews)
        if (!review(id).settled())
            throw Error(ErrorCode::WrongStatus, challenge_id + " still waits for extra review " + id);

    ChallengeResolution out;
    auto& p = paper_mut(ch.paper_id);
    if (upheld) {
        // Work out the penalty plan before touching the ledger so an
        // insolvent reviewer leaves no partial state behind.
        std::vector<AccountId> penalized;
        Amount loans_needed;
        for (const auto& id : ch.challenged_reviews) {
            const auto& who = review(id).reviewer;
            penalized.push_back(who);
            if (ledger_.balance(who) < kOneReview) loans_needed += kOneReview;
        }
        if (loans_needed > Amount{} && ledger_.balance(config_.treasury()) < loans_needed)
            throw Error(ErrorCode::ReviewerInsolvent,
                        "treasury cannot finance " + format_rc(loans_needed) + " RC of penalty loans");

        for (std::size_t i = 0; i < penalized.size(); ++i) {
            const auto& who = penalized[i];
            const auto& rid = ch.challenged_reviews[i];
            if (ledger_.balance(who) < kOneReview) {
                out.transactions.push_back(ledger_.transfer(TxKind::LoanIssue, config_.treasury(), who, kOneReview,
                                                            memo(ch.paper_id, rid, "challenge penalty loan")));
                loans_->issue(who, config_.treasury(), config_.conference_id, ch.paper_id,
                              LoanPurpose::ChallengePenalty, kOneReview);
                out.penalty_loans.push_back(who.str());
            }
            out.transactions.push_back(ledger_.transfer(TxKind::ChallengePenalty, who, config_.escrow(), kOneReview,
                                                        memo(ch.paper_id, rid, "challenge " + challenge_id)));
            expected_escrow_ += kOneReview;
        }
        out.transactions.push_back(ledger_.transfer(TxKind::ChallengeRefund, config_.escrow(), ch.author, ch.stake,
                                                    memo(ch.paper_id, {}, "challenge " + challenge_id)));
        expected_escrow_ -= ch.stake;
        ch.outcome = ChallengeOutcome::Upheld;
        ++stats_.challenges_upheld;
    } else {
        ch.outcome = ChallengeOutcome::Denied;
        ++stats_.challenges_denied;
    }
    p.status = PaperStatus::Decided;
    return out;
}

// --- defaults -------------------------------------------------------------------------------

std::vector<Transaction> Conference::withdraw_on_default(const std::string& paper_id) {
    require_phase({ConferencePhase::ReviewInProgress, ConferencePhase::DecisionAndChallenge},
                  "withdraw_on_default");
    auto& p = paper_mut(paper_id);
    if (!p.funded_by_loan || !p.loan_id) throw Error(ErrorCode::NotLoanFunded, paper_id);
    if (p.status == PaperStatus::Withdrawn || p.status == PaperStatus::Challenged)
        throw Error(ErrorCode::WrongStatus, paper_id + " is " + std::string(to_string(p.status)));
    auto& loan = loans_->at(*p.loan_id);
    if (loan.status != LoanStatus::Open)
        throw Error(ErrorCode::WrongStatus, loan.loan_id + " is " + std::string(to_string(loan.status)));

    Amount paid_out;
    for (const auto* r : reviews_for(paper_id))
        if (r->settled()) paid_out += kOneReview;

    if (ledger_.balance(config_.treasury()) < paid_out)
        throw Error(ErrorCode::InsufficientFunds, "treasury cannot cover " + format_rc(paid_out) +
                                                      " RC of reviews on " + paper_id);

    std::vector<Transaction> out;
    // The reviews already paid keep their coin: the treasury's default reserve
    // refills escrow for them, then the whole charge is unwound. The treasury
    // recovers the unpaid loan and the author gets back whatever part of the
    // charge they funded themselves.
    if (paid_out > Amount{}) {
        out.push_back(ledger_.transfer(TxKind::DefaultWriteOff, config_.treasury(), config_.escrow(), paid_out,
                                       memo(paper_id, {}, "default reserve draw")));
        expected_escrow_ += paid_out;
    }
    std::vector<Entry> unwind{{config_.escrow(), -p.charge}};
    if (loan.outstanding > Amount{}) unwind.push_back({loan.treasury, loan.outstanding});
    if (p.charge - loan.outstanding > Amount{})
        unwind.push_back({p.corresponding_author, p.charge - loan.outstanding});
    out.push_back(ledger_.append(TxKind::DefaultWriteOff, std::move(unwind),
                                 memo(paper_id, {}, "charge unwound on default")));
    expected_escrow_ -= p.charge;

    loan.written_off = paid_out;
    loan.outstanding = Amount{};
    loan.status = LoanStatus::Defaulted;
    p.status = PaperStatus::Withdrawn;
    ++stats_.defaults;
    stats_.default_writeoffs += paid_out;
    return out;
}

Transaction Conference::award(const AccountId& recipient, Amount amount, const std::string& note) {
    require_phase({ConferencePhase::DecisionAndChallenge, ConferencePhase::Settlement}, "award");
    if (amount <= Amount{}) throw Error(ErrorCode::InvalidEntries, "award must be positive");
    if (ledger_.balance(config_.escrow()) < amount)
        throw Error(ErrorCode::EscrowShort, "escrow cannot fund an award of " + format_rc(amount) + " RC");
    auto tx = ledger_.transfer(TxKind::TaxDisbursement, config_.escrow(), recipient, amount,
                               memo({}, {}, "award: " + note));
    expected_escrow_ -= amount;
    stats_.awards += amount;
    return tx;
}

void Conference::record_role_assignment(const std::string& role, const AccountId& account, std::int64_t papers) {
    if (papers < 0) throw Error(ErrorCode::ConfigInvalid, "negative assignment count");
    auto known = std::any_of(config_.tax_schedule.roles.begin(), config_.tax_schedule.roles.end(),
                             [&](const RoleRate& r) { return r.role_name == role; });
    if (!known) throw Error(ErrorCode::ConfigInvalid, "unknown role " + role);
    auto& list = role_assignments_[role];
    for (auto& [who, count] : list) {
        if (who == account) {
            count += papers;
            return;
        }
    }
    list.emplace_back(account, papers);
}

// --- settlement -------------------------------------------------------------------------------

SettlementReport Conference::settle() {
    require_phase({ConferencePhase::Settlement}, "settle");
    for (const auto& [id, r] : reviews_) {
        if (paper(r.paper_id).status == PaperStatus::Withdrawn) continue;
        if (!r.settled()) throw Error(ErrorCode::UnresolvedReviews, id + " is " + std::string(to_string(r.status)));
    }

    const auto escrow = config_.escrow();
    const auto treasury = config_.treasury();
    Amount held = ledger_.balance(escrow);
    if (held != expected_escrow_)
        throw Error(ErrorCode::EscrowMismatch, "escrow holds " + format_rc(held) + " RC, records say " +
                                                   format_rc(expected_escrow_) + " RC");

    SettlementReport report;
    report.conference_id = config_.conference_id;
    report.papers = active_papers();
    report.default_writeoffs = stats_.default_writeoffs;
    const std::int64_t n = report.papers;

    if (config_.strict_default_reserve && stats_.default_writeoffs > config_.tax_schedule.default_reserve_rate * n)
        throw Error(ErrorCode::EscrowMismatch, "default write-offs of " + format_rc(stats_.default_writeoffs) +
                                                   " RC exceed the default reserve of " +
                                                   format_rc(config_.tax_schedule.default_reserve_rate * n) + " RC");

    struct RolePlan {
        const RoleRate* role;
        Amount pool;
        std::vector<std::pair<AccountId, Amount>> shares;
        Amount unassigned;
    };
    std::vector<RolePlan> plans;
    Amount role_total;
    for (const auto& role : config_.tax_schedule.roles) {
        RolePlan plan{&role, role.per_paper_rate * n, {}, {}};
        role_total += plan.pool;
        auto assigned = role_assignments_.find(role.role_name);
        if (assigned != role_assignments_.end() && !assigned->second.empty()) {
            std::vector<std::int64_t> weights;
            for (const auto& [who, count] : assigned->second) weights.push_back(count);
            auto shares = apportion(plan.pool, weights);
            Amount given;
            for (std::size_t i = 0; i < shares.size(); ++i) {
                plan.shares.emplace_back(assigned->second[i].first, shares[i]);
                given += shares[i];
            }
            plan.unassigned = plan.pool - given;
        } else {
            std::vector<std::int64_t> seats(static_cast<std::size_t>(role.split_ways), 1);
            auto shares = apportion(plan.pool, seats);
            auto roster = config_.role_rosters.find(role.role_name);
            for (std::size_t i = 0; i < shares.size(); ++i) {
                if (roster != config_.role_rosters.end() && i < roster->second.size())
                    plan.shares.emplace_back(roster->second[i], shares[i]);
                else
                    plan.unassigned += shares[i];
            }
        }
        plans.push_back(std::move(plan));
    }

    if (held < role_total) {
        const Amount shortfall = role_total - held;
        if (ledger_.balance(treasury) < shortfall)
            throw Error(ErrorCode::EscrowMismatch, "escrow is " + format_rc(shortfall) +
                                                       " RC short of role pay and the treasury cannot cover it");
        report.transactions.push_back(ledger_.transfer(TxKind::TaxDisbursement, treasury, escrow, shortfall,
                                                       memo({}, {}, "treasury covers tax shortfall")));
        expected_escrow_ += shortfall;
        report.shortfall_covered_by_treasury = shortfall;
    }

    for (auto& plan : plans) {
        if (plan.pool == Amount{}) continue;
        std::map<AccountId, Amount> credits;
        for (const auto& [who, amount] : plan.shares) {
            if (amount > Amount{}) credits[who] += amount;
            report.disbursements.push_back({plan.role->role_name, who, amount});
        }
        if (plan.unassigned > Amount{}) credits[treasury] += plan.unassigned;
        report.unassigned_to_treasury += plan.unassigned;
        std::vector<Entry> entries{{escrow, -plan.pool}};
        for (const auto& [who, amount] : credits) entries.push_back({who, amount});
        report.transactions.push_back(ledger_.append(TxKind::TaxDisbursement, std::move(entries),
                                                     memo({}, {}, "role pay: " + plan.role->role_name)));
        expected_escrow_ -= plan.pool;
    }

    const Amount rest = ledger_.balance(escrow);
    if (rest > Amount{}) {
        report.transactions.push_back(ledger_.transfer(TxKind::TaxDisbursement, escrow, treasury, rest,
                                                       memo({}, {}, "reserve sweep")));
        expected_escrow_ -= rest;
        report.reserve_sweep = rest;
    }
    phase_ = ConferencePhase::Closed;
    return report;
}

}  // namespace reviewcoin

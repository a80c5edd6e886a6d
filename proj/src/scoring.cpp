#include "silkstage/scoring.hpp"

#include <cmath>

#include "silkstage/errors.hpp"

namespace silkstage::scoring {

CreditLedger charge_motion(const CreditLedger& ledger, Arm arm, double grip_speed, double tick) {
    if (!(std::isfinite(grip_speed) && grip_speed >= 0.0))
        throw InvalidParameterError("grip_speed must be >= 0");
    CreditLedger out = ledger;
    double spend = ledger.motion_rate * grip_speed * tick;
    if (arm == Arm::A) {
        out.credit_a -= spend;
        out.motion_cost_a += spend;
    } else {
        out.credit_b -= spend;
        out.motion_cost_b += spend;
    }
    return out;
}

CreditLedger award_record(const CreditLedger& ledger, sensing::FirstMover mover) {
    CreditLedger out = ledger;
    switch (mover) {
    case sensing::FirstMover::Shared:
        out.credit_a += ledger.record_award / 2.0;
        out.credit_b += ledger.record_award / 2.0;
        out.awards_a += ledger.record_award / 2.0;
        out.awards_b += ledger.record_award / 2.0;
        break;
    case sensing::FirstMover::ArmA:
        out.credit_a += ledger.record_award;
        out.awards_a += ledger.record_award;
        break;
    case sensing::FirstMover::ArmB:
        out.credit_b += ledger.record_award;
        out.awards_b += ledger.record_award;
        break;
    }
    return out;
}

double reward(double awards, double spends, bool safety_flagged, double safety_penalty) {
    return awards - spends - (safety_flagged ? safety_penalty : 0.0);
}

bool audit(const CreditLedger& ledger, double tol) {
    return std::abs(ledger.credit_a - (ledger.awards_a - ledger.motion_cost_a)) <= tol &&
           std::abs(ledger.credit_b - (ledger.awards_b - ledger.motion_cost_b)) <= tol;
}

} // namespace silkstage::scoring

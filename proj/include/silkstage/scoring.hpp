#pragma once

#include "silkstage/sensing.hpp"

namespace silkstage::scoring {

struct ScoringConfig {
    double record_award = 10.0;  // credits per record event
    double motion_rate = 1.0;    // credits per metre of gripper path
    double safety_penalty = 20.0; // training-reward penalty per flagged interval
};

// Earn only on new records, spend on every motion. Lifetime totals are kept
// so the audit identity credit = awards - spends can be re-checked anywhere.
struct CreditLedger {
    double credit_a = 0.0;
    double credit_b = 0.0;
    double awards_a = 0.0;
    double awards_b = 0.0;
    double motion_cost_a = 0.0;
    double motion_cost_b = 0.0;
    double record_award = 10.0;
    double motion_rate = 1.0;
};

enum class Arm { A, B };

// spend = motion_rate * grip_speed * tick
CreditLedger charge_motion(const CreditLedger& ledger, Arm arm, double grip_speed, double tick);

// Shared pays half to each; otherwise the named arm takes it all.
CreditLedger award_record(const CreditLedger& ledger, sensing::FirstMover mover);

// Per-arm training reward for one interval.
double reward(double awards, double spends, bool safety_flagged, double safety_penalty = 20.0);

// awards - spends == credit, for both arms
bool audit(const CreditLedger& ledger, double tol = 1e-9);

} // namespace silkstage::scoring

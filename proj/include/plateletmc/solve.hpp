#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plateletmc/mdp.hpp"
#include "plateletmc/sparse_model.hpp"

namespace plateletmc {

// Order level chosen per decision-phase state index; -1 everywhere else.
struct TabularPolicy {
    std::vector<std::int32_t> order_for_state;

    bool covers(std::uint32_t state) const {
        return state < order_for_state.size() && order_for_state[state] >= 0;
    }
};

// Breadth-first closure of the full MDP from the configured initial state,
// with base labels attached. Numbering is discovery order under ascending
// action and successor iteration, so two runs produce identical models.
// Throws std::runtime_error with partial counts if max_states is exceeded.
SparseModel explore_full(const PlateletMdp& mdp, std::uint64_t max_states = 64ull << 20);

struct ReachResult {
    double at_initial = 0.0;
    std::vector<double> values;   // per state
    TabularPolicy policy;         // greedy argopt of the final sweep
    int iterations = 0;
};

// B-step optimal (min/max over action rows) probability of reaching a state
// carrying target_label. Target states absorb with value 1. Row sums are
// Kahan-compensated. Throws std::invalid_argument for undeclared labels or
// negative bounds.
ReachResult min_bounded_reach(const SparseModel& mdp, const std::string& target_label, int bound);
ReachResult max_bounded_reach(const SparseModel& mdp, const std::string& target_label, int bound);

struct CostPlanResult {
    std::vector<double> values;
    TabularPolicy policy;
    int iterations = 0;
    double delta = 0.0;           // sup-norm change of the final sweep
    bool converged = false;
};

// Discounted expected-cost value iteration (min over action rows) on the full
// MDP; the greedy policy of the final sweep is the distillation target. Stops
// when the greedy policy has been stable for `stable_sweeps` consecutive
// sweeps and the value change is below tol, or at max_iters.
CostPlanResult optimal_cost_policy(const SparseModel& mdp, const PlateletMdp& dyn,
                                   double discount = 0.99, int max_iters = 2000,
                                   double tol = 1e-9, int stable_sweeps = 10);

struct DistillSample {
    std::array<double, kNumFeatures> observation;
    int action = 0;               // order level
};

struct DistillDataset {
    int smax = 0;                 // needed to re-derive action masks from observations
    std::vector<DistillSample> samples;
};

// One (observation, order) pair per decision-phase state of the MDP. Throws
// std::invalid_argument if the policy leaves a decision state uncovered or
// chooses a disabled action.
DistillDataset distill_dataset(const SparseModel& mdp, const PlateletMdp& dyn,
                               const TabularPolicy& policy);

}  // namespace plateletmc

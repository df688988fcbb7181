#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plateletmc/config.hpp"
#include "plateletmc/inventory.hpp"

namespace plateletmc {

// Per-day truncated, renormalized Poisson demand mass function.
struct DemandDistribution {
    std::vector<double> p;  // p[k] for k = 0..kmax

    double mean() const;
    // Inverse-CDF sample for u in [0,1).
    int sample(double u) const;
};

// The platelet inventory MDP: dynamics, costs and labeling for one
// ModelConfig. All queries are pure; the demand pmfs are precomputed in the
// constructor so a const PlateletMdp is safe to share across threads.
class PlateletMdp {
  public:
    explicit PlateletMdp(ModelConfig cfg);

    const ModelConfig& config() const { return cfg_; }
    int smax() const { return cfg_.smax; }
    const InventoryState& initial() const { return cfg_.initial; }

    const DemandDistribution& demand_pmf(int day) const;

    // Enabled actions, deterministically ordered (Order(k) ascending; the
    // demand phase has the single dm move). Weekends allow only Order(0).
    std::vector<ActionId> enabled_actions(const InventoryState& s) const;

    // Ordering decision: stores k in pend and hands the turn to the demand
    // phase. Throws std::invalid_argument if Order(k) is not enabled in s.
    InventoryState apply_order(const InventoryState& s, int k) const;

    // Deterministic day-end update for a realized demand b: FIFO issuing,
    // outdating of leftover x1, aging, delivery of pend, day advance.
    InventoryState demand_step(const InventoryState& s, int b) const;

    // Full demand branch at ph=1: one entry per distinct successor, with
    // probabilities merged over demand values and summing to 1. Entries are
    // sorted by successor code. Throws std::invalid_argument at ph=0.
    std::vector<std::pair<double, InventoryState>> demand_transition(const InventoryState& s) const;

    // Successor distribution of an enabled action (singleton for orders).
    std::vector<std::pair<double, InventoryState>> successors(const InventoryState& s,
                                                              ActionId a) const;

    // Expected one-step penalty C_S*E[shortage] + C_O*E[outdating]; zero at
    // decision states. The RL reward is the negation of this value.
    double state_cost(const InventoryState& s) const;

    // Atomic propositions that hold in s: empty, full, weekend, monday,
    // friday, tinv_ge_T, decision.
    std::vector<std::string> base_labels(const InventoryState& s) const;

    bool is_valid(const InventoryState& s) const { return cfg_.valid_state(s); }

    // Mixed-radix bijection between valid states and [0, state_space_size()).
    // Digit order, most significant first: d, x1..x5, pend, ph.
    std::uint64_t encode(const InventoryState& s) const;
    InventoryState decode(std::uint64_t code) const;
    std::uint64_t state_space_size() const;

  private:
    ModelConfig cfg_;
    std::vector<DemandDistribution> pmf_;  // one per day of week
};

}  // namespace plateletmc

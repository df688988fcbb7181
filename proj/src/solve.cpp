#include "plateletmc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace plateletmc {

namespace {

// Compensated dot of a transition row with a value vector.
inline double row_value(const SparseModel::RowSpan& row, const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < row.size; ++i) {
        const double y = row.prob[i] * v[row.dst[i]] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void attach_base_labels(SparseModel& model, const PlateletMdp& mdp) {
    // Declare the full base vocabulary up front so empty labels stay queryable.
    for (const char* name :
         {"empty", "full", "weekend", "monday", "friday", "tinv_ge_T", "decision"})
        model.ensure_label(name);
    for (std::uint32_t s = 0; s < model.num_states(); ++s) {
        const InventoryState st = mdp.decode(model.state_codes[s]);
        for (const auto& name : mdp.base_labels(st)) model.set_label(model.label_index.at(name), s);
    }
}

}  // namespace

SparseModel explore_full(const PlateletMdp& mdp, std::uint64_t max_states) {
    SparseModel model;
    model.kind = SparseModel::Kind::mdp;
    model.initial = 0;

    std::unordered_map<std::uint64_t, std::uint32_t> index_of;
    auto intern = [&](const InventoryState& s) -> std::uint32_t {
        const std::uint64_t code = mdp.encode(s);
        auto [it, inserted] = index_of.try_emplace(code,
                                                   static_cast<std::uint32_t>(model.num_states()));
        if (inserted) {
            model.state_codes.push_back(code);
            if (model.num_states() > max_states)
                throw std::runtime_error(
                    "explore_full: state budget exceeded after " +
                    std::to_string(model.num_states()) + " states / " +
                    std::to_string(model.num_transitions()) + " transitions");
        }
        return it->second;
    };

    intern(mdp.initial());
    model.row_begin.push_back(0);
    // The queue is just the next unprocessed index: states are expanded in
    // discovery order, so rows are laid out in state order.
    for (std::uint32_t s = 0; s < model.num_states(); ++s) {
        const InventoryState state = mdp.decode(model.state_codes[s]);
        for (const ActionId& a : mdp.enabled_actions(state)) {
            model.row_action.push_back(a.is_order() ? a.level() : -1);
            model.tr_begin.push_back(model.tr_dst.size());
            for (const auto& [prob, nxt] : mdp.successors(state, a)) {
                model.tr_dst.push_back(intern(nxt));
                model.tr_prob.push_back(prob);
            }
        }
        model.row_begin.push_back(static_cast<std::uint32_t>(model.num_rows()));
    }
    model.tr_begin.push_back(model.tr_dst.size());

    attach_base_labels(model, mdp);
    return model;
}

namespace {

ReachResult opt_bounded_reach(const SparseModel& mdp, const std::string& target_label, int bound,
                              bool minimize) {
    if (bound < 0) throw std::invalid_argument("bounded reach: bound must be >= 0");
    const std::vector<char> target = mdp.label_mask(target_label);
    const std::size_t n = mdp.num_states();

    ReachResult result;
    result.values.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        if (target[s]) result.values[s] = 1.0;

    std::vector<double> next(n, 0.0);
    for (int it = 0; it < bound; ++it) {
        for (std::uint32_t s = 0; s < n; ++s) {
            if (target[s]) {
                next[s] = 1.0;
                continue;
            }
            double best = minimize ? 2.0 : -1.0;
            for (std::uint32_t r = mdp.row_begin[s]; r < mdp.row_begin[s + 1]; ++r) {
                const double q = row_value(mdp.row(r), result.values);
                if (minimize ? q < best : q > best) best = q;
            }
            next[s] = best;
        }
        result.values.swap(next);
        ++result.iterations;
    }
    // Greedy extraction against the final values, covering every state
    // (including absorbing targets, where any enabled choice is optimal).
    result.policy.order_for_state.assign(n, -1);
    for (std::uint32_t s = 0; s < n; ++s) {
        double best = minimize ? 2.0 : -1.0;
        std::int32_t best_action = -1;
        for (std::uint32_t r = mdp.row_begin[s]; r < mdp.row_begin[s + 1]; ++r) {
            const auto span = mdp.row(r);
            const double q = row_value(span, result.values);
            if (minimize ? q < best : q > best) {
                best = q;
                best_action = span.action;
            }
        }
        result.policy.order_for_state[s] = best_action;
    }
    result.at_initial = result.values[mdp.initial];
    return result;
}

}  // namespace

ReachResult min_bounded_reach(const SparseModel& mdp, const std::string& target_label, int bound) {
    return opt_bounded_reach(mdp, target_label, bound, true);
}

ReachResult max_bounded_reach(const SparseModel& mdp, const std::string& target_label, int bound) {
    return opt_bounded_reach(mdp, target_label, bound, false);
}

CostPlanResult optimal_cost_policy(const SparseModel& mdp, const PlateletMdp& dyn, double discount,
                                   int max_iters, double tol, int stable_sweeps) {
    if (discount < 0.0 || discount >= 1.0)
        throw std::invalid_argument("optimal_cost_policy: discount must be in [0, 1)");
    const std::size_t n = mdp.num_states();
    std::vector<double> cost(n);
    for (std::uint32_t s = 0; s < n; ++s)
        cost[s] = dyn.state_cost(dyn.decode(mdp.state_codes[s]));

    CostPlanResult result;
    result.values.assign(n, 0.0);
    result.policy.order_for_state.assign(n, -1);
    std::vector<double> next(n, 0.0);
    std::vector<std::int32_t> prev_choice(n, INT32_MIN);

    int stable = 0;
    for (int it = 0; it < max_iters; ++it) {
        bool policy_changed = false;
        double delta = 0.0;
        for (std::uint32_t s = 0; s < n; ++s) {
            double best = std::numeric_limits<double>::infinity();
            std::int32_t best_action = -1;
            for (std::uint32_t r = mdp.row_begin[s]; r < mdp.row_begin[s + 1]; ++r) {
                const auto span = mdp.row(r);
                const double q = row_value(span, result.values);
                if (q < best) {
                    best = q;
                    best_action = span.action;
                }
            }
            next[s] = cost[s] + discount * best;
            delta = std::max(delta, std::abs(next[s] - result.values[s]));
            if (best_action != prev_choice[s]) {
                policy_changed = true;
                prev_choice[s] = best_action;
            }
        }
        result.values.swap(next);
        ++result.iterations;
        result.delta = delta;
        stable = policy_changed ? 0 : stable + 1;
        if (stable >= stable_sweeps || delta <= tol) {
            result.converged = true;
            break;
        }
    }
    result.policy.order_for_state = prev_choice;
    for (auto& a : result.policy.order_for_state)
        if (a == INT32_MIN) a = -1;
    return result;
}

DistillDataset distill_dataset(const SparseModel& mdp, const PlateletMdp& dyn,
                               const TabularPolicy& policy) {
    DistillDataset dataset;
    dataset.smax = dyn.smax();
    dataset.samples.reserve(mdp.num_states() / 2);
    for (std::uint32_t s = 0; s < mdp.num_states(); ++s) {
        const InventoryState state = dyn.decode(mdp.state_codes[s]);
        if (state.ph != 0) continue;
        if (!policy.covers(s))
            throw std::invalid_argument("distill_dataset: decision state " + std::to_string(s) +
                                        " is not covered by the tabular policy");
        const int k = policy.order_for_state[s];
        if ((state.d >= 5 && k != 0) || state.tinv() + k > dyn.smax())
            throw std::invalid_argument("distill_dataset: disabled action Order(" +
                                        std::to_string(k) + ") chosen in state " +
                                        state.to_string());
        dataset.samples.push_back({state.observation(), k});
    }
    return dataset;
}

}  // namespace plateletmc

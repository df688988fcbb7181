#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plateletmc/inventory.hpp"
#include "plateletmc/mdp.hpp"

namespace plateletmc {

// Feed-forward ordering policy: rectifier hidden layers, identity output
// scores, one score per Order(k). Observations are the raw integer state
// features in the fixed order [d, x1..x5, pend, ph] — no normalization, so
// zeroing a first-layer column is exactly "feature forced to 0".
class MlpPolicy {
  public:
    struct Layer {
        Eigen::MatrixXd w;  // (out x in); w(j, i) connects input i to unit j
        Eigen::VectorXd b;  // (out)
    };

    // Zero-initialized network with the given layer widths.
    explicit MlpPolicy(std::vector<int> dims);

    // Uniform fan-in initialization: U(-1/sqrt(in), 1/sqrt(in)), seeded.
    static MlpPolicy random_init(const std::vector<int>& dims, std::uint64_t seed);

    const std::vector<int>& dims() const { return dims_; }
    int input_width() const { return dims_.front(); }
    int output_width() const { return dims_.back(); }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    // Scores for one observation. Throws std::invalid_argument on width
    // mismatch. Pure and deterministic.
    Eigen::VectorXd forward(const Eigen::VectorXd& obs) const;
    Eigen::VectorXd forward(const std::array<double, kNumFeatures>& obs) const;

    // Scores for a batch of observations stored as columns (in x n) -> (out x n).
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& obs) const;

    // Copy with every first-layer weight of input feature i set to zero.
    MlpPolicy pruned(int feature) const;

    bool same_shape(const MlpPolicy& o) const { return dims_ == o.dims_; }

  private:
    std::vector<int> dims_;
    std::vector<Layer> layers_;
};

// Explanation transforms applied around the raw network: feature pruning
// (first-layer columns zeroed) and counterfactual action replacement
// (Order(j) -> Order(j') wherever j is selected).
struct PolicyTransform {
    std::vector<int> pruned_features;       // subset of 0..7
    std::map<int, int> replacement;         // order level -> order level

    bool empty() const { return pruned_features.empty() && replacement.empty(); }
};

// Deterministic masked selection: at ph=1 the dm move; otherwise the enabled
// Order(k) with the highest score, ties toward the smallest k, then the
// replacement map (falling back to the largest enabled order <= target when
// the target is disabled). `enabled` must be nonempty.
ActionId select_action(const MlpPolicy& policy, const PolicyTransform& transform,
                       const InventoryState& state, const std::vector<ActionId>& enabled);

// Masked argmax over a precomputed score vector (selection rule shared with
// select_action; exposed for batched callers).
int masked_argmax_order(const Eigen::VectorXd& scores, const std::vector<ActionId>& enabled);

// Per-state permutation-importance labels over decision-phase states:
// "imp_<feature>" for the feature whose column permutation most often changes
// the selected action (ties toward the smallest feature index), or "imp_none"
// if no permutation in any round changes it. Deterministic given seed; feature
// streams are derived independently so results do not depend on evaluation
// order. Throws std::invalid_argument if states is empty or rounds < 1.
std::vector<std::string> permutation_importance(const MlpPolicy& policy, const PlateletMdp& mdp,
                                                const std::vector<InventoryState>& states,
                                                int rounds, std::uint64_t seed);

// Weight-file round trip (JSON; see README for the schema). load_policy
// throws std::runtime_error naming the offending layer/field on malformed or
// inconsistent input.
void save_policy(const MlpPolicy& policy, const std::string& path);
MlpPolicy load_policy(const std::string& path);

std::string policy_to_json(const MlpPolicy& policy);
MlpPolicy policy_from_json(const std::string& text);

}  // namespace plateletmc

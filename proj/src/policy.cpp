#include "plateletmc/policy.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "plateletmc/rng.hpp"

namespace plateletmc {

using nlohmann::json;

MlpPolicy::MlpPolicy(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("MlpPolicy: need at least two layer widths");
    for (int w : dims_)
        if (w < 1) throw std::invalid_argument("MlpPolicy: layer widths must be >= 1");
    layers_.reserve(dims_.size() - 1);
    for (std::size_t l = 1; l < dims_.size(); ++l)
        layers_.push_back({Eigen::MatrixXd::Zero(dims_[l], dims_[l - 1]),
                           Eigen::VectorXd::Zero(dims_[l])});
}

MlpPolicy MlpPolicy::random_init(const std::vector<int>& dims, std::uint64_t seed) {
    MlpPolicy p(dims);
    SplitMix64 rng(seed);
    for (auto& layer : p.layers_) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(layer.w.cols()));
        for (Eigen::Index j = 0; j < layer.w.rows(); ++j)
            for (Eigen::Index i = 0; i < layer.w.cols(); ++i)
                layer.w(j, i) = (2.0 * rng.next_double() - 1.0) * scale;
        layer.b.setZero();
    }
    return p;
}

Eigen::VectorXd MlpPolicy::forward(const Eigen::VectorXd& obs) const {
    if (obs.size() != input_width())
        throw std::invalid_argument("forward: observation width " + std::to_string(obs.size()) +
                                    " does not match input width " +
                                    std::to_string(input_width()));
    Eigen::VectorXd h = obs;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = (layers_[l].w * h + layers_[l].b).eval();
        if (l + 1 < layers_.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

Eigen::VectorXd MlpPolicy::forward(const std::array<double, kNumFeatures>& obs) const {
    Eigen::VectorXd v(kNumFeatures);
    for (int i = 0; i < kNumFeatures; ++i) v(i) = obs[static_cast<std::size_t>(i)];
    return forward(v);
}

Eigen::MatrixXd MlpPolicy::forward_batch(const Eigen::MatrixXd& obs) const {
    if (obs.rows() != input_width())
        throw std::invalid_argument("forward_batch: observation width mismatch");
    Eigen::MatrixXd h = obs;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = ((layers_[l].w * h).colwise() + layers_[l].b).eval();
        if (l + 1 < layers_.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

MlpPolicy MlpPolicy::pruned(int feature) const {
    if (feature < 0 || feature >= input_width())
        throw std::invalid_argument("pruned: feature index out of range");
    MlpPolicy copy = *this;
    copy.layers_[0].w.col(feature).setZero();
    return copy;
}

int masked_argmax_order(const Eigen::VectorXd& scores, const std::vector<ActionId>& enabled) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const ActionId& a : enabled) {
        if (!a.is_order()) continue;
        const int k = a.level();
        if (k >= scores.size())
            throw std::invalid_argument("masked_argmax_order: enabled order " + std::to_string(k) +
                                        " exceeds the policy's output width");
        // Strict > keeps the smallest level on ties (enabled is ascending).
        if (best < 0 || scores(k) > best_score) {
            best = k;
            best_score = scores(k);
        }
    }
    if (best < 0) throw std::invalid_argument("masked_argmax_order: no enabled order action");
    return best;
}

namespace {

// Pruning a first-layer column is numerically identical to zeroing the
// corresponding observation entry, which avoids copying weight matrices on
// every selection.
void apply_pruning_to_obs(Eigen::VectorXd& obs, const PolicyTransform& t) {
    for (int f : t.pruned_features) {
        if (f < 0 || f >= obs.size())
            throw std::invalid_argument("transform: pruned feature index out of range");
        obs(f) = 0.0;
    }
}

int apply_replacement(int k, const PolicyTransform& t, const std::vector<ActionId>& enabled) {
    auto it = t.replacement.find(k);
    if (it == t.replacement.end()) return k;
    const int target = it->second;
    // Fall back to the largest enabled order <= target if the target itself
    // is disabled; enabled orders are ascending.
    int fallback = -1;
    for (const ActionId& a : enabled) {
        if (!a.is_order()) continue;
        if (a.level() == target) return target;
        if (a.level() < target) fallback = a.level();
    }
    if (fallback < 0)
        throw std::invalid_argument("transform: no enabled order <= replacement target " +
                                    std::to_string(target));
    return fallback;
}

}  // namespace

ActionId select_action(const MlpPolicy& policy, const PolicyTransform& transform,
                       const InventoryState& state, const std::vector<ActionId>& enabled) {
    if (enabled.empty()) throw std::invalid_argument("select_action: enabled set is empty");
    if (state.ph == 1) return ActionId::demand_move();
    Eigen::VectorXd obs(kNumFeatures);
    const auto raw = state.observation();
    for (int i = 0; i < kNumFeatures; ++i) obs(i) = raw[static_cast<std::size_t>(i)];
    apply_pruning_to_obs(obs, transform);
    const int k = masked_argmax_order(policy.forward(obs), enabled);
    return ActionId::order(apply_replacement(k, transform, enabled));
}

std::vector<std::string> permutation_importance(const MlpPolicy& policy, const PlateletMdp& mdp,
                                                const std::vector<InventoryState>& states,
                                                int rounds, std::uint64_t seed) {
    if (states.empty()) throw std::invalid_argument("permutation_importance: no states");
    if (rounds < 1) throw std::invalid_argument("permutation_importance: rounds must be >= 1");
    const std::size_t n = states.size();

    Eigen::MatrixXd obs(kNumFeatures, static_cast<Eigen::Index>(n));
    std::vector<std::vector<ActionId>> enabled(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (states[j].ph != 0)
            throw std::invalid_argument("permutation_importance: states must be decision-phase");
        const auto raw = states[j].observation();
        for (int i = 0; i < kNumFeatures; ++i)
            obs(i, static_cast<Eigen::Index>(j)) = raw[static_cast<std::size_t>(i)];
        enabled[j] = mdp.enabled_actions(states[j]);
    }

    const Eigen::MatrixXd base_scores = policy.forward_batch(obs);
    std::vector<int> baseline(n);
    for (std::size_t j = 0; j < n; ++j)
        baseline[j] = masked_argmax_order(base_scores.col(static_cast<Eigen::Index>(j)),
                                          enabled[j]);

    std::vector<std::array<long, kNumFeatures>> change_counts(n);
    for (auto& c : change_counts) c.fill(0);

    std::vector<std::size_t> perm(n);
    for (int feature = 0; feature < kNumFeatures; ++feature) {
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(feature)));
        for (int round = 0; round < rounds; ++round) {
            // Fisher-Yates over the column of this feature.
            for (std::size_t j = 0; j < n; ++j) perm[j] = j;
            for (std::size_t j = n; j > 1; --j) {
                const std::size_t r = rng.next_below(j);
                std::swap(perm[j - 1], perm[r]);
            }
            Eigen::MatrixXd shuffled = obs;
            for (std::size_t j = 0; j < n; ++j)
                shuffled(feature, static_cast<Eigen::Index>(j)) =
                    obs(feature, static_cast<Eigen::Index>(perm[j]));
            const Eigen::MatrixXd scores = policy.forward_batch(shuffled);
            for (std::size_t j = 0; j < n; ++j) {
                const int a = masked_argmax_order(scores.col(static_cast<Eigen::Index>(j)),
                                                  enabled[j]);
                if (a != baseline[j]) ++change_counts[j][static_cast<std::size_t>(feature)];
            }
        }
    }

    std::vector<std::string> labels(n);
    for (std::size_t j = 0; j < n; ++j) {
        int best = -1;
        long best_count = 0;
        for (int i = 0; i < kNumFeatures; ++i) {
            const long c = change_counts[j][static_cast<std::size_t>(i)];
            if (c > best_count) {  // strict > keeps the smallest index on ties
                best = i;
                best_count = c;
            }
        }
        labels[j] = best < 0 ? "imp_none"
                             : std::string("imp_") + kFeatureNames[static_cast<std::size_t>(best)];
    }
    return labels;
}

std::string policy_to_json(const MlpPolicy& policy) {
    json j;
    j["dims"] = policy.dims();
    j["activation"] = "relu";
    j["features"] = kFeatureNames;
    json layers = json::array();
    for (const auto& layer : policy.layers()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) row.push_back(layer.w(r, c));
            rows.push_back(std::move(row));
        }
        json bias = json::array();
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) bias.push_back(layer.b(r));
        layers.push_back({{"w", std::move(rows)}, {"b", std::move(bias)}});
    }
    j["layers"] = std::move(layers);
    return j.dump();
}

MlpPolicy policy_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("policy: ") + e.what());
    }
    if (!j.contains("dims") || !j.contains("layers"))
        throw std::runtime_error("policy: missing 'dims' or 'layers'");
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    MlpPolicy policy(dims);
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != dims.size() - 1)
        throw std::runtime_error("policy: expected " + std::to_string(dims.size() - 1) +
                                 " layers, got " + std::to_string(layers.size()));
    if (j.contains("activation") && j.at("activation") != "relu")
        throw std::runtime_error("policy: unsupported activation '" +
                                 j.at("activation").get<std::string>() + "'");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = "policy layer " + std::to_string(l);
        const auto& jw = layers[l].at("w");
        const auto& jb = layers[l].at("b");
        const auto rows = static_cast<std::size_t>(dims[l + 1]);
        const auto cols = static_cast<std::size_t>(dims[l]);
        if (!jw.is_array() || jw.size() != rows)
            throw std::runtime_error(where + ": weight row count does not match dims");
        auto& layer = policy.layers()[l];
        for (std::size_t r = 0; r < rows; ++r) {
            if (!jw[r].is_array() || jw[r].size() != cols)
                throw std::runtime_error(where + ": weight row " + std::to_string(r) +
                                         " does not match dims");
            for (std::size_t c = 0; c < cols; ++c)
                layer.w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    jw[r][c].get<double>();
        }
        if (!jb.is_array() || jb.size() != rows)
            throw std::runtime_error(where + ": bias length does not match dims");
        for (std::size_t r = 0; r < rows; ++r)
            layer.b(static_cast<Eigen::Index>(r)) = jb[r].get<double>();
    }
    return policy;
}

void save_policy(const MlpPolicy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("policy: cannot write '" + path + "'");
    out << policy_to_json(policy) << "\n";
}

MlpPolicy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("policy: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return policy_from_json(text);
}

}  // namespace plateletmc

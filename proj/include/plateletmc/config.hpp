#pragma once

#include <array>
#include <string>

#include "plateletmc/inventory.hpp"

namespace plateletmc {

// Model parameters of the platelet inventory process. Defaults reproduce the
// regional-blood-bank instance (weekly demand pattern in aggregated units,
// 5:1 shortage-to-outdating cost ratio, capacity 30).
struct ModelConfig {
    int smax = 30;                  // inventory capacity, in aggregated units
    int kmax = 20;                  // demand truncation bound
    std::array<double, kDaysPerWeek> lambda = {6.5, 5.0, 8.0, 5.0, 6.5, 1.75, 3.25};
    double cost_shortage = 5.0;     // C_S, per unit of unmet demand
    double cost_outdate = 1.0;      // C_O, per unit expired unused
    InventoryState initial = {0, {2, 2, 2, 2, 2}, 0, 0};
    int lowstock_threshold = 5;     // T in the parametric label "tinv_ge_T"

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;

    bool valid_state(const InventoryState& s) const;
};

// Reads a configuration file. JSON and TOML are both accepted; the format is
// chosen by extension (.toml) or by sniffing the first non-space character.
// Missing keys keep their defaults. Throws std::runtime_error with a
// location-bearing message on malformed input.
ModelConfig load_model_config(const std::string& path);
ModelConfig parse_model_config_json(const std::string& text);
ModelConfig parse_model_config_toml(const std::string& text);

std::string model_config_to_json(const ModelConfig& cfg);

}  // namespace plateletmc

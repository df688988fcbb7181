#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace plateletmc {

inline constexpr int kNumFeatures = 8;
inline constexpr int kDaysPerWeek = 7;

// Feature order of policy observations: [d, x1, x2, x3, x4, x5, pend, ph].
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "d", "x1", "x2", "x3", "x4", "x5", "pend", "ph"};

// One state of the platelet inventory process.
//
//   d     day of week, 0 = Monday .. 6 = Sunday
//   x[r]  units with r+1 days of residual shelf life (x[0] expires tonight)
//   pend  units ordered today, delivered tomorrow morning
//   ph    0 = ordering decision pending, 1 = demand realization pending
struct InventoryState {
    int d = 0;
    std::array<int, 5> x{};
    int pend = 0;
    int ph = 0;

    int tinv() const { return x[0] + x[1] + x[2] + x[3] + x[4]; }

    bool operator==(const InventoryState&) const = default;

    std::array<double, kNumFeatures> observation() const {
        return {static_cast<double>(d),    static_cast<double>(x[0]),
                static_cast<double>(x[1]), static_cast<double>(x[2]),
                static_cast<double>(x[3]), static_cast<double>(x[4]),
                static_cast<double>(pend), static_cast<double>(ph)};
    }

    std::string to_string() const;
};

// An MDP action: either Order(k) ("pr_k", enabled at ph=0) or the single
// demand-realization move "dm" (enabled at ph=1).
class ActionId {
  public:
    static ActionId order(int k) { return ActionId(k); }
    static ActionId demand_move() { return ActionId(-1); }

    bool is_order() const { return level_ >= 0; }
    bool is_demand_move() const { return level_ < 0; }

    // Order level; only meaningful for is_order().
    int level() const { return level_; }

    // Label form: "pr_<k>" or "dm".
    std::string name() const;

    bool operator==(const ActionId&) const = default;
    // Orders sort by level; dm sorts last.
    bool operator<(const ActionId& o) const {
        return key() < o.key();
    }

  private:
    explicit ActionId(int level) : level_(level) {}
    int key() const { return level_ < 0 ? INT32_MAX : level_; }
    int level_;
};

}  // namespace plateletmc

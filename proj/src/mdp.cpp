#include "plateletmc/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plateletmc {

std::string InventoryState::to_string() const {
    std::ostringstream os;
    os << "(d=" << d << ", x=[" << x[0] << "," << x[1] << "," << x[2] << "," << x[3] << ","
       << x[4] << "], pend=" << pend << ", ph=" << ph << ")";
    return os.str();
}

std::string ActionId::name() const {
    return is_order() ? "pr_" + std::to_string(level_) : "dm";
}

double DemandDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
    return m;
}

int DemandDistribution::sample(double u) const {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        acc += p[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(p.size()) - 1;
}

namespace {

// Truncated Poisson via the stable recurrence w_0 = 1, w_k = w_{k-1} * lambda/k,
// normalized over k = 0..kmax.
DemandDistribution build_pmf(double lambda, int kmax) {
    DemandDistribution dist;
    dist.p.resize(static_cast<std::size_t>(kmax) + 1);
    double w = 1.0;
    double total = 1.0;
    dist.p[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        w *= lambda / static_cast<double>(k);
        dist.p[static_cast<std::size_t>(k)] = w;
        total += w;
    }
    for (auto& v : dist.p) v /= total;
    return dist;
}

}  // namespace

PlateletMdp::PlateletMdp(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    pmf_.reserve(kDaysPerWeek);
    for (int day = 0; day < kDaysPerWeek; ++day)
        pmf_.push_back(build_pmf(cfg_.lambda[static_cast<std::size_t>(day)], cfg_.kmax));
}

const DemandDistribution& PlateletMdp::demand_pmf(int day) const {
    if (day < 0 || day >= kDaysPerWeek)
        throw std::invalid_argument("demand_pmf: day must be in 0..6, got " + std::to_string(day));
    return pmf_[static_cast<std::size_t>(day)];
}

std::vector<ActionId> PlateletMdp::enabled_actions(const InventoryState& s) const {
    if (s.ph == 1) return {ActionId::demand_move()};
    if (s.d >= 5) return {ActionId::order(0)};  // no weekend ordering
    std::vector<ActionId> acts;
    const int room = cfg_.smax - s.tinv();
    acts.reserve(static_cast<std::size_t>(room) + 1);
    for (int k = 0; k <= room; ++k) acts.push_back(ActionId::order(k));
    return acts;
}

InventoryState PlateletMdp::apply_order(const InventoryState& s, int k) const {
    if (s.ph != 0)
        throw std::invalid_argument("apply_order: ordering is only possible at ph=0");
    if (k < 0 || (s.d >= 5 && k != 0) || s.tinv() + k > cfg_.smax)
        throw std::invalid_argument("apply_order: Order(" + std::to_string(k) +
                                    ") is not enabled in " + s.to_string());
    InventoryState next = s;
    next.pend = k;
    next.ph = 1;
    return next;
}

InventoryState PlateletMdp::demand_step(const InventoryState& s, int b) const {
    // FIFO issuing: leftover_r = max(0, x_r - max(0, b - sum_{i<r} x_i)).
    std::array<int, 5> leftover{};
    int served_before = 0;  // sum of x_i for i < r
    for (int r = 0; r < 5; ++r) {
        leftover[static_cast<std::size_t>(r)] =
            std::max(0, s.x[static_cast<std::size_t>(r)] - std::max(0, b - served_before));
        served_before += s.x[static_cast<std::size_t>(r)];
    }
    // leftover[0] outdates; everything else ages one day; pend is delivered.
    InventoryState next;
    next.d = (s.d + 1) % kDaysPerWeek;
    next.x = {leftover[1], leftover[2], leftover[3], leftover[4], s.pend};
    next.pend = 0;
    next.ph = 0;
    return next;
}

std::vector<std::pair<double, InventoryState>> PlateletMdp::demand_transition(
    const InventoryState& s) const {
    if (s.ph != 1)
        throw std::invalid_argument("demand_transition: demand realizes only at ph=1");
    const DemandDistribution& dist = demand_pmf(s.d);
    // Merge demand values with identical successors; since the successor is
    // monotone in b, entries come out grouped in encounter order already, but
    // merging by code keeps it robust. Small list, linear scan is fine.
    std::vector<std::pair<double, InventoryState>> out;
    std::vector<std::uint64_t> codes;
    out.reserve(dist.p.size());
    codes.reserve(dist.p.size());
    for (int b = 0; b <= cfg_.kmax; ++b) {
        const InventoryState nxt = demand_step(s, b);
        const std::uint64_t code = encode(nxt);
        bool merged = false;
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (codes[i] == code) {
                out[i].first += dist.p[static_cast<std::size_t>(b)];
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.emplace_back(dist.p[static_cast<std::size_t>(b)], nxt);
            codes.push_back(code);
        }
    }
    // Sort by successor code for deterministic downstream numbering.
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return codes[a] < codes[b]; });
    std::vector<std::pair<double, InventoryState>> sorted;
    sorted.reserve(out.size());
    for (std::size_t i : order) sorted.push_back(out[i]);
    return sorted;
}

std::vector<std::pair<double, InventoryState>> PlateletMdp::successors(const InventoryState& s,
                                                                       ActionId a) const {
    if (a.is_demand_move()) return demand_transition(s);
    return {{1.0, apply_order(s, a.level())}};
}

double PlateletMdp::state_cost(const InventoryState& s) const {
    if (s.ph == 0) return 0.0;
    const DemandDistribution& dist = demand_pmf(s.d);
    const int tinv = s.tinv();
    const int oldest = s.x[0];
    double shortage = 0.0;
    double outdate = 0.0;
    for (int k = 0; k <= cfg_.kmax; ++k) {
        const double pk = dist.p[static_cast<std::size_t>(k)];
        if (k > tinv) shortage += pk * static_cast<double>(k - tinv);
        if (oldest > k) outdate += pk * static_cast<double>(oldest - k);
    }
    return cfg_.cost_shortage * shortage + cfg_.cost_outdate * outdate;
}

std::vector<std::string> PlateletMdp::base_labels(const InventoryState& s) const {
    std::vector<std::string> labels;
    const int tinv = s.tinv();
    if (tinv == 0) labels.emplace_back("empty");
    if (tinv == cfg_.smax) labels.emplace_back("full");
    if (s.d >= 5) labels.emplace_back("weekend");
    if (s.d == 0) labels.emplace_back("monday");
    if (s.d == 4) labels.emplace_back("friday");
    if (tinv >= cfg_.lowstock_threshold) labels.emplace_back("tinv_ge_T");
    if (s.ph == 0) labels.emplace_back("decision");
    return labels;
}

std::uint64_t PlateletMdp::encode(const InventoryState& s) const {
    const std::uint64_t radix = static_cast<std::uint64_t>(cfg_.smax) + 1;
    std::uint64_t code = static_cast<std::uint64_t>(s.d);
    for (int r = 0; r < 5; ++r)
        code = code * radix + static_cast<std::uint64_t>(s.x[static_cast<std::size_t>(r)]);
    code = code * radix + static_cast<std::uint64_t>(s.pend);
    code = code * 2 + static_cast<std::uint64_t>(s.ph);
    return code;
}

InventoryState PlateletMdp::decode(std::uint64_t code) const {
    if (code >= state_space_size())
        throw std::invalid_argument("decode: code " + std::to_string(code) +
                                    " is outside the state space");
    const std::uint64_t radix = static_cast<std::uint64_t>(cfg_.smax) + 1;
    InventoryState s;
    s.ph = static_cast<int>(code % 2);
    code /= 2;
    s.pend = static_cast<int>(code % radix);
    code /= radix;
    for (int r = 4; r >= 0; --r) {
        s.x[static_cast<std::size_t>(r)] = static_cast<int>(code % radix);
        code /= radix;
    }
    s.d = static_cast<int>(code);
    return s;
}

std::uint64_t PlateletMdp::state_space_size() const {
    const std::uint64_t radix = static_cast<std::uint64_t>(cfg_.smax) + 1;
    std::uint64_t size = kDaysPerWeek;
    for (int i = 0; i < 6; ++i) size *= radix;  // x1..x5 and pend
    return size * 2;
}

}  // namespace plateletmc

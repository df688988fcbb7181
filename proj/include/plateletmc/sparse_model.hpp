#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plateletmc/mdp.hpp"

namespace plateletmc {

// Indexed sparse transition structure, used both as the full MDP (one row per
// enabled action) and as an induced DTMC (exactly one row per state).
// Transitions are stored CSR-style: states own a contiguous span of action
// rows, rows own a contiguous span of (dst, prob) pairs.
//
// Labels are stored as one bitset per label name; labeling happens after the
// state set is frozen.
struct SparseModel {
    enum class Kind { mdp, dtmc };

    Kind kind = Kind::dtmc;
    std::uint32_t initial = 0;

    std::vector<std::uint64_t> state_codes;   // canonical state code per index

    std::vector<std::uint32_t> row_begin;     // per state -> first row; size n+1
    std::vector<std::int32_t> row_action;     // per row: order level, or -1 for dm
    std::vector<std::uint64_t> tr_begin;      // per row -> first transition; size rows+1
    std::vector<std::uint32_t> tr_dst;
    std::vector<double> tr_prob;

    std::vector<std::string> label_names;
    std::unordered_map<std::string, std::uint32_t> label_index;
    std::vector<std::vector<std::uint64_t>> label_bits;  // per label; n bits

    std::size_t num_states() const { return state_codes.size(); }
    std::size_t num_rows() const { return row_action.size(); }
    std::size_t num_transitions() const { return tr_dst.size(); }

    // --- labels ---------------------------------------------------------

    // Declares the label if new; returns its id. A declared label may be
    // empty, which is distinct from an undeclared one.
    std::uint32_t ensure_label(const std::string& name);
    bool has_label(const std::string& name) const { return label_index.count(name) > 0; }
    void set_label(std::uint32_t label, std::uint32_t state);
    bool state_has_label(std::uint32_t label, std::uint32_t state) const;
    std::vector<std::string> labels_of(std::uint32_t state) const;
    // Membership mask of a declared label; throws std::invalid_argument
    // naming the atom when undeclared.
    std::vector<char> label_mask(const std::string& name) const;

    // --- structure ------------------------------------------------------

    struct RowSpan {
        std::int32_t action;
        const std::uint32_t* dst;
        const double* prob;
        std::size_t size;
    };
    std::uint32_t rows_of(std::uint32_t state) const { return row_begin[state + 1] - row_begin[state]; }
    RowSpan row(std::uint32_t row_id) const;
    // The unique row of a DTMC state.
    RowSpan dtmc_row(std::uint32_t state) const;

    // Checks row stochasticity (within tol), index ranges, kind arity and the
    // presence of the initial state. Throws std::logic_error on violation.
    void validate(double tol = 1e-12) const;
};

// --- explicit-format import/export -------------------------------------
//
// <prefix>.tra   one line per transition: `src dst prob` (DTMC) or
//                `src action dst prob` (MDP, action by name, e.g. pr_4 / dm);
//                probabilities printed with 17 significant digits so values
//                round-trip bit-exactly.
// <prefix>.lab   one line per state: `idx label1 label2 ...` (states without
//                labels are still listed); a leading `#DECLARED name...` line
//                lists every declared label so empty labels survive the trip.
// <prefix>.json  kind, initial state, counts and the state codes.

void write_explicit(const SparseModel& model, const std::string& prefix);
SparseModel read_explicit(const std::string& prefix);

// State-table dump (CSV: index, d, x1..x5, pend, ph, labels separated by
// spaces) for induced models; `mdp` provides the decoding.
void write_state_table(const SparseModel& model, const PlateletMdp& mdp, const std::string& path);

}  // namespace plateletmc

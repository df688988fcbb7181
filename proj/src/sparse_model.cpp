#include "plateletmc/sparse_model.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace plateletmc {

using nlohmann::json;

std::uint32_t SparseModel::ensure_label(const std::string& name) {
    auto it = label_index.find(name);
    if (it != label_index.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(label_names.size());
    label_index.emplace(name, id);
    label_names.push_back(name);
    label_bits.emplace_back((num_states() + 63) / 64, 0ULL);
    return id;
}

void SparseModel::set_label(std::uint32_t label, std::uint32_t state) {
    label_bits[label][state >> 6] |= 1ULL << (state & 63);
}

bool SparseModel::state_has_label(std::uint32_t label, std::uint32_t state) const {
    return (label_bits[label][state >> 6] >> (state & 63)) & 1ULL;
}

std::vector<std::string> SparseModel::labels_of(std::uint32_t state) const {
    std::vector<std::string> out;
    for (std::uint32_t l = 0; l < label_names.size(); ++l)
        if (state_has_label(l, state)) out.push_back(label_names[l]);
    return out;
}

std::vector<char> SparseModel::label_mask(const std::string& name) const {
    auto it = label_index.find(name);
    if (it == label_index.end())
        throw std::invalid_argument("undeclared atom \"" + name + "\"");
    std::vector<char> mask(num_states(), 0);
    for (std::uint32_t s = 0; s < num_states(); ++s)
        if (state_has_label(it->second, s)) mask[s] = 1;
    return mask;
}

SparseModel::RowSpan SparseModel::row(std::uint32_t row_id) const {
    const std::uint64_t a = tr_begin[row_id];
    const std::uint64_t b = tr_begin[row_id + 1];
    return {row_action[row_id], tr_dst.data() + a, tr_prob.data() + a,
            static_cast<std::size_t>(b - a)};
}

SparseModel::RowSpan SparseModel::dtmc_row(std::uint32_t state) const {
    return row(row_begin[state]);
}

void SparseModel::validate(double tol) const {
    const std::size_t n = num_states();
    if (row_begin.size() != n + 1) throw std::logic_error("model: row_begin size mismatch");
    if (tr_begin.size() != num_rows() + 1) throw std::logic_error("model: tr_begin size mismatch");
    if (initial >= n) throw std::logic_error("model: initial state out of range");
    for (std::uint32_t s = 0; s < n; ++s) {
        const std::uint32_t rows = rows_of(s);
        if (rows == 0) throw std::logic_error("model: state " + std::to_string(s) + " has no row");
        if (kind == Kind::dtmc && rows != 1)
            throw std::logic_error("model: DTMC state " + std::to_string(s) +
                                   " has " + std::to_string(rows) + " rows");
        for (std::uint32_t r = row_begin[s]; r < row_begin[s + 1]; ++r) {
            const RowSpan span = row(r);
            if (span.size == 0)
                throw std::logic_error("model: empty row in state " + std::to_string(s));
            double sum = 0.0, comp = 0.0;
            for (std::size_t i = 0; i < span.size; ++i) {
                if (span.dst[i] >= n)
                    throw std::logic_error("model: successor index out of range");
                if (span.prob[i] <= 0.0)
                    throw std::logic_error("model: nonpositive transition probability");
                const double y = span.prob[i] - comp;
                const double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            if (std::abs(sum - 1.0) > tol)
                throw std::logic_error("model: row sum of state " + std::to_string(s) +
                                       " deviates by " + std::to_string(sum - 1.0));
        }
    }
}

namespace {

std::string action_name(std::int32_t action) {
    return action < 0 ? "dm" : "pr_" + std::to_string(action);
}

std::int32_t action_from_name(const std::string& name) {
    if (name == "dm") return -1;
    if (name.rfind("pr_", 0) == 0) return std::stoi(name.substr(3));
    throw std::runtime_error("explicit: unknown action name '" + name + "'");
}

}  // namespace

void write_explicit(const SparseModel& model, const std::string& prefix) {
    {
        std::ofstream tra(prefix + ".tra");
        if (!tra) throw std::runtime_error("explicit: cannot write '" + prefix + ".tra'");
        char buf[64];
        for (std::uint32_t s = 0; s < model.num_states(); ++s) {
            for (std::uint32_t r = model.row_begin[s]; r < model.row_begin[s + 1]; ++r) {
                const auto span = model.row(r);
                for (std::size_t i = 0; i < span.size; ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g", span.prob[i]);
                    if (model.kind == SparseModel::Kind::mdp)
                        tra << s << ' ' << action_name(span.action) << ' ' << span.dst[i] << ' '
                            << buf << '\n';
                    else
                        tra << s << ' ' << span.dst[i] << ' ' << buf << '\n';
                }
            }
        }
    }
    {
        std::ofstream lab(prefix + ".lab");
        if (!lab) throw std::runtime_error("explicit: cannot write '" + prefix + ".lab'");
        lab << "#DECLARED";
        for (const auto& name : model.label_names) lab << ' ' << name;
        lab << '\n';
        for (std::uint32_t s = 0; s < model.num_states(); ++s) {
            lab << s;
            for (const auto& name : model.labels_of(s)) lab << ' ' << name;
            lab << '\n';
        }
    }
    {
        json j;
        j["kind"] = model.kind == SparseModel::Kind::mdp ? "mdp" : "dtmc";
        j["initial"] = model.initial;
        j["states"] = model.num_states();
        j["transitions"] = model.num_transitions();
        j["state_codes"] = model.state_codes;
        // DTMC .tra lines carry no action column; keep the policy's choice
        // per state here so re-import reproduces the model exactly.
        if (model.kind == SparseModel::Kind::dtmc) j["row_actions"] = model.row_action;
        std::ofstream meta(prefix + ".json");
        if (!meta) throw std::runtime_error("explicit: cannot write '" + prefix + ".json'");
        meta << j.dump(2) << "\n";
    }
}

SparseModel read_explicit(const std::string& prefix) {
    SparseModel model;
    std::vector<std::int32_t> dtmc_actions;
    {
        std::ifstream meta(prefix + ".json");
        if (!meta) throw std::runtime_error("explicit: cannot open '" + prefix + ".json'");
        json j = json::parse(meta);
        model.kind = j.at("kind") == "mdp" ? SparseModel::Kind::mdp : SparseModel::Kind::dtmc;
        model.initial = j.at("initial").get<std::uint32_t>();
        model.state_codes = j.at("state_codes").get<std::vector<std::uint64_t>>();
        if (j.contains("row_actions"))
            dtmc_actions = j.at("row_actions").get<std::vector<std::int32_t>>();
    }
    const std::size_t n = model.state_codes.size();

    // Transitions arrive grouped by (src, action); rebuild the CSR spans.
    std::ifstream tra(prefix + ".tra");
    if (!tra) throw std::runtime_error("explicit: cannot open '" + prefix + ".tra'");
    model.row_begin.assign(n + 1, 0);
    std::int64_t cur_state = -1;
    std::int64_t cur_action = INT64_MIN;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(tra, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint32_t src, dst;
        double prob;
        std::int32_t action = 0;
        if (model.kind == SparseModel::Kind::mdp) {
            std::string act;
            if (!(ss >> src >> act >> dst >> prob))
                throw std::runtime_error("explicit: malformed line " + std::to_string(line_no) +
                                         " in '" + prefix + ".tra'");
            action = action_from_name(act);
        } else {
            if (!(ss >> src >> dst >> prob))
                throw std::runtime_error("explicit: malformed line " + std::to_string(line_no) +
                                         " in '" + prefix + ".tra'");
        }
        if (src >= n || dst >= n)
            throw std::runtime_error("explicit: state index out of range at line " +
                                     std::to_string(line_no));
        if (static_cast<std::int64_t>(src) != cur_state ||
            static_cast<std::int64_t>(action) != cur_action) {
            if (static_cast<std::int64_t>(src) < cur_state)
                throw std::runtime_error("explicit: transitions must be grouped by source state");
            while (cur_state < static_cast<std::int64_t>(src)) {
                ++cur_state;
                model.row_begin[static_cast<std::size_t>(cur_state)] =
                    static_cast<std::uint32_t>(model.row_action.size());
            }
            model.row_action.push_back(action);
            model.tr_begin.push_back(model.tr_dst.size());
            cur_action = action;
        }
        model.tr_dst.push_back(dst);
        model.tr_prob.push_back(prob);
    }
    while (cur_state < static_cast<std::int64_t>(n)) {
        ++cur_state;
        model.row_begin[static_cast<std::size_t>(cur_state)] =
            static_cast<std::uint32_t>(model.row_action.size());
    }
    model.tr_begin.push_back(model.tr_dst.size());
    if (!dtmc_actions.empty()) {
        if (dtmc_actions.size() != model.row_action.size())
            throw std::runtime_error("explicit: row_actions length does not match the rows read");
        model.row_action = dtmc_actions;
    }

    std::ifstream lab(prefix + ".lab");
    if (!lab) throw std::runtime_error("explicit: cannot open '" + prefix + ".lab'");
    line_no = 0;
    while (std::getline(lab, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string first;
        ss >> first;
        if (first == "#DECLARED") {
            std::string name;
            while (ss >> name) model.ensure_label(name);
            continue;
        }
        const std::uint32_t s = static_cast<std::uint32_t>(std::stoul(first));
        if (s >= n)
            throw std::runtime_error("explicit: label state out of range at line " +
                                     std::to_string(line_no));
        std::string name;
        while (ss >> name) model.set_label(model.ensure_label(name), s);
    }
    model.validate();
    return model;
}

void write_state_table(const SparseModel& model, const PlateletMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("state table: cannot write '" + path + "'");
    out << "index,d,x1,x2,x3,x4,x5,pend,ph,labels\n";
    for (std::uint32_t s = 0; s < model.num_states(); ++s) {
        const InventoryState st = mdp.decode(model.state_codes[s]);
        out << s << ',' << st.d;
        for (int v : st.x) out << ',' << v;
        out << ',' << st.pend << ',' << st.ph << ',';
        const auto labels = model.labels_of(s);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) out << ' ';
            out << labels[i];
        }
        out << '\n';
    }
}

}  // namespace plateletmc

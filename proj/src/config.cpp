#include "plateletmc/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace plateletmc {

using nlohmann::json;

void ModelConfig::validate() const {
    if (smax < 1) throw std::invalid_argument("config: smax must be >= 1");
    if (kmax < 1) throw std::invalid_argument("config: kmax must be >= 1");
    for (int day = 0; day < kDaysPerWeek; ++day)
        if (!(lambda[static_cast<std::size_t>(day)] > 0.0))
            throw std::invalid_argument("config: lambda[" + std::to_string(day) +
                                        "] must be > 0");
    if (cost_shortage < 0.0 || cost_outdate < 0.0)
        throw std::invalid_argument("config: costs must be >= 0");
    if (lowstock_threshold < 0)
        throw std::invalid_argument("config: lowstock_threshold must be >= 0");
    if (!valid_state(initial))
        throw std::invalid_argument("config: initial state violates the state invariants");
}

bool ModelConfig::valid_state(const InventoryState& s) const {
    if (s.d < 0 || s.d >= kDaysPerWeek) return false;
    if (s.ph != 0 && s.ph != 1) return false;
    for (int v : s.x)
        if (v < 0 || v > smax) return false;
    if (s.pend < 0 || s.pend > smax) return false;
    const int tinv = s.tinv();
    if (tinv > smax) return false;
    if (s.ph == 0 && s.pend != 0) return false;   // orders are consumed at day end
    if (s.ph == 1 && s.pend + tinv > smax) return false;
    return true;
}

namespace {

InventoryState state_from_json(const json& j) {
    InventoryState s;
    if (j.contains("d")) s.d = j.at("d").get<int>();
    if (j.contains("x")) {
        const auto& arr = j.at("x");
        if (!arr.is_array() || arr.size() != 5)
            throw std::runtime_error("config: initial.x must be an array of 5 integers");
        for (std::size_t i = 0; i < 5; ++i) s.x[i] = arr[i].get<int>();
    }
    if (j.contains("pend")) s.pend = j.at("pend").get<int>();
    if (j.contains("ph")) s.ph = j.at("ph").get<int>();
    return s;
}

ModelConfig config_from_json(const json& j) {
    ModelConfig cfg;
    if (j.contains("smax")) cfg.smax = j.at("smax").get<int>();
    if (j.contains("kmax")) cfg.kmax = j.at("kmax").get<int>();
    if (j.contains("lambda")) {
        const auto& arr = j.at("lambda");
        if (!arr.is_array() || arr.size() != kDaysPerWeek)
            throw std::runtime_error("config: lambda must be an array of 7 numbers, Monday first");
        for (std::size_t i = 0; i < kDaysPerWeek; ++i)
            cfg.lambda[i] = arr[i].get<double>();
    }
    if (j.contains("cost_shortage")) cfg.cost_shortage = j.at("cost_shortage").get<double>();
    if (j.contains("cost_outdate")) cfg.cost_outdate = j.at("cost_outdate").get<double>();
    if (j.contains("lowstock_threshold"))
        cfg.lowstock_threshold = j.at("lowstock_threshold").get<int>();
    if (j.contains("initial")) cfg.initial = state_from_json(j.at("initial"));
    cfg.validate();
    return cfg;
}

// --- minimal TOML reader -----------------------------------------------------
//
// Supports the subset the configuration schema needs: `key = value` pairs with
// numbers, arrays of numbers, and the [initial] table; `#` comments. Nested
// tables other than [initial] are rejected.

struct TomlValue {
    bool is_array = false;
    double number = 0.0;
    std::vector<double> array;
};

void toml_fail(std::size_t line_no, const std::string& msg) {
    throw std::runtime_error("config(toml) line " + std::to_string(line_no) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_toml_number(const std::string& text, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    toml_fail(line_no, "expected a number, got '" + text + "'");
    return 0.0;  // unreachable
}

TomlValue parse_toml_value(const std::string& text, std::size_t line_no) {
    TomlValue v;
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') toml_fail(line_no, "unterminated array");
        v.is_array = true;
        std::string inner = text.substr(1, text.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            v.array.push_back(parse_toml_number(item, line_no));
        }
        return v;
    }
    v.number = parse_toml_number(text, line_no);
    return v;
}

}  // namespace

ModelConfig parse_model_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config(json): ") + e.what());
    }
    return config_from_json(j);
}

ModelConfig parse_model_config_toml(const std::string& text) {
    // Collect key/value pairs, then reuse the JSON path for validation.
    json j = json::object();
    json* scope = &j;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        // Strip comments outside of strings (the schema has no string values).
        if (std::size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') toml_fail(line_no, "malformed table header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name != "initial")
                toml_fail(line_no, "unsupported table [" + name + "] (only [initial])");
            j["initial"] = json::object();
            scope = &j["initial"];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) toml_fail(line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) toml_fail(line_no, "expected 'key = value'");
        TomlValue v = parse_toml_value(value, line_no);
        if (v.is_array) {
            json arr = json::array();
            for (double d : v.array) arr.push_back(d);
            (*scope)[key] = arr;
        } else if (v.number == static_cast<double>(static_cast<long long>(v.number))) {
            (*scope)[key] = static_cast<long long>(v.number);
        } else {
            (*scope)[key] = v.number;
        }
    }
    return config_from_json(j);
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    bool toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
    if (!toml) {
        // Sniff: JSON starts with '{'.
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            toml = c != '{';
            break;
        }
    }
    return toml ? parse_model_config_toml(text) : parse_model_config_json(text);
}

std::string model_config_to_json(const ModelConfig& cfg) {
    json j;
    j["smax"] = cfg.smax;
    j["kmax"] = cfg.kmax;
    j["lambda"] = cfg.lambda;
    j["cost_shortage"] = cfg.cost_shortage;
    j["cost_outdate"] = cfg.cost_outdate;
    j["lowstock_threshold"] = cfg.lowstock_threshold;
    j["initial"] = {{"d", cfg.initial.d},
                    {"x", cfg.initial.x},
                    {"pend", cfg.initial.pend},
                    {"ph", cfg.initial.ph}};
    return j.dump(2);
}

}  // namespace plateletmc

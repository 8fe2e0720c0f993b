#include "trustsiot/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trustsiot {

namespace {

const std::map<std::string, std::string>& registry() {
    static const std::map<std::string, std::string> defaults = {
        {"dataset", ""},             // manifest path
        {"out", "out"},              // output directory
        {"seed", "42"},
        {"lambda", "1.0"},
        {"t0", "0"},
        {"horizon", "0"},            // 0: dataset time span (>= 1)
        {"dtm.smoothed", "true"},
        {"positive_threshold", "0.5"},
        {"labels.low", "0.333333333333333"},
        {"labels.high", "0.666666666666667"},
        {"epsilon", "1e-6"},
        {"max_iter", "200"},
        {"th", "0.5"},
        {"max_k", "0"},              // 0: unbounded
        {"kge.dim", "32"},
        {"kge.epochs", "100"},
        {"kge.lr", "1e-3"},
        {"kge.neg", "2"},
        {"kge.batch", "256"},
        {"mlp.hidden", "16"},
        {"mlp.l2", "1e-4"},
        {"mlp.max_epochs", "500"},
        {"mlp.cost_threshold", "1e-3"},
        {"mlp.lr", "1e-3"},
        {"grid.hidden", ""},         // e.g. 8,16,32 to grid-search H by CV
        {"train_fraction", "0.8"},
        {"k_folds", "5"},
        {"baseline.weights", ""},    // 5 weights summing to 1 enables Eq-17 style baseline
    };
    return defaults;
}

std::string trim(std::string s) {
    const char* ws = " \t";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

Config::Config() : values_(registry()) {}

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

void Config::apply_env() {
    for (auto& [key, value] : values_) {
        if (const char* env = std::getenv(env_name(key).c_str())) value = env;
    }
}

std::string Config::env_name(const std::string& key) {
    std::string name = "TRUSTSIOT_";
    for (char c : key)
        name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return name;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
    it->second = value;
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = get(key);
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config " + key + ": bad number: " + v);
    return out;
}

std::int64_t Config::get_int(const std::string& key) const {
    const std::string& v = get(key);
    std::size_t pos = 0;
    std::int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("config " + key + ": bad integer: " + v);
    return out;
}

std::uint64_t Config::get_uint(const std::string& key) const {
    std::int64_t v = get_int(key);
    if (v < 0) throw std::invalid_argument("config " + key + ": must be non-negative");
    return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config " + key + ": bad boolean: " + v);
}

bool Config::is_set(const std::string& key) const { return !get(key).empty(); }

std::string Config::echo() const {
    std::ostringstream ss;
    for (const auto& [key, value] : values_) ss << key << " = " << value << "\n";
    return ss.str();
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace trustsiot

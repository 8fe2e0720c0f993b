#pragma once

// Plain `key = value` experiment configuration with dotted keys, validated
// against a registry of known keys. Environment variables prefixed
// TRUSTSIOT_ override file values (dots map to underscores, uppercased:
// kge.dim -> TRUSTSIOT_KGE_DIM).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trustsiot {

class Config {
public:
    // Registry defaults only.
    Config();

    static Config from_file(const std::filesystem::path& path);

    // Applies TRUSTSIOT_* overrides for every known key.
    void apply_env();

    // Unknown keys throw; typos should not silently no-op.
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    bool is_set(const std::string& key) const;  // non-empty value

    // Sorted key=value echo for run manifests.
    std::string echo() const;

    static std::string env_name(const std::string& key);

private:
    std::map<std::string, std::string> values_;
};

// Comma-separated doubles ("0.2,0.2,0.2,0.2,0.2").
std::vector<double> parse_double_list(const std::string& s);

}  // namespace trustsiot

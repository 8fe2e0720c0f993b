#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace trustsiot {

// Shortest round-trippable decimal form of a double; keeps artifact files
// byte-stable across runs.
std::string format_double(double x);

std::vector<std::string> split_fields(std::string_view line);

// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t hash_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace trustsiot

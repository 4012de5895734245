#pragma once

/**
 * @file io.hpp
 * @brief Path CSV files and the key = value configuration format.
 *
 * Path CSV: header "t,y" followed by n + 1 rows, values printed with 17
 * significant digits so a write/read round trip is exact.
 *
 * Config grammar, one entry per line:
 *   key = value      # trailing comments allowed
 * Blank lines and lines starting with '#' are ignored. Keys are unique.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssou/ou.hpp"

namespace ssou {

/// @throws IoError if the file cannot be written.
void write_path_csv(const std::string& file, const ObservedPath& path);

/**
 * @brief Reads a "t,y" CSV.
 * @param T terminal time; when absent it is taken from the last t value.
 * @throws IoError if the file cannot be opened; InvalidInput on malformed content.
 */
ObservedPath read_path_csv(const std::string& file, std::optional<double> T = std::nullopt);

/// Shortest round-trip decimal for a double ("nan" and "inf" spelled out).
std::string format_double(double v);

class KeyValueConfig {
public:
    /// @throws IoError if unreadable; InvalidInput on syntax errors or duplicate keys.
    static KeyValueConfig load(const std::string& file);
    static KeyValueConfig parse(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma- or whitespace-separated list.
    std::vector<std::string> get_list(const std::string& key) const;

    /// Keys present in the file but never read; used to reject typos.
    std::vector<std::string> unused_keys() const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::map<std::string, bool> used_;
};

}  // namespace ssou

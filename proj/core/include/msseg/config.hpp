#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace msseg {

/// Flat `key = value` text config. Lines starting with '#' are comments.
/// Used for phantom specs and pipeline parameter files; CLI flags override
/// values loaded from here.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    /// Throws config_error naming the first key not in `allowed`.
    void validate_keys(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    std::string to_string() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace msseg

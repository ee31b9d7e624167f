#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stormuc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Key-value text: one "key = value" per line, '#' starts a comment,
// blank lines ignored, keys are [a-z0-9_-]+, later duplicates are an error.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    // Throws ConfigError naming the first key not in allowed.
    void require_known(const std::set<std::string>& allowed) const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> line_of_;
    std::string origin_;
};

double parse_double(const std::string& s, const std::string& what);
long parse_int(const std::string& s, const std::string& what);
std::vector<int> parse_int_list(const std::string& s, const std::string& what);

}  // namespace stormuc

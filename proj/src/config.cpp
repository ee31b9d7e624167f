#include "stormuc/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace stormuc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError(what + ": expected a number, got '" + s + "'");
    return v;
}

long parse_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError(what + ": expected an integer, got '" + s + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(static_cast<int>(parse_int(trim(item), what)));
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        auto where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        for (char ch : key)
            if (!(std::islower(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
                throw ConfigError(where + ": bad key '" + key + "'");
        if (c.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        c.values_[key] = value;
        c.line_of_[key] = lineno;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }

double Config::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? parse_double(*v, key) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
    auto v = get(key);
    return v ? parse_int(*v, key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + *v + "'");
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.count(k)) {
            auto it = line_of_.find(k);
            std::string where = it == line_of_.end() ? origin_ : origin_ + ":" + std::to_string(it->second);
            throw ConfigError(where + ": unknown key '" + k + "'");
        }
}

}  // namespace stormuc

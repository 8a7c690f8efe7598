#include "rarsched/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rarsched {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool is_repeatable(const std::string& key) { return key == "job" || key == "ddljs_job"; }

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Config Config::parse_text(const std::string& text) {
    Config config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (is_repeatable(key)) {
            config.repeated_[key].push_back(value);
        } else if (!config.values_.emplace(key, value).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }
    }
    return config;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

bool Config::has(const std::string& key) const {
    return values_.count(key) > 0 || repeated_.count(key) > 0;
}

const std::string* Config::lookup(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    touched_[key] = true;
    return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    const std::string* v = lookup(key);
    return v ? *v : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        long long out = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: " + *v);
    }
}

double Config::get_real(const std::string& key, double fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        double out = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: " + *v);
    }
}

bool Config::get_bool(const std::string& key, bool fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + *v);
}

std::vector<long long> Config::get_int_list(const std::string& key,
                                            std::vector<long long> fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    std::vector<long long> out;
    for (const std::string& item : split_list(*v)) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-integer item: " + item);
        }
    }
    return out;
}

std::vector<double> Config::get_real_list(const std::string& key, std::vector<double> fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split_list(*v)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-numeric item: " + item);
        }
    }
    return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key,
                                                 std::vector<std::string> fallback) {
    const std::string* v = lookup(key);
    if (!v) return fallback;
    return split_list(*v);
}

std::vector<std::string> Config::take_repeated(const std::string& key) {
    touched_[key] = true;
    auto it = repeated_.find(key);
    return it == repeated_.end() ? std::vector<std::string>{} : it->second;
}

void Config::finish() const {
    std::string unknown;
    for (const auto& [key, value] : values_)
        if (!touched_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    for (const auto& [key, values] : repeated_)
        if (!touched_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty()) throw ConfigError("config: unknown key(s): " + unknown);
}

}  // namespace rarsched

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rarsched {

// Flat "key = value" configuration text. '#' starts a comment. A handful of
// keys (job, ddljs_job) may repeat and accumulate in order. Readers must
// consume every key they are given; leftovers are reported as errors so a
// mistyped sweep key cannot silently fall back to a default.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    long long get_int(const std::string& key, long long fallback);
    double get_real(const std::string& key, double fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<long long> get_int_list(const std::string& key, std::vector<long long> fallback);
    std::vector<double> get_real_list(const std::string& key, std::vector<double> fallback);
    std::vector<std::string> get_string_list(const std::string& key,
                                             std::vector<std::string> fallback);

    // Every line stored under a repeatable key, in file order.
    std::vector<std::string> take_repeated(const std::string& key);

    // Throws std::runtime_error listing any key never consumed.
    void finish() const;

  private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::vector<std::string>> repeated_;
    mutable std::map<std::string, bool> touched_;

    const std::string* lookup(const std::string& key);
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rarsched

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace porosim {

/**
 * Flat key=value run configuration with dotted section prefixes
 * (`solver.omega=1.5`). '#' starts a comment; blank lines are skipped.
 * Unknown keys are rejected so typos surface at load time.
 */
class RunConfig {
public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text,
                                  const std::string& origin = "<config>");
    static RunConfig defaults_for(const std::string& scenario);

    bool has(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Canonical sorted text; feeds the provenance hash.
    std::string canonical_text() const;
    /// FNV-1a over the canonical text.
    std::string hash() const;

    /// Range checks and referenced-path existence; throws on violations.
    void validate() const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace porosim

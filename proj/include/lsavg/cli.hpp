#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsavg/domain.hpp"
#include "lsavg/weight.hpp"

namespace lsavg::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { Ok = 0, Error = 1, Inconclusive = 2, Refused = 3 };

/// Flat key/value configuration. Lines are "key = value"; '#' starts a comment.
/// Domain keys live under "spec.", "g1.", "g2.", "g3."; the others are listed in known_keys().
class Config {
public:
    Config() = default;
    explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string text(const std::string& key, const std::string& fallback = "") const;
    double real(const std::string& key) const;
    double real(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::vector<double> reals(const std::string& key) const;
    Point point(const std::string& key) const;
    DomainSpec spec(const std::string& prefix) const;
    bool has_spec(const std::string& prefix) const;
    std::optional<Weight> weight() const;

    const std::map<std::string, std::string>& values() const { return kv_; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    /// Throws InvalidArgument for keys outside the schema.
    void check_schema() const;

private:
    std::map<std::string, std::string> kv_;
};

const std::vector<std::string>& known_keys();
const std::vector<std::string>& subcommands();

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 14695981039346656037ULL);
/// Hash of the canonical (sorted) config text together with the seed.
std::string config_hash(const Config& config, std::uint64_t seed);

struct Options {
    std::string subcommand;
    std::string configPath;
    std::string outDir = ".";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double tol = 0.05;
};

/// Runs one subcommand and writes its artifacts plus "<subcommand>.manifest.json" into outDir.
/// Diagnostics go to err.
int run(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace lsavg::cli

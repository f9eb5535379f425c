#pragma once

#include "siegelmate/pcf.hpp"
#include "siegelmate/siegel.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace siegelmate {

inline constexpr const char* kVersion = "0.1.0";

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flat `section.key` settings read from a TOML-like file:
///
///     [job]
///     theta = golden
///     angle = 1/3   # comment
///
/// Every key has a default; unknown keys are rejected.
class JobConfig {
public:
    JobConfig();
    static JobConfig parse(const std::string& text);
    static JobConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;

    Theta theta() const;
    /// Built from job.mode and job.angle, or from job.c through the fixture
    /// table; job.period and job.preperiod, when set, must agree.
    PcfSpec spec() const;
    std::uint64_t seed() const { return count("job.seed"); }
    void validate() const;

    nlohmann::json echo() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Report wrapper: command, config echo, depths, tolerances and versions.
nlohmann::json report_envelope(const std::string& command, const JobConfig& cfg, nlohmann::json result);

/// Known fixture parameters and their characteristic angles.
std::optional<PcfSpec> spec_for_parameter(cplx c, double tol = 1e-4);

}  // namespace siegelmate

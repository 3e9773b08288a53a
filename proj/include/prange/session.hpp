#pragma once

#include "prange/error.hpp"
#include "prange/model.hpp"
#include "prange/ranges.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prange {

struct SessionConfig {
    SwarmConfig swarm;
    double dedupe = 1e-4;
    double delta = 1e-6;
    FeasibilityConfig feasibility;
    SeparationOptions separation;
    bool paranoid = false;
    std::size_t finalize_starts = 256;
    std::uint64_t seed = 42;

    /// Defaults overlaid with a model's [solver] section.
    static SessionConfig from_model(const ConstraintSystem& sys);
    /// Per-variable, per-stage swarm seed (FNV-1a over seed, name, stage).
    std::uint64_t seed_for(const std::string& name, std::size_t stage) const;
    RangeConfig range_config(const std::string& name, std::size_t stage) const;
};

/// Either a range or the reason it could not be computed.
struct RangeOutcome {
    std::optional<ParameterRange> range;
    ErrorCode code = ErrorCode::SolveFailure;
    std::string error;

    bool ok() const { return range.has_value(); }
};

using RangeMap = std::map<std::string, RangeOutcome>;

/// Carries the interval set the rejected value fell outside of.
class OutOfRangeError : public Error {
public:
    OutOfRangeError(std::string parameter, double value, ParameterRange range);

    const std::string& parameter() const noexcept { return parameter_; }
    double value() const noexcept { return value_; }
    const ParameterRange& range() const noexcept { return range_; }

private:
    std::string parameter_;
    double value_;
    ParameterRange range_;
};

class EditingSession {
public:
    /// Non-selected parameters become fixed at their current values.
    static EditingSession select(ConstraintSystem sys, const std::vector<std::string>& names,
                                 SessionConfig cfg = {});

    const ConstraintSystem& system() const { return sys_; }
    const SessionConfig& config() const { return cfg_; }
    SessionConfig& config() { return cfg_; }
    const std::vector<std::string>& variables() const { return variables_; }
    const std::map<std::string, double>& assigned() const { return assigned_; }
    const std::map<std::string, double>& fixed() const { return fixed_; }
    const std::vector<std::string>& history() const { return history_; }
    std::vector<std::string> unassigned() const;
    /// fixed plus assigned
    std::map<std::string, double> known_values() const;

    /// Bumped on every mutation; cached ranges belong to one version.
    std::uint64_t version() const { return version_; }
    bool ranges_current() const { return ranges_version_ == version_ && !last_ranges_.empty(); }
    const RangeMap& last_ranges() const { return last_ranges_; }

    SeparatedFunction separated(const std::string& name) const;

    /// Computes without touching the session, so it can run on a snapshot.
    RangeMap compute_ranges(const std::function<void(std::size_t, std::size_t)>& progress = {}) const;
    /// Caches `ranges` if the session is still at `version`.
    bool install_ranges(std::uint64_t version, RangeMap ranges);
    /// compute_ranges + install_ranges, or the cache when current.
    const RangeMap& ranges();

    void assign(const std::string& name, double value);
    void undo();
    Configuration finalize();
    const std::optional<Configuration>& solution() const { return solution_; }

    /// Structured text with the model, state and the cached ranges.
    std::string save() const;
    static EditingSession load(std::string_view text);

private:
    ConstraintSystem sys_;
    SessionConfig cfg_;
    std::vector<std::string> variables_;
    std::map<std::string, double> assigned_;
    std::map<std::string, double> fixed_;
    std::vector<std::string> history_;
    RangeMap last_ranges_;
    std::uint64_t version_ = 0;
    std::uint64_t ranges_version_ = ~std::uint64_t{0};
    std::optional<Configuration> solution_;
};

bool same_state(const EditingSession& a, const EditingSession& b);

} // namespace prange

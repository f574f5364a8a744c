#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "c3geom/covering.hpp"
#include "c3geom/homotopy.hpp"

namespace c3geom {

enum class Suite : unsigned char { algebra, geometry, covering, homotopy };

const char* name(Suite s);

struct RunConfig {
    GeomCase cse = GeomCase::hh;
    std::uint64_t seed = 1;
    std::size_t samples = 200;
    double tolerance = 1e-9;
    std::size_t k_budget = 256;
    std::vector<Suite> suites;  // empty means all applicable
    std::string out_path;       // empty means stdout only
};

/// Validates a configuration; throws Error with a message on bad input
/// (covering suite outside case hh, zero samples, non-positive tolerance).
void validate(const RunConfig& cfg);

struct CheckRecord {
    std::string name;
    bool passed = false;
    std::size_t samples = 0;
    double max_error = 0.0;
    std::string counterexample;  // empty when the check passed
};

struct MoveCountRecord {
    std::string name;
    std::size_t count = 0;
};

struct Report {
    RunConfig config;
    std::vector<CheckRecord> checks;
    std::vector<MoveCountRecord> move_counts;  // homotopy experiment log sizes
    std::map<std::string, std::string> extras; // named scalar statistics
    std::vector<std::pair<std::string, std::string>> move_logs;  // (name, serialized)
    double wall_seconds = 0.0;

    bool all_passed() const;
    std::vector<bool> pass_vector() const;
};

/// Runs the selected suites. Deterministic: the seed fans out to labeled
/// per-suite sub-seeds, so the same config reproduces every outcome.
Report run(const RunConfig& cfg);

/// Stable-order structured text. Numbers carry 17 significant digits; the
/// wall-time line is the only field excluded from determinism comparisons.
std::string format_report(const Report& rep);

/// Individual suites (exposed so the acceptance tests can drive them).
void run_algebra_suite(const RunConfig& cfg, Report& rep);
void run_geometry_suite(const RunConfig& cfg, Report& rep);
void run_covering_suite(const RunConfig& cfg, Report& rep);
void run_homotopy_suite(const RunConfig& cfg, Report& rep);

} // namespace c3geom

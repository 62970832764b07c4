#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hls/manifold.hpp"

namespace hls {

enum class Workflow { Solve, Baseline, Transplant, CcDiagnose, SplitCheck };

std::string workflow_name(Workflow w);
std::optional<Workflow> workflow_from_name(std::string_view name);

/// One validated job: a manifold, admissible exponents, a workflow and its
/// knobs. Values left at their "auto" sentinels are resolved per-workflow at
/// run time (chart radius, sweep schedules).
struct JobConfig {
    ManifoldSpec manifold;
    double alpha = 0.0;
    double p = 0.0;
    int resolution = 0;
    Workflow workflow = Workflow::Solve;

    int max_iters = 500;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    bool random_init = false;
    std::string out_dir = ".";
    bool deterministic = false;

    double delta = -1.0;              // auto: half the injectivity radius
    std::vector<double> lambdas;      // auto when empty
    std::vector<double> rhos;         // auto when empty
    std::vector<double> atom_radii;   // auto when empty
    double theta = 0.1;
    double split_r = -1.0;            // auto
    bool export_grid = false;
    bool export_kernel = false;

    /// Sorted key=value lines; re-parsing them reproduces this config.
    std::string canonical_text() const;
    /// FNV-1a over the canonical text.
    std::uint64_t hash() const;
};

struct ConfigIssue {
    int line = 0; // 0 for validation issues not tied to a line
    std::string message;
};

struct ParseOutcome {
    std::optional<JobConfig> config;
    std::vector<ConfigIssue> issues;
    bool ok() const { return config.has_value(); }
};

/// Parses key=value text. On failure the outcome lists every issue found,
/// not just the first.
ParseOutcome parse_config(std::string_view text);

} // namespace hls

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hls/config.hpp"

namespace hls {

/// Persistent record of one workflow run: the echoed config, the numbers the
/// workflow produced, and the files it wrote under the output directory.
struct ResultRecord {
    JobConfig config;
    std::string version;
    std::uint64_t config_hash = 0;
    double duration_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> outputs;
    std::vector<std::string> files;
};

/// Dispatches the configured workflow, writes summary.txt plus the workflow
/// CSVs into the output directory, and returns the record. Failures
/// propagate as exceptions with context. In deterministic mode the written
/// files are byte-identical across reruns.
ResultRecord run(const JobConfig& config);

} // namespace hls

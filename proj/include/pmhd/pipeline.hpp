#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmhd/config.hpp"

namespace pmhd {

struct StageResult {
    std::string name;
    double seconds = 0.0;
    bool pass = false;
    std::string detail;
};

struct PipelineResult {
    std::vector<StageResult> stages;
    bool all_pass = true;
    std::filesystem::path out_dir;
};

/// Execute the requested stages in pipeline order
/// (fronts, selfsim, leading, correctors, assemble, residuals, dns, verify,
/// sweep). A stage whose inputs were not produced earlier in the same run
/// raises DependencyError. Artifacts, per-stage CSVs and a manifest with
/// content hashes land in cfg.output_dir.
PipelineResult run_pipeline(const Config& cfg, const std::vector<std::string>& stages);

/// Plot-ready CSVs derived from run artifacts: kind is one of
/// profiles | decay | convergence.
void emit_plot_data(const std::filesystem::path& run_dir, const std::string& kind);

/// Stage order helper: the canonical chain up to and including `stage`.
std::vector<std::string> stage_chain(const std::string& stage);

}  // namespace pmhd

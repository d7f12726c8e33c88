#pragma once

#include <filesystem>

#include "config.hpp"

namespace prbfn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitQualityMiss = 2;
inline constexpr int kExitSynthesisFailure = 3;
inline constexpr int kExitConfigError = 64;
inline constexpr int kExitMissingArtifact = 66;

// design:     target correlation, optimal beam matrix, output-port sweep
// synthesize: cascade plan from the designed beam matrix
// realize:    per-unit switch-state search against the plan targets
// verify:     achieved correlation, relative error, channel/FAMA statistics
int cmd_design(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_synthesize(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_realize(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Full argv interface; returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace prbfn::cli

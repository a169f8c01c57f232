#pragma once

#include "basketminer/config.hpp"

namespace bm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInsufficientData = 2;

int cmd_synth(const RunConfig& cfg);
int cmd_sample(const RunConfig& cfg);
int cmd_mine(const RunConfig& cfg);
int cmd_null(const RunConfig& cfg);
int cmd_hurst(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg, const std::filesystem::path& results);

}  // namespace bm::cli

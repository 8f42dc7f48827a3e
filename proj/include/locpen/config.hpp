#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "locpen/classes.hpp"
#include "locpen/harness.hpp"

namespace locpen {

/// Comma-separated class specs: "intervals:K", "intervals:A..B", "thresholds",
/// "stumps:D". The result keeps the written order.
std::vector<ModelClass> parse_class_list(std::string_view text);

/// Comma-separated "lo-hi" pairs, e.g. "0.2-0.4, 0.6-0.8"; "" or "none" is empty.
std::vector<Interval> parse_interval_list(std::string_view text);

/// Comma-separated penalty names.
std::vector<PenaltyKind> parse_penalty_list(std::string_view text);

/// Line-oriented "key = value" text; '#' starts a comment. Keys:
/// intervals, eta, classes, n, reps, penalty, gamma, gamma1, gamma2, mc_draws,
/// profile (paper|exploratory), constant_scale, seed, workers, shatter_reps.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

}  // namespace locpen

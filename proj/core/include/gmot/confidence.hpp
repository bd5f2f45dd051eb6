// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace gmot {

// Normalized Shannon entropy of a batch's edge-score distribution, in
// [0, 1]. Scores are normalized to sum 1; H = -sum z ln z / ln |E| with
// 0 ln 0 := 0. Fewer than two scores, or all zeros, yield 0.
double batch_entropy(const std::vector<double>& scores);

// Mean of per-batch entropies; empty input yields 0.
double scene_entropy(const std::vector<double>& batch_entropies);

enum class EntropyFilter { AboveMean, BelowMean };

// Keeps scenes strictly on the configured side of the mean scene entropy;
// ties (including a lone scene) are excluded.
std::set<std::string> filter_scenes(const std::map<std::string, double>& scene_entropies,
                                    EntropyFilter direction = EntropyFilter::AboveMean);

}  // namespace gmot

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#include "gmot/confidence.hpp"

#include <cmath>
#include <stdexcept>

namespace gmot {

double batch_entropy(const std::vector<double>& scores) {
    double sum = 0.0;
    for (double s : scores) {
        if (s < 0.0 || !std::isfinite(s)) {
            throw std::invalid_argument("batch_entropy: scores must be finite and nonnegative");
        }
        sum += s;
    }
    const size_t n = scores.size();
    if (n <= 1 || sum <= 0.0) return 0.0;
    double h = 0.0;
    for (double s : scores) {
        const double z = s / sum;
        if (z > 0.0) h -= z * std::log(z);
    }
    return h / std::log(static_cast<double>(n));
}

double scene_entropy(const std::vector<double>& batch_entropies) {
    if (batch_entropies.empty()) return 0.0;
    double sum = 0.0;
    for (double h : batch_entropies) sum += h;
    return sum / static_cast<double>(batch_entropies.size());
}

std::set<std::string> filter_scenes(const std::map<std::string, double>& scene_entropies,
                                    EntropyFilter direction) {
    if (scene_entropies.empty()) {
        throw std::invalid_argument("filter_scenes: at least one scene required");
    }
    double mean = 0.0;
    for (const auto& [name, h] : scene_entropies) mean += h;
    mean /= static_cast<double>(scene_entropies.size());
    std::set<std::string> kept;
    for (const auto& [name, h] : scene_entropies) {
        const bool keep = direction == EntropyFilter::AboveMean ? h > mean : h < mean;
        if (keep) kept.insert(name);
    }
    return kept;
}

}  // namespace gmot

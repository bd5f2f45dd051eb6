// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 graphmot contributors
#pragma once

#include <stdexcept>
#include <string>

namespace gmot {

// Tensor / layer dimension mismatches.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse (e.g. backward before any forward was recorded).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejected configuration values or weights/config mismatches.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-format errors; carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& file, long line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_name(file), line_number(line) {}
    explicit ParseError(const std::string& what)
        : std::runtime_error(what), line_number(-1) {}
    std::string file_name;
    long line_number;
};

// Divergence during optimization; carries the offending epoch.
struct TrainError : std::runtime_error {
    TrainError(const std::string& what, int at_epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(at_epoch) + ")"),
          epoch(at_epoch) {}
    int epoch;
};

}  // namespace gmot

#pragma once

#include <stdexcept>
#include <string>

namespace nncdf {

// Error taxonomy mirrored by the CLI exit codes:
//   config_error -> exit 2 (bad input files, dimension mismatches, unsupported options)
//   budget_error -> exit 3 (cell-count or vertex-budget caps exceeded)
//   internal_error -> exit 4 (violated internal invariant; must never trigger)
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

class budget_error : public error {
public:
    explicit budget_error(const std::string& msg) : error(msg) {}
};

class internal_error : public error {
public:
    explicit internal_error(const std::string& msg) : error(msg) {}
};

} // namespace nncdf

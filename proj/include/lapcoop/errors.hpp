// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LAPCOOP_ERRORS_HPP
#define LAPCOOP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace lapcoop {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the failure modes that callers are expected to tell apart.

/// A received-power measurement that implies a gain above unity.
class InvalidMeasurement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of iterations. Carries the last iterate.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double last_iterate)
        : std::runtime_error(what), last_iterate_(last_iterate) {}

    double last_iterate() const noexcept { return last_iterate_; }

private:
    double last_iterate_;
};

/// The relay hop alone already misses the BER budget, so no finite source
/// power can close the link.
class InfeasibleRelayPower : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario validation failure listing every violated invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "scenario validation failed";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

/// Malformed scenario text. Line and column are 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace lapcoop

#endif  // LAPCOOP_ERRORS_HPP

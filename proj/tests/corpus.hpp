#pragma once

// The twelve-operator regression corpus with hand-derived verdicts.

#include <limits>
#include <string>
#include <vector>

#include "evolv/symbol.hpp"
#include "evolv/verdict.hpp"

namespace corpus {

struct Entry {
    std::string name;
    evolv::OperatorSymbol P;
    evolv::Classification expected;
    double omega0;  // meaningful for bounded entries
};

inline std::vector<Entry> operators() {
    using evolv::Classification;
    using evolv::parse_operator;
    const double ninf = -std::numeric_limits<double>::infinity();
    // lambda^2 + i xi^3 has no direct text form: d1^3 contributes -i xi^3.
    const auto cubic = evolv::operator_from_json(nlohmann::json::parse(
        R"({"n": 1, "terms": [{"exp": [2, 0], "re": 1}, {"exp": [0, 3], "re": -1}]})"));
    return {
        {"heat", parse_operator("d0 - d1^2", 1), Classification::bounded, 0.0},
        {"backward heat", parse_operator("d0 + d1^2", 1), Classification::unbounded, 0.0},
        {"wave", parse_operator("d0^2 - d1^2", 1), Classification::bounded, 0.0},
        {"schroedinger", parse_operator("d0 - i*d1^2", 1), Classification::bounded, 0.0},
        {"shifted", parse_operator("d0 - 3", 1), Classification::bounded, 3.0},
        {"shifted schroedinger", parse_operator("d0 - i*d1^2 - 1", 1), Classification::bounded, 1.0},
        {"transport", parse_operator("d0 + d1", 1), Classification::bounded, 0.0},
        {"degenerate", parse_operator("d1*d0 + 1", 1), Classification::bounded, 0.0},
        {"pure space", parse_operator("d1", 1), Classification::unbounded, 0.0},
        {"hormander", parse_operator("d0 - i*(d1+1)^2", 1), Classification::unbounded, 0.0},
        {"cubic", cubic, Classification::unbounded, 0.0},
        {"constant", parse_operator("1", 1), Classification::bounded, ninf},
    };
}

}  // namespace corpus

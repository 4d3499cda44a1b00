#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evolv/types.hpp"

namespace evolv {

enum class Classification { bounded, unbounded, undetermined };
enum class VerdictMethod { exact_1d, numeric };

std::string to_string(Classification c);
std::string to_string(VerdictMethod m);

// One entry of a verdict's evidence trail. `xi` and `lambda` carry a witness
// that can be re-checked with eval_symbol.
struct EvidenceRecord {
    std::string kind;
    std::string summary;
    std::vector<double> xi;
    std::optional<Complex> lambda;
    std::optional<double> value;
};

struct PetrovskiiVerdict {
    Classification classification = Classification::undetermined;
    // +inf for unbounded verdicts, -inf when no slice has roots.
    std::optional<double> omega0;
    double omega0_error = 0.0;
    std::vector<EvidenceRecord> evidence;
    VerdictMethod method = VerdictMethod::numeric;
};

}  // namespace evolv

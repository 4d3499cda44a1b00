#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evolv/rational.hpp"
#include "evolv/symbol.hpp"
#include "evolv/verdict.hpp"

namespace evolv {

enum class Direction { plus_infinity, minus_infinity };

std::string to_string(Direction d);

// Raised when an expansion is requested for a symbol without lambda.
class NoLambdaVariable : public std::invalid_argument {
public:
    NoLambdaVariable() : std::invalid_argument("no lambda variable") {}
};

// One edge of the Newton polygon of P(lambda, i xi) as xi -> direction.
// Along the edge lambda ~ c |xi|^exponent.
struct NewtonEdge {
    Rational exponent;
    // (lambda power, xi power) of every monomial on the edge, lambda power ascending
    std::vector<std::pair<int, Rational>> points;
    int length() const { return points.back().first - points.front().first; }
};

// Edges ordered by decreasing exponent (fastest-growing roots first).
std::vector<NewtonEdge> newton_polygon(const OperatorSymbol& P, Direction dir);

struct PuiseuxTerm {
    Rational exponent;
    Complex coeff;
};

// lambda(xi) = sum_k c_k x^{e_k}, x = |xi| at infinity, or x = 1/|xi - center|
// for a local expansion at a point where the leading coefficient vanishes.
struct PuiseuxBranch {
    Direction direction = Direction::plus_infinity;
    std::optional<double> center;
    int ramification = 1;
    // Number of coincident roots represented by each sheet (> 1 only when the
    // expansion stopped before the roots separated).
    int multiplicity = 1;
    std::vector<PuiseuxTerm> terms;
    bool exact = false;         // the series terminates: partial sum is a root
    bool needs_deeper = false;  // depth ran out before the expansion closed
    // Predicted growth exponent of |P(partial sum, i xi)| in x after k terms
    // (k = 0..terms.size()); empty optional marks an exact partial sum.
    std::vector<std::optional<Rational>> residual_exponent;

    int sheet_count() const { return ramification; }
    // Coefficient of term k on sheet d: c_k exp(i 2 pi d e_k).
    Complex sheet_coefficient(int sheet, std::size_t k) const;
    // Partial sum with the first `nterms` terms on the given sheet, at xi.
    Complex evaluate(int sheet, double xi, std::size_t nterms) const;
    std::string summary() const;
};

struct PuiseuxOptions {
    int depth = 8;
    // Coefficients with |s| <= drop * (magnitude of the contributions) are
    // treated as cancelled.
    double drop = 1e-10;
    // Relative distance below which roots of an edge polynomial are merged.
    double cluster = 1e-6;
};

std::vector<PuiseuxBranch> puiseux_branches(const OperatorSymbol& P, Direction dir, const PuiseuxOptions& opts = {});
inline std::vector<PuiseuxBranch> puiseux_branches(const OperatorSymbol& P, Direction dir, int depth) {
    PuiseuxOptions o;
    o.depth = depth;
    return puiseux_branches(P, dir, o);
}

// Expansion of the roots that blow up or stay finite as xi -> center from the
// given side (plus_infinity = from above).
std::vector<PuiseuxBranch> local_puiseux_branches(const OperatorSymbol& P, double center, Direction side,
                                                  const PuiseuxOptions& opts = {});

enum class BranchBehaviour { bounded_above, unbounded_above, needs_deeper };

struct BranchClass {
    BranchBehaviour behaviour = BranchBehaviour::needs_deeper;
    // lim sup of Re lambda along the branch (-inf when Re lambda -> -inf)
    double limit = 0.0;
    int witness_sheet = -1;  // sheet that decided an unbounded verdict
};

std::string to_string(BranchBehaviour b);

BranchClass classify_branch(const PuiseuxBranch& b);

struct ExactOptions {
    int depth = 8;
    int max_depth = 32;
    int samples = 4001;
};

PetrovskiiVerdict petrovskii_verdict_exact_1d(const OperatorSymbol& P, const ExactOptions& opts = {});

}  // namespace evolv

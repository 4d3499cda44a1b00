#include "evolv/verdict.hpp"

namespace evolv {

std::string to_string(Classification c) {
    switch (c) {
        case Classification::bounded: return "bounded";
        case Classification::unbounded: return "unbounded";
        default: return "undetermined";
    }
}

std::string to_string(VerdictMethod m) { return m == VerdictMethod::exact_1d ? "exact_1d" : "numeric"; }

}  // namespace evolv

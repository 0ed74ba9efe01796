/*
 * checks.hpp
 * Randomized property suite behind the `check` subcommand: norm-equivalence
 * bounds, gradient finite differences, prox oracles, inexactness and descent
 * contracts, Krylov residual reverification, preconditioner linearity.
 */
#pragma once

#include <string>
#include <vector>

namespace eoc {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Deterministic for a fixed seed; every check reports instead of throwing.
std::vector<CheckResult> run_property_checks(unsigned seed);

}  // namespace eoc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgcn/config.hpp"

namespace tgcn {

struct PropertyResult {
    std::string suite;
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;  // worst value seen across trials
    bool pass = false;
    std::string note;
};

struct VerifyOptions {
    std::uint64_t seed = 20240;
    int trials = 100;
    // Deliberately corrupts the inverse-transform step of the round-trip
    // property so the suite's failure path can be exercised end to end.
    bool inject_fault = false;
};

// Transform/product algebra invariants on random instances: round trips,
// ring structure, identities, transposes, norm bounds, banded-matrix rows.
std::vector<PropertyResult> verify_algebra(const VerifyOptions& opt);

// Eigendecomposition, spectral bound, Fourier pair, filters and their
// polynomial approximation, basis expansion, determinism.
std::vector<PropertyResult> verify_spectral(const VerifyOptions& opt);

// Analytic gradients against central finite differences, forward-path
// equivalence, loss symmetries.
std::vector<PropertyResult> verify_gradients(const VerifyOptions& opt);

// Eigenvalue range of the transformed training-window Laplacian for a real
// dataset. Graphs larger than max_nodes are reduced to the induced subgraph
// of the max_nodes highest-degree nodes; the substitution is stated in the
// result note. Asserts the [0,2] bound only for symmetrized input.
PropertyResult dataset_bound_check(const ExperimentConfig& c, int max_nodes = 2000);

bool all_passed(const std::vector<PropertyResult>& results);
std::string format_property_table(const std::vector<PropertyResult>& results);
std::string property_csv(const std::vector<PropertyResult>& results);

}  // namespace tgcn

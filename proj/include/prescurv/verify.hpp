#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "prescurv/jet.hpp"
#include "prescurv/spaceform.hpp"

namespace prescurv {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // worst residual encountered
    double tolerance = 0.0;
    std::string detail;      // where the worst case sat
};

// Seeded random strictly locally convex jets in the admissible u range
// of the given model; shared by the suites and the acceptance tests.
class JetSampler {
public:
    explicit JetSampler(std::uint64_t seed);
    ScalarJet2 admissible(const SpaceFormModel& model, int n);
    double uniform(double lo, double hi);

private:
    std::mt19937_64 rng_;
};

SuiteResult suite_formulation_equivalence(std::uint64_t seed);
SuiteResult suite_sqrt_metric(std::uint64_t seed);
SuiteResult suite_linearization_fd(std::uint64_t seed);
SuiteResult suite_deformation_monotonicity(std::uint64_t seed);
SuiteResult suite_chart_identity(std::uint64_t seed);

std::vector<SuiteResult> run_verification(std::uint64_t seed);

}  // namespace prescurv

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kinb {

struct SuiteOptions {
    double cm_scale = 1.0; // multiplies C_m in the kl suite; values below 1 force failures
};

struct SuiteResult {
    std::string name;
    long checks = 0;
    long failures = 0;
    std::string counterexample; // first failing case, empty when all pass
    bool ok() const { return failures == 0; }
};

const std::vector<std::string>& suite_names();

// Throws ConfigError for an unknown suite name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, const SuiteOptions& options = {});

} // namespace kinb

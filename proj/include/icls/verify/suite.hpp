#pragma once

// Property checks over randomized instances. Shared by the acceptance
// runner and the `selfcheck` CLI command.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace icls::verify {

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

// Refit agreement of ICLS fits gathered across the QP suites.
struct MembershipTally {
    std::size_t fits = 0;
    std::size_t failures = 0;
    double worst_beta_gap = 0.0;
    bool labels_in_box = true;
};

struct SuiteConfig {
    std::uint64_t seed = 20240501;
    std::size_t threads = 1;
    std::size_t theorem_trials = 10000;
    std::size_t qp_oracle_instances = 100;
    std::size_t psd_instances = 200;
    std::size_t gradient_instances = 20;
    std::size_t gradient_points = 20;
    std::size_t usm_datasets = 20;
    std::size_t self_learning_problems = 100;
    std::size_t curve_repeats = 200;
};

CheckResult check_theorem1_never_worse(const SuiteConfig& cfg);
CheckResult check_theorem1_strict(const SuiteConfig& cfg);
CheckResult check_qp_oracle(const SuiteConfig& cfg, MembershipTally& tally);
CheckResult check_q_psd(const SuiteConfig& cfg, MembershipTally& tally);
CheckResult check_gradient(const SuiteConfig& cfg, MembershipTally& tally);
CheckResult check_membership(const MembershipTally& tally);
CheckResult check_micro_instance();
CheckResult check_usm_invariance(const SuiteConfig& cfg);
CheckResult check_self_learning(const SuiteConfig& cfg);
CheckResult check_wilcoxon_exact();
// Two-Gaussian learning curve: mean ICLS error within one standard error of
// (or below) the mean supervised error at every U in 2..256.
CheckResult check_synthetic_learning_curve(const SuiteConfig& cfg);
// Learning-curve and cross-validation outputs serialize to identical bytes
// across runs and thread counts.
CheckResult check_library_determinism(const SuiteConfig& cfg);

// Criteria that need no external data, in order.
std::vector<CheckResult> run_property_suite(const SuiteConfig& cfg, bool include_slow);

std::string format_check(const CheckResult& r);

}  // namespace icls::verify

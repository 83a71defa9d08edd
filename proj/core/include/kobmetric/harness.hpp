#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kobmetric/domains.hpp"
#include "kobmetric/serialize.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

enum class ExperimentKind {
    BallValidation,  // metric and invariant engines against ball closed forms
    EggReport,       // egg center invariant plus two-sided metric ratio table
    LempertSweep,    // analytic lower bound vs one-disc upper over epsilon
    Anisotropy,      // stretched-ball direction ratio at the center
    QuotientScan,    // quotient bound along an inward normal ray
    ChainDemo,       // 4-leg random chains, then shorten_chain traces
    DbarScaling,     // correction_scaling_experiment table
    StabilitySweep,  // quotient bound under domain perturbation N_j -> N
};

const char* experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_name(const std::string& name);

enum class ReportFormat { Csv, Json };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::BallValidation;
    std::optional<DomainSpec> domain;  // per-experiment default when absent
    OptimizerBudget budget;            // budget.seed is overridden by `seed`
    std::uint64_t seed = 0;
    std::string output_path;  // consumed by emit_report
    ReportFormat format = ReportFormat::Csv;
};

struct ExperimentResult {
    ReportTable table;
    int failures = 0;  // sub-runs whose row records an error status
};

// Deterministic given (experiment, domain, budget, seed): sweep points get
// per-row seeds derived from `seed` by a splitmix64 step, so results do not
// depend on execution order. A sub-run failure is recorded in its row's
// status column (numeric cells zeroed) and never aborts the sweep.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes the report to config.output_path in config.format. Throws on empty
// tables (via the writers) and unwritable paths.
void emit_report(const ReportTable& table, const ExperimentConfig& config);

// splitmix64 of (seed, index): the per-row seed schedule used by sweeps.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace kobmetric

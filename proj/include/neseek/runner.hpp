#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neseek/config.hpp"
#include "neseek/diagnostics.hpp"
#include "neseek/solver.hpp"
#include "neseek/trajectory.hpp"

namespace neseek {

/// Final record of a scenario run; serialized to summary.json next to the
/// trajectory CSV.
struct RunSummary {
    std::string name;
    std::string hash;                 // config hash, also stamped in the CSV
    IntegrationStatus status = IntegrationStatus::ok;
    bool converged = false;           // final ne_error_inf <= threshold
    double t_final = 0;
    double final_ne_error = 0;        // 2-norm at the last log
    double final_ne_error_inf = 0;    // max-norm, drives the converged flag
    double final_consensus_error = 0;
    Vec final_gains;
    bool condition_checked = false;   // strong-coupling test applicable?
    bool condition_held = false;
    double lambda2 = 0;               // 0 when no graph
    double min_k_star_value = 0;      // 0 when not applicable
    double oracle_residual = 0;
    bool oracle_converged = false;
    double wall_seconds = 0;

    /// 0 success, 3 divergence, 4 oracle or trajectory non-convergence.
    int exit_code() const;
};

struct RunOutput {
    RunSummary summary;
    TrajectoryLog log;
    std::vector<MetricsRow> metrics;
    OracleResult oracle;
    Vec x_star;
};

/// Full pipeline: build objects, run the equilibrium oracle, check the
/// coupling condition, integrate, compute metrics, optionally write
/// <output_dir>/trajectory.csv and <output_dir>/summary.json.
RunOutput run_scenario(const ScenarioConfig& cfg, bool write_files = true);

/// One run per value of the swept axis, fanned out across threads. Output
/// lands in <output_dir>/<axis>_<index>/; a per-run failure is recorded and
/// does not abort the sweep.
struct SweepRow {
    double value = 0;
    bool failed = false;        // threw before producing a summary
    std::string error;
    RunSummary summary;         // valid when !failed
};
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& axis,
                            const std::vector<double>& values, bool write_files = true);

/// The CSV emitted for every run: header comment with name/hash, fixed
/// column order (t, x[agent.block]..., k[i]..., ne_error, consensus_error,
/// avg_error, W), every value rendered with 17 significant digits so
/// identical runs produce identical bytes.
std::string render_trajectory_csv(const ScenarioConfig& cfg, const std::string& hash,
                                  const TrajectoryLog& log,
                                  const std::vector<MetricsRow>& metrics);

} // namespace neseek

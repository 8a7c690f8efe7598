#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rarsched/sjf_bco.hpp"
#include "rarsched/workload.hpp"

namespace rarsched {

enum class ExperimentKind { compare, kappa, servers, lambda };

ExperimentKind experiment_kind_from_name(const std::string& name);

struct ReportRow {
    std::string experiment;
    std::string policy;
    std::uint64_t seed = 0;
    double sweep_param = 0;
    int makespan_slots = 0;
    double avg_jct_slots = 0;  // mean completion slot under the contention model
    int theta_u = 0;
    double runtime_ms = 0;  // planning time; excluded from determinism guarantees
    int infeasible = 0;
};

// Runs a policy by name and evaluates its schedule under the contention model.
SchedulerResult run_policy(const std::string& policy, std::span<const JobSpec> jobs,
                           const ClusterSpec& cluster, int horizon,
                           const ExecutionEstimates& estimates, std::uint64_t seed,
                           const SjfBcoOptions& options = {});

// The four evaluations: policy comparison, size-threshold sweep, server-count
// sweep, and spread-factor sweep. Rows come out in a fixed (seed, sweep,
// policy) order; identical config and seeds give identical rows apart from
// the runtime column.
std::vector<ReportRow> run_experiment(ExperimentKind kind, const WorkloadConfig& config);

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out,
                      bool include_runtime = true);

// Human-oriented aggregate table: mean makespan and mean JCT per (policy,
// sweep point).
void write_report_summary(std::span<const ReportRow> rows, std::ostream& out);

}  // namespace rarsched

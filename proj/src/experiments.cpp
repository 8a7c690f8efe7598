#include "rarsched/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <stdexcept>

#include "rarsched/baselines.hpp"
#include "rarsched/rng.hpp"
#include "rarsched/sim_engine.hpp"
#include "rarsched/util.hpp"

namespace rarsched {

namespace {
constexpr std::uint64_t kEstimateSalt = 0x657374;
constexpr std::uint64_t kRandPolicySalt = 0x726e64;
}  // namespace

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "compare") return ExperimentKind::compare;
    if (name == "kappa") return ExperimentKind::kappa;
    if (name == "servers") return ExperimentKind::servers;
    if (name == "lambda") return ExperimentKind::lambda;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

SchedulerResult run_policy(const std::string& policy, std::span<const JobSpec> jobs,
                           const ClusterSpec& cluster, int horizon,
                           const ExecutionEstimates& estimates, std::uint64_t seed,
                           const SjfBcoOptions& options) {
    if (policy == "sjf-bco") return sjf_bco(jobs, cluster, horizon, estimates, options);
    if (policy == "ff") return first_fit(jobs, cluster, horizon, estimates);
    if (policy == "ls") return list_scheduling(jobs, cluster, horizon, estimates);
    if (policy == "rand")
        return random_policy(jobs, cluster, horizon, estimates,
                             Rng(seed).fork(kRandPolicySalt).next_u64());
    throw std::invalid_argument("unknown policy: " + policy);
}

namespace {

ReportRow evaluate_policy(const std::string& experiment, const std::string& policy,
                          const Instance& instance, const ExecutionEstimates& estimates,
                          std::uint64_t seed, double sweep_param, const SjfBcoOptions& options) {
    ReportRow row;
    row.experiment = experiment;
    row.policy = policy;
    row.seed = seed;
    row.sweep_param = sweep_param;

    const int horizon = instance.cluster.slot_count;
    const auto t0 = std::chrono::steady_clock::now();
    SchedulerResult planned =
        run_policy(policy, instance.jobs, instance.cluster, horizon, estimates, seed, options);
    const auto t1 = std::chrono::steady_clock::now();
    row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.theta_u = planned.theta_u;

    if (planned.infeasible) {
        row.makespan_slots = horizon;
        row.avg_jct_slots = horizon;
        row.infeasible = 1;
        return row;
    }
    SimTrace trace = simulate(planned.schedule, instance.jobs, instance.cluster);
    row.makespan_slots = trace.makespan;
    row.avg_jct_slots = trace.avg_completion_slot;
    row.infeasible = trace.horizon_exceeded ? 1 : 0;
    return row;
}

ExecutionEstimates estimates_for(const Instance& instance, const WorkloadConfig& config,
                                 std::uint64_t seed) {
    EstimateOptions options;
    options.mode = config.estimate_mode;
    options.range_lo = config.rho_range_lo;
    options.range_hi = config.rho_range_hi;
    options.seed = Rng(seed).fork(kEstimateSalt).next_u64();
    return build_estimates(instance.jobs, instance.cluster, options);
}

}  // namespace

std::vector<ReportRow> run_experiment(ExperimentKind kind, const WorkloadConfig& config) {
    std::vector<ReportRow> rows;

    for (int i = 0; i < config.seed_count; ++i) {
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
        switch (kind) {
            case ExperimentKind::compare: {
                Instance instance = generate_instance(config, seed);
                ExecutionEstimates estimates = estimates_for(instance, config, seed);
                for (const std::string& policy : config.policies)
                    rows.push_back(evaluate_policy("compare", policy, instance, estimates, seed,
                                                   0.0, {}));
                break;
            }
            case ExperimentKind::kappa: {
                Instance instance = generate_instance(config, seed);
                ExecutionEstimates estimates = estimates_for(instance, config, seed);
                for (int kappa = config.kappa_min; kappa <= config.kappa_max; ++kappa) {
                    SjfBcoOptions options;
                    options.pinned_kappa = kappa;
                    rows.push_back(evaluate_policy("kappa", "sjf-bco", instance, estimates, seed,
                                                   kappa, options));
                }
                break;
            }
            case ExperimentKind::servers: {
                for (int servers = config.servers_min; servers <= config.servers_max; ++servers) {
                    Instance instance =
                        generate_instance(config, seed, servers, config.servers_horizon);
                    ExecutionEstimates estimates = estimates_for(instance, config, seed);
                    for (const std::string& policy : config.policies)
                        rows.push_back(evaluate_policy("servers", policy, instance, estimates,
                                                       seed, servers, {}));
                }
                break;
            }
            case ExperimentKind::lambda: {
                Instance instance = generate_instance(config, seed);
                ExecutionEstimates estimates = estimates_for(instance, config, seed);
                for (double lambda : config.lambda_values) {
                    SjfBcoOptions options;
                    options.pinned_kappa = 1;
                    options.spread_factor = lambda;
                    rows.push_back(evaluate_policy("lambda", "sjf-bco", instance, estimates, seed,
                                                   lambda, options));
                }
                break;
            }
        }
    }
    return rows;
}

void write_report_csv(std::span<const ReportRow> rows, std::ostream& out, bool include_runtime) {
    out << "experiment,policy,seed,sweep_param,makespan_slots,avg_jct_slots,theta_u";
    if (include_runtime) out << ",runtime_ms";
    out << ",infeasible\n";
    for (const ReportRow& r : rows) {
        out << r.experiment << ',' << r.policy << ',' << r.seed << ',' << fmt_double(r.sweep_param)
            << ',' << r.makespan_slots << ',' << fmt_double(r.avg_jct_slots) << ',' << r.theta_u;
        if (include_runtime) out << ',' << fmt_double(r.runtime_ms);
        out << ',' << r.infeasible << '\n';
    }
}

void write_report_summary(std::span<const ReportRow> rows, std::ostream& out) {
    struct Agg {
        double makespan = 0, jct = 0, runtime = 0;
        int count = 0, infeasible = 0;
    };
    std::map<std::pair<std::string, double>, Agg> groups;
    for (const ReportRow& r : rows) {
        Agg& agg = groups[{r.policy, r.sweep_param}];
        agg.makespan += r.makespan_slots;
        agg.jct += r.avg_jct_slots;
        agg.runtime += r.runtime_ms;
        agg.count++;
        agg.infeasible += r.infeasible;
    }
    out << "policy,sweep_param,seeds,mean_makespan,mean_avg_jct,mean_runtime_ms,infeasible_runs\n";
    for (const auto& [key, agg] : groups)
        out << key.first << ',' << fmt_double(key.second) << ',' << agg.count << ','
            << fmt_double(agg.makespan / agg.count) << ',' << fmt_double(agg.jct / agg.count)
            << ',' << fmt_double(agg.runtime / agg.count) << ',' << agg.infeasible << '\n';
}

}  // namespace rarsched

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rarsched/estimates.hpp"
#include "rarsched/iteration_models.hpp"
#include "rarsched/sjf_bco.hpp"
#include "rarsched/types.hpp"

namespace rarsched {

struct SimStep {
    int slot = 0;
    int job_id = 0;
    int contention = 0;   // concurrent rings sharing the job's worst link
    double k = 0;         // effective contending jobs after scaling
    double tau = 0;       // per-iteration time this slot
    long long speed = 0;  // whole iterations finished this slot
    long long done = 0;   // cumulative iterations after this slot
};

struct JobOutcome {
    int job_id = 0;
    int start_slot = 0;
    int completion_slot = 0;  // 0 while unfinished
    bool finished = false;
    long long iterations_done = 0;
};

struct SimTrace {
    std::vector<SimStep> steps;
    std::vector<JobOutcome> jobs;  // ascending job id
    int makespan = 0;
    double avg_duration_slots = 0;   // mean of completion - start + 1
    double avg_completion_slot = 0;  // mean completion slot
    bool horizon_exceeded = false;   // some job did not finish by the horizon
};

// Slot-by-slot evaluation of a schedule under the contention model. Jobs
// become active at their scheduled start and stay active until the slot their
// iteration total reaches the requested count; the resources they pin shape
// every co-active job's bandwidth. A completion releases contention from the
// following slot on. Unfinished jobs at the horizon set `horizon_exceeded`
// and are reported with the horizon as their completion in the averages.
SimTrace simulate(const Schedule& schedule, std::span<const JobSpec> jobs,
                  const ClusterSpec& cluster,
                  std::optional<OverlapCoefficients> coefficients = std::nullopt);

// One row per (slot, job) and a trailing summary row.
void write_sim_trace_csv(const SimTrace& trace, std::ostream& out);

struct OracleResult {
    int optimal_makespan = 0;
    Schedule schedule;
    // True execution-time extremes per job across every feasible schedule the
    // enumeration visited, for exact placement-sensitivity ratios.
    std::map<int, int> min_duration;
    std::map<int, int> max_duration;
};

// Exhaustive search over start slots and per-server GPU splits, simulated
// under the full model with capacity enforced on true active intervals.
// Only for tiny instances: at most 3 jobs, 2 servers, 8 GPUs total and a
// 20-slot horizon; anything larger throws std::invalid_argument.
OracleResult brute_force_optimal(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                 int horizon);

struct RatioRecord {
    double empirical_ratio = 0;  // achieved makespan over optimal
    double bound = 0;            // max ring width times varphi times u over l
    bool within_bound = false;
};

// Compares an achieved makespan against the oracle and the analytical bound.
// `exact_varphi` substitutes the enumerated placement-sensitivity ratio for
// the estimate-set's coarse one when available.
RatioRecord approximation_report(std::span<const JobSpec> jobs, int achieved_makespan,
                                 const OracleResult& oracle, const ExecutionEstimates& estimates,
                                 std::optional<double> exact_varphi = std::nullopt);

}  // namespace rarsched

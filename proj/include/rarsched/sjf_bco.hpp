#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rarsched/estimates.hpp"
#include "rarsched/load_book.hpp"
#include "rarsched/types.hpp"

namespace rarsched {

// One job successfully placed by a dispatch routine.
struct PlannedJob {
    int job_id = 0;
    int start_slot = 1;
    int end_slot = 1;
    Placement placement;
};

// Fragment-aware first-fit packing. Collects GPUs that are idle at the virtual
// clock and whose booked load stays within theta_u after taking this job, then
// grabs the least-loaded gpus_requested of them. When too few qualify it waits
// for the next planned release and retries; nullopt means no release is left
// to wait for and the limit cannot be met.
std::optional<PlannedJob> fa_ffp(const JobSpec& job, GpuLoadBook& book, int theta_u,
                                 const ExecutionEstimates& estimates, int horizon);

// Least-busy-server-GPU-first. Restricts the candidate pool to the least
// loaded servers whose combined capacity reaches server_spread_factor times
// the job's demand, then packs like fa_ffp within that pool.
std::optional<PlannedJob> lbsgf(const JobSpec& job, GpuLoadBook& book, int theta_u,
                                const ExecutionEstimates& estimates, double spread_factor,
                                int horizon);

struct PassTraceRow {
    int theta_u = 0;
    int kappa = 0;
    int booked_makespan = 0;     // from the booked slot intervals
    int evaluated_makespan = 0;  // from the contention model
    bool feasible = false;
};

struct SchedulerResult {
    int makespan = 0;  // planner's own estimate, from booked durations
    Schedule schedule;
    int theta_u = 0;  // tightest per-GPU execution-time limit that worked
    int kappa = 0;    // size threshold the returned schedule was built with
    bool infeasible = false;
    std::vector<PassTraceRow> trace;
};

struct SjfBcoOptions {
    // Pins the size threshold instead of searching 1..max gpus_requested.
    std::optional<int> pinned_kappa;
    // Overrides every job's server spread factor when set.
    std::optional<double> spread_factor;
};

// Smallest-job-first scheduling with balanced contention and overhead: jobs
// sorted by size, a bisection over the per-GPU execution-time limit, and for
// each limit a scan over the size threshold that routes small jobs to fa_ffp
// and large jobs to lbsgf. Candidate passes are compared by evaluating their
// schedules under the contention model; the returned schedule is the best
// pass at the tightest workable limit. `infeasible` is set when no limit up
// to the horizon works.
SchedulerResult sjf_bco(std::span<const JobSpec> jobs, const ClusterSpec& cluster, int horizon,
                        const ExecutionEstimates& estimates, const SjfBcoOptions& options = {});

// One full dispatch pass at a fixed limit and threshold, in the given job
// order. Exposed for the exhaustive limit-scan checks.
struct PassResult {
    bool feasible = false;
    int makespan = 0;
    Schedule schedule;
};
PassResult run_sjf_pass(std::span<const JobSpec> jobs_sorted, const ClusterSpec& cluster,
                        int theta_u, int kappa, const ExecutionEstimates& estimates, int horizon,
                        const SjfBcoOptions& options = {});

}  // namespace rarsched

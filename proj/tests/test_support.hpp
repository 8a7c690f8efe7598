#pragma once

// Shared builders for planner-level tests: small random instances with
// parameters tame enough that every job can finish within the horizon.

#include <vector>

#include "rarsched/estimates.hpp"
#include "rarsched/rng.hpp"
#include "rarsched/sjf_bco.hpp"
#include "rarsched/types.hpp"

namespace rarsched::testing {

struct SmallInstance {
    std::vector<JobSpec> jobs;
    ClusterSpec cluster;
};

inline JobSpec make_job(int id, int gpus, long long iterations, double solo_tau,
                        double comm_share, const ClusterSpec& cluster) {
    JobSpec j;
    j.id = id;
    j.gpus_requested = gpus;
    j.iterations = iterations;
    j.minibatch = 8;
    double compute = solo_tau;
    if (gpus > 1) {
        const double unit = 2.0 / cluster.intra_bandwidth + 1.0 / cluster.gpu_speed;
        j.gradient_size = comm_share * solo_tau * gpus / ((gpus - 1) * unit);
        compute = (1 - comm_share) * solo_tau;
    } else {
        j.gradient_size = 1.0;
    }
    j.fp_per_sample = 0.6 * compute / j.minibatch;
    j.bp_time = 0.4 * compute;
    return j;
}

inline SmallInstance random_small_instance(Rng& rng, int max_jobs = 10, int max_servers = 4,
                                           int horizon = 64) {
    SmallInstance inst;
    inst.cluster.intra_bandwidth = 100;
    inst.cluster.inter_bandwidth = 25;
    inst.cluster.gpu_speed = 400;
    inst.cluster.degradation_alpha = 0.1;
    inst.cluster.contention_fraction = 0.05;
    inst.cluster.overhead_per_server = 0.001;
    inst.cluster.slot_count = horizon;
    const int servers = 1 + static_cast<int>(rng.below(max_servers));
    for (int s = 0; s < servers; ++s)
        inst.cluster.server_capacities.push_back(1 + static_cast<int>(rng.below(4)));

    const int jobs = 1 + static_cast<int>(rng.below(max_jobs));
    const int total = inst.cluster.total_gpus();
    for (int j = 0; j < jobs; ++j) {
        const int gpus = 1 + static_cast<int>(rng.below(std::min(total, 4)));
        inst.jobs.push_back(make_job(j + 1, gpus, 20 + rng.below(120),
                                     rng.uniform_real(0.05, 0.2), rng.uniform_real(0.2, 0.5),
                                     inst.cluster));
    }
    return inst;
}

// Per-GPU booked load of a schedule under the planner's estimates.
inline double max_booked_load(const Schedule& schedule, const ExecutionEstimates& estimates,
                              const ClusterSpec& cluster) {
    std::vector<std::vector<double>> load;
    for (int cap : cluster.server_capacities) load.emplace_back(cap, 0.0);
    for (const auto& [job_id, entry] : schedule.entries)
        for (const GpuRef& g : entry.placement().gpus)
            load[g.server][g.gpu] += estimates.planned_load(job_id);
    double worst = 0;
    for (const auto& server : load)
        for (double v : server) worst = std::max(worst, v);
    return worst;
}

}  // namespace rarsched::testing

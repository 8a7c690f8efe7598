#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rarsched/types.hpp"

namespace rarsched {

// Largest number of concurrently running jobs that share an inter-server link
// with `job_id`, taken over the servers the job spans. Zero when the job sits
// on a single server. Throws std::out_of_range if the job is not in the set.
int contention_degree(std::span<const Placement> active, int job_id);

// Bandwidth sharing degradation factor f(alpha, k). The linear model gives
// k + alpha * (k - 1); f(alpha, 1) == 1 and f is nondecreasing in k.
// k < 0 is a domain error.
double degradation_factor(double alpha, double k,
                          DegradationModel model = DegradationModel::linear);

// Bandwidth of the slowest link in the job's ring. Single-server rings use the
// intra-server bandwidth; inter-server rings get the shared link bandwidth
// divided by the degradation factor, with k clamped up to 1.
double bottleneck_bandwidth(const Placement& placement, double k, const ClusterSpec& cluster);

// Per-iteration time, in slots, for one ring-all-reduce training iteration:
// gradient exchange, reduction compute, per-server coordination overhead,
// then the forward and backward passes.
double per_iteration_time(const JobSpec& job, const Placement& placement, double k,
                          const ClusterSpec& cluster);

// Whole iterations completed per slot: floor(1 / tau). tau <= 0 is a domain error.
long long training_speed(double tau);

// First slot in which the running iteration total reaches `iterations`.
// `speeds[i]` is the speed in slot start + i. Returns nullopt when the total
// never gets there within the given speeds.
std::optional<int> completion_time(int start, std::span<const long long> speeds,
                                   long long iterations);

// Total data any single worker receives over one ring-all-reduce round of a
// `workers`-wide ring on a gradient of size `gradient_dim`.
double rar_traffic_volume(int workers, double gradient_dim);

// Checks a schedule against the gang-scheduling feasibility rules and returns
// every broken constraint with its coordinates. Empty result means feasible.
std::vector<Violation> validate_schedule(const Schedule& schedule,
                                         std::span<const JobSpec> jobs,
                                         const ClusterSpec& cluster);

}  // namespace rarsched

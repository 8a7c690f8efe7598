#pragma once

#include <cstdint>
#include <span>

#include "rarsched/sjf_bco.hpp"

namespace rarsched {

// Comparison policies. All three keep jobs in submission order. First-fit and
// list-scheduling search for their own tightest execution-time limit with the
// same bisection as sjf_bco; the random policy runs once with the limit pinned
// to the horizon.

// Takes the first qualifying GPUs in server-then-GPU index order.
SchedulerResult first_fit(std::span<const JobSpec> jobs, const ClusterSpec& cluster, int horizon,
                          const ExecutionEstimates& estimates);

// Takes the globally least-loaded qualifying GPUs.
SchedulerResult list_scheduling(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                int horizon, const ExecutionEstimates& estimates);

// Takes a uniformly random qualifying GPU subset.
SchedulerResult random_policy(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                              int horizon, const ExecutionEstimates& estimates,
                              std::uint64_t seed);

}  // namespace rarsched

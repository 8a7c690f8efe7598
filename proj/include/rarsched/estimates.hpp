#pragma once

#include <map>
#include <span>

#include "rarsched/types.hpp"

namespace rarsched {

// Best- and worst-case per-iteration times a job can see under any feasible
// placement, together with the execution times they induce. Durations account
// for the whole-iterations-per-slot floor, so the true execution time of the
// job always lands inside [rho_min, rho_max] (rho_max may be the stall
// sentinel when the worst case makes no progress at all).
struct ExecutionBounds {
    double tau_min = 0;
    double tau_max = 0;
    double rho_min = 0;  // slots
    double rho_max = 0;  // slots, kStallSentinel when unbounded
};

inline constexpr double kStallSentinel = 1e15;

ExecutionBounds execution_time_bounds(const JobSpec& job, const ClusterSpec& cluster);

enum class EstimateMode {
    model,  // iterations times the midpoint per-iteration time
    range,  // drawn uniformly from a configured band, for experiment replication
};

struct JobEstimate {
    ExecutionBounds bounds;
    double rho_hat = 0;  // estimated execution time, slots
};

// Estimates for a job set plus the global accuracy envelope: rho_hat lies in
// [l * rho, u * rho] for the true execution time rho of any feasible placement,
// and varphi bounds the ratio between a job's execution times under any two
// placements.
struct ExecutionEstimates {
    std::map<int, JobEstimate> by_job;
    double l = 1.0;       // <= 1
    double u = 1.0;       // >= 1
    double varphi = 1.0;  // >= 1

    double planned_load(int job_id) const;   // rho_hat / u, what the planner books per GPU
    int planned_duration(int job_id) const;  // same value in whole slots
};

struct EstimateOptions {
    EstimateMode mode = EstimateMode::model;
    double range_lo = 50.0;
    double range_hi = 300.0;
    std::uint64_t seed = 0;  // used by range mode only
};

double estimate_execution(const JobSpec& job, const ExecutionBounds& bounds);

ExecutionEstimates build_estimates(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                   const EstimateOptions& options = {});

}  // namespace rarsched

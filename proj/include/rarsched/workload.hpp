#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rarsched/config.hpp"
#include "rarsched/estimates.hpp"
#include "rarsched/types.hpp"

namespace rarsched {

// Everything the generator and the experiment drivers read. Parsed from the
// flat config format; any unread key in the file is an error.
struct WorkloadConfig {
    // job mix: ring width -> count
    std::map<int, int> size_histogram = {{1, 80}, {2, 14}, {4, 26}, {8, 30}, {16, 8}, {32, 2}};
    long long iterations_min = 1000, iterations_max = 6000;
    double solo_tau_min = 0.01, solo_tau_max = 0.05;  // uncontended per-iteration band
    double comm_share_min = 0.3, comm_share_max = 0.6;
    std::vector<long long> minibatch_choices = {16, 32, 64, 128, 256};

    // estimates
    EstimateMode estimate_mode = EstimateMode::model;
    double rho_range_lo = 50, rho_range_hi = 300;

    // cluster
    int server_count = 20;
    std::vector<int> capacity_choices = {4, 8, 16, 32};
    double intra_bandwidth = 100.0;
    double inter_bandwidth = 25.0;
    double gpu_speed = 400.0;
    double degradation_alpha = 0.1;
    double slot_duration = 1.0;

    // contention and overhead scale; xi_linked keeps the two coefficients
    // equal (calibration applies only to the linked scale)
    bool xi_linked = true;
    bool calibrate_xi = true;
    double xi_scale = 0.001;            // used directly when calibration is off
    double xi_contention = 0.001;       // used when the coefficients are unlinked
    double xi_overhead = 0.001;
    double contention_share_cap = 0.15; // calibration target share

    // experiments
    int horizon = 1200;
    int seed_count = 20;
    std::uint64_t base_seed = 1;
    std::vector<std::string> policies = {"sjf-bco", "ff", "ls", "rand"};
    int kappa_min = 1, kappa_max = 32;
    std::vector<double> lambda_values = {1, 2, 4, 8};
    int servers_min = 10, servers_max = 20;
    int servers_horizon = 1500;
    double default_spread_factor = 1.0;
};

WorkloadConfig workload_config_from(Config& config);

struct Instance {
    std::vector<JobSpec> jobs;
    ClusterSpec cluster;
    double xi = 0;  // the contention and overhead scale in effect
};

// Server capacities drawn uniformly from the configured choices. Clusters of
// different sizes under the same seed share a prefix: the n-server cluster is
// the first n draws of the largest one, so a server-count sweep changes only
// how much of the same cluster is available.
ClusterSpec generate_cluster(const WorkloadConfig& config, std::uint64_t seed,
                             int server_count = -1);

// The configured job mix with seeded parameter draws. Jobs come out ordered by
// ring width then id; ids start at 1.
std::vector<JobSpec> generate_workload(const WorkloadConfig& config, std::uint64_t seed,
                                       const ClusterSpec& cluster);

// Largest contention-plus-overhead scale, searched on (0, 1], whose share of
// the pilot run's total execution time stays within the configured cap.
double calibrate_xi(std::vector<JobSpec> jobs, ClusterSpec cluster, const WorkloadConfig& config);

// Cluster, jobs, and the calibrated scale in one step.
Instance generate_instance(const WorkloadConfig& config, std::uint64_t seed,
                           int server_count = -1, int horizon_override = -1);

// Instance round trip through the flat config format.
void write_instance(const Instance& instance, std::ostream& out);
Instance read_instance(Config& config);

}  // namespace rarsched

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rarsched/config.hpp"
#include "rarsched/lp.hpp"

namespace rarsched {

// Single-interval GPU placement problem: each job pins its workers to servers
// once, pays execution cost that grows with the contention level it sees, and
// every opened server charges its unused capacity as fragmentation.
struct DdljsJob {
    int id = 0;
    int gpus = 1;                    // workers to place
    long long iterations = 1;        // weight on the execution cost
    double base_time = 1.0;          // per-iteration time at zero contention
    double contention_slope = 0.0;   // added time per unit of contention level
};

struct DdljsInstance {
    std::vector<DdljsJob> jobs;
    std::vector<int> server_capacities;
    double execution_weight = 1.0;     // cost per iteration-slot
    double fragmentation_weight = 1.0; // cost per reserved-but-idle GPU
    double alpha = 0.5;                // contention per co-located split ring, in (0,1)

    int server_count() const { return static_cast<int>(server_capacities.size()); }
    void check() const;
};

// The relaxed placement program plus the index maps into its variable space.
struct RelaxationLp {
    LinearProgram lp;
    int num_jobs = 0, num_servers = 0;
    std::vector<int> gpus_per_job;
    bool strengthened = false;

    // variable indices
    int z(int j, int g, int s) const;  // GPU g of job j sits on server s
    int gamma(int j, int s) const;     // job j touches server s
    int chi(int s) const;              // server s is open
    int x(int j, int s) const;         // job j splits across s (spanning indicator)
    int xprime(int j, int s) const;    // job j is not fully on s
    int zprime(int j, int s) const;    // linearized chi * xprime
    int k(int j) const;                // contention level charged to job j

  private:
    friend RelaxationLp build_relaxation(const DdljsInstance&, bool);
    int z0_ = 0, gamma0_ = 0, chi0_ = 0, x0_ = 0, xprime0_ = 0, zprime0_ = 0, k0_ = 0;
    std::vector<int> job_z_offset_;
};

// Base placement relaxation, optionally with the strengthening rows that keep
// fractional solutions from dissolving split rings, with the bilinear
// tightening replaced by its four-inequality linear envelope.
RelaxationLp build_relaxation(const DdljsInstance& instance, bool strengthened = true);

struct FractionalSolution {
    double objective = 0;
    std::vector<std::vector<std::vector<double>>> z;  // [job][gpu][server]
    std::vector<std::vector<double>> gamma, x, xprime, zprime;  // [job][server]
    std::vector<double> chi;  // [server]
    std::vector<double> k;    // [job]
};

// Solves the relaxation. Throws std::runtime_error when the demand cannot fit.
FractionalSolution solve_relaxation(const RelaxationLp& relaxation,
                                    const DdljsInstance& instance);

// Fractional worker mass per (job, server) folded into an integer floor plus a
// remainder strictly below one.
struct MergedSolution {
    std::vector<std::vector<int>> y_floor;    // [job][server]
    std::vector<std::vector<double>> z_frac;  // [job][server] remainder
    std::vector<int> residual_capacity;       // per server, at least 1
    std::vector<int> tasks_per_job;           // residual whole units to place
};

MergedSolution merge_fractions(const FractionalSolution& solution, const DdljsInstance& instance);

// The residual placement as an assignment problem: one task per leftover
// worker unit, costs favoring servers that already hold most of the job, and
// the optimal fractional assignment that seeds the rounding.
struct GapInstance {
    struct Task {
        int job = 0;    // index into instance.jobs
        int index = 0;  // position within the job's task list
    };
    std::vector<Task> tasks;
    std::vector<std::vector<double>> cost;  // [task][server]
    std::vector<int> residual_capacity;     // per server
    std::vector<std::vector<double>> zeta;  // [task][server] fractional optimum
    double beta = 0;                        // fractional assignment objective
};

GapInstance build_gap(const MergedSolution& merged, const DdljsInstance& instance);

struct RoundedAssignment {
    std::vector<int> task_server;  // chosen server per task
    double cost = 0;
};

// Dependent rounding: spread each server's fractional task mass over unit
// bins, then take a minimum-cost integral matching that covers every task.
// The matching cost never exceeds the fractional objective, and no server
// receives more than twice its residual capacity.
RoundedAssignment st_round(const GapInstance& gap);

struct IntegralSolution {
    std::vector<std::vector<int>> y;  // [job][server] workers
    std::vector<double> k;            // contention level per job
    std::vector<int> chi;             // server open flags
    double objective = 0;             // with split-aware contention accounting
    double ratio_bound = 0;           // capacity-over-spread diagnostic bound
};

// Rebuilds a full integral solution from the floors plus the rounded residual
// tasks and evaluates it. `fractional` feeds the ratio-bound diagnostic.
IntegralSolution assemble_integral(const MergedSolution& merged, const RoundedAssignment& rounded,
                                   const GapInstance& gap, const DdljsInstance& instance,
                                   const FractionalSolution& fractional);

// Objective of an integral placement under the relaxation's own contention
// accounting, where any open server counts every job not fully housed on it.
// This is the integer program the relaxation actually lower-bounds.
double strengthened_integral_objective(const std::vector<std::vector<int>>& y,
                                       const DdljsInstance& instance);

struct EnumeratedOptimum {
    double objective = 0;
    std::vector<std::vector<int>> y;
};

// Exhaustive search over integral placements, scored like the relaxation.
// Only for tiny instances.
EnumeratedOptimum enumerate_integral_optimum(const DdljsInstance& instance);

// End-to-end pipeline record for reporting.
struct RoundingReport {
    double lp_objective = 0;            // strengthened relaxation
    double plain_lp_objective = 0;      // without strengthening rows
    double integral_objective = 0;      // assembled solution, split-aware accounting
    double rounded_cost = 0;            // residual assignment cost
    double beta = 0;                    // fractional residual assignment cost
    double ratio_bound = 0;
    std::vector<int> server_usage;      // workers per server after assembly
    std::vector<int> residual_capacity;
    bool capacity_within_double = false;
};

RoundingReport run_rounding_pipeline(const DdljsInstance& instance);
void write_rounding_report_csv(const RoundingReport& report, std::ostream& out);

// Loads an instance from the shared flat config format:
//   ddljs.capacities = 2,2
//   ddljs.alpha = 0.5
//   ddljs.execution_weight = 1
//   ddljs.fragmentation_weight = 1
//   ddljs_job = id,gpus,iterations,base_time,contention_slope
DdljsInstance read_ddljs_instance(Config& config);

}  // namespace rarsched

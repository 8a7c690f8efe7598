#pragma once

#include <string>
#include <vector>

#include "rarsched/types.hpp"

namespace rarsched {

// Per-layer timing of one training iteration. Layer 1 is nearest the input.
// Backward passes run from the last layer down, so gradients become ready in
// reverse layer order.
struct LayerProfile {
    std::vector<double> fp_times;
    std::vector<double> bp_times;
    std::vector<double> comm_times;

    int layers() const { return static_cast<int>(fp_times.size()); }
    void check() const;
};

enum class IterationModel { sequential, wait_free, priority };

IterationModel iteration_model_from_name(const std::string& name);

// Fractions of the raw forward, backward, and communication totals that land
// on the iteration's critical path. The sequential model keeps all three at 1;
// overlapped models shrink them, possibly to 0 when a phase hides completely.
struct OverlapCoefficients {
    double eta_fp = 1.0;
    double eta_bp = 1.0;
    double eta_comm = 1.0;
};

// Computation first, then every layer's ring exchange, then the next forward
// pass. Nothing overlaps.
double sequential_iteration_time(const LayerProfile& profile);

// Each layer starts its ring exchange once its own backward pass and the next
// deeper layer's exchange are done. Exchange overlaps backward computation.
double wait_free_iteration_time(const LayerProfile& profile);

// Layers closer to the input preempt deeper layers' exchanges, letting the
// next forward pass start as soon as its own gradients have circulated.
double priority_iteration_time(const LayerProfile& profile);

// Coefficients such that eta_fp * sum(fp) + eta_bp * sum(bp) + eta_comm * sum(comm)
// equals the chosen model's iteration time exactly. Derived by splitting the
// recursion's critical path into forward, backward, and exchange segments.
// Throws std::invalid_argument when any phase total is zero.
OverlapCoefficients unified_coefficients(const LayerProfile& profile, IterationModel model);

// Per-iteration time with the forward term scaled by eta_fp, the backward term
// by eta_bp, and both ring communication terms by eta_comm. Coordination
// overhead is never scaled. All coefficients at 1 reproduces the base model.
double generalized_tau(const JobSpec& job, const Placement& placement, double k,
                       const ClusterSpec& cluster, const OverlapCoefficients& coefficients);

// Reads "layer fp bp comm" rows from a columnar text file. Lines starting with
// '#' are skipped. Rows may appear in any layer order.
LayerProfile load_layer_profile(const std::string& path);

}  // namespace rarsched

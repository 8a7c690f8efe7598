#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rarsched {

// A distributed training job: resource demand plus the per-iteration model
// parameters that determine how fast it runs under a given placement.
struct JobSpec {
    int id = 0;
    int gpus_requested = 1;        // ring width w
    long long iterations = 1;      // total minibatch iterations to run
    double gradient_size = 1.0;    // data units exchanged per iteration
    int minibatch = 1;
    double fp_per_sample = 0.0;    // forward pass, slots per sample
    double bp_time = 0.0;          // backward pass, slots
    double server_spread_factor = 1.0;  // tuning knob for spread-style placement

    void check() const;
};

enum class DegradationModel { linear };

// Cluster description and the shared model constants.
struct ClusterSpec {
    std::vector<int> server_capacities;  // GPUs per server
    double intra_bandwidth = 100.0;      // within a server, data units per slot
    double inter_bandwidth = 25.0;       // between servers, must be < intra
    double gpu_speed = 50.0;             // reduction throughput, data units per slot
    double contention_fraction = 1.0;    // scales raw contention degree into effective jobs
    double overhead_per_server = 0.0;    // latency added per server a ring touches
    double degradation_alpha = 0.0;      // sharing penalty beyond equal split
    DegradationModel degradation = DegradationModel::linear;
    int slot_count = 100;                // scheduling horizon in slots
    double slot_duration = 1.0;          // wall time per slot, reporting only

    int server_count() const { return static_cast<int>(server_capacities.size()); }
    int total_gpus() const;
    int max_capacity() const;
    void check() const;
};

struct GpuRef {
    int server = 0;  // 0-based
    int gpu = 0;     // 0-based, < capacity of that server

    friend bool operator==(const GpuRef&, const GpuRef&) = default;
    friend auto operator<=>(const GpuRef&, const GpuRef&) = default;
};

// One job's worker-to-GPU assignment, fixed for the job's whole run.
struct Placement {
    int job_id = 0;
    std::vector<GpuRef> gpus;

    // GPUs held on each server, keyed by server index.
    std::map<int, int> per_server_counts() const;
    int server_count() const { return static_cast<int>(per_server_counts().size()); }
    bool single_server() const;
};

// A placement active over a contiguous slot interval. A well-formed job has a
// single span; several spans with differing placements model a mid-run move,
// which the validator reports as a gang-scheduling violation.
struct PlacementSpan {
    int start_slot = 1;  // inclusive, 1-based
    int end_slot = 1;    // inclusive
    Placement placement;
};

struct ScheduleEntry {
    std::vector<PlacementSpan> spans;

    int start_slot() const { return spans.front().start_slot; }
    int end_slot() const { return spans.back().end_slot; }
    const Placement& placement() const { return spans.front().placement; }
};

struct Schedule {
    std::map<int, ScheduleEntry> entries;  // job id -> plan

    bool empty() const { return entries.empty(); }
};

// One broken constraint, with coordinates for debugging. `constraint` is the
// rule number in the gang-scheduling feasibility model:
//   1 demand met exactly, 2 server capacity, 3 no mid-run change,
//   4 no allocation outside the active interval, 5 positive allocation inside.
struct Violation {
    int constraint = 0;
    int job_id = -1;
    int server = -1;
    int slot = -1;
    std::string detail;
};

}  // namespace rarsched

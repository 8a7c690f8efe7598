#include "rarsched/cluster_model.hpp"

#include "rarsched/iteration_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace rarsched {

void JobSpec::check() const {
    if (gpus_requested < 1) throw std::invalid_argument("job " + std::to_string(id) + ": gpus_requested < 1");
    if (iterations < 1) throw std::invalid_argument("job " + std::to_string(id) + ": iterations < 1");
    if (gradient_size <= 0) throw std::invalid_argument("job " + std::to_string(id) + ": gradient_size <= 0");
    if (fp_per_sample < 0 || bp_time < 0) throw std::invalid_argument("job " + std::to_string(id) + ": negative pass time");
    if (minibatch < 1) throw std::invalid_argument("job " + std::to_string(id) + ": minibatch < 1");
    if (server_spread_factor < 1.0) throw std::invalid_argument("job " + std::to_string(id) + ": server_spread_factor < 1");
}

int ClusterSpec::total_gpus() const {
    return std::accumulate(server_capacities.begin(), server_capacities.end(), 0);
}

int ClusterSpec::max_capacity() const {
    return server_capacities.empty() ? 0 : *std::max_element(server_capacities.begin(), server_capacities.end());
}

void ClusterSpec::check() const {
    if (server_capacities.empty()) throw std::invalid_argument("cluster: no servers");
    for (int c : server_capacities)
        if (c < 1) throw std::invalid_argument("cluster: server capacity < 1");
    if (intra_bandwidth <= 0 || inter_bandwidth <= 0) throw std::invalid_argument("cluster: bandwidth <= 0");
    if (inter_bandwidth >= intra_bandwidth) throw std::invalid_argument("cluster: inter bandwidth must be below intra");
    if (gpu_speed <= 0) throw std::invalid_argument("cluster: gpu_speed <= 0");
    if (contention_fraction <= 0 || contention_fraction > 1) throw std::invalid_argument("cluster: contention_fraction outside (0,1]");
    if (overhead_per_server < 0 || overhead_per_server > 1) throw std::invalid_argument("cluster: overhead_per_server outside [0,1]");
    if (degradation_alpha < 0) throw std::invalid_argument("cluster: degradation_alpha < 0");
    if (slot_count < 1) throw std::invalid_argument("cluster: slot_count < 1");
    if (slot_duration <= 0) throw std::invalid_argument("cluster: slot_duration <= 0");
}

std::map<int, int> Placement::per_server_counts() const {
    std::map<int, int> counts;
    for (const GpuRef& g : gpus) counts[g.server]++;
    return counts;
}

bool Placement::single_server() const {
    if (gpus.empty()) return true;
    const int s = gpus.front().server;
    return std::all_of(gpus.begin(), gpus.end(), [&](const GpuRef& g) { return g.server == s; });
}

int contention_degree(std::span<const Placement> active, int job_id) {
    const Placement* self = nullptr;
    for (const Placement& p : active)
        if (p.job_id == job_id) self = &p;
    if (self == nullptr) throw std::out_of_range("contention_degree: job not in active set");

    const int own_size = static_cast<int>(self->gpus.size());
    auto own_counts = self->per_server_counts();

    // Per-server count of active jobs that occupy the server with only part of
    // their ring. A job touching no other server never contends.
    std::unordered_map<int, int> spanning;
    for (const Placement& p : active) {
        const int size = static_cast<int>(p.gpus.size());
        for (const auto& [server, count] : p.per_server_counts())
            if (count > 0 && count < size) spanning[server]++;
    }

    int degree = 0;
    for (const auto& [server, count] : own_counts) {
        if (count <= 0 || count >= own_size) continue;  // job does not span here
        auto it = spanning.find(server);
        if (it != spanning.end()) degree = std::max(degree, it->second);
    }
    return degree;
}

double degradation_factor(double alpha, double k, DegradationModel model) {
    if (k < 0) throw std::invalid_argument("degradation_factor: k < 0");
    if (alpha < 0) throw std::invalid_argument("degradation_factor: alpha < 0");
    switch (model) {
        case DegradationModel::linear:
            return k + alpha * (k - 1.0);
    }
    throw std::logic_error("degradation_factor: unknown model");
}

double bottleneck_bandwidth(const Placement& placement, double k, const ClusterSpec& cluster) {
    if (placement.single_server()) return cluster.intra_bandwidth;
    return cluster.inter_bandwidth /
           degradation_factor(cluster.degradation_alpha, std::max(k, 1.0), cluster.degradation);
}

double per_iteration_time(const JobSpec& job, const Placement& placement, double k,
                          const ClusterSpec& cluster) {
    // The overlap-free model, so the generalized form with neutral
    // coefficients is this function by definition.
    return generalized_tau(job, placement, k, cluster, OverlapCoefficients{});
}

long long training_speed(double tau) {
    if (tau <= 0) throw std::invalid_argument("training_speed: tau <= 0");
    return static_cast<long long>(std::floor(1.0 / tau));
}

std::optional<int> completion_time(int start, std::span<const long long> speeds,
                                   long long iterations) {
    long long done = 0;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        done += speeds[i];
        if (done >= iterations) return start + static_cast<int>(i);
    }
    return std::nullopt;
}

double rar_traffic_volume(int workers, double gradient_dim) {
    if (workers < 1) throw std::invalid_argument("rar_traffic_volume: workers < 1");
    return 2.0 * gradient_dim * (workers - 1) / workers;
}

namespace {

void check_placement_shape(const Placement& p, const JobSpec& job, const ClusterSpec& cluster,
                           int slot, std::vector<Violation>& out) {
    if (static_cast<int>(p.gpus.size()) != job.gpus_requested)
        out.push_back({1, job.id, -1, slot,
                       "allocated " + std::to_string(p.gpus.size()) + " GPUs, requested " +
                           std::to_string(job.gpus_requested)});
    std::set<GpuRef> seen;
    for (const GpuRef& g : p.gpus) {
        if (g.server < 0 || g.server >= cluster.server_count() || g.gpu < 0 ||
            g.gpu >= cluster.server_capacities[g.server]) {
            out.push_back({2, job.id, g.server, slot, "GPU reference outside cluster"});
            continue;
        }
        if (!seen.insert(g).second)
            out.push_back({1, job.id, g.server, slot, "duplicate GPU in placement"});
    }
}

}  // namespace

std::vector<Violation> validate_schedule(const Schedule& schedule, std::span<const JobSpec> jobs,
                                         const ClusterSpec& cluster) {
    std::vector<Violation> out;
    std::unordered_map<int, const JobSpec*> by_id;
    for (const JobSpec& j : jobs) by_id[j.id] = &j;

    int horizon = cluster.slot_count;
    for (const auto& [job_id, entry] : schedule.entries)
        for (const PlacementSpan& span : entry.spans) horizon = std::max(horizon, span.end_slot);

    // Per-slot, per-server occupancy across all jobs.
    std::vector<std::vector<int>> used(static_cast<std::size_t>(horizon) + 1,
                                       std::vector<int>(cluster.server_count(), 0));

    for (const auto& [job_id, entry] : schedule.entries) {
        auto it = by_id.find(job_id);
        if (it == by_id.end()) {
            out.push_back({1, job_id, -1, -1, "schedule entry for unknown job"});
            continue;
        }
        const JobSpec& job = *it->second;
        if (entry.spans.empty()) {
            out.push_back({5, job_id, -1, -1, "no allocation inside active interval"});
            continue;
        }

        for (std::size_t i = 0; i < entry.spans.size(); ++i) {
            const PlacementSpan& span = entry.spans[i];
            if (span.start_slot < 1 || span.end_slot < span.start_slot)
                out.push_back({4, job_id, -1, span.start_slot, "malformed span interval"});
            if (i > 0 && span.start_slot != entry.spans[i - 1].end_slot + 1)
                out.push_back({4, job_id, -1, span.start_slot, "gap or overlap between spans"});
            check_placement_shape(span.placement, job, cluster, span.start_slot, out);
            if (span.placement.gpus.empty())
                out.push_back({5, job_id, -1, span.start_slot, "empty allocation while active"});

            for (const GpuRef& g : span.placement.gpus) {
                if (g.server < 0 || g.server >= cluster.server_count()) continue;
                for (int t = std::max(1, span.start_slot); t <= span.end_slot; ++t)
                    used[t][g.server]++;
            }
        }

        // A gang-scheduled job keeps one placement from start to finish.
        for (std::size_t i = 1; i < entry.spans.size(); ++i) {
            const auto& prev = entry.spans[i - 1].placement;
            const auto& cur = entry.spans[i].placement;
            std::set<GpuRef> a(prev.gpus.begin(), prev.gpus.end());
            std::set<GpuRef> b(cur.gpus.begin(), cur.gpus.end());
            if (a != b)
                out.push_back({3, job_id, -1, entry.spans[i].start_slot,
                               "placement changed mid-run"});
        }
    }

    for (int t = 1; t <= horizon; ++t)
        for (int s = 0; s < cluster.server_count(); ++s)
            if (used[t][s] > cluster.server_capacities[s])
                out.push_back({2, -1, s, t,
                               "server holds " + std::to_string(used[t][s]) + " GPUs, capacity " +
                                   std::to_string(cluster.server_capacities[s])});

    return out;
}

}  // namespace rarsched

#include "rarsched/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "rarsched/cluster_model.hpp"
#include "rarsched/util.hpp"

namespace rarsched {

SimTrace simulate(const Schedule& schedule, std::span<const JobSpec> jobs,
                  const ClusterSpec& cluster, std::optional<OverlapCoefficients> coefficients) {
    const OverlapCoefficients etas = coefficients.value_or(OverlapCoefficients{});

    struct Runner {
        const JobSpec* job;
        const Placement* placement;
        std::map<int, int> counts;
        int servers_spanned;  // servers holding part, not all, of the ring
        int start;
        long long done = 0;
        bool finished = false;
        int completion = 0;
    };
    std::unordered_map<int, const JobSpec*> by_id;
    for (const JobSpec& j : jobs) by_id[j.id] = &j;

    std::vector<Runner> runners;
    for (const auto& [job_id, entry] : schedule.entries) {
        auto it = by_id.find(job_id);
        if (it == by_id.end())
            throw std::out_of_range("simulate: schedule names unknown job " + std::to_string(job_id));
        Runner r{it->second, &entry.placement(), entry.placement().per_server_counts(), 0,
                 entry.start_slot()};
        for (const auto& [server, count] : r.counts)
            if (count < r.job->gpus_requested) r.servers_spanned++;
        runners.push_back(std::move(r));
    }
    std::sort(runners.begin(), runners.end(),
              [](const Runner& a, const Runner& b) { return a.job->id < b.job->id; });

    SimTrace trace;
    std::vector<int> spanning_on(static_cast<std::size_t>(cluster.server_count()), 0);
    int finished_count = 0;

    for (int t = 1; t <= cluster.slot_count && finished_count < static_cast<int>(runners.size());
         ++t) {
        // Contending rings per server, counting only jobs that split across
        // servers; a fully co-located ring stays on the fast interconnect.
        std::fill(spanning_on.begin(), spanning_on.end(), 0);
        for (const Runner& r : runners) {
            if (r.finished || r.start > t) continue;
            if (r.servers_spanned == 0) continue;
            for (const auto& [server, count] : r.counts)
                if (count < r.job->gpus_requested) spanning_on[server]++;
        }

        for (Runner& r : runners) {
            if (r.finished || r.start > t) continue;
            int degree = 0;
            if (r.servers_spanned > 0)
                for (const auto& [server, count] : r.counts)
                    if (count < r.job->gpus_requested)
                        degree = std::max(degree, spanning_on[server]);
            const double k = cluster.contention_fraction * degree;
            const double tau = generalized_tau(*r.job, *r.placement, k, cluster, etas);
            const long long remaining = r.job->iterations - r.done;
            const long long speed = tau > 0 ? training_speed(tau) : remaining;
            r.done = std::min<long long>(r.job->iterations, r.done + speed);
            if (r.done >= r.job->iterations) {
                r.finished = true;
                r.completion = t;
                finished_count++;
            }
            trace.steps.push_back({t, r.job->id, degree, k, tau, speed, r.done});
        }
    }

    double duration_sum = 0, completion_sum = 0;
    for (const Runner& r : runners) {
        const int completion = r.finished ? r.completion : cluster.slot_count;
        trace.jobs.push_back({r.job->id, r.start, r.finished ? r.completion : 0, r.finished, r.done});
        trace.makespan = std::max(trace.makespan, completion);
        duration_sum += completion - r.start + 1;
        completion_sum += completion;
        if (!r.finished) trace.horizon_exceeded = true;
    }
    if (!runners.empty()) {
        trace.avg_duration_slots = duration_sum / static_cast<double>(runners.size());
        trace.avg_completion_slot = completion_sum / static_cast<double>(runners.size());
    }
    return trace;
}

void write_sim_trace_csv(const SimTrace& trace, std::ostream& out) {
    out << "row,slot,job,contention,k,tau,speed,done\n";
    for (const SimStep& s : trace.steps)
        out << "step," << s.slot << ',' << s.job_id << ',' << s.contention << ','
            << fmt_double(s.k) << ',' << fmt_double(s.tau) << ',' << s.speed << ',' << s.done
            << '\n';
    out << "summary,makespan=" << trace.makespan << ",avg_duration="
        << fmt_double(trace.avg_duration_slots) << ",avg_completion="
        << fmt_double(trace.avg_completion_slot) << ",horizon_exceeded="
        << (trace.horizon_exceeded ? 1 : 0) << ",,,\n";
}

namespace {

// Candidate plan for one job inside the oracle's enumeration: a start slot and
// a per-server worker split.
struct CountPlan {
    int start = 1;
    std::vector<int> counts;
};

void splits_rec(const ClusterSpec& cluster, int server, int remaining, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
    if (server == cluster.server_count()) {
        if (remaining == 0) out.push_back(cur);
        return;
    }
    const int cap = std::min(remaining, cluster.server_capacities[server]);
    for (int take = 0; take <= cap; ++take) {
        cur[server] = take;
        splits_rec(cluster, server + 1, remaining - take, cur, out);
    }
    cur[server] = 0;
}

// Slot-stepped evaluation on worker counts, mirroring simulate(). Returns the
// per-job completion slots, or nothing when capacity breaks on a true active
// interval or some job misses the horizon.
std::optional<std::vector<int>> run_count_sim(std::span<const JobSpec> jobs,
                                              const ClusterSpec& cluster, int horizon,
                                              std::span<const CountPlan> plans) {
    const int n = static_cast<int>(jobs.size());
    std::vector<long long> done(n, 0);
    std::vector<int> completion(n, 0);
    int finished = 0;

    for (int t = 1; t <= horizon && finished < n; ++t) {
        std::vector<int> active;
        for (int j = 0; j < n; ++j)
            if (completion[j] == 0 && plans[j].start <= t) active.push_back(j);

        for (int s = 0; s < cluster.server_count(); ++s) {
            int used = 0;
            for (int j : active) used += plans[j].counts[s];
            if (used > cluster.server_capacities[s]) return std::nullopt;
        }

        std::vector<int> spanning_on(cluster.server_capacities.size(), 0);
        for (int j : active) {
            const int w = jobs[j].gpus_requested;
            for (int s = 0; s < cluster.server_count(); ++s)
                if (plans[j].counts[s] > 0 && plans[j].counts[s] < w) spanning_on[s]++;
        }

        for (int j : active) {
            const int w = jobs[j].gpus_requested;
            int degree = 0, servers_used = 0;
            bool single = true;
            for (int s = 0; s < cluster.server_count(); ++s) {
                if (plans[j].counts[s] == 0) continue;
                servers_used++;
                if (plans[j].counts[s] < w) {
                    single = false;
                    degree = std::max(degree, spanning_on[s]);
                }
            }
            const double k = cluster.contention_fraction * degree;
            double tau = cluster.overhead_per_server * servers_used +
                         jobs[j].fp_per_sample * jobs[j].minibatch + jobs[j].bp_time;
            if (w > 1) {
                const double chunk = jobs[j].gradient_size * (w - 1) / w;
                const double bw =
                    single ? cluster.intra_bandwidth
                           : cluster.inter_bandwidth /
                                 degradation_factor(cluster.degradation_alpha, std::max(k, 1.0),
                                                    cluster.degradation);
                tau += 2.0 * chunk / bw + chunk / cluster.gpu_speed;
            }
            const long long remaining = jobs[j].iterations - done[j];
            const long long speed = tau > 0 ? training_speed(tau) : remaining;
            done[j] = std::min<long long>(jobs[j].iterations, done[j] + speed);
            if (done[j] >= jobs[j].iterations) {
                completion[j] = t;
                finished++;
            }
        }
    }
    if (finished < n) return std::nullopt;
    return completion;
}

// Turns per-server worker counts into concrete GPU picks. Jobs are processed
// in start order, so a slot-feasible count plan always finds free GPUs.
Schedule materialize(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                     std::span<const CountPlan> plans, std::span<const int> completion) {
    const int n = static_cast<int>(jobs.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (plans[a].start != plans[b].start) return plans[a].start < plans[b].start;
        return jobs[a].id < jobs[b].id;
    });

    // free_at[s][g] = first slot GPU g of server s is available again
    std::vector<std::vector<int>> free_at;
    for (int s = 0; s < cluster.server_count(); ++s)
        free_at.emplace_back(cluster.server_capacities[s], 1);

    Schedule schedule;
    for (int j : order) {
        Placement placement{jobs[j].id, {}};
        for (int s = 0; s < cluster.server_count(); ++s) {
            int need = plans[j].counts[s];
            for (int g = 0; g < cluster.server_capacities[s] && need > 0; ++g) {
                if (free_at[s][g] <= plans[j].start) {
                    placement.gpus.push_back({s, g});
                    free_at[s][g] = completion[j] + 1;
                    need--;
                }
            }
            if (need > 0) throw std::logic_error("count plan could not be materialized");
        }
        schedule.entries[jobs[j].id] =
            ScheduleEntry{{PlacementSpan{plans[j].start, completion[j], placement}}};
    }
    return schedule;
}

}  // namespace

OracleResult brute_force_optimal(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                 int horizon) {
    cluster.check();
    if (jobs.size() > 3 || cluster.server_count() > 2 || cluster.total_gpus() > 8 || horizon > 20)
        throw std::invalid_argument("brute_force_optimal: instance exceeds the oracle size caps");
    for (const JobSpec& j : jobs) j.check();

    const int n = static_cast<int>(jobs.size());
    OracleResult result;
    if (n == 0) return result;

    // Per-job candidate plans in lexicographic (start, split) order. Starts
    // that cannot finish even alone are dropped up front.
    std::vector<std::vector<CountPlan>> options(n);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<int>> splits;
        std::vector<int> cur(cluster.server_count(), 0);
        splits_rec(cluster, 0, jobs[j].gpus_requested, cur, splits);
        if (splits.empty())
            throw std::invalid_argument("brute_force_optimal: job cannot fit in the cluster");
        for (int start = 1; start <= horizon; ++start)
            for (const auto& split : splits) options[j].push_back({start, split});
    }

    std::vector<int> pick(n, 0);
    std::vector<CountPlan> plans(n);
    int best = std::numeric_limits<int>::max();
    std::vector<CountPlan> best_plans;
    std::vector<int> best_completion;

    while (true) {
        for (int j = 0; j < n; ++j) plans[j] = options[j][pick[j]];
        if (auto completion = run_count_sim(jobs, cluster, horizon, plans)) {
            int makespan = *std::max_element(completion->begin(), completion->end());
            if (makespan < best) {
                best = makespan;
                best_plans = plans;
                best_completion = *completion;
            }
            for (int j = 0; j < n; ++j) {
                const int duration = (*completion)[j] - plans[j].start + 1;
                auto [it, fresh] = result.min_duration.try_emplace(jobs[j].id, duration);
                if (!fresh) it->second = std::min(it->second, duration);
                auto [it2, fresh2] = result.max_duration.try_emplace(jobs[j].id, duration);
                if (!fresh2) it2->second = std::max(it2->second, duration);
            }
        }
        int j = n - 1;
        while (j >= 0 && ++pick[j] == static_cast<int>(options[j].size())) pick[j--] = 0;
        if (j < 0) break;
    }

    if (best == std::numeric_limits<int>::max())
        throw std::runtime_error("brute_force_optimal: no feasible schedule within the horizon");
    result.optimal_makespan = best;
    result.schedule = materialize(jobs, cluster, best_plans, best_completion);
    return result;
}

RatioRecord approximation_report(std::span<const JobSpec> jobs, int achieved_makespan,
                                 const OracleResult& oracle, const ExecutionEstimates& estimates,
                                 std::optional<double> exact_varphi) {
    int n_g = 0;
    for (const JobSpec& j : jobs) n_g = std::max(n_g, j.gpus_requested);
    RatioRecord record;
    record.empirical_ratio =
        static_cast<double>(achieved_makespan) / std::max(1, oracle.optimal_makespan);
    record.bound = n_g * exact_varphi.value_or(estimates.varphi) * estimates.u /
                   std::max(estimates.l, 1e-300);
    record.within_bound = record.empirical_ratio <= record.bound + 1e-9;
    return record;
}

}  // namespace rarsched

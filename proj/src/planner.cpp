#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rarsched/baselines.hpp"
#include "rarsched/cluster_model.hpp"
#include "rarsched/estimates.hpp"
#include "rarsched/load_book.hpp"
#include "rarsched/rng.hpp"
#include "rarsched/sim_engine.hpp"
#include "rarsched/sjf_bco.hpp"

namespace rarsched {

namespace {
constexpr double kLoadEps = 1e-9;
}

ExecutionBounds execution_time_bounds(const JobSpec& job, const ClusterSpec& cluster) {
    job.check();
    const int w = job.gpus_requested;
    const double compute = job.fp_per_sample * job.minibatch + job.bp_time;

    ExecutionBounds b;
    if (w == 1) {
        // Single worker: one server, no ring traffic, so both extremes match.
        b.tau_min = b.tau_max = cluster.overhead_per_server + compute;
    } else {
        const double chunk = job.gradient_size * (w - 1) / w;
        const double reduce = chunk / cluster.gpu_speed;
        b.tau_min = 2.0 * chunk / cluster.intra_bandwidth + reduce + cluster.overhead_per_server +
                    compute;
        // Worst case: every slot of the largest server holds a contending ring
        // and the job's ring touches as many servers as it has workers.
        const double k_worst =
            std::max(1.0, cluster.contention_fraction * cluster.max_capacity());
        const double bw_worst =
            cluster.inter_bandwidth /
            degradation_factor(cluster.degradation_alpha, k_worst, cluster.degradation);
        const int servers_worst = std::min(w, cluster.server_count());
        b.tau_max = 2.0 * chunk / bw_worst + reduce +
                    cluster.overhead_per_server * servers_worst + compute;
    }

    const long long fastest = b.tau_min > 0 ? training_speed(b.tau_min)
                                            : std::numeric_limits<long long>::max();
    const long long slowest = b.tau_max > 0 ? training_speed(b.tau_max)
                                            : std::numeric_limits<long long>::max();
    b.rho_min = fastest > 0
                    ? static_cast<double>((job.iterations + fastest - 1) / fastest)
                    : kStallSentinel;
    b.rho_max = slowest > 0
                    ? static_cast<double>((job.iterations + slowest - 1) / slowest)
                    : kStallSentinel;
    return b;
}

double estimate_execution(const JobSpec& job, const ExecutionBounds& bounds) {
    return static_cast<double>(job.iterations) * 0.5 * (bounds.tau_min + bounds.tau_max);
}

ExecutionEstimates build_estimates(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                   const EstimateOptions& options) {
    ExecutionEstimates est;
    Rng rng(options.seed);
    std::vector<const JobSpec*> ordered;
    for (const JobSpec& j : jobs) ordered.push_back(&j);
    std::sort(ordered.begin(), ordered.end(),
              [](const JobSpec* a, const JobSpec* b) { return a->id < b->id; });

    for (const JobSpec* job : ordered) {
        JobEstimate e;
        e.bounds = execution_time_bounds(*job, cluster);
        e.rho_hat = options.mode == EstimateMode::model
                        ? estimate_execution(*job, e.bounds)
                        : rng.uniform_real(options.range_lo, options.range_hi);
        if (!est.by_job.emplace(job->id, e).second)
            throw std::invalid_argument("duplicate job id " + std::to_string(job->id));
    }

    for (const auto& [id, e] : est.by_job) {
        if (e.bounds.rho_min > 0) est.u = std::max(est.u, e.rho_hat / e.bounds.rho_min);
        if (e.bounds.rho_max > 0) est.l = std::min(est.l, e.rho_hat / e.bounds.rho_max);
        if (e.bounds.rho_min > 0) est.varphi = std::max(est.varphi, e.bounds.rho_max / e.bounds.rho_min);
    }
    est.u = std::max(est.u, 1.0);
    est.l = std::min(std::max(est.l, 0.0), 1.0);
    return est;
}

double ExecutionEstimates::planned_load(int job_id) const {
    auto it = by_job.find(job_id);
    if (it == by_job.end()) throw std::out_of_range("no estimate for job " + std::to_string(job_id));
    return it->second.rho_hat / u;
}

int ExecutionEstimates::planned_duration(int job_id) const {
    const double load = planned_load(job_id);
    if (load >= kStallSentinel) return std::numeric_limits<int>::max() / 4;
    return std::max(1, static_cast<int>(std::ceil(load - kLoadEps)));
}

GpuLoadBook::GpuLoadBook(const ClusterSpec& cluster) {
    first_flat_.push_back(0);
    for (int s = 0; s < cluster.server_count(); ++s) {
        for (int g = 0; g < cluster.server_capacities[s]; ++g) server_of_.push_back(s);
        first_flat_.push_back(static_cast<int>(server_of_.size()));
    }
    load_.assign(server_of_.size(), 0.0);
    next_free_.assign(server_of_.size(), 1);
}

double GpuLoadBook::max_load() const {
    return load_.empty() ? 0.0 : *std::max_element(load_.begin(), load_.end());
}

double GpuLoadBook::mean_server_load(int server) const {
    const int lo = first_flat_[server], hi = first_flat_[server + 1];
    double total = 0;
    for (int f = lo; f < hi; ++f) total += load_[f];
    return total / (hi - lo);
}

void GpuLoadBook::assign(std::span<const int> flats, double load_delta, int end_slot) {
    for (int f : flats) {
        load_[f] += load_delta;
        next_free_[f] = end_slot + 1;
    }
}

int GpuLoadBook::next_release_after(int clock) const {
    int best = 0;
    for (int t : next_free_)
        if (t > clock && (best == 0 || t < best)) best = t;
    return best;
}

namespace {

// Candidate collector: eligible GPU flats at the given virtual clock, in the
// policy's preference order.
using CollectFn = std::function<std::vector<int>(int clock)>;

bool gpu_eligible(const GpuLoadBook& book, int flat, double load_delta, int theta_u, int clock) {
    return book.next_free(flat) <= clock && book.load(flat) + load_delta <= theta_u + kLoadEps;
}

void sort_by_load(const GpuLoadBook& book, std::vector<int>& flats) {
    std::stable_sort(flats.begin(), flats.end(), [&](int a, int b) {
        if (book.load(a) != book.load(b)) return book.load(a) < book.load(b);
        return a < b;
    });
}

// The shared dispatch loop: try the collector at the current virtual clock,
// otherwise wait for the next planned release. `rng` switches selection from
// "first in preference order" to a uniform sample of the eligible set.
std::optional<PlannedJob> place_job(const JobSpec& job, GpuLoadBook& book,
                                    const ExecutionEstimates& estimates, int horizon,
                                    const CollectFn& collect, Rng* rng = nullptr) {
    const int need = job.gpus_requested;
    const double load_delta = estimates.planned_load(job.id);
    const int duration = estimates.planned_duration(job.id);

    // Waiting releases GPUs over time but never lowers booked load, so when
    // the load filter alone cannot cover the demand no release will either.
    if (static_cast<int>(collect(std::numeric_limits<int>::max()).size()) < need)
        return std::nullopt;

    int clock = 1;
    while (true) {
        std::vector<int> candidates = collect(clock);
        if (static_cast<int>(candidates.size()) >= need) {
            if (rng != nullptr) rng->partial_shuffle(candidates, static_cast<std::size_t>(need));
            candidates.resize(static_cast<std::size_t>(need));
            int start = 1;
            for (int f : candidates) start = std::max(start, book.next_free(f));
            const long long end = static_cast<long long>(start) + duration - 1;
            if (end <= horizon) {
                book.assign(candidates, load_delta, static_cast<int>(end));
                Placement placement{job.id, {}};
                for (int f : candidates) placement.gpus.push_back(book.ref(f));
                std::sort(placement.gpus.begin(), placement.gpus.end());
                return PlannedJob{job.id, start, static_cast<int>(end), std::move(placement)};
            }
        }
        const int release = book.next_release_after(clock);
        if (release == 0) return std::nullopt;
        clock = release;
    }
}

}  // namespace

std::optional<PlannedJob> fa_ffp(const JobSpec& job, GpuLoadBook& book, int theta_u,
                                 const ExecutionEstimates& estimates, int horizon) {
    const double load_delta = estimates.planned_load(job.id);
    auto collect = [&](int clock) {
        std::vector<int> out;
        for (int f = 0; f < book.size(); ++f)
            if (gpu_eligible(book, f, load_delta, theta_u, clock)) out.push_back(f);
        sort_by_load(book, out);
        return out;
    };
    return place_job(job, book, estimates, horizon, collect);
}

std::optional<PlannedJob> lbsgf(const JobSpec& job, GpuLoadBook& book, int theta_u,
                                const ExecutionEstimates& estimates, double spread_factor,
                                int horizon) {
    const double load_delta = estimates.planned_load(job.id);
    auto collect = [&](int clock) {
        std::vector<int> servers(static_cast<std::size_t>(book.server_count()));
        std::iota(servers.begin(), servers.end(), 0);
        std::stable_sort(servers.begin(), servers.end(), [&](int a, int b) {
            const double la = book.mean_server_load(a), lb = book.mean_server_load(b);
            if (la != lb) return la < lb;
            return a < b;
        });

        // Pool: the least busy servers whose combined capacity covers the
        // spread factor times the demand. A server in the pool that can host
        // the whole ring right now is preferred over any split, so a wider
        // pool raises the chance of opening a server of its own instead of
        // contending across several. Without such a server the pool's GPUs
        // are taken in server rank order, quietest first.
        const double wanted = spread_factor * job.gpus_requested;
        std::vector<int> pool;
        int pooled_capacity = 0;
        for (int s : servers) {
            if (pooled_capacity >= wanted) break;
            pooled_capacity += book.capacity(s);
            pool.push_back(s);
        }

        (void)clock;
        std::vector<std::vector<int>> eligible_by_server;
        for (int s : pool) {
            std::vector<int> eligible;
            for (int f = book.first_flat(s); f < book.first_flat(s) + book.capacity(s); ++f)
                if (book.load(f) + load_delta <= theta_u + kLoadEps) eligible.push_back(f);
            sort_by_load(book, eligible);
            eligible_by_server.push_back(std::move(eligible));
        }

        for (const std::vector<int>& eligible : eligible_by_server)
            if (static_cast<int>(eligible.size()) >= job.gpus_requested) return eligible;

        std::vector<int> out;
        for (const std::vector<int>& eligible : eligible_by_server)
            out.insert(out.end(), eligible.begin(), eligible.end());
        sort_by_load(book, out);
        return out;
    };
    return place_job(job, book, estimates, horizon, collect);
}

PassResult run_sjf_pass(std::span<const JobSpec> jobs_sorted, const ClusterSpec& cluster,
                        int theta_u, int kappa, const ExecutionEstimates& estimates, int horizon,
                        const SjfBcoOptions& options) {
    GpuLoadBook book(cluster);
    PassResult result;
    for (const JobSpec& job : jobs_sorted) {
        const double spread = options.spread_factor.value_or(job.server_spread_factor);
        std::optional<PlannedJob> planned =
            job.gpus_requested <= kappa ? fa_ffp(job, book, theta_u, estimates, horizon)
                                        : lbsgf(job, book, theta_u, estimates, spread, horizon);
        if (!planned) return PassResult{false, horizon, {}};
        result.schedule.entries[job.id] = ScheduleEntry{
            {PlacementSpan{planned->start_slot, planned->end_slot, planned->placement}}};
        result.makespan = std::max(result.makespan, planned->end_slot);
    }
    result.feasible = true;
    return result;
}

namespace {

struct Probe {
    PassResult pass;
    int evaluated = 0;  // model-evaluated makespan, horizon + 1 when unusable
};

using ProbeFn = std::function<Probe(int theta_u, std::vector<PassTraceRow>& trace)>;

// Bisection on the per-GPU execution-time limit. A probe is accepted when it
// is feasible and its model-evaluated makespan is no worse than the best
// accepted so far; rejection moves the search upward. Feasibility is monotone
// in the limit and tightening past the point where placements degrade only
// makes the evaluation worse, so the search settles on the tightest limit
// that still achieves the best evaluated makespan, and returns the schedule
// built there.
SchedulerResult bisect_theta(int horizon, const ProbeFn& evaluate) {
    SchedulerResult result;
    result.infeasible = true;
    result.makespan = horizon;
    result.theta_u = horizon;

    auto accept = [&](Probe& probe, int theta, int& best_evaluated) {
        best_evaluated = probe.evaluated;
        result.makespan = probe.pass.makespan;
        result.schedule = std::move(probe.pass.schedule);
        result.theta_u = theta;
        result.infeasible = false;
    };

    int best_evaluated = horizon + 2;
    int left = 1, right = horizon;
    while (left <= right) {
        const int theta = left + (right - left) / 2;
        Probe probe = evaluate(theta, result.trace);
        if (probe.pass.feasible && probe.evaluated <= best_evaluated) {
            accept(probe, theta, best_evaluated);
            right = theta - 1;
        } else {
            left = theta + 1;
        }
    }
    if (result.infeasible) return result;

    // Tight limits sometimes consolidate placements back to the loose-limit
    // quality after a worse stretch in between, which a bisection on the
    // evaluated metric cannot see past. One extra search probes the very
    // tightest workable limit and keeps it when it is no worse.
    int lo = 1, hi = result.theta_u - 1, tightest = result.theta_u;
    Probe tightest_probe;
    while (lo <= hi) {
        const int theta = lo + (hi - lo) / 2;
        Probe probe = evaluate(theta, result.trace);
        if (probe.pass.feasible) {
            tightest = theta;
            tightest_probe = std::move(probe);
            hi = theta - 1;
        } else {
            lo = theta + 1;
        }
    }
    if (tightest < result.theta_u && tightest_probe.evaluated <= best_evaluated)
        accept(tightest_probe, tightest, best_evaluated);
    return result;
}

// Simulation-based makespan of a pass's schedule, or horizon + 1 when the
// pass is infeasible or overruns the horizon.
int evaluate_pass(const PassResult& pass, std::span<const JobSpec> jobs,
                  const ClusterSpec& cluster, int horizon) {
    if (!pass.feasible) return horizon + 1;
    ClusterSpec eval_cluster = cluster;
    eval_cluster.slot_count = horizon;
    SimTrace sim = simulate(pass.schedule, jobs, eval_cluster);
    return sim.horizon_exceeded ? horizon + 1 : sim.makespan;
}

std::vector<JobSpec> check_jobs(std::span<const JobSpec> jobs, const ClusterSpec& cluster) {
    cluster.check();
    std::vector<JobSpec> copy(jobs.begin(), jobs.end());
    for (const JobSpec& j : copy) {
        j.check();
        if (j.gpus_requested > cluster.total_gpus())
            throw std::invalid_argument("job " + std::to_string(j.id) +
                                        " requests more GPUs than the cluster has");
    }
    return copy;
}

}  // namespace

SchedulerResult sjf_bco(std::span<const JobSpec> jobs, const ClusterSpec& cluster, int horizon,
                        const ExecutionEstimates& estimates, const SjfBcoOptions& options) {
    std::vector<JobSpec> sorted = check_jobs(jobs, cluster);
    if (sorted.empty()) return SchedulerResult{0, {}, 1, 0, false, {}};
    std::stable_sort(sorted.begin(), sorted.end(), [](const JobSpec& a, const JobSpec& b) {
        if (a.gpus_requested != b.gpus_requested) return a.gpus_requested < b.gpus_requested;
        return a.id < b.id;
    });

    int max_size = 0;
    for (const JobSpec& j : sorted) max_size = std::max(max_size, j.gpus_requested);
    const int kappa_lo = options.pinned_kappa.value_or(1);
    const int kappa_hi = options.pinned_kappa.value_or(max_size);

    // One limit bisection per size-threshold class. Thresholds that induce
    // the same small/large split behave identically, so only one
    // representative per class runs. Each class yields the tightest limit
    // that still achieves its best model-evaluated makespan; classes are then
    // compared on that evaluation, which the booked intervals cannot see.
    SchedulerResult result;
    result.infeasible = true;
    result.makespan = horizon;
    result.theta_u = horizon;

    std::set<int> seen_splits;
    int best_evaluated = 0;
    for (int kappa = kappa_lo; kappa <= kappa_hi; ++kappa) {
        const int split = static_cast<int>(
            std::upper_bound(sorted.begin(), sorted.end(), kappa,
                             [](int value, const JobSpec& j) { return value < j.gpus_requested; }) -
            sorted.begin());
        if (!seen_splits.insert(split).second) continue;

        int class_evaluated = horizon + 1;
        SchedulerResult class_result =
            bisect_theta(horizon, [&](int theta, std::vector<PassTraceRow>& trace) {
                Probe probe;
                probe.pass =
                    run_sjf_pass(sorted, cluster, theta, kappa, estimates, horizon, options);
                probe.evaluated = evaluate_pass(probe.pass, sorted, cluster, horizon);
                trace.push_back(
                    {theta, kappa, probe.pass.makespan, probe.evaluated, probe.pass.feasible});
                if (probe.pass.feasible) class_evaluated = std::min(class_evaluated, probe.evaluated);
                return probe;
            });

        result.trace.insert(result.trace.end(), class_result.trace.begin(),
                            class_result.trace.end());
        if (class_result.infeasible) continue;
        if (result.infeasible || class_evaluated < best_evaluated) {
            best_evaluated = class_evaluated;
            result.makespan = class_result.makespan;
            result.schedule = std::move(class_result.schedule);
            result.theta_u = class_result.theta_u;
            result.kappa = kappa;
            result.infeasible = false;
        }
    }
    return result;
}

namespace {

PassResult run_order_pass(std::span<const JobSpec> jobs, const ClusterSpec& cluster, int theta_u,
                          int horizon,
                          const std::function<std::optional<PlannedJob>(
                              const JobSpec&, GpuLoadBook&, int)>& dispatch) {
    GpuLoadBook book(cluster);
    PassResult result;
    for (const JobSpec& job : jobs) {
        std::optional<PlannedJob> planned = dispatch(job, book, theta_u);
        if (!planned) return PassResult{false, horizon, {}};
        result.schedule.entries[job.id] = ScheduleEntry{
            {PlacementSpan{planned->start_slot, planned->end_slot, planned->placement}}};
        result.makespan = std::max(result.makespan, planned->end_slot);
    }
    result.feasible = true;
    return result;
}

}  // namespace

SchedulerResult first_fit(std::span<const JobSpec> jobs, const ClusterSpec& cluster, int horizon,
                          const ExecutionEstimates& estimates) {
    std::vector<JobSpec> checked = check_jobs(jobs, cluster);
    if (checked.empty()) return SchedulerResult{0, {}, 1, 0, false, {}};
    auto dispatch = [&](const JobSpec& job, GpuLoadBook& book, int theta) {
        const double load_delta = estimates.planned_load(job.id);
        auto collect = [&](int clock) {
            std::vector<int> out;
            for (int f = 0; f < book.size(); ++f)
                if (gpu_eligible(book, f, load_delta, theta, clock)) out.push_back(f);
            return out;  // flat order is the server-then-GPU scan order
        };
        return place_job(job, book, estimates, horizon, collect);
    };
    return bisect_theta(horizon, [&](int theta, std::vector<PassTraceRow>& trace) {
        Probe probe;
        probe.pass = run_order_pass(checked, cluster, theta, horizon, dispatch);
        probe.evaluated = evaluate_pass(probe.pass, checked, cluster, horizon);
        trace.push_back({theta, 0, probe.pass.makespan, probe.evaluated, probe.pass.feasible});
        return probe;
    });
}

SchedulerResult list_scheduling(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                                int horizon, const ExecutionEstimates& estimates) {
    std::vector<JobSpec> checked = check_jobs(jobs, cluster);
    if (checked.empty()) return SchedulerResult{0, {}, 1, 0, false, {}};
    return bisect_theta(horizon, [&](int theta, std::vector<PassTraceRow>& trace) {
        Probe probe;
        probe.pass = run_order_pass(checked, cluster, theta, horizon,
                                    [&](const JobSpec& j, GpuLoadBook& b, int t) {
                                        return fa_ffp(j, b, t, estimates, horizon);
                                    });
        probe.evaluated = evaluate_pass(probe.pass, checked, cluster, horizon);
        trace.push_back({theta, 0, probe.pass.makespan, probe.evaluated, probe.pass.feasible});
        return probe;
    });
}

SchedulerResult random_policy(std::span<const JobSpec> jobs, const ClusterSpec& cluster,
                              int horizon, const ExecutionEstimates& estimates,
                              std::uint64_t seed) {
    std::vector<JobSpec> checked = check_jobs(jobs, cluster);
    if (checked.empty()) return SchedulerResult{0, {}, 1, 0, false, {}};
    Rng rng(seed);
    PassResult pass = run_order_pass(
        checked, cluster, horizon, horizon,
        [&](const JobSpec& job, GpuLoadBook& book, int theta) {
            const double load_delta = estimates.planned_load(job.id);
            auto collect = [&](int clock) {
                std::vector<int> out;
                for (int f = 0; f < book.size(); ++f)
                    if (gpu_eligible(book, f, load_delta, theta, clock)) out.push_back(f);
                return out;
            };
            return place_job(job, book, estimates, horizon, collect, &rng);
        });

    SchedulerResult result;
    result.makespan = pass.makespan;
    result.schedule = std::move(pass.schedule);
    result.theta_u = horizon;
    result.infeasible = !pass.feasible;
    result.trace.push_back({horizon, 0, pass.makespan, 0, pass.feasible});
    return result;
}

}  // namespace rarsched

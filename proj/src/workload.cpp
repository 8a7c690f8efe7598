#include "rarsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rarsched/baselines.hpp"
#include "rarsched/cluster_model.hpp"
#include "rarsched/rng.hpp"
#include "rarsched/sim_engine.hpp"
#include "rarsched/util.hpp"

namespace rarsched {

namespace {

constexpr std::uint64_t kClusterSalt = 0x636c7573;
constexpr std::uint64_t kJobsSalt = 0x6a6f6273;

std::map<int, int> parse_histogram(const std::string& text) {
    std::map<int, int> histogram;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("jobs.histogram items must look like size:count");
        const int size = std::stoi(item.substr(0, colon));
        const int count = std::stoi(item.substr(colon + 1));
        if (size < 1 || count < 0) throw ConfigError("jobs.histogram: bad size or count");
        histogram[size] += count;
    }
    if (histogram.empty()) throw ConfigError("jobs.histogram is empty");
    return histogram;
}

}  // namespace

WorkloadConfig workload_config_from(Config& config) {
    WorkloadConfig w;
    if (config.has("jobs.histogram"))
        w.size_histogram = parse_histogram(config.get_string("jobs.histogram", ""));
    w.iterations_min = config.get_int("jobs.iterations_min", w.iterations_min);
    w.iterations_max = config.get_int("jobs.iterations_max", w.iterations_max);
    w.solo_tau_min = config.get_real("jobs.tau_min", w.solo_tau_min);
    w.solo_tau_max = config.get_real("jobs.tau_max", w.solo_tau_max);
    w.comm_share_min = config.get_real("jobs.comm_share_min", w.comm_share_min);
    w.comm_share_max = config.get_real("jobs.comm_share_max", w.comm_share_max);
    w.minibatch_choices = config.get_int_list("jobs.minibatch_choices", w.minibatch_choices);
    w.default_spread_factor = config.get_real("jobs.spread_factor", w.default_spread_factor);

    const std::string mode = config.get_string("estimates.mode", "model");
    if (mode == "model") w.estimate_mode = EstimateMode::model;
    else if (mode == "range") w.estimate_mode = EstimateMode::range;
    else throw ConfigError("estimates.mode must be model or range");
    w.rho_range_lo = config.get_real("estimates.range_lo", w.rho_range_lo);
    w.rho_range_hi = config.get_real("estimates.range_hi", w.rho_range_hi);

    w.server_count = static_cast<int>(config.get_int("cluster.servers", w.server_count));
    {
        std::vector<long long> caps =
            config.get_int_list("cluster.capacity_choices",
                                {w.capacity_choices.begin(), w.capacity_choices.end()});
        w.capacity_choices.assign(caps.begin(), caps.end());
    }
    w.intra_bandwidth = config.get_real("cluster.intra_bandwidth", w.intra_bandwidth);
    w.inter_bandwidth = config.get_real("cluster.inter_bandwidth", w.inter_bandwidth);
    w.gpu_speed = config.get_real("cluster.gpu_speed", w.gpu_speed);
    w.degradation_alpha = config.get_real("cluster.alpha", w.degradation_alpha);
    w.slot_duration = config.get_real("cluster.slot_duration", w.slot_duration);

    w.xi_linked = config.get_bool("xi.linked", w.xi_linked);
    w.calibrate_xi = config.get_bool("xi.calibrate", w.calibrate_xi);
    w.xi_scale = config.get_real("xi.scale", w.xi_scale);
    w.xi_contention = config.get_real("xi.contention", w.xi_scale);
    w.xi_overhead = config.get_real("xi.overhead", w.xi_scale);
    w.contention_share_cap = config.get_real("xi.share_cap", w.contention_share_cap);

    const std::string degradation = config.get_string("cluster.degradation", "linear");
    if (degradation != "linear")
        throw ConfigError("cluster.degradation: unknown model " + degradation);

    w.horizon = static_cast<int>(config.get_int("experiment.horizon", w.horizon));
    w.seed_count = static_cast<int>(config.get_int("experiment.seeds", w.seed_count));
    w.base_seed = static_cast<std::uint64_t>(config.get_int("experiment.base_seed",
                                                            static_cast<long long>(w.base_seed)));
    w.policies = config.get_string_list("experiment.policies", w.policies);

    w.kappa_min = static_cast<int>(config.get_int("sweep.kappa_min", w.kappa_min));
    w.kappa_max = static_cast<int>(config.get_int("sweep.kappa_max", w.kappa_max));
    w.lambda_values = config.get_real_list("sweep.lambda_values", w.lambda_values);
    w.servers_min = static_cast<int>(config.get_int("sweep.servers_min", w.servers_min));
    w.servers_max = static_cast<int>(config.get_int("sweep.servers_max", w.servers_max));
    w.servers_horizon = static_cast<int>(config.get_int("sweep.servers_horizon", w.servers_horizon));

    if (w.iterations_min < 1 || w.iterations_max < w.iterations_min)
        throw ConfigError("jobs.iterations range is empty");
    if (w.solo_tau_min <= 0 || w.solo_tau_max < w.solo_tau_min)
        throw ConfigError("jobs.tau range is empty");
    if (w.rho_range_hi < w.rho_range_lo) throw ConfigError("estimates.range is empty");
    if (w.server_count < 1) throw ConfigError("cluster.servers must be positive");
    if (w.capacity_choices.empty()) throw ConfigError("cluster.capacity_choices is empty");
    if (w.seed_count < 1) throw ConfigError("experiment.seeds must be positive");
    return w;
}

ClusterSpec generate_cluster(const WorkloadConfig& config, std::uint64_t seed, int server_count) {
    const int wanted = server_count < 0 ? config.server_count : server_count;
    const int draw_count = std::max(wanted, config.server_count);
    Rng rng = Rng(seed).fork(kClusterSalt);

    ClusterSpec cluster;
    for (int s = 0; s < draw_count; ++s) {
        const int cap = config.capacity_choices[rng.below(config.capacity_choices.size())];
        if (s < wanted) cluster.server_capacities.push_back(cap);
    }
    cluster.intra_bandwidth = config.intra_bandwidth;
    cluster.inter_bandwidth = config.inter_bandwidth;
    cluster.gpu_speed = config.gpu_speed;
    cluster.degradation_alpha = config.degradation_alpha;
    if (config.xi_linked) {
        cluster.contention_fraction = std::clamp(config.xi_scale, 1e-6, 1.0);
        cluster.overhead_per_server = std::clamp(config.xi_scale, 0.0, 1.0);
    } else {
        cluster.contention_fraction = std::clamp(config.xi_contention, 1e-6, 1.0);
        cluster.overhead_per_server = std::clamp(config.xi_overhead, 0.0, 1.0);
    }
    cluster.slot_count = config.horizon;
    cluster.slot_duration = config.slot_duration;
    cluster.check();
    return cluster;
}

std::vector<JobSpec> generate_workload(const WorkloadConfig& config, std::uint64_t seed,
                                       const ClusterSpec& cluster) {
    Rng rng = Rng(seed).fork(kJobsSalt);
    std::vector<JobSpec> jobs;
    int next_id = 1;

    // Cost per unit of gradient when co-located: two ring passes over the fast
    // interconnect plus one reduction pass.
    const double unit_comm = 2.0 / cluster.intra_bandwidth + 1.0 / cluster.gpu_speed;

    for (const auto& [size, count] : config.size_histogram) {
        if (size > cluster.total_gpus())
            throw ConfigError("jobs.histogram: a " + std::to_string(size) +
                              "-GPU job cannot fit this cluster");
        for (int i = 0; i < count; ++i) {
            JobSpec job;
            job.id = next_id++;
            job.gpus_requested = size;
            job.iterations = rng.uniform_int(config.iterations_min, config.iterations_max);
            job.server_spread_factor = config.default_spread_factor;

            const double solo_tau = rng.uniform_real(config.solo_tau_min, config.solo_tau_max);
            double compute = solo_tau;
            if (size > 1) {
                const double comm_share =
                    rng.uniform_real(config.comm_share_min, config.comm_share_max);
                job.gradient_size =
                    comm_share * solo_tau * size / ((size - 1) * unit_comm);
                compute = (1.0 - comm_share) * solo_tau;
            } else {
                job.gradient_size = rng.uniform_real(1.0, 10.0);
            }
            const double fp_share = rng.uniform_real(0.5, 0.8);
            job.minibatch = static_cast<int>(rng.pick(config.minibatch_choices));
            job.fp_per_sample = fp_share * compute / job.minibatch;
            job.bp_time = (1.0 - fp_share) * compute;
            job.check();
            jobs.push_back(job);
        }
    }
    // Submission order is not size order; ids follow the shuffled arrival.
    rng.partial_shuffle(jobs, jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i].id = static_cast<int>(i) + 1;
    return jobs;
}

namespace {

// Fraction of simulated execution time attributable to contention slowdown
// and coordination overhead, relative to the same placements with neither.
double contention_share(const SimTrace& trace, std::span<const JobSpec> jobs,
                        const ClusterSpec& cluster, const Schedule& schedule) {
    ClusterSpec clean = cluster;
    clean.overhead_per_server = 0.0;

    std::map<int, double> base_tau;
    std::map<int, const JobSpec*> by_id;
    for (const JobSpec& j : jobs) by_id[j.id] = &j;
    for (const auto& [job_id, entry] : schedule.entries)
        base_tau[job_id] = per_iteration_time(*by_id.at(job_id), entry.placement(), 0.0, clean);

    double total = 0, extra = 0;
    for (const SimStep& step : trace.steps) {
        total += step.tau;
        extra += step.tau - base_tau.at(step.job_id);
    }
    return total > 0 ? extra / total : 0.0;
}

double evaluate_share(std::vector<JobSpec> jobs, ClusterSpec cluster, double xi,
                      const Schedule& schedule) {
    cluster.contention_fraction = std::clamp(xi, 1e-6, 1.0);
    cluster.overhead_per_server = std::clamp(xi, 0.0, 1.0);
    SimTrace trace = simulate(schedule, jobs, cluster);
    return contention_share(trace, jobs, cluster, schedule);
}

}  // namespace

double calibrate_xi(std::vector<JobSpec> jobs, ClusterSpec cluster, const WorkloadConfig& config) {
    // A pilot plan at the configured base scale; the schedule is then held
    // fixed while the scale is searched so the share responds monotonically.
    ClusterSpec pilot_cluster = cluster;
    pilot_cluster.contention_fraction = std::clamp(config.xi_scale, 1e-6, 1.0);
    pilot_cluster.overhead_per_server = std::clamp(config.xi_scale, 0.0, 1.0);
    ExecutionEstimates estimates = build_estimates(jobs, pilot_cluster, {});
    SchedulerResult pilot = first_fit(jobs, pilot_cluster, pilot_cluster.slot_count, estimates);
    if (pilot.infeasible || pilot.schedule.empty()) return config.xi_scale;

    const double cap = config.contention_share_cap;
    if (evaluate_share(jobs, cluster, 1.0, pilot.schedule) <= cap) return 1.0;

    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 32; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (evaluate_share(jobs, cluster, mid, pilot.schedule) <= cap) lo = mid;
        else hi = mid;
    }
    return std::max(lo, 1e-6);
}

Instance generate_instance(const WorkloadConfig& config, std::uint64_t seed, int server_count,
                           int horizon_override) {
    Instance instance;
    instance.cluster = generate_cluster(config, seed, server_count);
    if (horizon_override > 0) instance.cluster.slot_count = horizon_override;
    instance.jobs = generate_workload(config, seed, instance.cluster);

    if (config.xi_linked) {
        double xi = config.xi_scale;
        if (config.calibrate_xi) xi = calibrate_xi(instance.jobs, instance.cluster, config);
        instance.xi = xi;
        instance.cluster.contention_fraction = std::clamp(xi, 1e-6, 1.0);
        instance.cluster.overhead_per_server = std::clamp(xi, 0.0, 1.0);
    } else {
        instance.xi = instance.cluster.contention_fraction;
    }
    instance.cluster.check();
    return instance;
}

void write_instance(const Instance& instance, std::ostream& out) {
    const ClusterSpec& c = instance.cluster;
    out << "# generated instance\n";
    std::string caps;
    for (int cap : c.server_capacities) caps += (caps.empty() ? "" : ",") + std::to_string(cap);
    out << "cluster.capacities = " << caps << '\n';
    out << "cluster.intra_bandwidth = " << fmt_double(c.intra_bandwidth) << '\n';
    out << "cluster.inter_bandwidth = " << fmt_double(c.inter_bandwidth) << '\n';
    out << "cluster.gpu_speed = " << fmt_double(c.gpu_speed) << '\n';
    out << "cluster.contention_fraction = " << fmt_double(c.contention_fraction) << '\n';
    out << "cluster.overhead_per_server = " << fmt_double(c.overhead_per_server) << '\n';
    out << "cluster.alpha = " << fmt_double(c.degradation_alpha) << '\n';
    out << "cluster.horizon = " << c.slot_count << '\n';
    out << "cluster.slot_duration = " << fmt_double(c.slot_duration) << '\n';
    for (const JobSpec& j : instance.jobs)
        out << "job = " << j.id << ',' << j.gpus_requested << ',' << j.iterations << ','
            << fmt_double(j.gradient_size) << ',' << j.minibatch << ','
            << fmt_double(j.fp_per_sample) << ',' << fmt_double(j.bp_time) << ','
            << fmt_double(j.server_spread_factor) << '\n';
}

Instance read_instance(Config& config) {
    Instance instance;
    ClusterSpec& c = instance.cluster;
    std::vector<long long> caps = config.get_int_list("cluster.capacities", {});
    if (caps.empty()) throw ConfigError("instance: cluster.capacities missing");
    c.server_capacities.assign(caps.begin(), caps.end());
    c.intra_bandwidth = config.get_real("cluster.intra_bandwidth", c.intra_bandwidth);
    c.inter_bandwidth = config.get_real("cluster.inter_bandwidth", c.inter_bandwidth);
    c.gpu_speed = config.get_real("cluster.gpu_speed", c.gpu_speed);
    c.contention_fraction = config.get_real("cluster.contention_fraction", c.contention_fraction);
    c.overhead_per_server = config.get_real("cluster.overhead_per_server", c.overhead_per_server);
    c.degradation_alpha = config.get_real("cluster.alpha", c.degradation_alpha);
    c.slot_count = static_cast<int>(config.get_int("cluster.horizon", c.slot_count));
    c.slot_duration = config.get_real("cluster.slot_duration", c.slot_duration);
    instance.xi = c.contention_fraction;

    for (const std::string& line : config.take_repeated("job")) {
        std::istringstream ss(line);
        JobSpec j;
        char comma;
        if (!(ss >> j.id >> comma >> j.gpus_requested >> comma >> j.iterations >> comma >>
              j.gradient_size >> comma >> j.minibatch >> comma >> j.fp_per_sample >> comma >>
              j.bp_time >> comma >> j.server_spread_factor))
            throw ConfigError("instance: bad job line: " + line);
        j.check();
        instance.jobs.push_back(j);
    }
    if (instance.jobs.empty()) throw ConfigError("instance: no jobs");
    c.check();
    return instance;
}

}  // namespace rarsched

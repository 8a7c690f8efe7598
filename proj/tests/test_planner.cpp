#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rarsched/cluster_model.hpp"
#include "rarsched/estimates.hpp"
#include "rarsched/sim_engine.hpp"
#include "rarsched/sjf_bco.hpp"
#include "test_support.hpp"

using namespace rarsched;
using rarsched::testing::make_job;
using rarsched::testing::max_booked_load;
using rarsched::testing::random_small_instance;

namespace {

ClusterSpec plain_cluster(std::vector<int> caps, double xi = 0.001) {
    ClusterSpec c;
    c.server_capacities = std::move(caps);
    c.intra_bandwidth = 100;
    c.inter_bandwidth = 25;
    c.gpu_speed = 400;
    c.degradation_alpha = 0.1;
    c.contention_fraction = xi;
    c.overhead_per_server = xi;
    c.slot_count = 200;
    return c;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("execution-time bounds collapse for single-GPU jobs") {
    ClusterSpec c = plain_cluster({8, 8});
    JobSpec j = make_job(1, 1, 100, 0.1, 0, c);
    ExecutionBounds b = execution_time_bounds(j, c);
    CHECK(b.tau_min == doctest::Approx(b.tau_max));
    CHECK(b.rho_min == doctest::Approx(b.rho_max));
}

TEST_CASE("worst case uses the largest server's degradation and the full spread") {
    ClusterSpec c = plain_cluster({8, 4});
    c.contention_fraction = 1.0;
    c.degradation_alpha = 0.5;
    c.overhead_per_server = 0.01;
    JobSpec j = make_job(1, 4, 100, 0.1, 0.4, c);
    ExecutionBounds b = execution_time_bounds(j, c);
    const double chunk = j.gradient_size * 3.0 / 4;
    const double expected_max = 2 * chunk * degradation_factor(0.5, 8) / c.inter_bandwidth +
                                chunk / c.gpu_speed + 0.01 * 2 +
                                j.fp_per_sample * j.minibatch + j.bp_time;
    CHECK(b.tau_max == doctest::Approx(expected_max));
}

TEST_CASE("infinite intra bandwidth leaves only compute in the best case") {
    ClusterSpec c = plain_cluster({8, 8});
    c.intra_bandwidth = 1e15;
    c.overhead_per_server = 0;
    JobSpec j = make_job(1, 4, 100, 0.1, 0.4, c);
    j.gradient_size = 40;  // decoupled from the helper's bandwidth-based sizing
    ExecutionBounds b = execution_time_bounds(j, c);
    const double chunk = j.gradient_size * 3.0 / 4;
    CHECK(b.tau_min ==
          doctest::Approx(chunk / c.gpu_speed + j.fp_per_sample * j.minibatch + j.bp_time));
}

TEST_CASE("estimated execution sits at the midpoint") {
    JobSpec j;
    j.id = 1;
    j.iterations = 5000;
    CHECK(estimate_execution(j, {0.01, 0.05, 0, 0}) == doctest::Approx(150));
    j.iterations = 1;
    CHECK(estimate_execution(j, {1.0, 1.0, 0, 0}) == doctest::Approx(1));
    j.iterations = 1000;
    CHECK(estimate_execution(j, {0.01, 0.05, 0, 0}) == doctest::Approx(30));
}

TEST_CASE("estimate envelope brackets the true execution-time range") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_small_instance(rng);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        CHECK(est.l <= 1.0 + 1e-12);
        CHECK(est.u >= 1.0 - 1e-12);
        CHECK(est.varphi >= 1.0 - 1e-12);
        for (const auto& [id, e] : est.by_job) {
            CHECK(e.rho_hat <= est.u * e.bounds.rho_min + 1e-9);
            if (e.bounds.rho_max < kStallSentinel)
                CHECK(e.rho_hat >= est.l * e.bounds.rho_max - 1e-9);
        }
    }
}

TEST_CASE("fa_ffp on an empty cluster takes the least-loaded GPU at slot one") {
    ClusterSpec c = plain_cluster({2, 2});
    JobSpec j = make_job(1, 1, 100, 0.1, 0, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{j}, c, {});
    GpuLoadBook book(c);
    auto placed = fa_ffp(j, book, 100, est, c.slot_count);
    REQUIRE(placed.has_value());
    CHECK(placed->start_slot == 1);
    CHECK(placed->placement.gpus == std::vector<GpuRef>{{0, 0}});
}

TEST_CASE("fa_ffp waits for a release when every GPU is busy") {
    ClusterSpec c = plain_cluster({2});
    JobSpec a = make_job(1, 2, 100, 0.1, 0.3, c);
    JobSpec b = make_job(2, 2, 100, 0.1, 0.3, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{a, b}, c, {});
    GpuLoadBook book(c);
    auto first = fa_ffp(a, book, 100, est, c.slot_count);
    REQUIRE(first.has_value());
    CHECK(first->start_slot == 1);
    auto second = fa_ffp(b, book, 100, est, c.slot_count);
    REQUIRE(second.has_value());
    CHECK(second->start_slot == first->end_slot + 1);
}

TEST_CASE("fa_ffp is infeasible when loads are at the limit and nothing is running") {
    ClusterSpec c = plain_cluster({2});
    JobSpec j = make_job(1, 1, 100, 0.1, 0, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{j}, c, {});
    GpuLoadBook book(c);
    const std::vector<int> all{0, 1};
    book.assign(all, 50.0, 0);  // loaded to the cap, but free immediately
    CHECK_FALSE(fa_ffp(j, book, 50, est, c.slot_count).has_value());
}

TEST_CASE("lbsgf fills one server when the pool allows it") {
    ClusterSpec c = plain_cluster({4, 4});
    JobSpec j = make_job(1, 4, 100, 0.1, 0.3, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{j}, c, {});

    for (double lambda : {1.0, 2.0}) {
        GpuLoadBook book(c);
        auto placed = lbsgf(j, book, 100, est, lambda, c.slot_count);
        REQUIRE(placed.has_value());
        CHECK(placed->placement.single_server());
        CHECK(placed->placement.gpus.front().server == 0);
    }
}

TEST_CASE("lbsgf is infeasible when the demand exceeds the pool with nothing running") {
    ClusterSpec c = plain_cluster({2, 2});
    JobSpec j = make_job(1, 5, 100, 0.1, 0.3, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{j}, c, {});
    GpuLoadBook book(c);
    CHECK_FALSE(lbsgf(j, book, 100, est, 1.0, c.slot_count).has_value());
}

TEST_CASE("one job on one server: start one, duration-consistent limit") {
    ClusterSpec c = plain_cluster({2});
    JobSpec j = make_job(1, 2, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = sjf_bco(jobs, c, c.slot_count, est);

    REQUIRE_FALSE(r.infeasible);
    const int duration = est.planned_duration(1);
    CHECK(r.schedule.entries.at(1).start_slot() == 1);
    CHECK(r.makespan == duration);
    CHECK(r.theta_u == duration);

    // exhaustive grid: the returned limit is the smallest workable one
    int minimal = 0;
    for (int theta = 1; theta <= c.slot_count && minimal == 0; ++theta)
        if (run_sjf_pass(jobs, c, theta, r.kappa, est, c.slot_count).feasible) minimal = theta;
    CHECK(minimal == r.theta_u);
}

TEST_CASE("no jobs means an empty zero-makespan schedule") {
    ClusterSpec c = plain_cluster({2});
    ExecutionEstimates est;
    SchedulerResult r = sjf_bco(std::vector<JobSpec>{}, c, c.slot_count, est);
    CHECK_FALSE(r.infeasible);
    CHECK(r.makespan == 0);
    CHECK(r.schedule.empty());
}

TEST_CASE("two identical single-GPU jobs share the sole GPU back to back") {
    ClusterSpec c = plain_cluster({1});
    JobSpec a = make_job(1, 1, 100, 0.1, 0, c);
    JobSpec b = a;
    b.id = 2;
    std::vector<JobSpec> jobs{a, b};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    const int duration = est.planned_duration(1);

    SchedulerResult r = sjf_bco(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    CHECK(r.makespan == 2 * duration);
    // the tightest limit carries both bookings on the one GPU
    CHECK(r.theta_u == static_cast<int>(std::ceil(2 * est.planned_load(1) - 1e-9)));
    const auto& first = r.schedule.entries.at(1);
    const auto& second = r.schedule.entries.at(2);
    CHECK(first.placement().gpus == second.placement().gpus);
    CHECK(std::min(first.start_slot(), second.start_slot()) == 1);
    CHECK(std::max(first.start_slot(), second.start_slot()) == duration + 1);
}

TEST_CASE("oversized jobs are rejected up front") {
    ClusterSpec c = plain_cluster({2});
    JobSpec j = make_job(1, 3, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    CHECK_THROWS_AS(sjf_bco(jobs, c, c.slot_count, est), std::invalid_argument);
}

TEST_CASE("identical inputs give identical results") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = random_small_instance(rng);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        SchedulerResult a = sjf_bco(inst.jobs, inst.cluster, inst.cluster.slot_count, est);
        SchedulerResult b = sjf_bco(inst.jobs, inst.cluster, inst.cluster.slot_count, est);
        CHECK(a.makespan == b.makespan);
        CHECK(a.theta_u == b.theta_u);
        CHECK(a.kappa == b.kappa);
        CHECK(a.trace.size() == b.trace.size());
        REQUIRE(a.schedule.entries.size() == b.schedule.entries.size());
        for (const auto& [id, entry] : a.schedule.entries) {
            const auto& other = b.schedule.entries.at(id);
            CHECK(entry.start_slot() == other.start_slot());
            CHECK(entry.placement().gpus == other.placement().gpus);
        }
    }
}

TEST_CASE("pass feasibility is monotone in the execution-time limit") {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        auto inst = random_small_instance(rng, 6, 3, 48);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        std::vector<JobSpec> sorted = inst.jobs;
        std::stable_sort(sorted.begin(), sorted.end(), [](const JobSpec& a, const JobSpec& b) {
            if (a.gpus_requested != b.gpus_requested) return a.gpus_requested < b.gpus_requested;
            return a.id < b.id;
        });
        int max_size = 1;
        for (const JobSpec& j : inst.jobs) max_size = std::max(max_size, j.gpus_requested);
        for (int kappa = 1; kappa <= max_size; ++kappa) {
            bool seen_feasible = false;
            for (int theta = 1; theta <= inst.cluster.slot_count; ++theta) {
                const bool feasible =
                    run_sjf_pass(sorted, inst.cluster, theta, kappa, est, inst.cluster.slot_count)
                        .feasible;
                if (seen_feasible) CHECK(feasible);
                seen_feasible |= feasible;
            }
        }
    }
}

TEST_CASE("returned limit is grid-minimal and the booked loads respect it") {
    Rng rng(43);
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto inst = random_small_instance(rng, 6, 3, 48);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        SchedulerResult r = sjf_bco(inst.jobs, inst.cluster, inst.cluster.slot_count, est);
        if (r.infeasible) continue;
        checked++;

        CHECK(max_booked_load(r.schedule, est, inst.cluster) <= r.theta_u + 1e-9);

        // replay the returned threshold class over the whole grid
        std::vector<JobSpec> sorted = inst.jobs;
        std::stable_sort(sorted.begin(), sorted.end(), [](const JobSpec& a, const JobSpec& b) {
            if (a.gpus_requested != b.gpus_requested) return a.gpus_requested < b.gpus_requested;
            return a.id < b.id;
        });
        ClusterSpec eval_cluster = inst.cluster;
        int returned_eval = 0;
        {
            SimTrace sim = simulate(r.schedule, inst.jobs, eval_cluster);
            returned_eval = sim.horizon_exceeded ? eval_cluster.slot_count + 1 : sim.makespan;
        }
        for (int theta = 1; theta < r.theta_u; ++theta) {
            PassResult pass =
                run_sjf_pass(sorted, inst.cluster, theta, r.kappa, est, inst.cluster.slot_count);
            if (!pass.feasible) continue;
            SimTrace sim = simulate(pass.schedule, inst.jobs, eval_cluster);
            const int evaluated = sim.horizon_exceeded ? eval_cluster.slot_count + 1 : sim.makespan;
            CHECK(evaluated >= returned_eval);
        }
    }
    CHECK(checked > 10);
}

}  // TEST_SUITE

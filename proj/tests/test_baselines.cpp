#include "doctest.h"

#include <set>

#include "rarsched/baselines.hpp"
#include "rarsched/cluster_model.hpp"
#include "test_support.hpp"

using namespace rarsched;
using rarsched::testing::make_job;
using rarsched::testing::random_small_instance;

namespace {

ClusterSpec plain_cluster(std::vector<int> caps) {
    ClusterSpec c;
    c.server_capacities = std::move(caps);
    c.intra_bandwidth = 100;
    c.inter_bandwidth = 25;
    c.gpu_speed = 400;
    c.degradation_alpha = 0.1;
    c.contention_fraction = 0.05;
    c.overhead_per_server = 0.001;
    c.slot_count = 300;
    return c;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("first fit takes the leading GPUs of the leading server") {
    ClusterSpec c = plain_cluster({4, 4});
    JobSpec j = make_job(1, 3, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = first_fit(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    CHECK(r.schedule.entries.at(1).placement().gpus ==
          std::vector<GpuRef>{{0, 0}, {0, 1}, {0, 2}});
}

TEST_CASE("first fit moves to the next server when the first cannot take more") {
    ClusterSpec c = plain_cluster({1, 4});
    JobSpec a = make_job(1, 1, 400, 0.2, 0, c);
    JobSpec b = make_job(2, 1, 400, 0.2, 0, c);
    std::vector<JobSpec> jobs{a, b};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = first_fit(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    // the tightest limit that fits both cannot stack them on server 0's GPU
    CHECK(r.schedule.entries.at(1).placement().gpus == std::vector<GpuRef>{{0, 0}});
    CHECK(r.schedule.entries.at(2).placement().gpus == std::vector<GpuRef>{{1, 0}});
}

TEST_CASE("first fit spans servers four plus one") {
    ClusterSpec c = plain_cluster({4, 4});
    JobSpec j = make_job(1, 5, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = first_fit(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    CHECK(r.schedule.entries.at(1).placement().gpus ==
          std::vector<GpuRef>{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}});
}

TEST_CASE("first fit server order is nondecreasing within a job") {
    Rng rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        auto inst = random_small_instance(rng);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        SchedulerResult r = first_fit(inst.jobs, inst.cluster, inst.cluster.slot_count, est);
        if (r.infeasible) continue;
        for (const auto& [id, entry] : r.schedule.entries) {
            const auto& gpus = entry.placement().gpus;
            for (std::size_t i = 1; i < gpus.size(); ++i)
                CHECK(gpus[i - 1].server <= gpus[i].server);
        }
    }
}

TEST_CASE("list scheduling picks the globally least-loaded GPUs") {
    ClusterSpec c = plain_cluster({2, 2});
    // two single-GPU jobs with distinct durations load two GPUs unevenly,
    // then a two-GPU job must take the two quietest
    JobSpec a = make_job(1, 1, 400, 0.2, 0, c);
    JobSpec b = make_job(2, 1, 100, 0.05, 0, c);
    JobSpec d = make_job(3, 2, 100, 0.05, 0.3, c);
    std::vector<JobSpec> jobs{a, b, d};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = list_scheduling(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    std::set<GpuRef> chosen(r.schedule.entries.at(3).placement().gpus.begin(),
                            r.schedule.entries.at(3).placement().gpus.end());
    // GPU (0,0) carries the long job; the pair must avoid it
    CHECK_FALSE(chosen.count(GpuRef{0, 0}));
}

TEST_CASE("the least-loaded selector picks the two lightest GPUs from a crafted book") {
    ClusterSpec c = plain_cluster({2, 2});
    JobSpec j = make_job(1, 2, 100, 0.1, 0.3, c);
    ExecutionEstimates est = build_estimates(std::vector<JobSpec>{j}, c, {});
    GpuLoadBook book(c);
    for (auto [flat, load] : {std::pair<int, double>{0, 5}, {1, 1}, {2, 3}, {3, 1}}) {
        const std::vector<int> one{flat};
        book.assign(one, load, 0);
    }
    auto placed = fa_ffp(j, book, 100, est, c.slot_count);
    REQUIRE(placed.has_value());
    CHECK(placed->placement.gpus == std::vector<GpuRef>{{0, 1}, {1, 1}});
}

TEST_CASE("list scheduling breaks ties by index") {
    ClusterSpec c = plain_cluster({2, 2});
    JobSpec j = make_job(1, 2, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult r = list_scheduling(jobs, c, c.slot_count, est);
    REQUIRE_FALSE(r.infeasible);
    CHECK(r.schedule.entries.at(1).placement().gpus == std::vector<GpuRef>{{0, 0}, {0, 1}});
}

TEST_CASE("random policy is reproducible under a seed and fills a full-cluster demand") {
    ClusterSpec c = plain_cluster({2, 2});
    JobSpec j = make_job(1, 4, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    SchedulerResult a = random_policy(jobs, c, c.slot_count, est, 99);
    SchedulerResult b = random_policy(jobs, c, c.slot_count, est, 99);
    REQUIRE_FALSE(a.infeasible);
    CHECK(a.schedule.entries.at(1).placement().gpus == b.schedule.entries.at(1).placement().gpus);
    CHECK(a.theta_u == c.slot_count);
    // the only feasible subset is every GPU
    CHECK(a.schedule.entries.at(1).placement().gpus.size() == 4);
}

TEST_CASE("different seeds usually place differently") {
    ClusterSpec c = plain_cluster({4, 4});
    JobSpec j = make_job(1, 2, 100, 0.1, 0.3, c);
    std::vector<JobSpec> jobs{j};
    ExecutionEstimates est = build_estimates(jobs, c, {});
    int differing = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SchedulerResult a = random_policy(jobs, c, c.slot_count, est, seed);
        SchedulerResult b = random_policy(jobs, c, c.slot_count, est, seed + 1000);
        if (a.schedule.entries.at(1).placement().gpus !=
            b.schedule.entries.at(1).placement().gpus)
            differing++;
    }
    CHECK(differing >= 60);
}

TEST_CASE("baseline schedules satisfy the feasibility rules on random instances") {
    Rng rng(52);
    for (int trial = 0; trial < 30; ++trial) {
        auto inst = random_small_instance(rng);
        ExecutionEstimates est = build_estimates(inst.jobs, inst.cluster, {});
        for (int policy = 0; policy < 3; ++policy) {
            SchedulerResult r =
                policy == 0   ? first_fit(inst.jobs, inst.cluster, inst.cluster.slot_count, est)
                : policy == 1 ? list_scheduling(inst.jobs, inst.cluster, inst.cluster.slot_count, est)
                              : random_policy(inst.jobs, inst.cluster, inst.cluster.slot_count, est,
                                              trial);
            if (r.infeasible) continue;
            CHECK(validate_schedule(r.schedule, inst.jobs, inst.cluster).empty());
        }
    }
}

}  // TEST_SUITE

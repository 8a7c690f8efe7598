#include "doctest.h"

#include <stdexcept>

#include "rarsched/cluster_model.hpp"
#include "rarsched/rng.hpp"
#include "oracles.hpp"

using namespace rarsched;

namespace {

ClusterSpec two_servers(int cap = 4) {
    ClusterSpec c;
    c.server_capacities = {cap, cap};
    c.intra_bandwidth = 100;
    c.inter_bandwidth = 10;
    c.gpu_speed = 50;
    c.slot_count = 100;
    return c;
}

Placement on_one_server(int job, int server, int count) {
    Placement p{job, {}};
    for (int g = 0; g < count; ++g) p.gpus.push_back({server, g});
    return p;
}

Placement split_across(int job, int servers, int per_server) {
    Placement p{job, {}};
    for (int s = 0; s < servers; ++s)
        for (int g = 0; g < per_server; ++g) p.gpus.push_back({s, g});
    return p;
}

}  // namespace

TEST_SUITE("cluster_model") {

TEST_CASE("contention degree of a fully co-located job is zero") {
    std::vector<Placement> active{on_one_server(1, 0, 4), split_across(2, 2, 1)};
    CHECK(contention_degree(active, 1) == 0);
}

TEST_CASE("two jobs split one GPU per server across the same two servers see each other") {
    Placement a{1, {{0, 0}, {1, 0}}};
    Placement b{2, {{0, 1}, {1, 1}}};
    std::vector<Placement> active{a, b};
    CHECK(contention_degree(active, 1) == 2);
    CHECK(contention_degree(active, 2) == 2);
}

TEST_CASE("a lone job split across three servers only counts itself") {
    std::vector<Placement> active{split_across(1, 3, 1)};
    CHECK(contention_degree(active, 1) == 1);
}

TEST_CASE("contention degree rejects unknown jobs and never exceeds the active count") {
    std::vector<Placement> active{split_across(1, 2, 1)};
    CHECK_THROWS_AS(contention_degree(active, 99), std::out_of_range);

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int jobs = 1 + static_cast<int>(rng.below(4));
        std::vector<Placement> set;
        for (int j = 0; j < jobs; ++j) {
            Placement p{j, {}};
            const int width = 1 + static_cast<int>(rng.below(3));
            for (int g = 0; g < width; ++g)
                p.gpus.push_back({static_cast<int>(rng.below(3)), j * 4 + g});
            set.push_back(p);
        }
        for (int j = 0; j < jobs; ++j) {
            const int degree = contention_degree(set, j);
            CHECK(degree >= 0);
            CHECK(degree <= jobs);
            if (set[j].single_server()) CHECK(degree == 0);
        }
    }
}

TEST_CASE("degradation factor: unit point, linear slope, equal sharing") {
    CHECK(degradation_factor(0.5, 1) == doctest::Approx(1.0));
    CHECK(degradation_factor(0.5, 2) == doctest::Approx(2.5));
    CHECK(degradation_factor(0.0, 3) == doctest::Approx(3.0));
    CHECK_THROWS_AS(degradation_factor(0.5, -0.1), std::invalid_argument);

    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const double alpha = rng.uniform_real(0, 2);
        const double k1 = rng.uniform_real(1, 16);
        const double k2 = k1 + rng.uniform_real(0, 8);
        CHECK(degradation_factor(alpha, k2) >= degradation_factor(alpha, k1) - 1e-12);
    }
}

TEST_CASE("bottleneck bandwidth: intra for one server, shared and degraded across") {
    ClusterSpec c = two_servers();
    CHECK(bottleneck_bandwidth(on_one_server(1, 0, 4), 7.0, c) == doctest::Approx(100));
    CHECK(bottleneck_bandwidth(split_across(1, 2, 2), 1.0, c) == doctest::Approx(10));
    c.degradation_alpha = 0.5;
    CHECK(bottleneck_bandwidth(split_across(1, 2, 2), 2.0, c) == doctest::Approx(4.0));
}

TEST_CASE("bottleneck bandwidth stays within its analytic range") {
    ClusterSpec c = two_servers(8);
    c.degradation_alpha = 0.3;
    const double lo = c.inter_bandwidth / degradation_factor(c.degradation_alpha, c.max_capacity());
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const double k = rng.uniform_real(0, c.max_capacity());
        const Placement p = trial % 2 ? split_across(1, 2, 2) : on_one_server(1, 0, 4);
        const double b = bottleneck_bandwidth(p, k, c);
        CHECK(b >= lo - 1e-12);
        CHECK(b <= c.intra_bandwidth + 1e-12);
    }
}

TEST_CASE("per-iteration time matches the worked decomposition") {
    // exchange 15, reduction 1.5, overhead 0.2, forward 0.3, backward 0.1
    ClusterSpec c;
    c.server_capacities = {1, 1, 1, 1};
    c.intra_bandwidth = 100;
    c.inter_bandwidth = 10;
    c.gpu_speed = 50;
    c.overhead_per_server = 0.05;
    JobSpec job;
    job.id = 1;
    job.gpus_requested = 4;
    job.gradient_size = 100;
    job.minibatch = 1;
    job.fp_per_sample = 0.3;
    job.bp_time = 0.1;
    CHECK(per_iteration_time(job, split_across(1, 4, 1), 1.0, c) == doctest::Approx(17.1));
}

TEST_CASE("single worker pays only overhead and compute") {
    ClusterSpec c = two_servers();
    c.overhead_per_server = 0.05;
    JobSpec job;
    job.id = 1;
    job.gpus_requested = 1;
    job.gradient_size = 123;
    job.minibatch = 1;
    job.fp_per_sample = 0.3;
    job.bp_time = 0.1;
    CHECK(per_iteration_time(job, on_one_server(1, 0, 1), 0.0, c) == doctest::Approx(0.45));
}

TEST_CASE("halving bandwidth doubles only the exchange term") {
    ClusterSpec c = two_servers();
    c.degradation_alpha = 0.0;  // f(0, k) = k, so doubled k halves the shared link
    JobSpec job;
    job.id = 1;
    job.gpus_requested = 4;
    job.gradient_size = 100;
    job.minibatch = 2;
    job.fp_per_sample = 0.15;
    job.bp_time = 0.1;
    const Placement p = split_across(1, 2, 2);
    const double tau1 = per_iteration_time(job, p, 1.0, c);
    const double tau2 = per_iteration_time(job, p, 2.0, c);
    const double exchange1 = 2.0 * job.gradient_size * 3 / 4 / c.inter_bandwidth;
    CHECK(tau2 - tau1 == doctest::Approx(exchange1));
}

TEST_CASE("per-iteration time is monotone in contention and in servers used") {
    ClusterSpec c = two_servers(8);
    c.degradation_alpha = 0.4;
    c.overhead_per_server = 0.02;
    JobSpec job;
    job.id = 1;
    job.gpus_requested = 4;
    job.gradient_size = 60;
    job.minibatch = 4;
    job.fp_per_sample = 0.01;
    job.bp_time = 0.05;
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const double k1 = rng.uniform_real(0, 6);
        const double k2 = k1 + rng.uniform_real(0, 4);
        const Placement p = split_across(1, 2, 2);
        CHECK(per_iteration_time(job, p, k2, c) >= per_iteration_time(job, p, k1, c) - 1e-12);
    }
    ClusterSpec wide = c;
    wide.server_capacities = {4, 4, 4, 4};
    Placement two = split_across(1, 2, 2);
    Placement four = split_across(1, 4, 1);
    CHECK(per_iteration_time(job, four, 1.0, wide) >= per_iteration_time(job, two, 1.0, wide));
}

TEST_CASE("training speed floors whole iterations per slot") {
    CHECK(training_speed(0.02) == 50);
    CHECK(training_speed(1.0) == 1);
    CHECK(training_speed(3.0) == 0);
    CHECK_THROWS_AS(training_speed(0.0), std::invalid_argument);
}

TEST_CASE("completion slot: two-slot finish, one-slot finish, never") {
    std::vector<long long> fifty(10, 50);
    CHECK(completion_time(3, fifty, 100) == 4);
    std::vector<long long> once{7};
    CHECK(completion_time(1, once, 7) == 1);
    std::vector<long long> zeros(5, 0);
    CHECK_FALSE(completion_time(1, zeros, 1).has_value());
}

TEST_CASE("completion slot agrees with the running-total reference on random inputs") {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<long long> speeds;
        const int n = 1 + static_cast<int>(rng.below(20));
        for (int i = 0; i < n; ++i) speeds.push_back(rng.below(5));
        const long long target = 1 + static_cast<long long>(rng.below(12));
        const int start = 1 + static_cast<int>(rng.below(9));
        const long long expected = testing::completion_reference(start, speeds, target);
        auto actual = completion_time(start, speeds, target);
        if (expected < 0) CHECK_FALSE(actual.has_value());
        else CHECK(actual.value() == expected);
    }
}

TEST_CASE("ring traffic volume: worked values and the explicit ring oracle") {
    CHECK(rar_traffic_volume(3, 6) == doctest::Approx(8.0));
    CHECK(rar_traffic_volume(1, 123.0) == doctest::Approx(0.0));
    CHECK(rar_traffic_volume(4, 4) == doctest::Approx(6.0));
    for (int w = 1; w <= 16; ++w) {
        const double d = 16.0 * w;  // divisible by w
        CHECK(rar_traffic_volume(w, d) ==
              doctest::Approx(testing::ring_allreduce_received_per_worker(w, d)));
    }
}

TEST_CASE("validate: clean schedule, capacity overflow, mid-run move") {
    ClusterSpec c = two_servers(2);
    std::vector<JobSpec> jobs(2);
    jobs[0].id = 1;
    jobs[0].gpus_requested = 2;
    jobs[1].id = 2;
    jobs[1].gpus_requested = 2;
    for (JobSpec& j : jobs) {
        j.gradient_size = 1;
        j.iterations = 10;
    }

    Schedule ok;
    ok.entries[1] = {{PlacementSpan{1, 5, on_one_server(1, 0, 2)}}};
    CHECK(validate_schedule(ok, jobs, c).empty());

    ClusterSpec tight = two_servers(1);
    Schedule overlap;
    overlap.entries[1] = {{PlacementSpan{1, 5, Placement{1, {{0, 0}}}}}};
    overlap.entries[2] = {{PlacementSpan{3, 8, Placement{2, {{0, 0}}}}}};
    std::vector<JobSpec> singles = jobs;
    singles[0].gpus_requested = singles[1].gpus_requested = 1;
    auto violations = validate_schedule(overlap, singles, tight);
    REQUIRE_FALSE(violations.empty());
    bool capacity = false;
    for (const Violation& v : violations) capacity |= (v.constraint == 2);
    CHECK(capacity);

    Schedule moved;
    moved.entries[1] = {{PlacementSpan{1, 3, Placement{1, {{0, 0}, {0, 1}}}},
                         PlacementSpan{4, 6, Placement{1, {{1, 0}, {1, 1}}}}}};
    auto move_violations = validate_schedule(moved, jobs, c);
    bool preemption = false;
    for (const Violation& v : move_violations) preemption |= (v.constraint == 3);
    CHECK(preemption);
}

TEST_CASE("validate: demand mismatch and duplicate GPUs are reported") {
    ClusterSpec c = two_servers(4);
    std::vector<JobSpec> jobs(1);
    jobs[0].id = 1;
    jobs[0].gpus_requested = 3;
    jobs[0].gradient_size = 1;

    Schedule short_alloc;
    short_alloc.entries[1] = {{PlacementSpan{1, 4, Placement{1, {{0, 0}, {0, 1}}}}}};
    bool demand = false;
    for (const Violation& v : validate_schedule(short_alloc, jobs, c))
        demand |= (v.constraint == 1);
    CHECK(demand);

    Schedule dup;
    dup.entries[1] = {{PlacementSpan{1, 4, Placement{1, {{0, 0}, {0, 0}, {0, 1}}}}}};
    bool duplicate = false;
    for (const Violation& v : validate_schedule(dup, jobs, c)) duplicate |= (v.constraint == 1);
    CHECK(duplicate);
}

}  // TEST_SUITE

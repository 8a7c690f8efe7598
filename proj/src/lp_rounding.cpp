#include "rarsched/lp_rounding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rarsched/util.hpp"

namespace rarsched {

namespace {
constexpr double kTol = 1e-9;
constexpr double kMergeTol = 1e-6;
}  // namespace

void DdljsInstance::check() const {
    if (jobs.empty()) throw std::invalid_argument("ddljs: no jobs");
    if (server_capacities.empty()) throw std::invalid_argument("ddljs: no servers");
    for (int c : server_capacities)
        if (c < 1) throw std::invalid_argument("ddljs: server capacity < 1");
    for (const DdljsJob& j : jobs) {
        if (j.gpus < 1) throw std::invalid_argument("ddljs: job demands no GPUs");
        if (j.iterations < 1) throw std::invalid_argument("ddljs: job iterations < 1");
        if (j.base_time <= 0) throw std::invalid_argument("ddljs: base time must be positive");
        if (j.contention_slope < 0) throw std::invalid_argument("ddljs: negative contention slope");
    }
    if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("ddljs: alpha outside (0,1)");
    if (execution_weight < 0 || fragmentation_weight < 0)
        throw std::invalid_argument("ddljs: negative objective weight");
}

int RelaxationLp::z(int j, int g, int s) const { return z0_ + job_z_offset_[j] + g * num_servers + s; }
int RelaxationLp::gamma(int j, int s) const { return gamma0_ + j * num_servers + s; }
int RelaxationLp::chi(int s) const { return chi0_ + s; }
int RelaxationLp::x(int j, int s) const { return x0_ + j * num_servers + s; }
int RelaxationLp::xprime(int j, int s) const { return xprime0_ + j * num_servers + s; }
int RelaxationLp::zprime(int j, int s) const { return zprime0_ + j * num_servers + s; }
int RelaxationLp::k(int j) const { return k0_ + j; }

RelaxationLp build_relaxation(const DdljsInstance& instance, bool strengthened) {
    instance.check();
    RelaxationLp r;
    r.num_jobs = static_cast<int>(instance.jobs.size());
    r.num_servers = instance.server_count();
    r.strengthened = strengthened;
    for (const DdljsJob& j : instance.jobs) r.gpus_per_job.push_back(j.gpus);

    const int J = r.num_jobs, S = r.num_servers;
    LinearProgram& lp = r.lp;

    r.z0_ = 0;
    int offset = 0;
    for (int j = 0; j < J; ++j) {
        r.job_z_offset_.push_back(offset);
        offset += instance.jobs[j].gpus * S;
    }
    for (int i = 0; i < offset; ++i) lp.add_variable(1.0);
    r.gamma0_ = lp.num_variables();
    for (int i = 0; i < J * S; ++i) lp.add_variable(1.0);
    r.chi0_ = lp.num_variables();
    for (int s = 0; s < S; ++s)
        lp.add_variable(1.0, instance.fragmentation_weight * instance.server_capacities[s]);
    r.x0_ = lp.num_variables();
    for (int i = 0; i < J * S; ++i) lp.add_variable(1.0);
    if (strengthened) {
        r.xprime0_ = lp.num_variables();
        for (int i = 0; i < J * S; ++i) lp.add_variable(1.0);
        r.zprime0_ = lp.num_variables();
        for (int i = 0; i < J * S; ++i) lp.add_variable(1.0);
    }
    r.k0_ = lp.num_variables();
    for (int j = 0; j < J; ++j)
        lp.add_variable(LinearProgram::kUnbounded,
                        instance.execution_weight * static_cast<double>(instance.jobs[j].iterations) *
                            instance.jobs[j].contention_slope);

    // Placement: each worker lands on exactly one server.
    for (int j = 0; j < J; ++j)
        for (int g = 0; g < instance.jobs[j].gpus; ++g) {
            std::vector<std::pair<int, double>> terms;
            for (int s = 0; s < S; ++s) terms.push_back({r.z(j, g, s), 1.0});
            lp.add_constraint(std::move(terms), 'E', 1.0);
        }

    // Capacity per server.
    for (int s = 0; s < S; ++s) {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < J; ++j)
            for (int g = 0; g < instance.jobs[j].gpus; ++g) terms.push_back({r.z(j, g, s), 1.0});
        lp.add_constraint(std::move(terms), 'L', instance.server_capacities[s]);
    }

    for (int j = 0; j < J; ++j)
        for (int s = 0; s < S; ++s) {
            for (int g = 0; g < instance.jobs[j].gpus; ++g) {
                // gamma >= z: touching any worker marks the server.
                lp.add_constraint({{r.gamma(j, s), 1.0}, {r.z(j, g, s), -1.0}}, 'G', 0.0);
                // x >= gamma - z: touching a server without this worker means a split.
                lp.add_constraint({{r.x(j, s), 1.0}, {r.gamma(j, s), -1.0}, {r.z(j, g, s), 1.0}},
                                  'G', 0.0);
            }
            // chi >= gamma: a touched server is open.
            lp.add_constraint({{r.chi(s), 1.0}, {r.gamma(j, s), -1.0}}, 'G', 0.0);
        }

    // Contention level: every job is charged the busiest server's split count.
    for (int j = 0; j < J; ++j)
        for (int s = 0; s < S; ++s) {
            std::vector<std::pair<int, double>> terms{{r.k(j), 1.0}};
            for (int jp = 0; jp < J; ++jp) terms.push_back({r.x(jp, s), -instance.alpha});
            lp.add_constraint(std::move(terms), 'G', 0.0);
        }

    if (strengthened) {
        for (int j = 0; j < J; ++j) {
            const int G = instance.jobs[j].gpus;
            for (int s = 0; s < S; ++s) {
                // Whole-job mass on a server forces xprime down; partial or no
                // mass forces it up.
                std::vector<std::pair<int, double>> terms{{r.xprime(j, s), static_cast<double>(G)}};
                for (int g = 0; g < G; ++g) terms.push_back({r.z(j, g, s), 1.0});
                lp.add_constraint(std::move(terms), 'G', static_cast<double>(G));

                // A worker absent from every other server pins this one open.
                for (int g = 0; g < G; ++g) {
                    std::vector<std::pair<int, double>> open{{r.chi(s), 1.0}};
                    for (int sp = 0; sp < S; ++sp)
                        if (sp != s) open.push_back({r.z(j, g, sp), 1.0});
                    lp.add_constraint(std::move(open), 'G', 1.0);
                }

                // Linear envelope of x >= chi * xprime.
                lp.add_constraint({{r.x(j, s), 1.0}, {r.zprime(j, s), -1.0}}, 'G', 0.0);
                lp.add_constraint({{r.zprime(j, s), 1.0}, {r.chi(s), -1.0}, {r.xprime(j, s), -1.0}},
                                  'G', -1.0);
                lp.add_constraint({{r.zprime(j, s), 1.0}, {r.chi(s), -1.0}}, 'L', 0.0);
                lp.add_constraint({{r.zprime(j, s), 1.0}, {r.xprime(j, s), -1.0}}, 'L', 0.0);
            }
        }
    }

    return r;
}

FractionalSolution solve_relaxation(const RelaxationLp& relaxation, const DdljsInstance& instance) {
    LpSolution sol = solve_lp(relaxation.lp);
    if (sol.status != LpSolution::Status::optimal)
        throw std::runtime_error("relaxation infeasible: demand exceeds total capacity");

    const int J = relaxation.num_jobs, S = relaxation.num_servers;
    FractionalSolution out;
    out.objective = sol.objective;
    out.z.resize(J);
    out.gamma.assign(J, std::vector<double>(S, 0));
    out.x.assign(J, std::vector<double>(S, 0));
    out.xprime.assign(J, std::vector<double>(S, 0));
    out.zprime.assign(J, std::vector<double>(S, 0));
    out.chi.assign(S, 0);
    out.k.assign(J, 0);
    for (int j = 0; j < J; ++j) {
        out.z[j].assign(instance.jobs[j].gpus, std::vector<double>(S, 0));
        for (int g = 0; g < instance.jobs[j].gpus; ++g)
            for (int s = 0; s < S; ++s) out.z[j][g][s] = sol.x[relaxation.z(j, g, s)];
        for (int s = 0; s < S; ++s) {
            out.gamma[j][s] = sol.x[relaxation.gamma(j, s)];
            out.x[j][s] = sol.x[relaxation.x(j, s)];
            if (relaxation.strengthened) {
                out.xprime[j][s] = sol.x[relaxation.xprime(j, s)];
                out.zprime[j][s] = sol.x[relaxation.zprime(j, s)];
            }
        }
        out.k[j] = sol.x[relaxation.k(j)];
    }
    for (int s = 0; s < S; ++s) out.chi[s] = sol.x[relaxation.chi(s)];
    return out;
}

MergedSolution merge_fractions(const FractionalSolution& solution, const DdljsInstance& instance) {
    const int J = static_cast<int>(instance.jobs.size()), S = instance.server_count();
    MergedSolution merged;
    merged.y_floor.assign(J, std::vector<int>(S, 0));
    merged.z_frac.assign(J, std::vector<double>(S, 0));
    merged.tasks_per_job.assign(J, 0);

    for (int j = 0; j < J; ++j) {
        double mass_total = 0;
        double frac_total = 0;
        for (int s = 0; s < S; ++s) {
            double mass = 0;
            for (int g = 0; g < instance.jobs[j].gpus; ++g) mass += solution.z[j][g][s];
            mass_total += mass;
            // Snap near-integral mass before splitting off the floor.
            const double snapped = std::abs(mass - std::round(mass)) <= kMergeTol
                                       ? std::round(mass)
                                       : mass;
            merged.y_floor[j][s] = static_cast<int>(std::floor(snapped + kTol));
            merged.z_frac[j][s] = std::max(0.0, snapped - merged.y_floor[j][s]);
            frac_total += merged.z_frac[j][s];
        }
        if (std::abs(mass_total - instance.jobs[j].gpus) > kMergeTol)
            throw std::runtime_error("merge_fractions: job mass does not add up to its demand");
        const double rounded = std::round(frac_total);
        if (std::abs(frac_total - rounded) > kMergeTol)
            throw std::runtime_error("merge_fractions: residual mass is not integral");
        merged.tasks_per_job[j] = static_cast<int>(rounded);
    }

    for (int s = 0; s < S; ++s) {
        int floored = 0;
        for (int j = 0; j < J; ++j) floored += merged.y_floor[j][s];
        merged.residual_capacity.push_back(std::max(1, instance.server_capacities[s] - floored));
    }
    return merged;
}

GapInstance build_gap(const MergedSolution& merged, const DdljsInstance& instance) {
    const int J = static_cast<int>(instance.jobs.size()), S = instance.server_count();
    GapInstance gap;
    gap.residual_capacity = merged.residual_capacity;

    for (int j = 0; j < J; ++j)
        for (int t = 0; t < merged.tasks_per_job[j]; ++t)
            gap.tasks.push_back({j, t});

    for (const GapInstance::Task& task : gap.tasks) {
        std::vector<double> row(S);
        for (int s = 0; s < S; ++s)
            row[s] = instance.jobs[task.job].gpus - merged.y_floor[task.job][s];
        gap.cost.push_back(std::move(row));
    }

    const int L = static_cast<int>(gap.tasks.size());
    gap.zeta.assign(L, std::vector<double>(S, 0));
    if (L == 0) return gap;

    // Optimal fractional assignment of the residual units.
    LinearProgram lp;
    for (int l = 0; l < L; ++l)
        for (int s = 0; s < S; ++s) lp.add_variable(1.0, gap.cost[l][s]);
    for (int l = 0; l < L; ++l) {
        std::vector<std::pair<int, double>> terms;
        for (int s = 0; s < S; ++s) terms.push_back({l * S + s, 1.0});
        lp.add_constraint(std::move(terms), 'E', 1.0);
    }
    for (int s = 0; s < S; ++s) {
        std::vector<std::pair<int, double>> terms;
        for (int l = 0; l < L; ++l) terms.push_back({l * S + s, 1.0});
        lp.add_constraint(std::move(terms), 'L', gap.residual_capacity[s]);
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::optimal)
        throw std::runtime_error("residual assignment is infeasible");
    gap.beta = sol.objective;
    for (int l = 0; l < L; ++l)
        for (int s = 0; s < S; ++s) gap.zeta[l][s] = sol.x[l * S + s];
    return gap;
}

namespace {

// Minimum-cost bipartite matching that saturates every task, by successive
// shortest augmenting paths over the residual graph. Sizes here are tiny, so
// Bellman-Ford distances are fine. Fixed scan order keeps ties deterministic.
struct BinMatcher {
    int tasks, bins;
    std::vector<std::vector<std::pair<int, double>>> edges;  // per task: (bin, cost)
    std::vector<int> task_to_bin, bin_to_task;

    bool augment(int source_task) {
        const int nodes = tasks + bins;
        std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
        std::vector<int> prev_task_of_bin(bins, -1);
        std::vector<int> prev_bin_of_task(tasks, -1);
        dist[source_task] = 0;

        for (int round = 0; round < nodes; ++round) {
            bool changed = false;
            for (int t = 0; t < tasks; ++t) {
                if (!std::isfinite(dist[t])) continue;
                for (const auto& [b, c] : edges[t]) {
                    if (task_to_bin[t] == b) continue;  // forward arcs only
                    if (dist[t] + c < dist[tasks + b] - kTol) {
                        dist[tasks + b] = dist[t] + c;
                        prev_task_of_bin[b] = t;
                        changed = true;
                    }
                }
            }
            for (int b = 0; b < bins; ++b) {
                if (!std::isfinite(dist[tasks + b]) || bin_to_task[b] < 0) continue;
                const int t = bin_to_task[b];
                // backward arc releases the bin's current task at negative cost
                double back = 0;
                for (const auto& [bb, c] : edges[t])
                    if (bb == b) back = -c;
                if (dist[tasks + b] + back < dist[t] - kTol) {
                    dist[t] = dist[tasks + b] + back;
                    prev_bin_of_task[t] = b;
                    changed = true;
                }
            }
            if (!changed) break;
        }

        // Cheapest reachable free bin; scan order breaks ties low.
        int target = -1;
        for (int b = 0; b < bins; ++b) {
            if (bin_to_task[b] >= 0 || !std::isfinite(dist[tasks + b])) continue;
            if (target < 0 || dist[tasks + b] < dist[tasks + target] - kTol) target = b;
        }
        if (target < 0) return false;

        int b = target;
        while (b >= 0) {
            const int t = prev_task_of_bin[b];
            const int prev_b = prev_bin_of_task[t];
            task_to_bin[t] = b;
            bin_to_task[b] = t;
            b = prev_b;
            if (b >= 0) bin_to_task[b] = -1;  // released along the path
        }
        return true;
    }
};

}  // namespace

RoundedAssignment st_round(const GapInstance& gap) {
    const int L = static_cast<int>(gap.tasks.size());
    const int S = static_cast<int>(gap.residual_capacity.size());
    RoundedAssignment out;
    out.task_server.assign(L, -1);
    if (L == 0) return out;

    // Unit bins per server, filled with the fractional masses in task order;
    // a task gets an edge to every bin holding a piece of it.
    struct Bin {
        int server;
    };
    std::vector<Bin> bins;
    std::vector<std::vector<std::pair<int, double>>> edges(L);  // (bin, cost)
    for (int s = 0; s < S; ++s) {
        double total = 0;
        for (int l = 0; l < L; ++l) total += gap.zeta[l][s];
        const int bin_count = static_cast<int>(std::ceil(total - kTol));
        if (bin_count == 0) continue;
        const int first = static_cast<int>(bins.size());
        for (int b = 0; b < bin_count; ++b) bins.push_back({s});

        double level = 0;  // filled amount of the current bin
        int current = first;
        const int last = first + bin_count - 1;
        for (int l = 0; l < L; ++l) {
            double piece = gap.zeta[l][s];
            if (piece <= kTol) continue;
            while (piece > kTol) {
                if (current > last) current = last;  // absorb solver drift
                edges[l].push_back({current, gap.cost[l][s]});
                const double room = current == last ? piece + 1.0 : 1.0 - level;
                if (piece < room - kTol) {
                    level += piece;
                    piece = 0;
                } else {
                    piece -= room;
                    level = 0;
                    current++;
                }
            }
        }
    }

    BinMatcher matcher{L, static_cast<int>(bins.size()), std::move(edges), {}, {}};
    matcher.task_to_bin.assign(L, -1);
    matcher.bin_to_task.assign(bins.size(), -1);
    for (int l = 0; l < L; ++l)
        if (!matcher.augment(l))
            throw std::runtime_error("st_round: no saturating matching, rounding graph is broken");

    for (int l = 0; l < L; ++l) {
        const int s = bins[matcher.task_to_bin[l]].server;
        out.task_server[l] = s;
        out.cost += gap.cost[l][s];
    }
    return out;
}

IntegralSolution assemble_integral(const MergedSolution& merged, const RoundedAssignment& rounded,
                                   const GapInstance& gap, const DdljsInstance& instance,
                                   const FractionalSolution& fractional) {
    const int J = static_cast<int>(instance.jobs.size()), S = instance.server_count();
    IntegralSolution out;
    out.y = merged.y_floor;
    for (std::size_t l = 0; l < gap.tasks.size(); ++l)
        out.y[gap.tasks[l].job][rounded.task_server[l]]++;

    for (int j = 0; j < J; ++j) {
        int total = std::accumulate(out.y[j].begin(), out.y[j].end(), 0);
        if (total != instance.jobs[j].gpus)
            throw std::runtime_error("assemble_integral: job lost or gained workers in rounding");
    }

    out.chi.assign(S, 0);
    for (int s = 0; s < S; ++s)
        for (int j = 0; j < J; ++j)
            if (out.y[j][s] > 0) out.chi[s] = 1;

    // Spanning indicators per the split-aware case analysis: a job fully
    // housed on some server contends nowhere.
    std::vector<std::vector<int>> x(J, std::vector<int>(S, 0));
    std::vector<bool> split(J, false);
    for (int j = 0; j < J; ++j) {
        bool housed = false;
        for (int s = 0; s < S; ++s)
            if (out.y[j][s] == instance.jobs[j].gpus) housed = true;
        split[j] = !housed;
        if (split[j])
            for (int s = 0; s < S; ++s)
                if (out.y[j][s] > 0 && out.y[j][s] < instance.jobs[j].gpus) x[j][s] = 1;
    }
    int busiest = 0;
    for (int s = 0; s < S; ++s) {
        int count = 0;
        for (int j = 0; j < J; ++j) count += x[j][s];
        busiest = std::max(busiest, count);
    }
    out.k.assign(J, 0);
    for (int j = 0; j < J; ++j)
        if (split[j]) out.k[j] = instance.alpha * busiest;

    out.objective = 0;
    for (int j = 0; j < J; ++j)
        out.objective += instance.execution_weight * static_cast<double>(instance.jobs[j].iterations) *
                         instance.jobs[j].contention_slope * out.k[j];
    for (int s = 0; s < S; ++s)
        out.objective += instance.fragmentation_weight * instance.server_capacities[s] * out.chi[s];

    // Diagnostic ratio bound. The spread term comes from the fractional
    // solution; when every fractional job is effectively housed the bound
    // degenerates and is reported as infinite.
    int cap_max = 0;
    for (int s = 0; s < S; ++s) cap_max = std::max(cap_max, instance.server_capacities[s]);
    for (int j = 0; j < J; ++j) cap_max = std::max(cap_max, instance.jobs[j].gpus);
    double spread_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
        if (fractional.k[j] <= kTol) continue;
        for (int s = 0; s < S; ++s) {
            double mass = 0;
            for (int g = 0; g < instance.jobs[j].gpus; ++g) mass += fractional.z[j][g][s];
            if (mass <= kTol) continue;
            spread_min = std::min(spread_min, 1.0 - mass / instance.jobs[j].gpus);
        }
    }
    out.ratio_bound = (std::isfinite(spread_min) && spread_min > kTol)
                          ? cap_max / spread_min + 2.0
                          : std::numeric_limits<double>::infinity();
    return out;
}

double strengthened_integral_objective(const std::vector<std::vector<int>>& y,
                                       const DdljsInstance& instance) {
    const int J = static_cast<int>(instance.jobs.size()), S = instance.server_count();
    std::vector<int> chi(S, 0);
    for (int s = 0; s < S; ++s)
        for (int j = 0; j < J; ++j)
            if (y[j][s] > 0) chi[s] = 1;

    // Under the strengthening rows, any open server charges every job that is
    // not entirely on it, whether the job touches the server or not.
    int busiest = 0;
    for (int s = 0; s < S; ++s) {
        if (chi[s] == 0) continue;
        int count = 0;
        for (int j = 0; j < J; ++j)
            if (y[j][s] < instance.jobs[j].gpus) count++;
        busiest = std::max(busiest, count);
    }
    const double k = instance.alpha * busiest;

    double objective = 0;
    for (int j = 0; j < J; ++j)
        objective += instance.execution_weight * static_cast<double>(instance.jobs[j].iterations) *
                     instance.jobs[j].contention_slope * k;
    for (int s = 0; s < S; ++s)
        objective += instance.fragmentation_weight * instance.server_capacities[s] * chi[s];
    return objective;
}

namespace {

void enumerate_rec(const DdljsInstance& instance, int j, std::vector<std::vector<int>>& y,
                   std::vector<int>& used, EnumeratedOptimum& best) {
    const int J = static_cast<int>(instance.jobs.size()), S = instance.server_count();
    if (j == J) {
        const double obj = strengthened_integral_objective(y, instance);
        if (obj < best.objective - kTol) {
            best.objective = obj;
            best.y = y;
        }
        return;
    }
    // All splits of job j's demand over the servers, respecting capacity.
    std::vector<int> split(S, 0);
    std::function<void(int, int)> place = [&](int s, int remaining) {
        if (s == S) {
            if (remaining != 0) return;
            y[j] = split;
            enumerate_rec(instance, j + 1, y, used, best);
            return;
        }
        const int room = instance.server_capacities[s] - used[s];
        const int cap = std::min(remaining, room);
        for (int take = 0; take <= cap; ++take) {
            split[s] = take;
            used[s] += take;
            place(s + 1, remaining - take);
            used[s] -= take;
            split[s] = 0;
        }
    };
    place(0, instance.jobs[j].gpus);
}

}  // namespace

EnumeratedOptimum enumerate_integral_optimum(const DdljsInstance& instance) {
    instance.check();
    const int J = static_cast<int>(instance.jobs.size());
    EnumeratedOptimum best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> y(J, std::vector<int>(instance.server_count(), 0));
    std::vector<int> used(instance.server_count(), 0);
    enumerate_rec(instance, 0, y, used, best);
    if (!std::isfinite(best.objective))
        throw std::runtime_error("enumerate_integral_optimum: no feasible integral placement");
    return best;
}

RoundingReport run_rounding_pipeline(const DdljsInstance& instance) {
    RoundingReport report;
    RelaxationLp strengthened = build_relaxation(instance, true);
    RelaxationLp plain = build_relaxation(instance, false);
    FractionalSolution frac = solve_relaxation(strengthened, instance);
    report.lp_objective = frac.objective;
    report.plain_lp_objective = solve_relaxation(plain, instance).objective;

    MergedSolution merged = merge_fractions(frac, instance);
    GapInstance gap = build_gap(merged, instance);
    RoundedAssignment rounded = st_round(gap);
    IntegralSolution integral = assemble_integral(merged, rounded, gap, instance, frac);

    report.integral_objective = integral.objective;
    report.rounded_cost = rounded.cost;
    report.beta = gap.beta;
    report.ratio_bound = integral.ratio_bound;
    report.residual_capacity = merged.residual_capacity;

    const int S = instance.server_count();
    report.server_usage.assign(S, 0);
    report.capacity_within_double = true;
    std::vector<int> rounded_per_server(S, 0);
    for (std::size_t l = 0; l < gap.tasks.size(); ++l) rounded_per_server[rounded.task_server[l]]++;
    for (int s = 0; s < S; ++s) {
        int usage = 0;
        for (std::size_t j = 0; j < integral.y.size(); ++j) usage += integral.y[j][s];
        report.server_usage[s] = usage;
        if (rounded_per_server[s] > 2 * merged.residual_capacity[s])
            report.capacity_within_double = false;
    }
    return report;
}

DdljsInstance read_ddljs_instance(Config& config) {
    DdljsInstance instance;
    std::vector<long long> caps = config.get_int_list("ddljs.capacities", {});
    if (caps.empty()) throw ConfigError("ddljs.capacities missing");
    instance.server_capacities.assign(caps.begin(), caps.end());
    instance.alpha = config.get_real("ddljs.alpha", instance.alpha);
    instance.execution_weight = config.get_real("ddljs.execution_weight", instance.execution_weight);
    instance.fragmentation_weight =
        config.get_real("ddljs.fragmentation_weight", instance.fragmentation_weight);
    for (const std::string& line : config.take_repeated("ddljs_job")) {
        std::istringstream ss(line);
        DdljsJob job;
        char comma;
        if (!(ss >> job.id >> comma >> job.gpus >> comma >> job.iterations >> comma >>
              job.base_time >> comma >> job.contention_slope))
            throw ConfigError("bad ddljs_job line: " + line);
        instance.jobs.push_back(job);
    }
    instance.check();
    return instance;
}

void write_rounding_report_csv(const RoundingReport& report, std::ostream& out) {
    out << "metric,value\n";
    out << "plain_lp_objective," << fmt_double(report.plain_lp_objective) << '\n';
    out << "lp_objective," << fmt_double(report.lp_objective) << '\n';
    out << "integral_objective," << fmt_double(report.integral_objective) << '\n';
    out << "fractional_assignment_cost," << fmt_double(report.beta) << '\n';
    out << "rounded_assignment_cost," << fmt_double(report.rounded_cost) << '\n';
    out << "ratio_bound," << fmt_double(report.ratio_bound) << '\n';
    out << "capacity_within_double," << (report.capacity_within_double ? 1 : 0) << '\n';
    for (std::size_t s = 0; s < report.server_usage.size(); ++s)
        out << "server_" << s << "_usage," << report.server_usage[s] << '\n';
    for (std::size_t s = 0; s < report.residual_capacity.size(); ++s)
        out << "server_" << s << "_residual_capacity," << report.residual_capacity[s] << '\n';
}

}  // namespace rarsched

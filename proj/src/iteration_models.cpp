#include "rarsched/iteration_models.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rarsched/cluster_model.hpp"

namespace rarsched {

void LayerProfile::check() const {
    if (fp_times.empty()) throw std::invalid_argument("layer profile: no layers");
    if (bp_times.size() != fp_times.size() || comm_times.size() != fp_times.size())
        throw std::invalid_argument("layer profile: mismatched phase lengths");
    for (const auto* v : {&fp_times, &bp_times, &comm_times})
        for (double x : *v)
            if (x < 0) throw std::invalid_argument("layer profile: negative time");
}

IterationModel iteration_model_from_name(const std::string& name) {
    if (name == "sequential") return IterationModel::sequential;
    if (name == "wait_free" || name == "wait-free") return IterationModel::wait_free;
    if (name == "priority") return IterationModel::priority;
    throw std::invalid_argument("unknown iteration model: " + name);
}

double sequential_iteration_time(const LayerProfile& p) {
    p.check();
    double t = 0;
    for (int l = 0; l < p.layers(); ++l) t += p.bp_times[l] + p.comm_times[l] + p.fp_times[l];
    return t;
}

namespace {

// Time plus how much of it is backward computation vs. ring exchange. Forward
// time is accounted separately since every model runs the forward pass last.
struct PathSplit {
    double total = 0;
    double bp = 0;
    double comm = 0;
};

// Start of layer l's exchange in the wait-free model, tracking which branch of
// the recursion the critical path takes. Ties go to the backward branch.
PathSplit wait_free_comm_start(const LayerProfile& p, int l /*0-based*/) {
    const int last = p.layers() - 1;
    PathSplit split{p.bp_times[last], p.bp_times[last], 0};
    double bp_suffix = p.bp_times[last];
    for (int i = last - 1; i >= l; --i) {
        bp_suffix += p.bp_times[i];
        const double via_comm = split.total + p.comm_times[i + 1];
        if (bp_suffix >= via_comm) {
            split = {bp_suffix, bp_suffix, 0};
        } else {
            split.comm += p.comm_times[i + 1];
            split.total = via_comm;
        }
    }
    return split;
}

}  // namespace

double wait_free_iteration_time(const LayerProfile& p) {
    p.check();
    PathSplit start = wait_free_comm_start(p, 0);
    double t = start.total + p.comm_times[0];
    for (int l = 0; l < p.layers(); ++l) t += p.fp_times[l];
    return t;
}

double priority_iteration_time(const LayerProfile& p) {
    p.check();
    const int L = p.layers();
    double bp_total = std::accumulate(p.bp_times.begin(), p.bp_times.end(), 0.0);

    // phi = earliest forward-pass start per layer.
    double phi = p.comm_times[0] + bp_total;
    double bp_suffix = bp_total;
    double comm_prefix = p.comm_times[0];
    for (int l = 1; l < L; ++l) {
        bp_suffix -= p.bp_times[l - 1];
        comm_prefix += p.comm_times[l];
        phi = std::max(phi + p.fp_times[l - 1], bp_suffix + comm_prefix);
    }
    return phi + p.fp_times[L - 1];
}

OverlapCoefficients unified_coefficients(const LayerProfile& p, IterationModel model) {
    p.check();
    if (model == IterationModel::sequential) return {1.0, 1.0, 1.0};

    const double fp_total = std::accumulate(p.fp_times.begin(), p.fp_times.end(), 0.0);
    const double bp_total = std::accumulate(p.bp_times.begin(), p.bp_times.end(), 0.0);
    const double comm_total = std::accumulate(p.comm_times.begin(), p.comm_times.end(), 0.0);
    if (fp_total <= 0 || bp_total <= 0 || comm_total <= 0)
        throw std::invalid_argument("unified_coefficients: degenerate profile, a phase total is zero");

    double bp_path = 0, comm_path = 0;
    if (model == IterationModel::wait_free) {
        // Critical path is the exchange start chain, layer 1's exchange, then
        // every forward pass.
        PathSplit start = wait_free_comm_start(p, 0);
        bp_path = start.bp;
        comm_path = start.comm + p.comm_times[0];
    } else {
        // Replay the recursion remembering which branch was binding. The
        // backward-plus-exchange branch resets the path to pure computation
        // and exchange; the forward branch extends whatever path stands.
        const int L = p.layers();
        double bp_suffix = std::accumulate(p.bp_times.begin(), p.bp_times.end(), 0.0);
        double comm_prefix = p.comm_times[0];
        double phi = comm_prefix + bp_suffix;
        bp_path = bp_suffix;
        comm_path = comm_prefix;
        for (int l = 1; l < L; ++l) {
            bp_suffix -= p.bp_times[l - 1];
            comm_prefix += p.comm_times[l];
            const double via_fp = phi + p.fp_times[l - 1];
            const double via_comm = bp_suffix + comm_prefix;
            if (via_fp >= via_comm) {
                phi = via_fp;
            } else {
                phi = via_comm;
                bp_path = bp_suffix;
                comm_path = comm_prefix;
            }
        }
    }

    const double total = model == IterationModel::wait_free ? wait_free_iteration_time(p)
                                                            : priority_iteration_time(p);
    const double fp_path = total - bp_path - comm_path;
    return {fp_path / fp_total, bp_path / bp_total, comm_path / comm_total};
}

double generalized_tau(const JobSpec& job, const Placement& placement, double k,
                       const ClusterSpec& cluster, const OverlapCoefficients& c) {
    const int w = job.gpus_requested;
    if (w < 1) throw std::invalid_argument("generalized_tau: zero workers");
    if (c.eta_fp < 0 || c.eta_bp < 0 || c.eta_comm < 0 || c.eta_fp > 1 || c.eta_bp > 1 ||
        c.eta_comm > 1)
        throw std::invalid_argument("generalized_tau: coefficients outside [0, 1]");

    double tau = cluster.overhead_per_server * placement.server_count() +
                 c.eta_fp * (job.fp_per_sample * job.minibatch) + c.eta_bp * job.bp_time;
    if (w > 1) {
        const double chunk = job.gradient_size * (w - 1) / w;
        const double bw = bottleneck_bandwidth(placement, k, cluster);
        tau += c.eta_comm * (2.0 * chunk / bw + chunk / cluster.gpu_speed);
    }
    return tau;
}

LayerProfile load_layer_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layer profile: " + path);
    std::map<int, std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        int layer;
        double fp, bp, comm;
        if (!(ss >> layer >> fp >> bp >> comm))
            throw std::runtime_error("bad layer profile row: " + line);
        if (!rows.emplace(layer, std::array<double, 3>{fp, bp, comm}).second)
            throw std::runtime_error("duplicate layer in profile: " + std::to_string(layer));
    }
    if (rows.empty()) throw std::runtime_error("layer profile is empty: " + path);
    int expect = 1;
    LayerProfile p;
    for (const auto& [layer, v] : rows) {
        if (layer != expect++) throw std::runtime_error("layer profile must cover 1..L");
        p.fp_times.push_back(v[0]);
        p.bp_times.push_back(v[1]);
        p.comm_times.push_back(v[2]);
    }
    p.check();
    return p;
}

}  // namespace rarsched

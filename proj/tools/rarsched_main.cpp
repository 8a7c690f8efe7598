#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "rarsched/baselines.hpp"
#include "rarsched/cluster_model.hpp"
#include "rarsched/experiments.hpp"
#include "rarsched/lp_rounding.hpp"
#include "rarsched/schedule_io.hpp"
#include "rarsched/sim_engine.hpp"
#include "rarsched/util.hpp"
#include "rarsched/workload.hpp"

namespace {

using namespace rarsched;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitInfeasible = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
};

std::unique_ptr<std::ostream> open_out(const std::string& path, std::ostream*& stream) {
    if (path.empty() || path == "-") {
        stream = &std::cout;
        return nullptr;
    }
    auto file = std::make_unique<std::ofstream>(path);
    if (!*file) throw ConfigError("cannot open output file: " + path);
    stream = file.get();
    return file;
}

WorkloadConfig load_workload_config(const CommonArgs& args) {
    Config config = args.config_path.empty() ? Config::parse_text("")
                                             : Config::parse_file(args.config_path);
    WorkloadConfig w = workload_config_from(config);
    config.finish();
    if (args.seed) {
        w.base_seed = *args.seed;
        w.seed_count = 1;
    }
    return w;
}

int emit_report(const std::vector<ReportRow>& rows, const CommonArgs& args) {
    std::ostream* out = nullptr;
    auto holder = open_out(args.out_path, out);
    if (args.format == "summary") write_report_summary(rows, *out);
    else write_report_csv(rows, *out);
    for (const ReportRow& row : rows)
        if (row.infeasible) return kExitInfeasible;
    return kExitOk;
}

int run_gen_workload(const CommonArgs& args) {
    WorkloadConfig config = load_workload_config(args);
    Instance instance = generate_instance(config, config.base_seed);
    std::ostream* out = nullptr;
    auto holder = open_out(args.out_path, out);
    write_instance(instance, *out);
    return kExitOk;
}

Instance instance_from_args(const CommonArgs& args, const std::string& instance_path,
                            WorkloadConfig* config_out = nullptr) {
    if (!instance_path.empty()) {
        Config config = Config::parse_file(instance_path);
        Instance instance = read_instance(config);
        config.finish();
        return instance;
    }
    WorkloadConfig config = load_workload_config(args);
    if (config_out) *config_out = config;
    return generate_instance(config, config.base_seed);
}

int run_schedule(const CommonArgs& args, const std::string& instance_path,
                 const std::string& policy) {
    WorkloadConfig config;
    Instance instance = instance_from_args(args, instance_path, &config);
    EstimateOptions est_options;
    est_options.mode = config.estimate_mode;
    est_options.range_lo = config.rho_range_lo;
    est_options.range_hi = config.rho_range_hi;
    est_options.seed = args.seed.value_or(config.base_seed);
    ExecutionEstimates estimates =
        build_estimates(instance.jobs, instance.cluster, est_options);

    SchedulerResult result = run_policy(policy, instance.jobs, instance.cluster,
                                        instance.cluster.slot_count, estimates,
                                        args.seed.value_or(config.base_seed), {});
    std::ostream* out = nullptr;
    auto holder = open_out(args.out_path, out);
    write_schedule_csv(result.schedule, *out);
    std::cerr << "policy=" << policy << " makespan=" << result.makespan
              << " theta_u=" << result.theta_u << " kappa=" << result.kappa
              << " infeasible=" << (result.infeasible ? 1 : 0) << '\n';
    return result.infeasible ? kExitInfeasible : kExitOk;
}

int run_simulate(const CommonArgs& args, const std::string& instance_path,
                 const std::string& schedule_path) {
    Config config = Config::parse_file(instance_path);
    Instance instance = read_instance(config);
    config.finish();

    std::ifstream sched_in(schedule_path);
    if (!sched_in) throw ConfigError("cannot open schedule file: " + schedule_path);
    Schedule schedule = read_schedule_csv(sched_in);

    std::vector<Violation> violations = validate_schedule(schedule, instance.jobs, instance.cluster);
    if (!violations.empty()) {
        for (const Violation& v : violations)
            std::cerr << "violation: constraint=" << v.constraint << " job=" << v.job_id
                      << " server=" << v.server << " slot=" << v.slot << " " << v.detail << '\n';
        return kExitConfigError;
    }

    SimTrace trace = simulate(schedule, instance.jobs, instance.cluster);
    std::ostream* out = nullptr;
    auto holder = open_out(args.out_path, out);
    write_sim_trace_csv(trace, *out);
    return trace.horizon_exceeded ? kExitInfeasible : kExitOk;
}

int run_round_lp(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("round-lp needs --config with a ddljs instance");
    Config config = Config::parse_file(args.config_path);
    DdljsInstance instance = read_ddljs_instance(config);
    config.finish();
    RoundingReport report = run_rounding_pipeline(instance);
    std::ostream* out = nullptr;
    auto holder = open_out(args.out_path, out);
    write_rounding_report_csv(report, *out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contention-aware scheduler and simulator for ring-all-reduce training jobs"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    CommonArgs args;
    app.add_option("--config", args.config_path, "flat key=value configuration file");
    app.add_option("--out", args.out_path, "output path, '-' or empty for stdout");
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = app.add_option("--seed", seed_value, "override the base seed");
    app.add_option("--format", args.format, "csv or summary")
        ->check(CLI::IsMember({"csv", "summary"}));

    std::string instance_path, schedule_path, policy = "sjf-bco";

    CLI::App* gen = app.add_subcommand("gen-workload", "generate an instance file");
    CLI::App* sched = app.add_subcommand("schedule", "plan one instance with a policy");
    sched->add_option("--instance", instance_path, "instance file from gen-workload");
    sched->add_option("--policy", policy, "sjf-bco, ff, ls or rand")
        ->check(CLI::IsMember({"sjf-bco", "ff", "ls", "rand"}));
    CLI::App* sim = app.add_subcommand("simulate", "evaluate a schedule under the contention model");
    sim->add_option("--instance", instance_path, "instance file")->required();
    sim->add_option("--schedule", schedule_path, "schedule csv from the schedule command")
        ->required();
    CLI::App* compare = app.add_subcommand("compare", "makespan comparison across policies");
    CLI::App* sweep_kappa = app.add_subcommand("sweep-kappa", "size-threshold sweep");
    CLI::App* sweep_servers = app.add_subcommand("sweep-servers", "server-count sweep");
    CLI::App* sweep_lambda = app.add_subcommand("sweep-lambda", "spread-factor sweep");
    CLI::App* round = app.add_subcommand("round-lp", "offline relaxation and rounding pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }
    if (!seed_opt->empty()) args.seed = seed_value;

    try {
        if (gen->parsed()) return run_gen_workload(args);
        if (sched->parsed()) return run_schedule(args, instance_path, policy);
        if (sim->parsed()) return run_simulate(args, instance_path, schedule_path);
        if (round->parsed()) return run_round_lp(args);

        ExperimentKind kind = ExperimentKind::compare;
        if (sweep_kappa->parsed()) kind = ExperimentKind::kappa;
        else if (sweep_servers->parsed()) kind = ExperimentKind::servers;
        else if (sweep_lambda->parsed()) kind = ExperimentKind::lambda;
        else if (!compare->parsed()) return kExitConfigError;
        return emit_report(run_experiment(kind, load_workload_config(args)), args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

// railq: compile, solve and compare single-track dispatching instances.

#include "railq/errors.hpp"
#include "railq/instance_io.hpp"
#include "railq/qubo.hpp"
#include "railq/reference.hpp"
#include "railq/solvers.hpp"
#include "railq/validate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace railq;

constexpr int exit_feasible = 0;
constexpr int exit_error = 1;
constexpr int exit_infeasible = 2;

struct PenaltyFlags {
    std::string p_sum;
    std::string p_pair;

    void add(CLI::App& app) {
        app.add_option("--p-sum", p_sum, "one-hot penalty (decimal or p/q); default from the instance");
        app.add_option("--p-pair", p_pair, "pair penalty (decimal or p/q); default from the instance");
    }

    [[nodiscard]] BuildOptions options(const RailwayInstance& instance) const {
        BuildOptions o;
        o.penalties = instance.penalties();
        if (!p_sum.empty()) o.penalties.p_sum = parse_rational(p_sum);
        if (!p_pair.empty()) o.penalties.p_pair = parse_rational(p_pair);
        return o;
    }
};

struct SolverFlags {
    std::string solver = "exact";
    std::uint64_t seed = 0;
    std::size_t reads = 1000;
    std::size_t sweeps = 1000;
    double beta_min = 0.1;
    double beta_max = 4.0;
    std::size_t levels = 1;
    std::size_t max_vars = 64;
    unsigned threads = 0;

    void add_sampler(CLI::App& app) {
        app.add_option("--seed", seed, "random seed for sa")->capture_default_str();
        app.add_option("--reads", reads, "sa reads")->capture_default_str();
        app.add_option("--sweeps", sweeps, "sa sweeps per read")->capture_default_str();
        app.add_option("--beta-min", beta_min, "sa initial inverse temperature")->capture_default_str();
        app.add_option("--beta-max", beta_max, "sa final inverse temperature")->capture_default_str();
        app.add_option("--levels", levels, "brute: number of lowest energy levels")->capture_default_str();
        app.add_option("--max-vars", max_vars, "brute: refuse larger problems")->capture_default_str();
        app.add_option("--threads", threads, "worker threads (0: RAILQ_THREADS or all cores)");
    }
};

/// Outcome of one solver in a uniform shape.
struct Outcome {
    std::string solver;
    std::optional<Schedule> schedule;
    std::optional<Rational> energy;
    std::size_t degeneracy = 0;
    std::string note;
};

std::string decimal(const Rational& r) {
    return format_decimal(r, 3);
}

std::string exact_and_decimal(const Rational& r) {
    const auto exact = format_rational(r);
    const auto approx = decimal(r);
    return exact == approx ? exact : exact + " (" + approx + ")";
}

Outcome run_solver(const std::string& name, const RailwayInstance& instance, const BuildOptions& build,
                   const SolverFlags& flags, std::ostream* samples_out = nullptr) {
    Outcome out;
    out.solver = name;
    if (name == "exact" || name == "fcfs" || name == "flfs" || name == "amcc") {
        ReferenceResult r;
        if (name == "exact") r = exact_precedence_solve(instance);
        if (name == "fcfs") r = fcfs(instance);
        if (name == "flfs") r = flfs(instance);
        if (name == "amcc") r = amcc(instance);
        if (r.feasible) out.schedule = r.schedule;
        out.note = r.message;
        return out;
    }
    const auto problem = build_qubo(instance, build);
    if (name == "brute") {
        SpectrumOptions options;
        options.k_levels = flags.levels;
        options.max_vars = flags.max_vars;
        options.threads = flags.threads;
        const auto spectrum = brute_force_spectrum(problem, options);
        if (samples_out) write_spectrum_csv(*samples_out, spectrum, problem, instance);
        const auto& ground = spectrum.front();
        out.energy = ground.energy;
        out.degeneracy = ground.degeneracy();
        const auto decoded = decode(problem, ground.states.front());
        if (decoded.ok() && check_feasibility(instance, *decoded.schedule).feasible()) {
            out.schedule = decoded.schedule;
        } else {
            out.note = "ground state is infeasible (hard penalty " +
                       format_rational(hard_penalty(problem, ground.states.front())) + ")";
        }
        return out;
    }
    if (name == "sa") {
        AnnealParams params;
        params.num_reads = flags.reads;
        params.sweeps = flags.sweeps;
        params.beta_min = flags.beta_min;
        params.beta_max = flags.beta_max;
        params.seed = flags.seed;
        params.threads = flags.threads;
        const auto samples = simulated_annealing(problem.Q, params);
        if (samples_out) write_samples_csv(*samples_out, samples, problem, instance);
        const auto best = best_feasible(samples, problem, instance);
        if (best) {
            out.schedule = best->schedule;
            out.energy = best->energy;
        } else {
            out.energy = samples.reads.front().energy;
            out.note = "no feasible read";
        }
        return out;
    }
    throw ParameterError("unknown solver '" + name + "'");
}

void print_schedule(std::ostream& os, const RailwayInstance& instance, const Schedule& schedule) {
    os << "schedule:\n";
    for (TrainIndex j = 0; j < instance.train_count(); ++j) {
        for (std::size_t k = 0; k < instance.decision_count(j); ++k) {
            const auto station = instance.block(instance.route(j).stations[k]).id;
            os << "  " << instance.route(j).id << " @" << station << ": d=" << schedule.at(j, k)
               << " secondary=" << secondary_delay(instance, schedule, j, k)
               << " leave=" << format_clock(leave_time(instance, schedule, j, k)) << '\n';
        }
    }
}

int cmd_build(const std::string& path, const std::string& prefix, const PenaltyFlags& penalties) {
    const auto instance = load_instance(path);
    const auto problem = build_qubo(instance, penalties.options(instance));
    std::cout << "instance: " << instance.name() << '\n'
              << "variables: " << problem.size() << '\n'
              << "groups: " << problem.index.groups().size() << '\n'
              << "edges: " << problem.Q.edge_count() << '\n'
              << "density: " << std::fixed << std::setprecision(4) << problem.Q.density() << '\n'
              << "offset_L: " << format_rational(problem.offset_L) << '\n'
              << "excluded_pairs: " << problem.excluded.size() << '\n';
    for (auto f : all_families) std::cout << "pairs." << to_string(f) << ": " << problem.family_counts.at(f) << '\n';
    if (!prefix.empty()) {
        std::ofstream qubo(prefix + ".qubo");
        std::ofstream map(prefix + ".map");
        if (!qubo || !map) throw ModelError("cannot write '" + prefix + ".qubo' / '.map'");
        write_qubo(qubo, problem.Q);
        write_variable_map(map, instance, problem.index);
        std::cout << "wrote: " << prefix << ".qubo " << prefix << ".map\n";
    }
    return exit_feasible;
}

int cmd_solve(const std::string& path, const SolverFlags& flags, const PenaltyFlags& penalties,
              const std::string& schedule_out, const std::string& samples_path) {
    const auto instance = load_instance(path);
    std::ofstream samples_file;
    if (!samples_path.empty()) {
        samples_file.open(samples_path);
        if (!samples_file) throw ModelError("cannot write '" + samples_path + "'");
    }
    const auto outcome = run_solver(flags.solver, instance, penalties.options(instance), flags,
                                    samples_path.empty() ? nullptr : &samples_file);
    std::cout << "instance: " << instance.name() << '\n' << "solver: " << outcome.solver << '\n';
    if (outcome.energy) {
        std::cout << "energy: " << exact_and_decimal(*outcome.energy) << '\n';
        if (flags.solver == "brute") std::cout << "degeneracy: " << outcome.degeneracy << '\n';
    }
    if (!outcome.note.empty()) std::cout << "note: " << outcome.note << '\n';
    if (!outcome.schedule) {
        std::cout << "feasible: false\n";
        return exit_infeasible;
    }
    const auto& schedule = *outcome.schedule;
    const auto summary = summarize(instance, schedule);
    std::cout << "objective: " << exact_and_decimal(objective_value(instance, schedule)) << '\n'
              << "max_secondary_delay: " << summary.max_secondary << '\n'
              << "sum_final_secondary_delay: " << summary.sum_secondary_final << '\n';
    print_schedule(std::cout, instance, schedule);
    const auto report = check_feasibility(instance, schedule);
    std::cout << format_report(instance, report);
    if (!schedule_out.empty()) {
        std::ofstream out(schedule_out);
        if (!out) throw ModelError("cannot write '" + schedule_out + "'");
        write_schedule_csv(out, instance, schedule);
    }
    return report.feasible() ? exit_feasible : exit_infeasible;
}

std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmd_compare(const std::string& path, const std::string& solvers, const SolverFlags& flags,
                const PenaltyFlags& penalties) {
    const auto instance = load_instance(path);
    const auto build = penalties.options(instance);
    std::vector<Outcome> outcomes;
    for (const auto& name : split(solvers)) {
        try {
            outcomes.push_back(run_solver(name, instance, build, flags));
        } catch (const CapacityError& e) {
            outcomes.push_back({name, std::nullopt, std::nullopt, 0, e.what()});
        }
    }
    std::cout << std::left << std::setw(8) << "solver" << std::setw(10) << "feasible" << std::setw(14) << "objective"
              << std::setw(8) << "max_d" << std::setw(8) << "sum_d";
    for (const auto& o : outcomes) std::cout << std::setw(static_cast<int>(o.solver.size()) + 5) << ("eq:" + o.solver);
    std::cout << '\n';
    bool all_ok = true;
    for (const auto& o : outcomes) {
        std::cout << std::setw(8) << o.solver;
        if (!o.schedule) {
            all_ok = false;
            std::cout << std::setw(10) << "no" << std::setw(14) << "-" << std::setw(8) << "-" << std::setw(8) << "-";
        } else {
            const auto feasible = check_feasibility(instance, *o.schedule).feasible();
            all_ok = all_ok && feasible;
            const auto summary = summarize(instance, *o.schedule);
            std::cout << std::setw(10) << (feasible ? "yes" : "no") << std::setw(14)
                      << decimal(objective_value(instance, *o.schedule)) << std::setw(8) << summary.max_secondary
                      << std::setw(8) << summary.sum_secondary_final;
        }
        for (const auto& other : outcomes) {
            std::string mark = "-";
            if (o.schedule && other.schedule) {
                mark = dispatching_equivalent(instance, *o.schedule, *other.schedule) ? "=" : "x";
            }
            std::cout << std::setw(static_cast<int>(other.solver.size()) + 5) << mark;
        }
        std::cout << '\n';
    }
    for (const auto& o : outcomes) {
        if (!o.note.empty()) std::cout << "note: " << o.solver << ": " << o.note << '\n';
    }
    return all_ok ? exit_feasible : exit_infeasible;
}

int cmd_diagram(const std::string& path, const std::string& schedule_path, const std::string& out_path,
                bool timetable) {
    const auto instance = load_instance(path);
    std::vector<BlockTimes> rows;
    if (timetable) {
        rows = timetable_block_times(instance);
    } else {
        if (schedule_path.empty()) throw ParameterError("diagram needs a schedule file or --timetable");
        std::ifstream in(schedule_path);
        if (!in) throw ModelError("cannot open schedule '" + schedule_path + "'");
        const auto schedule = read_schedule_csv(in, instance);
        const auto report = check_feasibility(instance, schedule);
        if (!report.feasible()) {
            std::cerr << "refusing to draw an infeasible schedule\n" << format_report(instance, report);
            return exit_infeasible;
        }
        rows = block_times(instance, schedule);
    }
    if (out_path.empty() || out_path == "-") {
        write_diagram_csv(std::cout, instance, rows);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ModelError("cannot write '" + out_path + "'");
        write_diagram_csv(out, instance, rows);
    }
    return exit_feasible;
}

int cmd_enlarge(const std::string& path, int copies, Minutes period, const std::string& out_path) {
    const auto data = replicate_instance(load_instance_data(path), copies, period);
    const RailwayInstance instance(data);
    const auto problem = build_qubo(instance);
    save_instance(data, out_path);
    std::cout << "trains: " << instance.train_count() << '\n' << "variables: " << problem.size() << '\n';
    return exit_feasible;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"railq: QUBO compilation and dispatching for single-track lines"};
    app.require_subcommand(1);

    std::string instance_path;
    PenaltyFlags penalties;
    SolverFlags flags;

    auto* build = app.add_subcommand("build", "compile an instance to QUBO and export it");
    std::string prefix;
    build->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    build->add_option("-o,--out", prefix, "output prefix for <prefix>.qubo and <prefix>.map");
    penalties.add(*build);

    auto* solve = app.add_subcommand("solve", "run one solver and report the schedule");
    std::string schedule_out;
    std::string samples_out;
    solve->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--solver", flags.solver, "brute|sa|fcfs|flfs|amcc|exact")
        ->check(CLI::IsMember({"brute", "sa", "fcfs", "flfs", "amcc", "exact"}))
        ->capture_default_str();
    solve->add_option("--schedule-out", schedule_out, "write the schedule as CSV");
    solve->add_option("--samples-out", samples_out, "write the spectrum / samples as CSV");
    flags.add_sampler(*solve);
    penalties.add(*solve);

    auto* compare = app.add_subcommand("compare", "run several solvers and compare their schedules");
    std::string solver_list = "exact,fcfs,flfs,amcc,brute,sa";
    compare->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    compare->add_option("--solvers", solver_list, "comma separated solver list")->capture_default_str();
    flags.add_sampler(*compare);
    penalties.add(*compare);

    auto* diagram = app.add_subcommand("diagram", "emit block entry/leave times as CSV");
    std::string schedule_path;
    std::string diagram_out;
    bool timetable = false;
    diagram->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    diagram->add_option("schedule", schedule_path, "schedule CSV (train,station,delay)");
    diagram->add_option("-o,--out", diagram_out, "output CSV (default stdout)");
    diagram->add_flag("--timetable", timetable, "undisturbed timetable instead of a schedule");

    auto* enlarge = app.add_subcommand("enlarge", "replicate an instance cyclically in time");
    int copies = 3;
    Minutes period = 160;
    std::string enlarge_out;
    enlarge->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    enlarge->add_option("--copies", copies, "number of copies")->capture_default_str();
    enlarge->add_option("--period", period, "time shift between copies (minutes)")->capture_default_str();
    enlarge->add_option("-o,--out", enlarge_out, "output instance JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) return cmd_build(instance_path, prefix, penalties);
        if (*solve) return cmd_solve(instance_path, flags, penalties, schedule_out, samples_out);
        if (*compare) return cmd_compare(instance_path, solver_list, flags, penalties);
        if (*diagram) return cmd_diagram(instance_path, schedule_path, diagram_out, timetable);
        if (*enlarge) return cmd_enlarge(instance_path, copies, period, enlarge_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}

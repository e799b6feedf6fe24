#include "crndist/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crndist/compile.hpp"
#include "crndist/errors.hpp"
#include "crndist/formula.hpp"

namespace crndist {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitResourceCap = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write " + path);
    file << content;
}

Environment parse_env_flags(const std::vector<std::string>& bindings) {
    Environment env;
    for (const auto& binding : bindings) {
        auto eq = binding.find('=');
        if (eq == std::string::npos)
            throw Error("malformed --env binding '" + binding + "', expected name=a/b");
        std::string name = binding.substr(0, eq);
        Rat value = parse_rat(binding.substr(eq + 1));
        env[name] = value;
    }
    validate_environment(env);
    return env;
}

std::string fmt17(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct CompileFlags {
    bool direct = false;
    bool rate_free = false;
    std::string rho = "1000000";
    std::string epsilon;
    std::vector<std::string> env;
};

CrnManifest build_manifest(const Crs& crs, const CompileMeta& meta) {
    CrnManifest manifest;
    std::string outputs;
    for (std::uint32_t s : crs.outputs()) {
        if (!outputs.empty()) outputs += ", ";
        outputs += crs.species_name(s);
    }
    manifest.add("outputs", outputs);
    if (!meta.leaders.empty()) {
        std::string leaders;
        for (const auto& l : meta.leaders) {
            if (!leaders.empty()) leaders += ", ";
            leaders += l;
        }
        manifest.add("leaders", leaders);
    }
    if (meta.rho) manifest.add("rho", rat_str(*meta.rho));
    for (const auto& k : meta.scale_factors) manifest.add("K", k.str());
    if (meta.mass_lost != 0) manifest.add("massLost", rat_str(meta.mass_lost));
    return manifest;
}

int cmd_eval(const std::string& input, const std::vector<std::string>& env_flags,
             const std::string& out_path, std::ostream& out) {
    FormulaPtr f = parse_formula(read_file(input));
    Environment env = parse_env_flags(env_flags);
    Pmf result = eval(*f, env);
    write_output(out_path, pmf_to_text(result), out);
    return kExitOk;
}

int cmd_compile(const std::string& input, const CompileFlags& flags,
                const std::string& out_path, std::ostream& out) {
    CompileOptions options;
    options.rate_free = flags.rate_free;
    options.rho = parse_rat(flags.rho);

    Crs crs;
    CompileMeta meta;
    auto direct_compile = [&](const Pmf& pmf) {
        meta.leaders.push_back("Z");
        return flags.rate_free ? compile_direct_ratefree(pmf) : compile_direct(pmf);
    };

    if (input.rfind("geometric:", 0) == 0) {
        if (flags.epsilon.empty())
            throw Error("an infinite tail needs --epsilon to pick the kept support");
        Rat p = parse_rat(input.substr(std::string("geometric:").size()));
        auto [net, lost] = compile_truncated(geometric_tail(p), parse_rat(flags.epsilon));
        crs = std::move(net);
        meta.leaders.push_back("Z");
        meta.mass_lost = lost;
    } else if (ends_with(input, ".pmf")) {
        Pmf pmf = parse_pmf(read_file(input));
        if (pmf.dim() > 1) {
            if (flags.rate_free)
                throw Error("rate-free compilation handles dim-1 pmfs only");
            if (!flags.epsilon.empty())
                throw Error("truncated compilation handles dim-1 pmfs only");
            crs = compile_joint(pmf);
            meta.leaders.push_back("Z");
        } else if (!flags.epsilon.empty()) {
            auto entries = pmf.entries();
            auto it = entries.begin();
            TailGen gen = [entries = std::move(entries), it]() mutable
                -> std::optional<std::pair<Count, Rat>> {
                if (it == entries.end()) return std::nullopt;
                auto item = std::make_pair(it->first[0], it->second);
                ++it;
                return item;
            };
            auto [net, lost] = compile_truncated(std::move(gen), parse_rat(flags.epsilon));
            crs = std::move(net);
            meta.leaders.push_back("Z");
            meta.mass_lost = lost;
        } else {
            crs = direct_compile(pmf);
        }
    } else {
        FormulaPtr f = parse_formula(read_file(input));
        Environment env = parse_env_flags(flags.env);
        if (flags.direct || flags.rate_free) {
            crs = direct_compile(eval(*f, env));
        } else {
            Compiled compiled = translate(*f, env, options);
            crs = std::move(compiled.crs);
            meta = std::move(compiled.meta);
        }
    }
    CrnManifest manifest = build_manifest(crs, meta);
    write_output(out_path, crn_to_text(crs, &manifest), out);
    return kExitOk;
}

int cmd_steady(const std::string& input, std::uint64_t cap, const std::string& out_path,
               const std::string& json_path, std::ostream& out) {
    Crs crs = parse_crn(read_file(input));
    StateSpace space = explore(crs, cap);
    SteadyReport report = steady_state(space);
    write_output(out_path, steady_report_text(space, report), out);
    if (!json_path.empty()) write_output(json_path, steady_report_json(space, report), out);
    return kExitOk;
}

struct SimulateFlags {
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    double t_max = std::numeric_limits<double>::infinity();
    std::uint64_t step_cap = 100'000'000;
    unsigned threads = 1;
    bool occupation = false;
    std::uint64_t min_events = 1'000'000;
    std::string burn_in = "1/10";
    std::string species;
};

int cmd_simulate(const std::string& input, const SimulateFlags& flags,
                 const std::string& out_path, const std::string& json_path, std::ostream& out) {
    Crs crs = parse_crn(read_file(input));
    if (flags.occupation) {
        std::string species = flags.species;
        if (species.empty()) {
            if (crs.outputs().size() != 1)
                throw Error("--occupation needs --species when outputs are not unique");
            species = crs.species_name(crs.outputs()[0]);
        }
        Rat burn = parse_rat(flags.burn_in);
        auto pmf = ssa_occupation(crs, species, flags.seed, flags.min_events,
                                  burn.convert_to<double>());
        write_output(out_path, occupation_text(species, pmf), out);
        return kExitOk;
    }
    SsaOptions options;
    options.trials = flags.trials;
    options.seed = flags.seed;
    options.t_max = flags.t_max;
    options.step_cap = flags.step_cap;
    options.threads = flags.threads;
    TrajectoryStats stats = ssa_run(crs, options);
    write_output(out_path, trajectory_text(stats), out);
    if (!json_path.empty()) write_output(json_path, trajectory_json(stats), out);
    return kExitOk;
}

int cmd_verify(const std::string& input, const std::vector<std::string>& env_flags,
               const std::string& tol, const std::string& rho, std::uint64_t cap,
               std::ostream& out) {
    FormulaPtr f = parse_formula(read_file(input));
    Environment env = parse_env_flags(env_flags);
    Pmf expected = eval(*f, env);

    CompileOptions options;
    options.rho = parse_rat(rho);
    options.state_cap_hint = cap;
    Compiled compiled = translate(*f, env, options);
    StateSpace space = explore(compiled.crs, cap);
    SteadyReport report = steady_state(space);
    Pmf actual = species_marginal(space, report, kOut);

    Comparison measures = compare(expected, actual);
    Rat tolerance = parse_rat(tol);
    if (tolerance < 0) throw Error("tolerance must be nonnegative");
    bool pass = measures.l1 <= tolerance;
    out << "states " << space.states.size() << "\n";
    out << "l1 " << rat_str(measures.l1) << " (" << fmt17(measures.l1.convert_to<double>())
        << ")\n";
    out << "ratio " << rat_str(measures.ratio) << " ("
        << fmt17(measures.ratio.convert_to<double>()) << ")\n";
    out << "tolerance " << rat_str(tolerance) << "\n";
    out << (pass ? "verdict PASS\n" : "verdict FAIL\n");
    return pass ? kExitOk : kExitVerifyFailed;
}

} // namespace

std::string steady_report_text(const StateSpace& space, const SteadyReport& report) {
    std::ostringstream out;
    out << "states " << space.states.size() << "\n";
    out << "method " << method_name(report.method) << "\n";
    out << "residual " << fmt17(report.residual) << "\n";
    out << "bscc_count " << report.bscc_list.size() << "\n";
    for (std::size_t i = 0; i < report.bscc_list.size(); ++i)
        out << "bscc " << i << " size " << report.bscc_list[i].size() << " mass "
            << rat_str(report.bscc_mass[i]) << "\n";
    for (std::uint32_t s : space.crs.outputs()) {
        const std::string& name = space.crs.species_name(s);
        out << "marginal " << name << "\n";
        if (report.exact) {
            Pmf pmf = species_marginal(space, report, name);
            out << pmf_to_text(pmf);
        } else {
            for (const auto& [value, p] : species_marginal_float(space, report, name))
                out << value << " : " << fmt17(p) << "\n";
        }
    }
    return out.str();
}

std::string steady_report_json(const StateSpace& space, const SteadyReport& report) {
    nlohmann::json j;
    j["states"] = space.states.size();
    j["initial"] = space.initial;
    j["method"] = method_name(report.method);
    j["residual"] = report.residual;
    j["exact"] = report.exact;
    j["bsccs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.bscc_list.size(); ++i) {
        nlohmann::json b;
        b["size"] = report.bscc_list[i].size();
        b["mass"] = rat_str(report.bscc_mass[i]);
        b["states"] = report.bscc_list[i];
        j["bsccs"].push_back(std::move(b));
    }
    j["marginals"] = nlohmann::json::object();
    for (std::uint32_t s : space.crs.outputs()) {
        const std::string& name = space.crs.species_name(s);
        nlohmann::json entries = nlohmann::json::array();
        if (report.exact) {
            Pmf pmf = species_marginal(space, report, name);
            for (const auto& [point, mass] : pmf.entries())
                entries.push_back({{"value", point[0]}, {"prob", rat_str(mass)}});
        } else {
            for (const auto& [value, p] : species_marginal_float(space, report, name))
                entries.push_back({{"value", value}, {"prob_float", p}});
        }
        j["marginals"][name] = std::move(entries);
    }
    return j.dump(2) + "\n";
}

std::string trajectory_text(const TrajectoryStats& stats) {
    std::ostringstream out;
    out << "trials " << stats.trials << "\n";
    out << "seed " << stats.seed << "\n";
    out << "quiescent " << stats.quiescent << "\n";
    out << "time_capped " << stats.time_capped << "\n";
    out << "step_capped " << stats.step_capped << "\n";
    for (const auto& [species, hist] : stats.histograms) {
        out << "histogram " << species << "\n";
        for (const auto& [value, count] : hist) out << value << "\t" << count << "\n";
    }
    return out.str();
}

std::string trajectory_json(const TrajectoryStats& stats) {
    nlohmann::json j;
    j["trials"] = stats.trials;
    j["seed"] = stats.seed;
    j["stop_reasons"] = {{"quiescent", stats.quiescent},
                         {"time_capped", stats.time_capped},
                         {"step_capped", stats.step_capped}};
    j["histograms"] = nlohmann::json::object();
    for (const auto& [species, hist] : stats.histograms) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [value, count] : hist)
            entries.push_back({{"value", value}, {"count", count}});
        j["histograms"][species] = std::move(entries);
    }
    return j.dump(2) + "\n";
}

std::string occupation_text(const std::string& species, const std::map<Count, double>& pmf) {
    std::ostringstream out;
    out << "occupation " << species << "\n";
    for (const auto& [value, weight] : pmf) out << value << "\t" << fmt17(weight) << "\n";
    return out.str();
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"distribution calculus to chemical reaction network toolkit"};
    app.require_subcommand(1);

    std::string input, out_path, json_path;
    std::vector<std::string> env_flags;
    CompileFlags compile_flags;
    SimulateFlags sim_flags;
    std::uint64_t cap = kDefaultStateCap;
    std::string tol = "0";
    std::string rho = "1000000";

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a formula to an exact pmf");
    eval_cmd->add_option("input", input, "formula file")->required();
    eval_cmd->add_option("--env", env_flags, "environment binding name=a/b");
    eval_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* compile_cmd = app.add_subcommand("compile", "compile a formula or pmf to a CRN");
    compile_cmd->add_option("input", input, "formula file, .pmf file, or geometric:a/b")
        ->required();
    compile_cmd->add_option("--env", compile_flags.env, "environment binding name=a/b");
    compile_cmd->add_flag("--direct", compile_flags.direct,
                          "evaluate first, then branch-per-point compilation");
    compile_cmd->add_flag("--rate-free", compile_flags.rate_free,
                          "encode branch weights in counts (implies --direct)");
    compile_cmd->add_option("--rho", compile_flags.rho, "fast/slow rate separation");
    compile_cmd->add_option("--epsilon", compile_flags.epsilon, "tail mass bound a/b");
    compile_cmd->add_option("--out", out_path, "output path (default stdout)");

    auto* steady_cmd = app.add_subcommand("steady", "exact steady-state analysis of a CRN");
    steady_cmd->add_option("input", input, "CRN file")->required();
    steady_cmd->add_option("--cap", cap, "state-space cap");
    steady_cmd->add_option("--out", out_path, "output path (default stdout)");
    steady_cmd->add_option("--json", json_path, "also write a JSON report");

    auto* sim_cmd = app.add_subcommand("simulate", "stochastic simulation of a CRN");
    sim_cmd->add_option("input", input, "CRN file")->required();
    sim_cmd->add_option("--trials", sim_flags.trials, "number of trials");
    sim_cmd->add_option("--seed", sim_flags.seed, "master seed");
    sim_cmd->add_option("--tmax", sim_flags.t_max, "per-trial time cap");
    sim_cmd->add_option("--step-cap", sim_flags.step_cap, "per-trial step cap");
    sim_cmd->add_option("--threads", sim_flags.threads, "worker threads for trials");
    sim_cmd->add_flag("--occupation", sim_flags.occupation,
                      "single-trajectory occupation-time estimate");
    sim_cmd->add_option("--min-events", sim_flags.min_events,
                        "jump events for --occupation");
    sim_cmd->add_option("--burn-in", sim_flags.burn_in,
                        "burn-in fraction a/b for --occupation");
    sim_cmd->add_option("--species", sim_flags.species, "species for --occupation");
    sim_cmd->add_option("--out", out_path, "output path (default stdout)");
    sim_cmd->add_option("--json", json_path, "also write a JSON report");

    auto* verify_cmd =
        app.add_subcommand("verify", "compile a formula and check it against its semantics");
    verify_cmd->add_option("input", input, "formula file")->required();
    verify_cmd->add_option("--env", env_flags, "environment binding name=a/b");
    verify_cmd->add_option("--tol", tol, "L1 tolerance a/b (default 0)");
    verify_cmd->add_option("--rho", rho, "fast/slow rate separation");
    verify_cmd->add_option("--cap", cap, "state-space cap");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (eval_cmd->parsed()) return cmd_eval(input, env_flags, out_path, out);
        if (compile_cmd->parsed()) return cmd_compile(input, compile_flags, out_path, out);
        if (steady_cmd->parsed()) return cmd_steady(input, cap, out_path, json_path, out);
        if (sim_cmd->parsed()) return cmd_simulate(input, sim_flags, out_path, json_path, out);
        if (verify_cmd->parsed()) return cmd_verify(input, env_flags, tol, rho, cap, out);
    } catch (const StateCapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitResourceCap;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    err << "no subcommand selected\n";
    return kExitInputError;
}

} // namespace crndist

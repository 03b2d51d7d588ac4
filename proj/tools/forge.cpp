// forge: command-line driver for instance generation, hardness screening,
// schedule optimization and the transfer/landscape experiments.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "qforge/qforge.hpp"

namespace fs = std::filesystem;
using namespace qforge;

namespace {

struct CommonOpts {
    std::uint64_t seed = 1;
    int threads = 0;
    int bfgs_max_iter = 1000;
    double gtol = 1e-8;
    double ftol = 1e-12;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
    cmd->add_option("--bfgs-max-iter", c.bfgs_max_iter, "BFGS iteration cap");
    cmd->add_option("--gtol", c.gtol, "BFGS gradient-norm tolerance");
    cmd->add_option("--ftol", c.ftol, "BFGS relative energy-change tolerance");
}

BfgsOptions bfgs_of(const CommonOpts& c) {
    BfgsOptions o;
    o.max_iter = c.bfgs_max_iter;
    o.gtol = c.gtol;
    o.ftol = c.ftol;
    return o;
}

void apply_threads(const CommonOpts& c) {
    if (c.threads > 0) setenv("QFORGE_THREADS", std::to_string(c.threads).c_str(), 1);
}

GraphInstance load_instance(const std::string& path) {
    return graph_from_json(read_json_file(path));
}

nlohmann::json result_entry(const GraphInstance& inst, const OptimizationResult& r) {
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);
    const StateVector psi = evolve_digitized(diag, r.final_angles);
    nlohmann::json j = to_json(r);
    j["p"] = r.final_angles.p;
    j["fidelity"] = fidelity(psi, sol);
    return j;
}

int cmd_gen(const CommonOpts& c, int n, int degree, int count, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        char label[16];
        std::snprintf(label, sizeof(label), "g%03d", i);
        const GraphInstance g = generate_regular_graph(n, degree, child_seed(c.seed, i), label);
        write_json_file(fs::path(out_dir) / (std::string(label) + ".json"), to_json(g));
    }
    const nlohmann::json config{{"n", n}, {"degree", degree}, {"count", count}, {"seed", c.seed}};
    write_json_file(fs::path(out_dir) / "manifest.json",
                    make_manifest(config, "forge gen", kVersion));
    std::cout << "wrote " << count << " instances to " << out_dir << "\n";
    return 0;
}

int cmd_screen(const CommonOpts& c, int n, int degree, int count, double threshold, int n_grid,
               const std::string& out_dir) {
    apply_threads(c);
    fs::create_directories(out_dir);
    const ScreenResult res = hardness_screen(count, n, degree, threshold, c.seed, n_grid, true);
    for (int i = 0; i < count; ++i) {
        write_json_file(fs::path(out_dir) / (res.instances[i].label + ".json"),
                        to_json(res.instances[i]));
        write_json_file(fs::path(out_dir) / (res.instances[i].label + "_scan.json"),
                        to_json(res.scans[i]));
    }
    write_text_file(fs::path(out_dir) / "gap_cdf.csv", gap_cdf_csv(res.gaps));
    nlohmann::json scan = nlohmann::json::array();
    for (int i = 0; i < count; ++i)
        scan.push_back({{"label", res.instances[i].label},
                        {"min_gap", res.gaps[i]},
                        {"s_at_min", res.s_at_min[i]},
                        {"hard", res.gaps[i] <= threshold}});
    nlohmann::json hard = nlohmann::json::array();
    for (const auto i : res.hard_indices) hard.push_back(res.instances[i].label);
    write_json_file(fs::path(out_dir) / "screen.json",
                    {{"instances", scan}, {"hard", hard}, {"gap_threshold", threshold}});
    const nlohmann::json config{{"n", n},
                                {"degree", degree},
                                {"count", count},
                                {"seed", c.seed},
                                {"gap_threshold", threshold},
                                {"n_grid", n_grid}};
    write_json_file(fs::path(out_dir) / "manifest.json",
                    make_manifest(config, "forge screen", kVersion));
    std::cout << "screened " << count << " instances; " << res.hard_indices.size()
              << " hard at threshold " << threshold << "\n";
    return 0;
}

int cmd_optimize(const CommonOpts& c, const std::string& instance_path,
                 const std::string& method_name_str, int p_max, std::vector<int> p_list, int nc,
                 int nc_step, int n_r, double alpha, int big_r, const std::string& out_file) {
    apply_threads(c);
    const auto t0 = std::chrono::steady_clock::now();
    const GraphInstance inst = load_instance(instance_path);
    const Method method = method_from_string(method_name_str);
    const BfgsOptions opts = bfgs_of(c);
    if (p_list.empty()) p_list = {p_max};

    std::vector<OptimizationResult> results;
    switch (method) {
        case Method::Lin:
            for (const int p : p_list) results.push_back(run_lin(inst, p, opts));
            break;
        case Method::FCrab:
            for (const int p : p_list)
                results.push_back(run_fcrab_iterative(inst, p, nc > 0 ? nc : std::max(1, p / 2),
                                                      nc_step, n_r, child_seed(c.seed, p), opts));
            break;
        case Method::CCrab:
            for (const int p : p_list)
                results.push_back(run_ccrab_direct(inst, p, nc >= 0 ? nc : std::max(1, p / 2),
                                                   n_r, child_seed(c.seed, p), opts));
            break;
        case Method::Interp:
            results = run_interp(inst, p_max, opts);
            break;
        case Method::LogInterp:
            results = run_loginterp(inst, p_max, opts);
            break;
        case Method::FourierA:
        case Method::FourierB:
        case Method::FourierC: {
            FourierZhouConfig cfg;
            cfg.variant = method == Method::FourierA ? 'a'
                          : method == Method::FourierB ? 'b' : 'c';
            cfg.nc_fixed = nc;
            cfg.n_random = big_r;
            cfg.alpha = alpha;
            cfg.bfgs = opts;
            results = run_fourier_zhou(inst, p_max, cfg, c.seed);
            break;
        }
    }

    nlohmann::json per_p = nlohmann::json::array();
    for (const auto& r : results) per_p.push_back(result_entry(inst, r));
    const auto t1 = std::chrono::steady_clock::now();
    const nlohmann::json config{{"method", method_name_str}, {"instance", instance_path},
                                {"p_max", p_max},           {"nc", nc},
                                {"nc_step", nc_step},       {"n_r", n_r},
                                {"alpha", alpha},           {"R", big_r},
                                {"seed", c.seed}};
    nlohmann::json out{{"method", method_name_str},
                       {"instance", inst.label},
                       {"p_results", per_p},
                       {"manifest", make_manifest(config, "forge optimize", kVersion)},
                       {"wall_time_s", std::chrono::duration<double>(t1 - t0).count()}};
    write_json_file(out_file, out);
    std::cout << "method " << method_name_str << " on " << inst.label << ":";
    for (const auto& r : results)
        std::cout << "  P=" << r.final_angles.p << " eps=" << r.residual;
    std::cout << "\n";
    return 0;
}

int cmd_compare(const CommonOpts& c, const std::string& instance_path,
                std::vector<int> p_list, std::vector<std::string> methods, int n_r,
                const std::string& out_dir) {
    apply_threads(c);
    fs::create_directories(out_dir);
    const GraphInstance inst = load_instance(instance_path);
    std::vector<Method> parsed;
    for (const auto& m : methods) parsed.push_back(method_from_string(m));
    MethodRunConfig cfg;
    cfg.n_r = n_r;
    cfg.bfgs = bfgs_of(c);
    const MethodComparison cmp = compare_methods(inst, p_list, parsed, c.seed, cfg);
    write_text_file(fs::path(out_dir) / "fig4.csv", comparison_csv(cmp));
    nlohmann::json results;
    for (const auto& [name, per_p] : cmp.results) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [p, r] : per_p) arr.push_back(result_entry(inst, r));
        results[name] = arr;
    }
    const nlohmann::json config{{"instance", instance_path}, {"p_list", p_list},
                                {"methods", methods},        {"seed", c.seed},
                                {"n_r", n_r}};
    write_json_file(fs::path(out_dir) / "compare.json",
                    {{"instance", inst.label},
                     {"spearman", cmp.spearman_eps_vs_infidelity},
                     {"results", results},
                     {"manifest", make_manifest(config, "forge compare", kVersion)}});
    std::cout << "spearman(eps, infidelity) = " << cmp.spearman_eps_vs_infidelity << "\n";
    return 0;
}

int cmd_populations(const CommonOpts& c, const std::string& instance_path,
                    const std::string& schedule_path, int k, int order,
                    const std::string& out_file) {
    apply_threads(c);
    const GraphInstance inst = load_instance(instance_path);
    const AngleSchedule s = schedule_from_json(read_json_file(schedule_path));
    const PopulationTrace trace = digital_population_trace(inst, s, k, order);
    write_text_file(out_file, population_csv(trace));
    std::cout << "min H_eff gap " << trace.min_gap_value << " at layer "
              << trace.min_gap_marker << "\n";
    return 0;
}

int cmd_transfer(const CommonOpts& c, const std::string& source_path,
                 std::vector<std::string> target_paths, const std::string& method_name_str,
                 std::vector<int> p_list, int nc, int n_r, const std::string& out_dir) {
    apply_threads(c);
    fs::create_directories(out_dir);
    const GraphInstance source = load_instance(source_path);
    std::vector<GraphInstance> targets;
    for (const auto& path : target_paths) targets.push_back(load_instance(path));
    const Method method = method_from_string(method_name_str);
    const BfgsOptions opts = bfgs_of(c);
    MethodRunConfig cfg;
    cfg.n_r = n_r;
    cfg.bfgs = opts;

    std::vector<TransferReport> reports;
    for (const int p : p_list) {
        auto source_runs = run_method_at_depths(source, method, {p}, child_seed(c.seed, p), cfg);
        auto native = [&](const GraphInstance& g) {
            return run_method_at_depths(g, method, {p},
                                        child_seed(c.seed, p ^ fnv1a64(g.label)), cfg)
                .at(p);
        };
        reports.push_back(
            run_transferability(source_runs.at(p), source.label, targets, native, opts));
    }
    write_text_file(fs::path(out_dir) / "fig8.csv", transfer_csv(reports));
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& rep : reports)
        summary.push_back({{"p", rep.p},
                           {"method", rep.method},
                           {"d_eps_trans", rep.d_eps_trans},
                           {"d_eps_lo", rep.d_eps_lo},
                           {"sem_trans", rep.sem_trans},
                           {"sem_lo", rep.sem_lo}});
    const nlohmann::json config{{"source", source_path}, {"targets", target_paths},
                                {"method", method_name_str}, {"p_list", p_list},
                                {"nc", nc},                {"n_r", n_r},
                                {"seed", c.seed}};
    write_json_file(fs::path(out_dir) / "transfer.json",
                    {{"summary", summary},
                     {"manifest", make_manifest(config, "forge transfer", kVersion)}});
    for (const auto& rep : reports)
        std::cout << "P=" << rep.p << " d_eps_trans=" << rep.d_eps_trans
                  << " d_eps_lo=" << rep.d_eps_lo << "\n";
    return 0;
}

int cmd_hessian(const CommonOpts& c, const std::string& instance_path,
                std::vector<std::string> result_paths, double fd_step,
                const std::string& out_dir) {
    apply_threads(c);
    fs::create_directories(out_dir);
    const GraphInstance inst = load_instance(instance_path);
    std::vector<OptimizationResult> results;
    for (const auto& path : result_paths) {
        const nlohmann::json j = read_json_file(path);
        const nlohmann::json& entry = j.contains("p_results") ? j["p_results"].back() : j;
        OptimizationResult r;
        r.method = method_from_string(entry.at("method").get<std::string>());
        r.final_angles = schedule_from_json(entry.at("schedule"));
        r.energy = entry.at("energy").get<double>();
        r.residual = entry.at("residual").get<double>();
        results.push_back(std::move(r));
    }
    const HessianAnalysis analysis = run_hessian_analysis(inst, results, fd_step);
    CsvWriter scans("method,direction,displacement,eps_res");
    for (const auto& rep : analysis.reports) {
        for (std::size_t i = 0; i < rep.mu_grid.size(); ++i)
            scans.row(rep.method, "max_curvature", rep.mu_grid[i], rep.eps_mu[i]);
        for (std::size_t i = 0; i < rep.nu_grid.size(); ++i)
            scans.row(rep.method, "min_curvature", rep.nu_grid[i], rep.eps_nu[i]);
    }
    scans.save(fs::path(out_dir) / "fig11.csv");
    CsvWriter paths("method_a,method_b,lambda,eps_res");
    for (const auto& path : analysis.paths)
        for (std::size_t i = 0; i < path.lambda_grid.size(); ++i)
            paths.row(path.method_a, path.method_b, path.lambda_grid[i], path.eps_path[i]);
    paths.save(fs::path(out_dir) / "fig12.csv");
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& rep : analysis.reports)
        stats.push_back({{"method", rep.method},
                         {"lambda_max", rep.lambda_max},
                         {"lambda_min", rep.lambda_min},
                         {"max_asymmetry", rep.max_asymmetry}});
    const nlohmann::json config{{"instance", instance_path}, {"results", result_paths},
                                {"fd_step", fd_step},        {"seed", c.seed}};
    write_json_file(fs::path(out_dir) / "hessian.json",
                    {{"stats", stats},
                     {"manifest", make_manifest(config, "forge hessian", kVersion)}});
    std::cout << "hessian reports: " << analysis.reports.size()
              << ", convex paths: " << analysis.paths.size() << "\n";
    return 0;
}

int cmd_smooth_vs_irregular(const CommonOpts& c, const std::string& instance_path, int p,
                            int n_r, double dt_c, const std::string& out_dir) {
    apply_threads(c);
    fs::create_directories(out_dir);
    const GraphInstance inst = load_instance(instance_path);
    const SmoothVsIrregularReport rep =
        run_smooth_vs_irregular(inst, p, n_r, c.seed, dt_c, bfgs_of(c));
    write_json_file(
        fs::path(out_dir) / "smooth_vs_irregular.json",
        {{"instance", inst.label},
         {"smooth",
          {{"digital_eps", rep.smooth_digital_eps},
           {"continuum_eps", rep.smooth_continuum_eps},
           {"roughness", rep.smooth_roughness},
           {"schedule", to_json(rep.smooth.final_angles)}}},
         {"irregular",
          {{"digital_eps", rep.irregular_digital_eps},
           {"continuum_eps", rep.irregular_continuum_eps},
           {"roughness", rep.irregular_roughness},
           {"schedule", to_json(rep.irregular.final_angles)}}},
         {"manifest", make_manifest({{"instance", instance_path},
                                     {"p", p},
                                     {"n_r", n_r},
                                     {"dt_c", dt_c},
                                     {"seed", c.seed}},
                                    "forge smooth-vs-irregular", kVersion)}});
    write_text_file(fs::path(out_dir) / "fig9_smooth_digital.csv",
                    population_csv(rep.smooth_digital_trace));
    write_text_file(fs::path(out_dir) / "fig9_irregular_digital.csv",
                    population_csv(rep.irregular_digital_trace));
    write_text_file(fs::path(out_dir) / "fig10_smooth_continuum.csv",
                    population_csv(rep.smooth_continuum_trace));
    write_text_file(fs::path(out_dir) / "fig10_irregular_continuum.csv",
                    population_csv(rep.irregular_continuum_trace));
    std::cout << "digital eps: smooth " << rep.smooth_digital_eps << " irregular "
              << rep.irregular_digital_eps << "; continuum eps: smooth "
              << rep.smooth_continuum_eps << " irregular " << rep.irregular_continuum_eps
              << "\n";
    return 0;
}

int cmd_continuum(const CommonOpts& c, const std::string& instance_path,
                  const std::string& schedule_path, double dt_c, int k, double sample_every,
                  const std::string& out_file) {
    apply_threads(c);
    const GraphInstance inst = load_instance(instance_path);
    const AngleSchedule s = schedule_from_json(read_json_file(schedule_path));
    const ContinuumControls ctl = interpolate_controls(s);
    ContinuumOptions opts;
    opts.dt_c = dt_c;
    opts.k_levels = k;
    opts.sample_every = sample_every;
    const ContinuumResult run = integrate_schrodinger(inst, ctl, opts);
    write_text_file(out_file, continuum_trace_csv(run.trace, run.energies, run.norm_defects));
    const double eps = residual_energy(run.final_energy, exact_extrema(inst));
    std::cout << "tau = " << ctl.tau << ", continuum residual = " << eps << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"digitized-annealing schedule optimization toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts common;

    int gen_n = 14, gen_degree = 3, gen_count = 1;
    std::string gen_out = "instances";
    auto* gen = app.add_subcommand("gen", "generate weighted regular instances");
    add_common(gen, common);
    gen->add_option("--n", gen_n);
    gen->add_option("--degree", gen_degree);
    gen->add_option("--count", gen_count);
    gen->add_option("--out", gen_out);

    int scr_n = 14, scr_degree = 3, scr_count = 100, scr_grid = 33;
    double scr_threshold = 5e-3;
    std::string scr_out = "screen";
    auto* screen = app.add_subcommand("screen", "hardness screening by minimum gap");
    add_common(screen, common);
    screen->add_option("--n", scr_n);
    screen->add_option("--degree", scr_degree);
    screen->add_option("--count", scr_count);
    screen->add_option("--gap-threshold", scr_threshold);
    screen->add_option("--n-grid", scr_grid);
    screen->add_option("--out", scr_out);

    std::string opt_instance, opt_method = "ccrab", opt_out = "result.json";
    int opt_pmax = 16, opt_nc = -1, opt_nc_step = 10, opt_nr = 10, opt_R = 10;
    std::vector<int> opt_plist;
    double opt_alpha = 0.6;
    auto* optimize = app.add_subcommand("optimize", "optimize a schedule on one instance");
    add_common(optimize, common);
    optimize->add_option("--instance", opt_instance)->required();
    optimize->add_option("--method", opt_method,
                         "lin|fcrab|ccrab|interp|loginterp|fourier-a|fourier-b|fourier-c");
    optimize->add_option("--pmax", opt_pmax);
    optimize->add_option("--plist", opt_plist, "explicit depth list for direct methods")->delimiter(',');
    optimize->add_option("--nc", opt_nc, "mode count (default P/2; fourier-c cap)");
    optimize->add_option("--nc-step", opt_nc_step);
    optimize->add_option("--nr", opt_nr, "noise redraws per round");
    optimize->add_option("--alpha", opt_alpha, "FOURIER perturbation strength");
    optimize->add_option("--R", opt_R, "FOURIER random candidates per depth");
    optimize->add_option("--out", opt_out);

    std::string cmp_instance, cmp_out = "compare";
    std::vector<int> cmp_plist{4, 8, 16, 32, 64};
    std::vector<std::string> cmp_methods{"lin", "fcrab", "ccrab", "loginterp"};
    int cmp_nr = 10;
    auto* compare = app.add_subcommand("compare", "method comparison table");
    add_common(compare, common);
    compare->add_option("--instance", cmp_instance)->required();
    compare->add_option("--plist", cmp_plist)->delimiter(',');
    compare->add_option("--methods", cmp_methods)->delimiter(',');
    compare->add_option("--nr", cmp_nr);
    compare->add_option("--out", cmp_out);

    std::string pop_instance, pop_schedule, pop_out = "populations.csv";
    int pop_k = 3, pop_order = 3;
    auto* populations = app.add_subcommand("populations", "effective-eigenstate populations");
    add_common(populations, common);
    populations->add_option("--instance", pop_instance)->required();
    populations->add_option("--schedule", pop_schedule)->required();
    populations->add_option("--k", pop_k);
    populations->add_option("--order", pop_order);
    populations->add_option("--out", pop_out);

    std::string tr_source, tr_method = "ccrab", tr_out = "transfer";
    std::vector<std::string> tr_targets;
    std::vector<int> tr_plist{4, 8, 16};
    int tr_nc = -1, tr_nr = 10;
    auto* transfer = app.add_subcommand("transfer", "schedule transferability study");
    add_common(transfer, common);
    transfer->add_option("--source", tr_source)->required();
    transfer->add_option("--targets", tr_targets)->required()->delimiter(',');
    transfer->add_option("--method", tr_method);
    transfer->add_option("--plist", tr_plist)->delimiter(',');
    transfer->add_option("--nc", tr_nc);
    transfer->add_option("--nr", tr_nr);
    transfer->add_option("--out", tr_out);

    std::string hes_instance, hes_out = "hessian";
    std::vector<std::string> hes_results;
    double hes_step = 1e-4;
    auto* hessian = app.add_subcommand("hessian", "curvature and convex-path landscape");
    add_common(hessian, common);
    hessian->add_option("--instance", hes_instance)->required();
    hessian->add_option("--results", hes_results, "optimize result JSONs (>= 2)")->required()->delimiter(',');
    hessian->add_option("--fd-step", hes_step);
    hessian->add_option("--out", hes_out);

    std::string svi_instance, svi_out = "svi";
    int svi_p = 64, svi_nr = 10;
    double svi_dtc = 0.1;
    auto* svi = app.add_subcommand("smooth-vs-irregular",
                                   "digital vs continuum transfer of smooth and irregular fits");
    add_common(svi, common);
    svi->add_option("--instance", svi_instance)->required();
    svi->add_option("--p", svi_p);
    svi->add_option("--nr", svi_nr);
    svi->add_option("--dtc", svi_dtc);
    svi->add_option("--out", svi_out);

    std::string cont_instance, cont_schedule, cont_out = "continuum.csv";
    double cont_dtc = 0.1, cont_stride = 0.5;
    int cont_k = 2;
    auto* continuum = app.add_subcommand("continuum", "continuous-time evolution of a schedule");
    add_common(continuum, common);
    continuum->add_option("--instance", cont_instance)->required();
    continuum->add_option("--schedule", cont_schedule)->required();
    continuum->add_option("--dtc", cont_dtc);
    continuum->add_option("--k", cont_k);
    continuum->add_option("--sample-every", cont_stride);
    continuum->add_option("--out", cont_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(common, gen_n, gen_degree, gen_count, gen_out);
        if (screen->parsed())
            return cmd_screen(common, scr_n, scr_degree, scr_count, scr_threshold, scr_grid,
                              scr_out);
        if (optimize->parsed())
            return cmd_optimize(common, opt_instance, opt_method, opt_pmax, opt_plist, opt_nc,
                                opt_nc_step, opt_nr, opt_alpha, opt_R, opt_out);
        if (compare->parsed())
            return cmd_compare(common, cmp_instance, cmp_plist, cmp_methods, cmp_nr, cmp_out);
        if (populations->parsed())
            return cmd_populations(common, pop_instance, pop_schedule, pop_k, pop_order, pop_out);
        if (transfer->parsed())
            return cmd_transfer(common, tr_source, tr_targets, tr_method, tr_plist, tr_nc, tr_nr,
                                tr_out);
        if (hessian->parsed())
            return cmd_hessian(common, hes_instance, hes_results, hes_step, hes_out);
        if (svi->parsed())
            return cmd_smooth_vs_irregular(common, svi_instance, svi_p, svi_nr, svi_dtc, svi_out);
        if (continuum->parsed())
            return cmd_continuum(common, cont_instance, cont_schedule, cont_dtc, cont_k,
                                 cont_stride, cont_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

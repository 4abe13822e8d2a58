// Command-line front end: run a benchmark or a custom problem over one or
// more meshes, print a convergence table or export the final field.
//
// Exit codes: 0 success, 2 configuration / usage error, 3 solver abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjsolve/cli.hpp"

namespace {

int run(const hjsolve::RunSpec& spec) {
    using namespace hjsolve;
    const bool is2d = std::holds_alternative<Problem2D>(spec.problem);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!spec.out_path.empty()) {
        file.open(spec.out_path);
        if (!file) {
            std::fprintf(stderr, "error: cannot write to %s\n", spec.out_path.c_str());
            return 2;
        }
        os = &file;
    }

    std::vector<StepDiagnostics> steps;
    DiagnosticsCallback cb;
    if (spec.diagnostics)
        cb = [&steps](const StepDiagnostics& d) { steps.push_back(d); };

    const bool has_exact = is2d ? static_cast<bool>(std::get<Problem2D>(spec.problem).exact)
                                : static_cast<bool>(std::get<Problem1D>(spec.problem).exact);

    if (spec.mesh_sizes.size() > 1) {
        if (!has_exact) {
            std::fprintf(stderr,
                         "error: convergence study requires an exact solution; "
                         "problem '%s' has none\n",
                         spec.problem_name.c_str());
            return 2;
        }
        const auto rows = run_convergence_study(spec, cb);
        write_convergence_csv(rows, is2d, *os);
    } else {
        const int n = spec.mesh_sizes.front();
        if (is2d) {
            const auto& p = std::get<Problem2D>(spec.problem);
            const Grid2D g = make_grid_2d(spec, p, n);
            const Field2D f = run_solver_2d(p, g, spec.scheme, cb);
            if (spec.format == "csv") export_solution_csv(f, g, *os);
            else export_solution_svg(f, g, *os);
            if (spec.diagnostics) {
                std::ofstream diag(spec.out_path.empty() ? "diagnostics.csv"
                                                         : spec.out_path + ".diag.csv");
                ConvolutionKernel kx(g.x, p.bc.periodic_x());
                kx.set_gamma(1.0 / g.x.min_width());
                std::vector<double> row(static_cast<std::size_t>(f.nx));
                for (int i = 0; i < f.nx; ++i) row[static_cast<std::size_t>(i)] = f.at(i, f.ny / 2);
                write_weno_diagnostics_csv(row, kx, diag);
            }
        } else {
            const auto& p = std::get<Problem1D>(spec.problem);
            const Grid1D g = make_grid_1d(spec, p, n);
            const Field1D f = run_solver_1d(p, g, spec.scheme, cb);
            if (spec.format == "csv") export_solution_csv(f, g, *os);
            else export_solution_svg(f, g, *os);
            if (spec.diagnostics) {
                std::ofstream diag(spec.out_path.empty() ? "diagnostics.csv"
                                                         : spec.out_path + ".diag.csv");
                ConvolutionKernel k(g, p.bc.periodic());
                k.set_gamma(1.0 / g.min_width());
                write_weno_diagnostics_csv(f.values, k, diag);
            }
        }
    }

    if (spec.diagnostics && !steps.empty()) {
        std::ofstream sd((spec.out_path.empty() ? std::string("steps")
                                                : spec.out_path) + ".steps.csv");
        sd << "step,t,dt,alpha_x,alpha_y,gamma_x,gamma_y,filter_active,"
              "weno_fallback,rejected,max_abs_phi\n";
        for (const auto& d : steps)
            sd << d.step << "," << d.t << "," << d.dt << "," << d.alpha_x << ","
               << d.alpha_y << "," << d.gamma_x << "," << d.gamma_y << ","
               << d.filter_active << "," << d.weno_fallback_cells << ","
               << d.rejected_substeps << "," << d.max_abs_phi << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-based high-order solver for Hamilton-Jacobi equations"};

    std::string problem, config, mesh = "uniform", quadrature, filter, out,
                format = "csv", nlist;
    int k = 3;
    double beta = -1.0, cfl = 0.5, tfinal = 1.0, rho = 0.1;
    std::uint64_t seed = 0;
    bool diagnostics = false;

    app.add_option("--problem", problem, "builtin problem name");
    app.add_option("--config", config, "key=value config file");
    app.add_option("--k", k, "reconstruction order (1..3)");
    app.add_option("--beta", beta, "kernel scaling (default: per-order table)");
    app.add_option("--cfl", cfl, "CFL number");
    app.add_option("--n", nlist, "mesh size or comma list (cells per dimension)");
    app.add_option("--mesh", mesh, "uniform | perturbed")
        ->check(CLI::IsMember({"uniform", "perturbed"}));
    app.add_option("--perturb-rho", rho, "relative node jitter for perturbed meshes");
    app.add_option("--seed", seed, "random seed for perturbed meshes");
    app.add_option("--tfinal", tfinal, "final time");
    app.add_option("--quadrature", quadrature, "linear | weno")
        ->check(CLI::IsMember({"linear", "weno"}));
    app.add_option("--filter", filter, "on | off")->check(CLI::IsMember({"on", "off"}));
    app.add_option("--out", out, "output path (default: stdout)");
    app.add_option("--format", format, "csv | svg-lines")
        ->check(CLI::IsMember({"csv", "svg-lines"}));
    app.add_flag("--diagnostics", diagnostics, "dump per-cell and per-step diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        hjsolve::RunSpec spec;
        if (!config.empty()) {
            spec = hjsolve::parse_config(config);
        } else if (!problem.empty()) {
            spec.problem_name = problem;
            spec.problem = hjsolve::builtin_problem(problem);
            const bool is2d = std::holds_alternative<hjsolve::Problem2D>(spec.problem);
            const bool wants =
                is2d ? std::get<hjsolve::Problem2D>(spec.problem).needs_weno_filter
                     : std::get<hjsolve::Problem1D>(spec.problem).needs_weno_filter;
            spec.scheme.quadrature =
                wants ? hjsolve::QuadratureMode::Weno : hjsolve::QuadratureMode::Linear;
            spec.scheme.filter = wants;
            spec.mesh_sizes = {40};
        } else {
            std::fprintf(stderr, "error: either --problem or --config is required\n");
            return 2;
        }

        // Command-line flags override config values.
        const bool is2d = std::holds_alternative<hjsolve::Problem2D>(spec.problem);
        auto* parsed = &app;
        if (parsed->count("--k")) {
            if (k < 1 || k > 3) throw hjsolve::ConfigError("k must be 1, 2 or 3");
            spec.scheme.order = k;
            if (!parsed->count("--beta") && config.empty())
                spec.scheme.beta = 0.0;  // re-derive the default below
        }
        if (parsed->count("--beta")) {
            if (!(beta > 0.0)) throw hjsolve::ConfigError("beta must be > 0");
            spec.scheme.beta = beta;
        }
        if (spec.scheme.beta <= 0.0)
            spec.scheme.beta = hjsolve::default_beta(spec.scheme.order, is2d ? 2 : 1);
        if (parsed->count("--cfl")) {
            if (!(cfl > 0.0)) throw hjsolve::ConfigError("cfl must be > 0");
            spec.scheme.cfl = cfl;
        }
        if (parsed->count("--tfinal")) {
            if (tfinal < 0.0) throw hjsolve::ConfigError("tfinal must be >= 0");
            spec.scheme.t_final = tfinal;
        }
        if (parsed->count("--quadrature"))
            spec.scheme.quadrature = (quadrature == "weno") ? hjsolve::QuadratureMode::Weno
                                                            : hjsolve::QuadratureMode::Linear;
        if (parsed->count("--filter")) spec.scheme.filter = (filter == "on");
        if (parsed->count("--n")) {
            spec.mesh_sizes.clear();
            std::stringstream ss(nlist);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty()) continue;
                const int n = std::stoi(tok);
                if (n < 5) throw hjsolve::ConfigError("N must be >= 5");
                spec.mesh_sizes.push_back(n);
            }
            if (spec.mesh_sizes.empty()) throw hjsolve::ConfigError("--n list is empty");
        }
        if (parsed->count("--mesh")) spec.perturbed = (mesh == "perturbed");
        if (parsed->count("--perturb-rho")) {
            if (!(rho >= 0.0 && rho < 0.5))
                throw hjsolve::ConfigError("perturb-rho must be in [0, 0.5)");
            spec.rho = rho;
        }
        if (parsed->count("--seed")) spec.seed = seed;
        if (parsed->count("--out")) spec.out_path = out;
        if (parsed->count("--format")) spec.format = format;
        if (diagnostics) spec.diagnostics = true;

        if (spec.scheme.beta >
            hjsolve::beta_max_stable(spec.scheme.order, is2d ? 2 : 1) * (1 + 1e-12))
            std::fprintf(stderr, "warning: beta = %g exceeds the stability bound %g\n",
                         spec.scheme.beta,
                         hjsolve::beta_max_stable(spec.scheme.order, is2d ? 2 : 1));

        return run(spec);
    } catch (const hjsolve::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver abort: %s\n", e.what());
        return 3;
    }
}

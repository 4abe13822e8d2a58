#pragma once

// Front-end plumbing shared by the command-line tool and the test suite:
// run specifications, key=value config parsing (including expression-defined
// custom problems), convergence studies, and CSV / SVG export.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hjsolve/expr.hpp"
#include "hjsolve/problem.hpp"
#include "hjsolve/scheme.hpp"

namespace hjsolve {

struct RunSpec {
    std::string problem_name;  // builtin name or "custom"
    Problem problem;
    SchemeConfig scheme;
    std::vector<int> mesh_sizes;  // cells per dimension, nonempty
    bool perturbed = false;
    double rho = 0.1;
    std::uint64_t seed = 0;
    std::string out_path;        // empty = stdout
    std::string format = "csv";  // csv | svg-lines
    bool diagnostics = false;
    bool quadrature_set = false;  // explicit override of the problem default
    bool filter_set = false;
};

struct ConvergenceRow {
    int n = 0;
    double error = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();  // NaN on first row
    double seconds = 0.0;
};

/// Config or usage errors; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cdetail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_num(const std::string& v, const std::string& key, int line) {
    try {
        // Allow simple constant expressions (e.g. T = 0.5/pi^2).
        expr::Expression e(v);
        return e(expr::Env{});
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": invalid numeric value for '" +
                          key + "': " + v);
    }
}

inline BoundaryKind parse_bc(const std::string& v, int line) {
    if (v == "periodic") return BoundaryKind::Periodic;
    if (v == "dirichlet") return BoundaryKind::DirichletInflow;
    if (v == "neumann") return BoundaryKind::NeumannInflow;
    if (v == "outflow") return BoundaryKind::Outflow;
    throw ConfigError("line " + std::to_string(line) + ": unknown boundary kind '" + v + "'");
}

/// d/du of an expression in u via 5-point central differencing; used when a
/// custom problem omits analytic derivatives.
inline std::function<double(double, double, double)> numeric_dH(expr::Expression H) {
    return [H](double u, double x, double t) {
        const double h = 1e-5 * (1.0 + std::fabs(u));
        auto f = [&](double uu) {
            expr::Env e;
            e.u = uu; e.x = x; e.t = t;
            return H(e);
        };
        return (f(u - 2 * h) - 8 * f(u - h) + 8 * f(u + h) - f(u + 2 * h)) / (12 * h);
    };
}

}  // namespace cdetail

/// Parses a key=value config file into a RunSpec. '#' starts a comment.
/// Unknown keys are rejected with the offending line number. A config
/// either names a builtin problem or defines a custom one from expression
/// strings (problem = custom).
inline RunSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    std::map<std::string, std::pair<std::string, int>> kv;
    std::string linebuf;
    int lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        std::string s = linebuf;
        const std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = cdetail::trim(s);
        if (s.empty()) continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = cdetail::trim(s.substr(0, eq));
        const std::string val = cdetail::trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        kv[key] = {val, lineno};
    }

    static const std::vector<std::string> known = {
        "problem", "dim", "k", "beta", "cfl", "N", "T", "quadrature", "filter",
        "mesh", "rho", "seed", "out", "format", "diagnostics",
        "H", "dH", "d2H", "H1", "H2", "phi0", "exact",
        "a", "b", "ax", "bx", "ay", "by",
        "bc_left", "bc_right", "bc_bottom", "bc_top",
        "f_left", "f1_left", "f2_left", "f3_left",
        "f_right", "f1_right", "f2_right", "f3_right"};
    for (const auto& [key, vp] : kv) {
        bool ok = false;
        for (const auto& k : known)
            if (k == key) { ok = true; break; }
        if (!ok)
            throw ConfigError("line " + std::to_string(vp.second) + ": unknown key '" + key + "'");
    }

    auto has = [&](const std::string& k) { return kv.count(k) != 0; };
    auto str = [&](const std::string& k) { return kv.at(k).first; };
    auto num = [&](const std::string& k) {
        return cdetail::parse_num(kv.at(k).first, k, kv.at(k).second);
    };
    auto compiled = [&](const std::string& k) {
        try {
            return expr::Expression(str(k));
        } catch (const std::exception& e) {
            throw ConfigError("line " + std::to_string(kv.at(k).second) + ": in '" + k +
                              "': " + e.what());
        }
    };

    RunSpec spec;
    spec.problem_name = has("problem") ? str("problem") : "custom";

    if (spec.problem_name != "custom") {
        try {
            spec.problem = builtin_problem(spec.problem_name);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    } else {
        const int dim = has("dim") ? static_cast<int>(num("dim")) : 1;
        if (dim == 1) {
            if (!has("H") || !has("phi0"))
                throw ConfigError("custom problem needs at least H and phi0");
            Problem1D p;
            p.name = "custom";
            p.domain_a = has("a") ? num("a") : 0.0;
            p.domain_b = has("b") ? num("b") : 1.0;
            auto H = compiled("H");
            p.ham.H = [H](double u, double x, double t) {
                expr::Env e; e.u = u; e.x = x; e.t = t;
                return H(e);
            };
            if (has("dH")) {
                auto dH = compiled("dH");
                p.ham.dH = [dH](double u, double x, double t) {
                    expr::Env e; e.u = u; e.x = x; e.t = t;
                    return dH(e);
                };
            } else {
                p.ham.dH = cdetail::numeric_dH(H);
            }
            if (has("d2H")) {
                auto d2H = compiled("d2H");
                p.ham.d2H = [d2H](double u) {
                    expr::Env e; e.u = u;
                    return d2H(e);
                };
            }
            auto phi0 = compiled("phi0");
            p.phi0 = [phi0](double x) {
                expr::Env e; e.x = x;
                return phi0(e);
            };
            if (has("exact")) {
                auto ex = compiled("exact");
                p.exact = [ex](double x, double t) {
                    expr::Env e; e.x = x; e.t = t;
                    return ex(e);
                };
            }
            auto fill_side = [&](SideSpec1D& side, const char* kindkey, const char* base) {
                side.kind = has(kindkey) ? cdetail::parse_bc(str(kindkey), kv.at(kindkey).second)
                                         : BoundaryKind::Periodic;
                auto timefn = [&](const std::string& key) -> std::function<double(double)> {
                    if (!has(key)) return [](double) { return 0.0; };
                    auto e = compiled(key);
                    return [e](double t) {
                        expr::Env env; env.t = t;
                        return e(env);
                    };
                };
                side.data.f = timefn(base + std::string());
                side.data.f1 = timefn("f1" + std::string(base).substr(1));
                side.data.f2 = timefn("f2" + std::string(base).substr(1));
                side.data.f3 = timefn("f3" + std::string(base).substr(1));
            };
            fill_side(p.bc.left, "bc_left", "f_left");
            fill_side(p.bc.right, "bc_right", "f_right");
            if ((p.bc.left.kind == BoundaryKind::Periodic) !=
                (p.bc.right.kind == BoundaryKind::Periodic))
                throw ConfigError("custom problem: periodic must apply to both sides");
            spec.problem = std::move(p);
        } else if (dim == 2) {
            if (!has("H") || !has("phi0"))
                throw ConfigError("custom problem needs at least H and phi0");
            Problem2D p;
            p.name = "custom";
            p.ax = has("ax") ? num("ax") : 0.0;
            p.bx = has("bx") ? num("bx") : 1.0;
            p.ay = has("ay") ? num("ay") : 0.0;
            p.by = has("by") ? num("by") : 1.0;
            auto H = compiled("H");
            p.ham.H = [H](double u, double v, double x, double y, double t) {
                expr::Env e; e.u = u; e.v = v; e.x = x; e.y = y; e.t = t;
                return H(e);
            };
            auto partial = [&](const char* key, bool in_u) {
                std::function<double(double, double, double, double, double)> fn;
                if (has(key)) {
                    auto ex = compiled(key);
                    fn = [ex](double u, double v, double x, double y, double t) {
                        expr::Env e; e.u = u; e.v = v; e.x = x; e.y = y; e.t = t;
                        return ex(e);
                    };
                } else {
                    fn = [H, in_u](double u, double v, double x, double y, double t) {
                        const double base = in_u ? u : v;
                        const double h = 1e-5 * (1.0 + std::fabs(base));
                        auto f = [&](double w) {
                            expr::Env e;
                            e.u = in_u ? w : u; e.v = in_u ? v : w;
                            e.x = x; e.y = y; e.t = t;
                            return H(e);
                        };
                        return (f(base - 2 * h) - 8 * f(base - h) + 8 * f(base + h) -
                                f(base + 2 * h)) / (12 * h);
                    };
                }
                return fn;
            };
            p.ham.H1 = partial("H1", true);
            p.ham.H2 = partial("H2", false);
            auto phi0 = compiled("phi0");
            p.phi0 = [phi0](double x, double y) {
                expr::Env e; e.x = x; e.y = y;
                return phi0(e);
            };
            auto kind_of = [&](const char* key) {
                return has(key) ? cdetail::parse_bc(str(key), kv.at(key).second)
                                : BoundaryKind::Periodic;
            };
            p.bc.left.kind = kind_of("bc_left");
            p.bc.right.kind = kind_of("bc_right");
            p.bc.bottom.kind = kind_of("bc_bottom");
            p.bc.top.kind = kind_of("bc_top");
            for (BoundaryKind bk : {p.bc.left.kind, p.bc.right.kind, p.bc.bottom.kind,
                                    p.bc.top.kind})
                if (bk == BoundaryKind::DirichletInflow || bk == BoundaryKind::NeumannInflow)
                    throw ConfigError(
                        "custom 2D problems support periodic and outflow boundaries only");
            if ((p.bc.left.kind == BoundaryKind::Periodic) !=
                    (p.bc.right.kind == BoundaryKind::Periodic) ||
                (p.bc.bottom.kind == BoundaryKind::Periodic) !=
                    (p.bc.top.kind == BoundaryKind::Periodic))
                throw ConfigError("custom problem: periodic must apply to opposite sides");
            spec.problem = std::move(p);
        } else {
            throw ConfigError("dim must be 1 or 2");
        }
    }

    const bool is2d = std::holds_alternative<Problem2D>(spec.problem);
    spec.scheme.order = has("k") ? static_cast<int>(num("k")) : 3;
    if (spec.scheme.order < 1 || spec.scheme.order > 3)
        throw ConfigError("k must be 1, 2 or 3");
    spec.scheme.beta = has("beta") ? num("beta")
                                   : default_beta(spec.scheme.order, is2d ? 2 : 1);
    if (!(spec.scheme.beta > 0.0)) throw ConfigError("beta must be > 0");
    spec.scheme.cfl = has("cfl") ? num("cfl") : 0.5;
    if (!(spec.scheme.cfl > 0.0)) throw ConfigError("cfl must be > 0");
    spec.scheme.t_final = has("T") ? num("T") : 1.0;
    if (spec.scheme.t_final < 0.0) throw ConfigError("T must be >= 0");

    // Problems flagged as kink-forming default to WENO + filter.
    const bool wants_filter = is2d ? std::get<Problem2D>(spec.problem).needs_weno_filter
                                   : std::get<Problem1D>(spec.problem).needs_weno_filter;
    spec.scheme.quadrature = wants_filter ? QuadratureMode::Weno : QuadratureMode::Linear;
    spec.scheme.filter = wants_filter;
    if (has("quadrature")) {
        const std::string q = str("quadrature");
        if (q == "linear") spec.scheme.quadrature = QuadratureMode::Linear;
        else if (q == "weno") spec.scheme.quadrature = QuadratureMode::Weno;
        else throw ConfigError("quadrature must be linear or weno");
        spec.quadrature_set = true;
    }
    if (has("filter")) {
        const std::string f = str("filter");
        if (f == "on") spec.scheme.filter = true;
        else if (f == "off") spec.scheme.filter = false;
        else throw ConfigError("filter must be on or off");
        spec.filter_set = true;
    }

    if (has("N")) {
        std::stringstream ss(str("N"));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = cdetail::trim(tok);
            if (tok.empty()) continue;
            const int n = static_cast<int>(cdetail::parse_num(tok, "N", kv.at("N").second));
            if (n < 5) throw ConfigError("N must be >= 5 (6-point quadrature stencil)");
            spec.mesh_sizes.push_back(n);
        }
    }
    if (spec.mesh_sizes.empty()) spec.mesh_sizes.push_back(40);

    if (has("mesh")) {
        const std::string m = str("mesh");
        if (m == "uniform") spec.perturbed = false;
        else if (m == "perturbed") spec.perturbed = true;
        else throw ConfigError("mesh must be uniform or perturbed");
    }
    if (has("rho")) {
        spec.rho = num("rho");
        if (!(spec.rho >= 0.0 && spec.rho < 0.5)) throw ConfigError("rho must be in [0, 0.5)");
    }
    if (has("seed")) spec.seed = static_cast<std::uint64_t>(num("seed"));
    if (has("out")) spec.out_path = str("out");
    if (has("format")) {
        spec.format = str("format");
        if (spec.format != "csv" && spec.format != "svg-lines")
            throw ConfigError("format must be csv or svg-lines");
    }
    if (has("diagnostics")) spec.diagnostics = (str("diagnostics") == "on" ||
                                                str("diagnostics") == "true" ||
                                                str("diagnostics") == "1");

    if (spec.scheme.beta > beta_max_stable(spec.scheme.order, is2d ? 2 : 1) * (1 + 1e-12))
        std::fprintf(stderr, "warning: beta = %g exceeds the stability bound %g\n",
                     spec.scheme.beta, beta_max_stable(spec.scheme.order, is2d ? 2 : 1));
    return spec;
}

/// Builds the grid(s) for one mesh size per the spec's mesh kind.
inline Grid1D make_grid_1d(const RunSpec& spec, const Problem1D& p, int n) {
    return spec.perturbed ? make_perturbed_grid(p.domain_a, p.domain_b, n, spec.rho, spec.seed)
                          : make_uniform_grid(p.domain_a, p.domain_b, n);
}

inline Grid2D make_grid_2d(const RunSpec& spec, const Problem2D& p, int n) {
    if (spec.perturbed)
        return Grid2D{make_perturbed_grid(p.ax, p.bx, n, spec.rho, spec.seed),
                      make_perturbed_grid(p.ay, p.by, n, spec.rho, spec.seed + 1)};
    return Grid2D{make_uniform_grid(p.ax, p.bx, n), make_uniform_grid(p.ay, p.by, n)};
}

/// Runs the solver over the mesh list and reports L-infinity errors against
/// the exact solution, with observed orders from the actual mesh-size
/// ratios (so non-doubling lists work).
inline std::vector<ConvergenceRow> run_convergence_study(
    const RunSpec& spec, const DiagnosticsCallback& cb = {}) {
    const bool is2d = std::holds_alternative<Problem2D>(spec.problem);
    if (is2d ? !std::get<Problem2D>(spec.problem).exact
             : !std::get<Problem1D>(spec.problem).exact)
        throw ConfigError("convergence study requires a problem with an exact solution");

    std::vector<ConvergenceRow> rows;
    for (int n : spec.mesh_sizes) {
        ConvergenceRow row;
        row.n = n;
        const auto t0 = std::chrono::steady_clock::now();
        double err = 0.0;
        try {
            if (is2d) {
                const auto& p = std::get<Problem2D>(spec.problem);
                const Grid2D g = make_grid_2d(spec, p, n);
                const Field2D f = run_solver_2d(p, g, spec.scheme, cb);
                for (int j = 0; j < f.ny; ++j)
                    for (int i = 0; i < f.nx; ++i)
                        err = std::max(err, std::fabs(f.at(i, j) -
                                                      p.exact(g.x.node(i), g.y.node(j),
                                                              f.time)));
            } else {
                const auto& p = std::get<Problem1D>(spec.problem);
                const Grid1D g = make_grid_1d(spec, p, n);
                const Field1D f = run_solver_1d(p, g, spec.scheme, cb);
                for (int i = 0; i < g.num_nodes(); ++i)
                    err = std::max(err, std::fabs(f.values[static_cast<std::size_t>(i)] -
                                                  p.exact(g.node(i), f.time)));
            }
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("mesh N = " + std::to_string(n) + ": " + e.what());
        }
        const auto t1 = std::chrono::steady_clock::now();
        row.error = err;
        row.seconds = std::chrono::duration<double>(t1 - t0).count();
        if (!rows.empty() && rows.back().error > 0.0 && err > 0.0)
            row.order = std::log(rows.back().error / err) /
                        std::log(static_cast<double>(n) / rows.back().n);
        rows.push_back(row);
    }
    return rows;
}

inline void write_convergence_csv(const std::vector<ConvergenceRow>& rows, bool is2d,
                                  std::ostream& os) {
    os << (is2d ? "N,error_linf,order,seconds\n" : "N,error_linf,order,seconds\n");
    for (const auto& r : rows) {
        os << r.n << "," << cdetail::fmt17(r.error) << ",";
        if (std::isfinite(r.order)) os << cdetail::fmt17(r.order);
        os << "," << cdetail::fmt17(r.seconds) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Solution export
// ---------------------------------------------------------------------------

inline void export_solution_csv(const Field1D& f, const Grid1D& g, std::ostream& os) {
    os << "x,phi\n";
    for (int i = 0; i < g.num_nodes(); ++i)
        os << cdetail::fmt17(g.node(i)) << ","
           << cdetail::fmt17(f.values[static_cast<std::size_t>(i)]) << "\n";
}

/// Row-major: x varies fastest, one row per (y, x) pair.
inline void export_solution_csv(const Field2D& f, const Grid2D& g, std::ostream& os) {
    os << "x,y,phi\n";
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i)
            os << cdetail::fmt17(g.x.node(i)) << "," << cdetail::fmt17(g.y.node(j)) << ","
               << cdetail::fmt17(f.at(i, j)) << "\n";
}

namespace cdetail {

inline void svg_header(std::ostream& os, double w, double h) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
}

}  // namespace cdetail

/// 1D curve as a single SVG polyline (value axis flipped so larger phi is up).
inline void export_solution_svg(const Field1D& f, const Grid1D& g, std::ostream& os) {
    const double W = 800, H = 500, pad = 40;
    double lo = f.values[0], hi = f.values[0];
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-300) hi = lo + 1.0;
    cdetail::svg_header(os, W, H);
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < g.num_nodes(); ++i) {
        const double px = pad + (g.node(i) - g.a()) / g.length() * (W - 2 * pad);
        const double py = H - pad -
                          (f.values[static_cast<std::size_t>(i)] - lo) / (hi - lo) *
                              (H - 2 * pad);
        os << cdetail::fmt17(px) << "," << cdetail::fmt17(py) << " ";
    }
    os << "\"/>\n</svg>\n";
}

/// 2D field as a contour polyline set: marching-squares segments at 12
/// evenly spaced levels.
inline void export_solution_svg(const Field2D& f, const Grid2D& g, std::ostream& os) {
    const double W = 600, H = 600, pad = 40;
    double lo = f.values[0], hi = f.values[0];
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-300) hi = lo + 1.0;
    auto px = [&](double x) { return pad + (x - g.x.a()) / g.x.length() * (W - 2 * pad); };
    auto py = [&](double y) { return H - pad - (y - g.y.a()) / g.y.length() * (H - 2 * pad); };
    cdetail::svg_header(os, W, H);
    const int levels = 12;
    for (int l = 1; l <= levels; ++l) {
        const double c = lo + (hi - lo) * l / (levels + 1.0);
        os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
        for (int j = 0; j + 1 < f.ny; ++j) {
            for (int i = 0; i + 1 < f.nx; ++i) {
                // Cell corners, counterclockwise from (i,j).
                const double v00 = f.at(i, j), v10 = f.at(i + 1, j);
                const double v11 = f.at(i + 1, j + 1), v01 = f.at(i, j + 1);
                const double x0 = g.x.node(i), x1 = g.x.node(i + 1);
                const double y0 = g.y.node(j), y1 = g.y.node(j + 1);
                struct Pt { double x, y; };
                Pt pts[4];
                int np = 0;
                auto edge = [&](double va, double vb, double xa, double ya, double xb,
                                double yb) {
                    if ((va < c) == (vb < c)) return;
                    const double s = (c - va) / (vb - va);
                    pts[np++] = Pt{xa + s * (xb - xa), ya + s * (yb - ya)};
                };
                edge(v00, v10, x0, y0, x1, y0);
                edge(v10, v11, x1, y0, x1, y1);
                edge(v11, v01, x1, y1, x0, y1);
                edge(v01, v00, x0, y1, x0, y0);
                for (int s = 0; s + 1 < np; s += 2)
                    os << "<line x1=\"" << cdetail::fmt17(px(pts[s].x)) << "\" y1=\""
                       << cdetail::fmt17(py(pts[s].y)) << "\" x2=\""
                       << cdetail::fmt17(px(pts[s + 1].x)) << "\" y2=\""
                       << cdetail::fmt17(py(pts[s + 1].y)) << "\"/>\n";
            }
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Diagnostics dump
// ---------------------------------------------------------------------------

/// Per-cell smoothness diagnostics of the left-biased quadrature on a given
/// field: beta_r, omega_r, xi for every interior cell.
inline void write_weno_diagnostics_csv(const std::vector<double>& values,
                                       const ConvolutionKernel& kernel,
                                       std::ostream& os) {
    os << "cell,beta0,beta1,beta2,omega0,omega1,omega2,xi\n";
    const int n = kernel.grid().num_cells();
    for (int i = 1; i <= n; ++i) {
        const CellWeights& cw = kernel.left_cell(i);
        if (!cw.weno_ok) continue;
        std::array<double, 4> v0{}, v1{}, v2{};
        std::array<double, 3> beta{};
        for (int r = 0; r < 3; ++r) {
            double c1 = 0, c2 = 0;
            for (int j = 0; j < 4; ++j) {
                const double v =
                    values[static_cast<std::size_t>(cw.vidx[static_cast<std::size_t>(r + j)])];
                c1 += cw.c1map[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * v;
                c2 += cw.c2map[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * v;
                if (r == 0) v0[static_cast<std::size_t>(j)] = v;
                if (r == 1) v1[static_cast<std::size_t>(j)] = v;
                if (r == 2) v2[static_cast<std::size_t>(j)] = v;
            }
            beta[static_cast<std::size_t>(r)] = c1 * c1 + c1 * c2 + c2 * c2 / 3.0 + c2 * c2;
        }
        const WenoCell wc = qdetail::weno_eval(cw, v0, v1, v2);
        os << i;
        for (double b : beta) os << "," << cdetail::fmt17(b);
        for (double w : wc.omega) os << "," << cdetail::fmt17(w);
        os << "," << cdetail::fmt17(wc.xi) << "\n";
    }
}

}  // namespace hjsolve

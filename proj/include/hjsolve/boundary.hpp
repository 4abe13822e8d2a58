#pragma once

// Boundary derivative recovery. Inflow boundaries convert prescribed data
// f(t) (value) or g(t) (normal derivative) into spatial derivatives of phi
// at the wall by repeatedly differentiating phi_t + H(grad phi) = 0 along
// the boundary; outflow boundaries extrapolate from the interior.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hjsolve/operators.hpp"
#include "hjsolve/problem.hpp"

namespace hjsolve {

struct IlwOptions {
    double bracket_radius_scale = 10.0;  // radius = scale * (1 + |guess|)
    int scan_samples = 512;
    double root_tol = 1e-13;
    double dH_floor = 1e-10;  // below this the wall is characteristic
};

namespace bdetail {

/// Derivatives (orders 0..deg) of the degree-`deg` interpolant through the
/// given nodes, evaluated at x0. Vandermonde solve in long double.
inline std::array<double, 6> poly_derivatives(const double* xs, const double* vs,
                                              int npts, double x0) {
    if (npts < 1 || npts > 6)
        throw std::invalid_argument("poly_derivatives: need 1..6 points");
    long double A[36], b[6];
    for (int r = 0; r < npts; ++r) {
        const long double dx = xs[r] - x0;
        long double p = 1.0L;
        for (int m = 0; m < npts; ++m) {
            A[r * npts + m] = p;
            p *= dx;
        }
        b[r] = vs[r];
    }
    if (!qdetail::solve_dense(npts, A, b))
        throw std::runtime_error("poly_derivatives: singular interpolation system");
    std::array<double, 6> d{};
    long double fact = 1.0L;
    for (int m = 0; m < npts; ++m) {
        if (m > 0) fact *= m;
        d[static_cast<std::size_t>(m)] = static_cast<double>(fact * b[m]);
    }
    return d;
}

/// Sign-change roots of fn over the sorted breakpoints, refined by bisection.
template <class F>
std::vector<double> refine_sign_changes(F&& fn, const std::vector<double>& pts,
                                        const IlwOptions& opt) {
    std::vector<double> roots;
    double xp = pts.front(), fp = fn(xp);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double xc = pts[i];
        const double fc = fn(xc);
        if (fp == 0.0) {
            roots.push_back(xp);
        } else if ((fp < 0.0) != (fc < 0.0)) {
            double a = xp, b = xc, fa = fp;
            while (b - a > opt.root_tol * (1.0 + std::fabs(a))) {
                const double mid = 0.5 * (a + b);
                const double fm = fn(mid);
                if (fm == 0.0) { a = b = mid; break; }
                if ((fa < 0.0) != (fm < 0.0)) b = mid;
                else { a = mid; fa = fm; }
            }
            roots.push_back(0.5 * (a + b));
        }
        xp = xc;
        fp = fc;
    }
    if (fp == 0.0) roots.push_back(xp);
    return roots;
}

/// All sign-change roots of fn on [lo, hi], each refined by bisection.
template <class F>
std::vector<double> find_roots(F&& fn, double lo, double hi, const IlwOptions& opt) {
    std::vector<double> pts(static_cast<std::size_t>(opt.scan_samples) + 1);
    for (int i = 0; i <= opt.scan_samples; ++i)
        pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / opt.scan_samples;
    return refine_sign_changes(fn, pts, opt);
}

/// As above, but the scan is additionally split at the critical points of fn
/// (sign changes of dfn). A pair of roots straddling an extremum can sit
/// inside one scan subinterval without a sign change at its ends; cutting at
/// the extremum makes each monotone piece visible to the scan.
template <class F, class DF>
std::vector<double> find_roots(F&& fn, DF&& dfn, double lo, double hi,
                               const IlwOptions& opt) {
    std::vector<double> pts(static_cast<std::size_t>(opt.scan_samples) + 1);
    for (int i = 0; i <= opt.scan_samples; ++i)
        pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / opt.scan_samples;
    const std::vector<double> crit = refine_sign_changes(dfn, pts, opt);
    pts.insert(pts.end(), crit.begin(), crit.end());
    std::sort(pts.begin(), pts.end());
    return refine_sign_changes(fn, pts, opt);
}

/// Among the roots, keep those whose characteristics enter the domain
/// (H' > 0 at a left wall, H' < 0 at a right wall) and return the one
/// nearest the extrapolated guess.
template <class DH>
double select_inflow_root(const std::vector<double>& roots, DH&& dH, Side side,
                          double guess, const IlwOptions& opt, const char* what) {
    double best = 0.0;
    bool have = false;
    for (double r : roots) {
        const double s = dH(r);
        const bool inflow = (side == Side::Left) ? (s > opt.dH_floor) : (s < -opt.dH_floor);
        if (!inflow) continue;
        if (!have || std::fabs(r - guess) < std::fabs(best - guess)) {
            best = r;
            have = true;
        }
    }
    if (!have)
        throw std::runtime_error(std::string(what) +
                                 ": no inflow-compatible root of the wall equation");
    return best;
}

}  // namespace bdetail

/// Derivatives of the degree-(k+1) interpolant through the k+2 nodes nearest
/// the chosen boundary, evaluated at that boundary.
inline BoundaryDerivatives extrapolate_derivatives(const Grid1D& grid,
                                                   const std::vector<double>& values,
                                                   Side side, int k) {
    if (k < 1 || k > 3)
        throw std::invalid_argument("extrapolate_derivatives: k must be 1..3");
    const int npts = k + 2;
    const int nn = grid.num_nodes();
    if (nn < npts)
        throw std::invalid_argument("extrapolate_derivatives: grid too small");
    std::array<double, 6> xs{}, vs{};
    const int start = (side == Side::Left) ? 0 : nn - npts;
    for (int j = 0; j < npts; ++j) {
        xs[static_cast<std::size_t>(j)] = grid.node(start + j);
        vs[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(start + j)];
    }
    const double xb = (side == Side::Left) ? grid.a() : grid.b();
    const auto d = bdetail::poly_derivatives(xs.data(), vs.data(), npts, xb);
    BoundaryDerivatives out;
    out.side = side;
    out.order = k;
    out.provenance = DerivProvenance::Extrapolation;
    for (int m = 1; m <= k; ++m) out.d[static_cast<std::size_t>(m - 1)] = d[static_cast<std::size_t>(m)];
    return out;
}

/// Dirichlet wall phi = f(t): solves H(u; x_b, t) = -f'(t) for the normal
/// derivative u, then recovers the higher ones from time derivatives of the
/// equation. `guess` seeds the root selection (extrapolated interior value).
inline BoundaryDerivatives ilw_dirichlet_1d(const Hamiltonian1D& ham, Side side,
                                            double x_b, const BoundaryData1D& data,
                                            double t, double guess, int k,
                                            const IlwOptions& opt = {}) {
    if (k < 1 || k > 3) throw std::invalid_argument("ilw_dirichlet_1d: k must be 1..3");
    const double rhs = -data.f1(t);
    auto res = [&](double u) { return ham.H(u, x_b, t) - rhs; };
    const double radius = opt.bracket_radius_scale * (1.0 + std::fabs(guess));
    auto dH = [&](double u) { return ham.dH(u, x_b, t); };
    const auto roots = bdetail::find_roots(res, dH, guess - radius, guess + radius, opt);
    const double u = bdetail::select_inflow_root(roots, dH, side, guess, opt,
                                                 "ilw_dirichlet_1d");
    BoundaryDerivatives out;
    out.side = side;
    out.order = k;
    out.provenance = DerivProvenance::ILW;
    out.d[0] = u;
    if (k >= 2) {
        const double hp = ham.dH(u, x_b, t);
        out.d[1] = data.f2(t) / (hp * hp);
        if (k >= 3) {
            const double hpp = ham.d2H ? ham.d2H(u) : 0.0;
            out.d[2] = -(data.f3(t) + 3.0 * hpp * hp * hp * out.d[1] * out.d[1]) /
                       (hp * hp * hp);
        }
    }
    return out;
}

/// Neumann wall phi_x = g(t). The wall must be non-characteristic:
/// |H'(g)| above the floor, with the inflow sign for this side.
inline BoundaryDerivatives ilw_neumann_1d(const Hamiltonian1D& ham, Side side,
                                          double x_b, const BoundaryData1D& data,
                                          double t, int k, const IlwOptions& opt = {}) {
    if (k < 1 || k > 3) throw std::invalid_argument("ilw_neumann_1d: k must be 1..3");
    const double g = data.f(t);
    const double hp = ham.dH(g, x_b, t);
    const bool inflow = (side == Side::Left) ? (hp > opt.dH_floor) : (hp < -opt.dH_floor);
    if (!inflow)
        throw std::runtime_error("ilw_neumann_1d: wall is characteristic or outflow");
    BoundaryDerivatives out;
    out.side = side;
    out.order = k;
    out.provenance = DerivProvenance::ILW;
    out.d[0] = g;
    if (k >= 2) {
        out.d[1] = -data.f1(t) / hp;
        if (k >= 3) {
            const double hpp = ham.d2H ? ham.d2H(g) : 0.0;
            const double g1 = data.f1(t);
            const double phi_txx = -data.f2(t) / hp + g1 * g1 * hpp / (hp * hp);
            out.d[2] = -(phi_txx + hpp * out.d[1] * out.d[1]) / hp;
        }
    }
    return out;
}

/// Dirichlet edge of a 2D domain. `normal_is_x` selects which argument of H
/// is the normal derivative; `s` is the tangential coordinate of the node.
/// Fills normal-derivative orders 1 and 2 (the third comes from
/// extrapolation when k = 3) plus the mixed derivative via `mixed_out`.
inline BoundaryDerivatives ilw_dirichlet_2d(const Hamiltonian2D& ham, Side side,
                                            bool normal_is_x, double xb, double s,
                                            const BoundaryData2D& data, double t,
                                            double guess, int k,
                                            double* mixed_out = nullptr,
                                            const IlwOptions& opt = {}) {
    if (k < 1 || k > 3) throw std::invalid_argument("ilw_dirichlet_2d: k must be 1..3");
    const double tang = data.f_s(s, t);  // derivative of phi along the edge
    const double x = normal_is_x ? xb : s;
    const double y = normal_is_x ? s : xb;
    auto Hn = [&](double un) {
        return normal_is_x ? ham.H(un, tang, x, y, t) : ham.H(tang, un, x, y, t);
    };
    auto Hn1 = [&](double un) {  // d H / d(normal derivative)
        return normal_is_x ? ham.H1(un, tang, x, y, t) : ham.H2(tang, un, x, y, t);
    };
    auto Hn2 = [&](double un) {  // d H / d(tangential derivative)
        return normal_is_x ? ham.H2(un, tang, x, y, t) : ham.H1(tang, un, x, y, t);
    };
    const double rhs = -data.f_t(s, t);
    auto res = [&](double u) { return Hn(u) - rhs; };
    const double radius = opt.bracket_radius_scale * (1.0 + std::fabs(guess));
    const auto roots = bdetail::find_roots(res, Hn1, guess - radius, guess + radius, opt);
    const double u = bdetail::select_inflow_root(roots, Hn1, side, guess, opt,
                                                 "ilw_dirichlet_2d");
    BoundaryDerivatives out;
    out.side = side;
    out.order = std::min(k, 2);
    out.provenance = DerivProvenance::ILW;
    out.d[0] = u;
    const double h1 = Hn1(u);
    const double h2 = Hn2(u);
    const double mixed = -(data.f_ts(s, t) + h2 * data.f_ss(s, t)) / h1;
    if (mixed_out) *mixed_out = mixed;
    if (k >= 2)
        out.d[1] = (data.f_tt(s, t) - 2.0 * h1 * h2 * mixed - h2 * h2 * data.f_ss(s, t)) /
                   (h1 * h1);
    return out;
}

/// Neumann edge of a 2D domain: g(s,t) prescribes the normal derivative.
/// `tang` is the tangential derivative of phi at the node, recovered from
/// the evolving edge values by the caller.
inline BoundaryDerivatives ilw_neumann_2d(const Hamiltonian2D& ham, Side side,
                                          bool normal_is_x, double xb, double s,
                                          const BoundaryData2D& data, double t,
                                          double tang, int k,
                                          const IlwOptions& opt = {}) {
    if (k < 1 || k > 3) throw std::invalid_argument("ilw_neumann_2d: k must be 1..3");
    const double g = data.f(s, t);
    const double x = normal_is_x ? xb : s;
    const double y = normal_is_x ? s : xb;
    const double h1 = normal_is_x ? ham.H1(g, tang, x, y, t) : ham.H2(tang, g, x, y, t);
    const double h2 = normal_is_x ? ham.H2(g, tang, x, y, t) : ham.H1(tang, g, x, y, t);
    const bool inflow = (side == Side::Left) ? (h1 > opt.dH_floor) : (h1 < -opt.dH_floor);
    if (!inflow)
        throw std::runtime_error("ilw_neumann_2d: wall is characteristic or outflow");
    BoundaryDerivatives out;
    out.side = side;
    out.order = std::min(k, 2);
    out.provenance = DerivProvenance::ILW;
    out.d[0] = g;
    if (k >= 2) out.d[1] = -(data.f_t(s, t) + h2 * data.f_s(s, t)) / h1;
    return out;
}

/// 4th-order derivative of edge values along the edge at node j, from the
/// degree-4 interpolant through the 5 nearest nodes (one-sided near the
/// ends, so corners need no ghost data).
inline double tangential_derivative(const Grid1D& edge_grid,
                                    const std::vector<double>& edge_values, int j) {
    const int nn = edge_grid.num_nodes();
    if (nn < 5) throw std::invalid_argument("tangential_derivative: need 5 nodes");
    const int start = std::clamp(j - 2, 0, nn - 5);
    double xs[5], vs[5];
    for (int m = 0; m < 5; ++m) {
        xs[m] = edge_grid.node(start + m);
        vs[m] = edge_values[static_cast<std::size_t>(start + m)];
    }
    const auto d = bdetail::poly_derivatives(xs, vs, 5, edge_grid.node(j));
    return d[1];
}

}  // namespace hjsolve

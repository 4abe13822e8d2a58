#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hjsolve {

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// Scalar Hamiltonian H(u; x, t) with analytic derivatives. The optional
/// wave_speed callback returns a certified bound for max |H'(u)| over
/// [u_lo, u_hi]; when absent, dense sampling is used instead.
struct Hamiltonian1D {
    std::function<double(double u, double x, double t)> H;
    std::function<double(double u, double x, double t)> dH;
    std::function<double(double u)> d2H;  // may be null when never needed
    std::function<double(double u_lo, double u_hi)> wave_speed;  // optional
};

/// H(u, v; x, y, t) with partials H1, H2 in the derivative arguments.
/// alpha_x / alpha_y, when provided, bound max |H1| / max |H2| over the
/// box [u_lo,u_hi] x [v_lo,v_hi].
struct Hamiltonian2D {
    std::function<double(double u, double v, double x, double y, double t)> H;
    std::function<double(double u, double v, double x, double y, double t)> H1;
    std::function<double(double u, double v, double x, double y, double t)> H2;
    std::function<double(double u_lo, double u_hi, double v_lo, double v_hi)> alpha_x;
    std::function<double(double u_lo, double u_hi, double v_lo, double v_hi)> alpha_y;
};

// ---------------------------------------------------------------------------
// Boundary specification
// ---------------------------------------------------------------------------

enum class BoundaryKind { Periodic, DirichletInflow, NeumannInflow, Outflow };

/// Dirichlet data f(t) (or Neumann g(t)) with the time derivatives the ILW
/// cascade consumes. All supplied analytically by the problem definition.
struct BoundaryData1D {
    std::function<double(double t)> f;   // f or g
    std::function<double(double t)> f1;  // d/dt
    std::function<double(double t)> f2;
    std::function<double(double t)> f3;
};

/// Dirichlet data f(s,t) along an edge (s = tangential coordinate), or
/// Neumann g(s,t). Partial derivatives as needed by the 2D ILW cascade.
struct BoundaryData2D {
    std::function<double(double s, double t)> f;
    std::function<double(double s, double t)> f_t;
    std::function<double(double s, double t)> f_tt;
    std::function<double(double s, double t)> f_s;
    std::function<double(double s, double t)> f_ss;
    std::function<double(double s, double t)> f_ts;
};

struct SideSpec1D {
    BoundaryKind kind = BoundaryKind::Periodic;
    BoundaryData1D data;
};

struct SideSpec2D {
    BoundaryKind kind = BoundaryKind::Periodic;
    BoundaryData2D data;
};

struct BoundarySpec1D {
    SideSpec1D left, right;
    bool periodic() const { return left.kind == BoundaryKind::Periodic; }
};

struct BoundarySpec2D {
    SideSpec2D left, right, bottom, top;
    bool periodic_x() const { return left.kind == BoundaryKind::Periodic; }
    bool periodic_y() const { return bottom.kind == BoundaryKind::Periodic; }
};

// ---------------------------------------------------------------------------
// Problem instances
// ---------------------------------------------------------------------------

struct Problem1D {
    std::string name;
    double domain_a = 0.0, domain_b = 1.0;
    Hamiltonian1D ham;
    std::function<double(double x)> phi0;
    std::function<double(double x)> dphi0;  // optional, used by exact solutions
    BoundarySpec1D bc;
    std::function<double(double x, double t)> exact;  // null when not known
    bool needs_weno_filter = false;
};

struct Problem2D {
    std::string name;
    double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
    Hamiltonian2D ham;
    std::function<double(double x, double y)> phi0;
    BoundarySpec2D bc;
    std::function<double(double x, double y, double t)> exact;
    bool needs_weno_filter = false;
};

using Problem = std::variant<Problem1D, Problem2D>;

// ---------------------------------------------------------------------------
// Wave speed bounds
// ---------------------------------------------------------------------------

/// Certified upper bound for max |H'(u)| on [u_lo, u_hi]. Uses the analytic
/// bound when the Hamiltonian carries one, otherwise dense sampling plus
/// interval endpoints.
inline double wave_speed_1d(const Hamiltonian1D& ham, double u_lo, double u_hi,
                            double x = 0.0, double t = 0.0) {
    if (u_lo > u_hi) std::swap(u_lo, u_hi);
    if (ham.wave_speed) return ham.wave_speed(u_lo, u_hi);
    if (u_hi - u_lo == 0.0) return std::fabs(ham.dH(u_lo, x, t));
    double m = 0.0;
    const int samples = 256;
    for (int i = 0; i <= samples; ++i) {
        const double u = u_lo + (u_hi - u_lo) * i / samples;
        m = std::max(m, std::fabs(ham.dH(u, x, t)));
    }
    return m;
}

namespace detail {

/// max |sin(w)| for w in [lo, hi].
inline double max_abs_sin(double lo, double hi) {
    if (hi - lo >= M_PI) return 1.0;
    // A critical point pi/2 + k*pi inside [lo,hi] forces the max to 1.
    const double k = std::ceil((lo - M_PI / 2) / M_PI);
    if (M_PI / 2 + k * M_PI <= hi) return 1.0;
    return std::max(std::fabs(std::sin(lo)), std::fabs(std::sin(hi)));
}

inline double max_abs_cos(double lo, double hi) {
    return max_abs_sin(lo + M_PI / 2, hi + M_PI / 2);
}

/// Smooth-time solution of phi_t + h(phi_x) = 0 by tracing the
/// characteristic through (x, t) back to its foot point. Valid only
/// before derivative discontinuities form. phi0/dphi0 must be globally
/// defined (periodic extension is analytic for the benchmarks).
struct CharacteristicSolution {
    std::function<double(double p)> h;
    std::function<double(double p)> dh;
    std::function<double(double x)> phi0;
    std::function<double(double x)> dphi0;
    double speed_bound;  // max |h'(dphi0)| over the data range

    double operator()(double x, double t) const {
        if (t == 0.0) return phi0(x);
        const double pad = 1e-6 + 0.1 * speed_bound * t;
        double lo = x - speed_bound * t - pad;
        double hi = x + speed_bound * t + pad;
        auto residual = [&](double x0) { return x0 + t * dh(dphi0(x0)) - x; };
        // Scan for the bracketing interval, then bisect.
        const int scan = 400;
        double prev_x = lo, prev_f = residual(lo);
        double rlo = lo, rhi = hi;
        bool found = false;
        for (int i = 1; i <= scan; ++i) {
            const double xi = lo + (hi - lo) * i / scan;
            const double fi = residual(xi);
            if (prev_f == 0.0) { rlo = rhi = prev_x; found = true; break; }
            if ((prev_f < 0.0) != (fi < 0.0)) { rlo = prev_x; rhi = xi; found = true; break; }
            prev_x = xi; prev_f = fi;
        }
        if (!found)
            throw std::runtime_error("characteristic foot point not bracketed (past shock time?)");
        for (int it = 0; it < 200 && rhi - rlo > 1e-15 * (1.0 + std::fabs(rlo)); ++it) {
            const double mid = 0.5 * (rlo + rhi);
            if ((residual(rlo) < 0.0) != (residual(mid) < 0.0)) rhi = mid;
            else rlo = mid;
        }
        const double x0 = 0.5 * (rlo + rhi);
        const double p = dphi0(x0);
        return phi0(x0) + t * (p * dh(p) - h(p));
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Builtin benchmark problems
// ---------------------------------------------------------------------------

Problem builtin_problem(const std::string& name);

inline std::vector<std::string> builtin_problem_names() {
    return {"linear_advection",      "burgers_1d",   "nonconvex_1d",
            "riemann_nonconvex_1d",  "burgers_2d",   "nonconvex_2d",
            "riemann_nonconvex_2d",  "control_2d",   "surface_flat"};
}

inline Problem builtin_problem(const std::string& name) {
    using detail::CharacteristicSolution;

    if (name == "linear_advection") {
        Problem1D p;
        p.name = name;
        p.domain_a = -M_PI; p.domain_b = M_PI;
        p.ham.H = [](double u, double, double) { return u; };
        p.ham.dH = [](double, double, double) { return 1.0; };
        p.ham.d2H = [](double) { return 0.0; };
        p.ham.wave_speed = [](double, double) { return 1.0; };
        p.phi0 = [](double x) { return std::sin(x); };
        p.dphi0 = [](double x) { return std::cos(x); };
        p.bc.left.kind = BoundaryKind::DirichletInflow;
        p.bc.left.data.f = [](double t) { return std::sin(-M_PI - t); };
        p.bc.left.data.f1 = [](double t) { return -std::cos(-M_PI - t); };
        p.bc.left.data.f2 = [](double t) { return -std::sin(-M_PI - t); };
        p.bc.left.data.f3 = [](double t) { return std::cos(-M_PI - t); };
        p.bc.right.kind = BoundaryKind::Outflow;
        p.exact = [](double x, double t) { return std::sin(x - t); };
        return p;
    }

    if (name == "burgers_1d") {
        Problem1D p;
        p.name = name;
        p.domain_a = -1.0; p.domain_b = 1.0;
        p.ham.H = [](double u, double, double) { return 0.5 * (u + 1) * (u + 1); };
        p.ham.dH = [](double u, double, double) { return u + 1; };
        p.ham.d2H = [](double) { return 1.0; };
        p.ham.wave_speed = [](double lo, double hi) {
            return std::max(std::fabs(lo + 1), std::fabs(hi + 1));
        };
        p.phi0 = [](double x) { return -std::cos(M_PI * x); };
        p.dphi0 = [](double x) { return M_PI * std::sin(M_PI * x); };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Periodic;
        CharacteristicSolution cs{
            [](double u) { return 0.5 * (u + 1) * (u + 1); },
            [](double u) { return u + 1; },
            p.phi0, p.dphi0, 1.0 + M_PI};
        p.exact = [cs](double x, double t) { return cs(x, t); };
        return p;
    }

    if (name == "nonconvex_1d") {
        Problem1D p;
        p.name = name;
        p.domain_a = -1.0; p.domain_b = 1.0;
        p.ham.H = [](double u, double, double) { return -std::cos(u + 1); };
        p.ham.dH = [](double u, double, double) { return std::sin(u + 1); };
        p.ham.d2H = [](double u) { return std::cos(u + 1); };
        p.ham.wave_speed = [](double lo, double hi) {
            return detail::max_abs_sin(lo + 1, hi + 1);
        };
        p.phi0 = [](double x) { return -std::cos(M_PI * x); };
        p.dphi0 = [](double x) { return M_PI * std::sin(M_PI * x); };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Periodic;
        CharacteristicSolution cs{
            [](double u) { return -std::cos(u + 1); },
            [](double u) { return std::sin(u + 1); },
            p.phi0, p.dphi0, 1.0};
        p.exact = [cs](double x, double t) { return cs(x, t); };
        return p;
    }

    if (name == "riemann_nonconvex_1d") {
        Problem1D p;
        p.name = name;
        p.domain_a = -1.0; p.domain_b = 1.0;
        p.ham.H = [](double u, double, double) {
            return 0.25 * (u * u - 1.0) * (u * u - 4.0);
        };
        p.ham.dH = [](double u, double, double) { return u * u * u - 2.5 * u; };
        p.ham.d2H = [](double u) { return 3.0 * u * u - 2.5; };
        p.ham.wave_speed = [](double lo, double hi) {
            auto s = [](double u) { return std::fabs(u * u * u - 2.5 * u); };
            double m = std::max(s(lo), s(hi));
            const double c = std::sqrt(5.0 / 6.0);  // critical points of H'
            if (lo <= c && c <= hi) m = std::max(m, s(c));
            if (lo <= -c && -c <= hi) m = std::max(m, s(-c));
            return m;
        };
        p.phi0 = [](double x) { return -2.0 * std::fabs(x); };
        p.dphi0 = [](double x) { return x < 0 ? 2.0 : -2.0; };
        p.bc.left.kind = BoundaryKind::DirichletInflow;
        p.bc.left.data.f = [](double) { return -2.0; };
        p.bc.left.data.f1 = [](double) { return 0.0; };
        p.bc.left.data.f2 = [](double) { return 0.0; };
        p.bc.left.data.f3 = [](double) { return 0.0; };
        p.bc.right = p.bc.left;
        p.bc.right.kind = BoundaryKind::DirichletInflow;
        p.needs_weno_filter = true;
        return p;
    }

    if (name == "burgers_2d" || name == "nonconvex_2d") {
        const bool burgers = (name == "burgers_2d");
        Problem2D p;
        p.name = name;
        p.ax = -2.0; p.bx = 2.0; p.ay = -2.0; p.by = 2.0;
        if (burgers) {
            p.ham.H = [](double u, double v, double, double, double) {
                const double w = u + v + 1;
                return 0.5 * w * w;
            };
            p.ham.H1 = p.ham.H2 = [](double u, double v, double, double, double) {
                return u + v + 1;
            };
            auto bound = [](double ulo, double uhi, double vlo, double vhi) {
                return std::max(std::fabs(ulo + vlo + 1), std::fabs(uhi + vhi + 1));
            };
            p.ham.alpha_x = p.ham.alpha_y = bound;
        } else {
            p.ham.H = [](double u, double v, double, double, double) {
                return -std::cos(u + v + 1);
            };
            p.ham.H1 = p.ham.H2 = [](double u, double v, double, double, double) {
                return std::sin(u + v + 1);
            };
            auto bound = [](double ulo, double uhi, double vlo, double vhi) {
                return detail::max_abs_sin(ulo + vlo + 1, uhi + vhi + 1);
            };
            p.ham.alpha_x = p.ham.alpha_y = bound;
        }
        p.phi0 = [](double x, double y) { return -std::cos(M_PI * (x + y) / 2); };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Periodic;
        p.bc.bottom.kind = p.bc.top.kind = BoundaryKind::Periodic;
        // The solution depends on s = (x+y)/2 only and solves the matching
        // 1D problem in s: with phi_x = phi_y = psi_s / 2, the Hamiltonian
        // becomes h(psi_s).
        auto psi0 = [](double s) { return -std::cos(M_PI * s); };
        auto dpsi0 = [](double s) { return M_PI * std::sin(M_PI * s); };
        CharacteristicSolution cs{
            burgers ? std::function<double(double)>(
                          [](double q) { return 0.5 * (q + 1) * (q + 1); })
                    : std::function<double(double)>(
                          [](double q) { return -std::cos(q + 1); }),
            burgers ? std::function<double(double)>([](double q) { return q + 1; })
                    : std::function<double(double)>(
                          [](double q) { return std::sin(q + 1); }),
            psi0, dpsi0, burgers ? 1.0 + M_PI : 1.0};
        p.exact = [cs](double x, double y, double t) { return cs((x + y) / 2, t); };
        return p;
    }

    if (name == "riemann_nonconvex_2d") {
        Problem2D p;
        p.name = name;
        p.ax = -1.0; p.bx = 1.0; p.ay = -1.0; p.by = 1.0;
        p.ham.H = [](double u, double v, double, double, double) {
            return std::sin(u + v);
        };
        p.ham.H1 = p.ham.H2 = [](double u, double v, double, double, double) {
            return std::cos(u + v);
        };
        auto bound = [](double ulo, double uhi, double vlo, double vhi) {
            return detail::max_abs_cos(ulo + vlo, uhi + vhi);
        };
        p.ham.alpha_x = p.ham.alpha_y = bound;
        p.phi0 = [](double x, double y) {
            return M_PI * (std::fabs(y) - std::fabs(x));
        };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Outflow;
        p.bc.bottom.kind = p.bc.top.kind = BoundaryKind::Outflow;
        p.needs_weno_filter = true;
        return p;
    }

    if (name == "control_2d") {
        Problem2D p;
        p.name = name;
        p.ax = -M_PI; p.bx = M_PI; p.ay = -M_PI; p.by = M_PI;
        auto sign = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
        p.ham.H = [sign](double u, double v, double x, double y, double) {
            return std::sin(y) * u + (std::sin(x) + sign(v)) * v -
                   0.5 * std::sin(y) * std::sin(y) - (1.0 - std::cos(x));
        };
        p.ham.H1 = [](double, double, double, double y, double) {
            return std::sin(y);
        };
        p.ham.H2 = [sign](double, double v, double x, double, double) {
            return std::sin(x) + sign(v);
        };
        // H2 has a kink at v = 0; sampling near it is unreliable, so the
        // bounds are analytic: |H1| <= 1, |H2| <= |sin x| + 1 <= 2.
        p.ham.alpha_x = [](double, double, double, double) { return 1.0; };
        p.ham.alpha_y = [](double, double, double, double) { return 2.0; };
        p.phi0 = [](double, double) { return 0.0; };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Periodic;
        p.bc.bottom.kind = p.bc.top.kind = BoundaryKind::Periodic;
        p.needs_weno_filter = true;
        return p;
    }

    if (name == "surface_flat") {
        Problem2D p;
        p.name = name;
        p.ax = 0.0; p.bx = 1.0; p.ay = 0.0; p.by = 1.0;
        p.ham.H = [](double u, double v, double, double, double) {
            return -std::sqrt(u * u + v * v + 1.0);
        };
        p.ham.H1 = [](double u, double v, double, double, double) {
            return -u / std::sqrt(u * u + v * v + 1.0);
        };
        p.ham.H2 = [](double u, double v, double, double, double) {
            return -v / std::sqrt(u * u + v * v + 1.0);
        };
        // |H1| grows in |u| and shrinks in |v|.
        auto bound = [](double alo, double ahi, double blo, double bhi) {
            const double am = std::max(std::fabs(alo), std::fabs(ahi));
            const double bm = (blo <= 0.0 && 0.0 <= bhi)
                                  ? 0.0
                                  : std::min(std::fabs(blo), std::fabs(bhi));
            return am / std::sqrt(am * am + bm * bm + 1.0);
        };
        p.ham.alpha_x = bound;
        p.ham.alpha_y = [bound](double ulo, double uhi, double vlo, double vhi) {
            return bound(vlo, vhi, ulo, uhi);
        };
        p.phi0 = [](double x, double y) {
            return 1.0 - 0.25 * (std::cos(2 * M_PI * x) - 1.0) *
                             (std::cos(2 * M_PI * y) - 1.0);
        };
        p.bc.left.kind = p.bc.right.kind = BoundaryKind::Periodic;
        p.bc.bottom.kind = p.bc.top.kind = BoundaryKind::Periodic;
        return p;
    }

    throw std::invalid_argument("unknown builtin problem: " + name);
}

}  // namespace hjsolve

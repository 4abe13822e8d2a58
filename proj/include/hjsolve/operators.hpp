#pragma once

// The convolution operators D_L = I - L_L^{-1}, D_R = I - L_R^{-1} and the
// centered D_0, with periodic and prescribed-value closures, plus the
// partial-sum derivative reconstructions (periodic and boundary-modified,
// unfiltered and filtered).

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hjsolve/quadrature.hpp"

namespace hjsolve {

enum class ClosureKind { Periodic, Prescribed };

enum class Side { Left, Right };

enum class DerivProvenance { ILW, Extrapolation, Given };

/// Derivative values of phi at one boundary, d[m-1] = d^m phi / dx^m.
struct BoundaryDerivatives {
    Side side = Side::Left;
    std::array<double, 3> d{};
    int order = 0;  // number of valid entries
    DerivProvenance provenance = DerivProvenance::Given;
};

struct DerivativePair {
    std::vector<double> minus;  // left-biased phi_x^-
    std::vector<double> plus;   // right-biased phi_x^+
    // Per-node filter strengths, filled only in filtered mode.
    std::vector<double> sigma_minus, sigma_plus;
};

struct ReconstructOptions {
    int order = 3;  // k in 1..3
    QuadratureMode mode = QuadratureMode::Linear;
    bool filtered = false;
    // The k = 3 D_0 correction is not displayed in the filtered sum of the
    // source formulation; multiplying it by sigma^1 makes the filtered path
    // collapse to the unfiltered one on smooth data. Toggleable.
    bool filter_d0_term = true;
    // Filter exponent sigma^{p-2} as printed; sigma^{p-1} is the
    // alternative convention.
    bool sigma_pow_pm1 = false;
};

namespace opdetail {

inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite input");
}

inline std::vector<double> exp_left(const Grid1D& g, double gamma) {
    std::vector<double> e(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i)
        e[static_cast<std::size_t>(i)] = std::exp(-gamma * (g.node(i) - g.a()));
    return e;
}

inline std::vector<double> exp_right(const Grid1D& g, double gamma) {
    std::vector<double> e(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i)
        e[static_cast<std::size_t>(i)] = std::exp(-gamma * (g.b() - g.node(i)));
    return e;
}

}  // namespace opdetail

/// D_L[v](x_i) = v_i - I^L_i - A_L e^{-gamma (x_i - a)}.
/// Periodic closure: A_L = I^L(b)/(1-mu). Prescribed: A_L = v(a) - C_a,
/// which collocates D_L(a) = C_a exactly.
inline void apply_DL(const std::vector<double>& v, const ConvolutionKernel& kernel,
                     ClosureKind closure, double c_a, QuadratureMode mode,
                     std::vector<double>& out, std::vector<double>* xi = nullptr) {
    opdetail::check_finite(v, "apply_DL");
    const Grid1D& g = kernel.grid();
    const double gamma = kernel.gamma();
    std::vector<double> J, IL;
    kernel.integrate_JL(v, mode, J, xi);
    sweep_IL(J, g, gamma, IL);
    const double mu = std::exp(-gamma * g.length());
    const double A_L = (closure == ClosureKind::Periodic)
                           ? IL.back() / (1.0 - mu)
                           : v.front() - c_a;
    const auto ea = opdetail::exp_left(g, gamma);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - IL[i] - A_L * ea[i];
}

/// Mirror of apply_DL. Prescribed closure collocates D_R(b) = C_b.
inline void apply_DR(const std::vector<double>& v, const ConvolutionKernel& kernel,
                     ClosureKind closure, double c_b, QuadratureMode mode,
                     std::vector<double>& out, std::vector<double>* xi = nullptr) {
    opdetail::check_finite(v, "apply_DR");
    const Grid1D& g = kernel.grid();
    const double gamma = kernel.gamma();
    std::vector<double> J, IR;
    kernel.integrate_JR(v, mode, J, xi);
    sweep_IR(J, g, gamma, IR);
    const double mu = std::exp(-gamma * g.length());
    const double B_R = (closure == ClosureKind::Periodic)
                           ? IR.front() / (1.0 - mu)
                           : v.back() - c_b;
    const auto eb = opdetail::exp_right(g, gamma);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - IR[i] - B_R * eb[i];
}

/// D_0[v] = v - I^0 - A_0 e^{-gamma(x-a)} - B_0 e^{-gamma(b-x)}, with the
/// periodic coefficients A_0 = I^0(b)/(1-mu), B_0 = I^0(a)/(1-mu), or the
/// prescribed-value ones collocating D_0(a) = C_a, D_0(b) = C_b.
inline void apply_D0(const std::vector<double>& v, const ConvolutionKernel& kernel,
                     ClosureKind closure, double c_a, double c_b,
                     std::vector<double>& out,
                     QuadratureMode mode = QuadratureMode::Linear) {
    opdetail::check_finite(v, "apply_D0");
    const Grid1D& g = kernel.grid();
    const double gamma = kernel.gamma();
    std::vector<double> JL, JR, IL, IR, I0;
    kernel.integrate_JL(v, mode, JL, nullptr);
    kernel.integrate_JR(v, mode, JR, nullptr);
    sweep_IL(JL, g, gamma, IL);
    sweep_IR(JR, g, gamma, IR);
    compose_I0(IL, IR, I0);
    const double mu = std::exp(-gamma * g.length());
    double A0, B0;
    if (closure == ClosureKind::Periodic) {
        A0 = I0.back() / (1.0 - mu);
        B0 = I0.front() / (1.0 - mu);
    } else {
        const double ra = v.front() - I0.front() - c_a;
        const double rb = v.back() - I0.back() - c_b;
        A0 = (ra - mu * rb) / (1.0 - mu * mu);
        B0 = (rb - mu * ra) / (1.0 - mu * mu);
    }
    const auto ea = opdetail::exp_left(g, gamma);
    const auto eb = opdetail::exp_right(g, gamma);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i] - I0[i] - A0 * ea[i] - B0 * eb[i];
}

namespace opdetail {

/// sigma_{i,L} = min(xi_{i-1}, xi_i), with xi indexed per cell (1..N) and
/// periodic wrap or clamping at the ends.
inline double sigma_left(const std::vector<double>& xi, int node, int n, bool periodic) {
    auto cell = [&](int c) {
        if (periodic) {
            while (c < 1) c += n;
            while (c > n) c -= n;
        } else {
            c = std::clamp(c, 1, n);
        }
        return xi[static_cast<std::size_t>(c)];
    };
    return std::min(cell(node - 1), cell(node));
}

/// Mirror: xi indexed by the cell's left node (0..N-1).
inline double sigma_right(const std::vector<double>& xi, int node, int n, bool periodic) {
    auto cell = [&](int c) {
        if (periodic) {
            while (c < 0) c += n;
            while (c > n - 1) c -= n;
        } else {
            c = std::clamp(c, 0, n - 1);
        }
        return xi[static_cast<std::size_t>(c)];
    };
    return std::min(cell(node), cell(node + 1));
}

}  // namespace opdetail

/// Partial-sum derivative reconstruction for periodic phi.
/// Unfiltered: P^L_k / P^R_k including the k = 3 D_0 correction. Filtered:
/// the sigma-damped sums, WENO only at p = 1.
inline DerivativePair reconstruct_periodic(const std::vector<double>& phi,
                                           const ConvolutionKernel& kernel,
                                           const ReconstructOptions& opt) {
    if (opt.order < 1 || opt.order > 3)
        throw std::invalid_argument("reconstruct_periodic: order must be 1..3");
    const int k = opt.order;
    const int n = kernel.grid().num_cells();
    const double gamma = kernel.gamma();
    const std::size_t sz = phi.size();

    std::vector<double> xiL, xiR;
    std::vector<double> dl1, dl2, dl3, d0l;
    apply_DL(phi, kernel, ClosureKind::Periodic, 0.0, opt.mode, dl1,
             opt.filtered ? &xiL : nullptr);
    if (k >= 2) apply_DL(dl1, kernel, ClosureKind::Periodic, 0.0, QuadratureMode::Linear, dl2);
    if (k >= 3) {
        apply_DL(dl2, kernel, ClosureKind::Periodic, 0.0, QuadratureMode::Linear, dl3);
        apply_D0(dl2, kernel, ClosureKind::Periodic, 0.0, 0.0, d0l);
    }
    std::vector<double> dr1, dr2, dr3, d0r;
    apply_DR(phi, kernel, ClosureKind::Periodic, 0.0, opt.mode, dr1,
             opt.filtered ? &xiR : nullptr);
    if (k >= 2) apply_DR(dr1, kernel, ClosureKind::Periodic, 0.0, QuadratureMode::Linear, dr2);
    if (k >= 3) {
        apply_DR(dr2, kernel, ClosureKind::Periodic, 0.0, QuadratureMode::Linear, dr3);
        apply_D0(dr2, kernel, ClosureKind::Periodic, 0.0, 0.0, d0r);
    }

    DerivativePair out;
    out.minus.resize(sz);
    out.plus.resize(sz);
    if (opt.filtered) {
        out.sigma_minus.resize(sz);
        out.sigma_plus.resize(sz);
    }
    for (std::size_t i = 0; i < sz; ++i) {
        const int node = static_cast<int>(i);
        double sl = 1.0, sr = 1.0;
        if (opt.filtered) {
            sl = opdetail::sigma_left(xiL, node, n, true);
            sr = opdetail::sigma_right(xiR, node, n, true);
            out.sigma_minus[i] = sl;
            out.sigma_plus[i] = sr;
        }
        auto weight = [&](double s, int p) {
            if (!opt.filtered) return 1.0;
            const int e = opt.sigma_pow_pm1 ? p - 1 : p - 2;
            return std::pow(s, e);
        };
        double m = dl1[i], pl = -dr1[i];
        if (k >= 2) { m += weight(sl, 2) * dl2[i]; pl -= weight(sr, 2) * dr2[i]; }
        if (k >= 3) {
            m += weight(sl, 3) * dl3[i];
            pl -= weight(sr, 3) * dr3[i];
            const double fl = (opt.filtered && opt.filter_d0_term) ? sl : 1.0;
            const double fr = (opt.filtered && opt.filter_d0_term) ? sr : 1.0;
            m -= fl * d0l[i];
            pl += fr * d0r[i];
        }
        out.minus[i] = gamma * m;
        out.plus[i] = gamma * pl;
    }
    return out;
}

/// Boundary-modified partial sums. Builds the cascade phi_{1,p} / phi_{2,p}
/// from the supplied boundary derivative values; the result collocates
/// the boundary: minus(a) = phi_x(a) and plus(b) = phi_x(b) exactly.
inline DerivativePair reconstruct_bounded(const std::vector<double>& phi,
                                          const ConvolutionKernel& kernel,
                                          const BoundaryDerivatives& bd_left,
                                          const BoundaryDerivatives& bd_right,
                                          const ReconstructOptions& opt) {
    if (opt.order < 1 || opt.order > 3)
        throw std::invalid_argument("reconstruct_bounded: order must be 1..3");
    const int k = opt.order;
    if (bd_left.order < k || bd_right.order < k)
        throw std::invalid_argument("reconstruct_bounded: missing boundary derivatives");
    const Grid1D& g = kernel.grid();
    const int n = g.num_cells();
    const double gamma = kernel.gamma();
    const std::size_t sz = phi.size();
    const auto ea = opdetail::exp_left(g, gamma);
    const auto eb = opdetail::exp_right(g, gamma);

    std::vector<double> xiL, xiR;

    // Left-biased cascade.
    std::vector<double> t1, t2, t3, d0l, work;
    apply_DL(phi, kernel, ClosureKind::Prescribed, bd_left.d[0] / gamma, opt.mode, t1,
             opt.filtered ? &xiL : nullptr);
    if (k >= 2) {
        double c2 = 0.0;
        for (int m = 2; m <= k; ++m)
            c2 += std::pow(-1.0 / gamma, m) * bd_left.d[static_cast<std::size_t>(m - 1)];
        work.resize(sz);
        for (std::size_t i = 0; i < sz; ++i) work[i] = t1[i] - c2 * ea[i];
        apply_DL(work, kernel, ClosureKind::Prescribed, 0.0, QuadratureMode::Linear, t2);
    }
    if (k >= 3) {
        double c3 = 0.0;
        for (int m = 2; m <= k; ++m)
            c3 += (m - 1) * std::pow(-1.0 / gamma, m) * bd_left.d[static_cast<std::size_t>(m - 1)];
        for (std::size_t i = 0; i < sz; ++i) work[i] = t2[i] + c3 * ea[i];
        apply_DL(work, kernel, ClosureKind::Prescribed, 0.0, QuadratureMode::Linear, t3);
        apply_D0(work, kernel, ClosureKind::Prescribed, 0.0, 0.0, d0l);
    }

    // Right-biased cascade, mirrored signs.
    std::vector<double> u1, u2, u3, d0r;
    apply_DR(phi, kernel, ClosureKind::Prescribed, -bd_right.d[0] / gamma, opt.mode, u1,
             opt.filtered ? &xiR : nullptr);
    if (k >= 2) {
        double c2 = 0.0;
        for (int m = 2; m <= k; ++m)
            c2 += std::pow(1.0 / gamma, m) * bd_right.d[static_cast<std::size_t>(m - 1)];
        work.resize(sz);
        for (std::size_t i = 0; i < sz; ++i) work[i] = u1[i] - c2 * eb[i];
        apply_DR(work, kernel, ClosureKind::Prescribed, 0.0, QuadratureMode::Linear, u2);
    }
    if (k >= 3) {
        double c3 = 0.0;
        for (int m = 2; m <= k; ++m)
            c3 += (m - 1) * std::pow(1.0 / gamma, m) * bd_right.d[static_cast<std::size_t>(m - 1)];
        for (std::size_t i = 0; i < sz; ++i) work[i] = u2[i] + c3 * eb[i];
        apply_DR(work, kernel, ClosureKind::Prescribed, 0.0, QuadratureMode::Linear, u3);
        apply_D0(work, kernel, ClosureKind::Prescribed, 0.0, 0.0, d0r);
    }

    DerivativePair out;
    out.minus.resize(sz);
    out.plus.resize(sz);
    if (opt.filtered) {
        out.sigma_minus.resize(sz);
        out.sigma_plus.resize(sz);
    }
    for (std::size_t i = 0; i < sz; ++i) {
        const int node = static_cast<int>(i);
        double sl = 1.0, sr = 1.0;
        if (opt.filtered) {
            sl = opdetail::sigma_left(xiL, node, n, false);
            sr = opdetail::sigma_right(xiR, node, n, false);
            out.sigma_minus[i] = sl;
            out.sigma_plus[i] = sr;
        }
        auto weight = [&](double s, int p) {
            if (!opt.filtered) return 1.0;
            const int e = opt.sigma_pow_pm1 ? p - 1 : p - 2;
            return std::pow(s, e);
        };
        double m = t1[i], pl = -u1[i];
        if (k >= 2) { m += weight(sl, 2) * t2[i]; pl -= weight(sr, 2) * u2[i]; }
        if (k >= 3) {
            m += weight(sl, 3) * t3[i];
            pl -= weight(sr, 3) * u3[i];
            const double fl = (opt.filtered && opt.filter_d0_term) ? sl : 1.0;
            const double fr = (opt.filtered && opt.filter_d0_term) ? sr : 1.0;
            m -= fl * d0l[i];
            pl += fr * d0r[i];
        }
        out.minus[i] = gamma * m;
        out.plus[i] = gamma * pl;
    }
    return out;
}

}  // namespace hjsolve

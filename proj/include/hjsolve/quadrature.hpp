#pragma once

// Per-cell exponential-weighted quadrature J^L_i / J^R_i (5th order linear
// and WENO-Z variants), the O(N) recursive accumulation into I^L / I^R,
// and the smoothness quantity xi feeding the nonlinear filter.
//
// All cell-local work happens in the coordinate s = (y - x_{i-1}) / dx_i
// for the left integrals, so that
//     J^L_i = nu * Int_0^1 e^{-nu (1-s)} v(s) ds,      nu = gamma * dx_i.
// The right integrals use the mirrored coordinate s = (x_{i+1} - y) / dx,
// which maps them onto exactly the same machinery.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hjsolve/grid.hpp"

namespace hjsolve {

enum class QuadratureMode { Linear, Weno };

// ---------------------------------------------------------------------------
// Exponential moments
// ---------------------------------------------------------------------------

/// Moments of the exponential measures on [0,1]:
///   left[m]  = Int_0^1 e^{-nu (1-s)} s^m ds
///   right[m] = Int_0^1 e^{-nu s} s^m ds
struct ExpMoments {
    double nu = 0.0;
    std::array<double, 6> left{};
    std::array<double, 6> right{};
};

namespace qdetail {

// Alternating series; every term ratio is bounded by nu/(m+k+2), so for
// nu < 1 there is no term growth and no cancellation. The forward
// recurrences amplify rounding by ~m/nu per step, which is harmless for
// nu >= 1 in long double.
inline ExpMoments exp_moments_impl(double nu) {
    ExpMoments mom;
    mom.nu = nu;
    if (nu < 0.0) throw std::invalid_argument("exp_moments: nu must be >= 0");
    if (nu < 1.0) {
        for (int m = 0; m <= 5; ++m) {
            // left: sum_k (-nu)^k * m! / (m+k+1)!; first term is 1/(m+1)
            long double term = 1.0L / (m + 1);
            long double sum = term;
            for (int k = 1; k <= 30; ++k) {
                term *= -static_cast<long double>(nu) / (m + k + 1);
                sum += term;
                if (std::fabs(static_cast<double>(term)) < 1e-22) break;
            }
            mom.left[static_cast<std::size_t>(m)] = static_cast<double>(sum);
            // right: sum_k (-nu)^k / (k! (m+k+1))
            long double t2 = 1.0L, s2 = 1.0L / (m + 1);
            for (int k = 1; k <= 30; ++k) {
                t2 *= -static_cast<long double>(nu) / k;
                s2 += t2 / (m + k + 1);
                if (std::fabs(static_cast<double>(t2)) < 1e-22) break;
            }
            mom.right[static_cast<std::size_t>(m)] = static_cast<double>(s2);
        }
        return mom;
    }
    const long double lnu = nu;
    const long double emnu = std::exp(-lnu);
    long double el = (1.0L - emnu) / lnu;
    long double er = el;
    mom.left[0] = static_cast<double>(el);
    mom.right[0] = static_cast<double>(er);
    for (int m = 1; m <= 5; ++m) {
        el = (1.0L - m * el) / lnu;
        er = (m * er - emnu) / lnu;
        mom.left[static_cast<std::size_t>(m)] = static_cast<double>(el);
        mom.right[static_cast<std::size_t>(m)] = static_cast<double>(er);
    }
    return mom;
}

/// Gaussian elimination with partial pivoting, in long double. A is n x n
/// row-major, solves A w = b in place; returns false if near singular.
inline bool solve_dense(int n, long double* A, long double* b) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(A[r * n + col])) >
                std::fabs(static_cast<double>(A[piv * n + col])))
                piv = r;
        if (std::fabs(static_cast<double>(A[piv * n + col])) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const long double f = A[r * n + col] / A[col * n + col];
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        long double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
        b[r] = s / A[r * n + r];
    }
    return true;
}

}  // namespace qdetail

inline ExpMoments exp_moments(double nu, int m_max = 5) {
    if (m_max < 0 || m_max > 5)
        throw std::invalid_argument("exp_moments: m_max must be in 0..5");
    return qdetail::exp_moments_impl(nu);
}

// ---------------------------------------------------------------------------
// Per-cell quadrature weights
// ---------------------------------------------------------------------------

/// Quadrature data for one cell and one orientation, in the cell's local
/// coordinate (ascending; cell = [0,1]). `vidx` are the value indices of
/// the 6 stencil nodes (already wrapped for periodic ghost nodes).
struct CellWeights {
    std::array<int, 6> vidx{};
    std::array<double, 6> big{};  // J ~= sum big[j] * v[vidx[j]], exact deg <= 5
    bool weno_ok = false;         // sub-stencil machinery usable for this cell
    std::array<std::array<double, 4>, 3> small{};  // nodes vidx[r..r+3]
    std::array<double, 3> d{};                     // linear weights, sum = 1
    // beta_r = c1^2 + c1*c2 + c2^2/3 + c2^2, with c1 = q_r''(0), c2 = q_r'''
    // of the degree-3 interpolant q_r in local coordinates.
    std::array<std::array<double, 4>, 3> c1map{}, c2map{};
};

/// Result of a WENO evaluation on one cell.
struct WenoCell {
    double J = 0.0;
    double xi = 1.0;
    std::array<double, 3> omega{1, 0, 0};
};

namespace qdetail {

constexpr double kWenoEps = 1e-6;

/// Builds CellWeights from 6 ascending local node coordinates z (cell is
/// [0,1] in those coordinates) and the left-measure moments for this cell's
/// nu. `cell_pos` is the position of the cell's left node within z; the
/// sub-stencil construction is attempted only when the stencil is centered
/// (cell nodes at positions 2 and 3).
inline CellWeights build_cell_weights(const std::array<double, 6>& z,
                                      const std::array<double, 6>& moments,
                                      double nu, bool centered,
                                      int* fallback_counter) {
    CellWeights cw;
    // Big stencil: solve sum_j w_j z_j^m = nu * mu_m, m = 0..5.
    {
        long double A[36], b[6];
        for (int m = 0; m < 6; ++m) {
            for (int j = 0; j < 6; ++j)
                A[m * 6 + j] = std::pow(static_cast<long double>(z[static_cast<std::size_t>(j)]),
                                        m);
            b[m] = static_cast<long double>(nu) * moments[static_cast<std::size_t>(m)];
        }
        if (!solve_dense(6, A, b))
            throw std::runtime_error("quadrature: singular big-stencil system");
        for (int j = 0; j < 6; ++j) cw.big[static_cast<std::size_t>(j)] = static_cast<double>(b[j]);
    }
    if (!centered) {
        if (fallback_counter) ++*fallback_counter;
        return cw;  // weno_ok = false; linear big-stencil only
    }
    // Sub-stencils r = 0,1,2 on nodes z[r..r+3].
    std::array<std::array<long double, 4>, 3> sw{};
    for (int r = 0; r < 3; ++r) {
        long double A[16], b[4];
        for (int m = 0; m < 4; ++m) {
            for (int j = 0; j < 4; ++j)
                A[m * 4 + j] = std::pow(static_cast<long double>(z[static_cast<std::size_t>(r + j)]), m);
            b[m] = static_cast<long double>(nu) * moments[static_cast<std::size_t>(m)];
        }
        if (!solve_dense(4, A, b)) {
            if (fallback_counter) ++*fallback_counter;
            return cw;
        }
        for (int j = 0; j < 4; ++j) {
            sw[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = b[j];
            cw.small[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                static_cast<double>(b[j]);
        }
    }
    // Linear weights: sum_r d_r = 1 and exactness on z^4, z^5.
    {
        long double A[9], b[3];
        for (int r = 0; r < 3; ++r) A[0 * 3 + r] = 1.0L;
        b[0] = 1.0L;
        for (int row = 1; row <= 2; ++row) {
            const int m = 3 + row;  // 4, 5
            for (int r = 0; r < 3; ++r) {
                long double q = 0.0L;
                for (int j = 0; j < 4; ++j)
                    q += sw[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
                         std::pow(static_cast<long double>(z[static_cast<std::size_t>(r + j)]), m);
                A[row * 3 + r] = q;
            }
            b[row] = static_cast<long double>(nu) * moments[static_cast<std::size_t>(m)];
        }
        if (!solve_dense(3, A, b) || b[0] < 0.0L || b[1] < 0.0L || b[2] < 0.0L) {
            if (fallback_counter) ++*fallback_counter;
            return cw;
        }
        for (int r = 0; r < 3; ++r) cw.d[static_cast<std::size_t>(r)] = static_cast<double>(b[r]);
    }
    // Smoothness maps: coefficients of the degree-3 interpolant on each
    // sub-stencil; c1 = q''(0) = 2 a_2, c2 = q''' = 6 a_3.
    for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 4; ++col) {
            long double A[16], b[4];
            for (int row = 0; row < 4; ++row) {
                for (int m = 0; m < 4; ++m)
                    A[row * 4 + m] =
                        std::pow(static_cast<long double>(z[static_cast<std::size_t>(r + row)]), m);
                b[row] = (row == col) ? 1.0L : 0.0L;
            }
            if (!solve_dense(4, A, b)) {
                if (fallback_counter) ++*fallback_counter;
                return cw;
            }
            cw.c1map[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] =
                static_cast<double>(2.0L * b[2]);
            cw.c2map[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] =
                static_cast<double>(6.0L * b[3]);
        }
    }
    cw.weno_ok = true;
    return cw;
}

/// WENO-Z combination on a prepared cell.
inline WenoCell weno_eval(const CellWeights& cw, const std::array<double, 4>& v0,
                          const std::array<double, 4>& v1,
                          const std::array<double, 4>& v2) {
    const std::array<const std::array<double, 4>*, 3> vals{&v0, &v1, &v2};
    std::array<double, 3> beta{}, Jr{};
    for (int r = 0; r < 3; ++r) {
        const auto& v = *vals[static_cast<std::size_t>(r)];
        double c1 = 0, c2 = 0, J = 0;
        for (int j = 0; j < 4; ++j) {
            c1 += cw.c1map[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
            c2 += cw.c2map[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
            J += cw.small[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
        }
        beta[static_cast<std::size_t>(r)] = c1 * c1 + c1 * c2 + c2 * c2 / 3.0 + c2 * c2;
        Jr[static_cast<std::size_t>(r)] = J;
    }
    const double tau5 = std::fabs(beta[0] - beta[2]);
    std::array<double, 3> wt{};
    double wsum = 0;
    for (int r = 0; r < 3; ++r) {
        wt[static_cast<std::size_t>(r)] =
            cw.d[static_cast<std::size_t>(r)] *
            (1.0 + tau5 / (kWenoEps + beta[static_cast<std::size_t>(r)]));
        wsum += wt[static_cast<std::size_t>(r)];
    }
    WenoCell out;
    out.J = 0;
    for (int r = 0; r < 3; ++r) {
        out.omega[static_cast<std::size_t>(r)] = wt[static_cast<std::size_t>(r)] / wsum;
        out.J += out.omega[static_cast<std::size_t>(r)] * Jr[static_cast<std::size_t>(r)];
    }
    const double bmax_arg = tau5 / (kWenoEps + std::min(beta[0], beta[2]));
    const double bmin_arg = tau5 / (kWenoEps + std::max(beta[0], beta[2]));
    out.xi = (1.0 + bmin_arg * bmin_arg) / (1.0 + bmax_arg * bmax_arg);
    return out;
}

}  // namespace qdetail

// ---------------------------------------------------------------------------
// Recursive sweeps
// ---------------------------------------------------------------------------

/// I^L_0 = 0;  I^L_i = e^{-gamma dx_i} I^L_{i-1} + J^L_i.  J indexed by cell
/// (J[i] is the cell [x_{i-1}, x_i], i = 1..N; J[0] unused).
inline void sweep_IL(const std::vector<double>& J, const Grid1D& grid, double gamma,
                     std::vector<double>& IL) {
    const int n = grid.num_cells();
    IL.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        IL[static_cast<std::size_t>(i)] =
            std::exp(-gamma * grid.width(i)) * IL[static_cast<std::size_t>(i - 1)] +
            J[static_cast<std::size_t>(i)];
}

/// I^R_N = 0;  I^R_i = e^{-gamma dx_{i+1}} I^R_{i+1} + J^R_i, i = N-1..0.
/// J indexed by left node of the cell (J[i] is [x_i, x_{i+1}]; J[N] unused).
inline void sweep_IR(const std::vector<double>& J, const Grid1D& grid, double gamma,
                     std::vector<double>& IR) {
    const int n = grid.num_cells();
    IR.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = n - 1; i >= 0; --i)
        IR[static_cast<std::size_t>(i)] =
            std::exp(-gamma * grid.width(i + 1)) * IR[static_cast<std::size_t>(i + 1)] +
            J[static_cast<std::size_t>(i)];
}

/// I^0 = (I^L + I^R) / 2; the |x-y| kernel splits exactly at x.
inline void compose_I0(const std::vector<double>& IL, const std::vector<double>& IR,
                       std::vector<double>& I0) {
    if (IL.size() != IR.size())
        throw std::invalid_argument("compose_I0: length mismatch");
    I0.resize(IL.size());
    for (std::size_t i = 0; i < IL.size(); ++i) I0[i] = 0.5 * (IL[i] + IR[i]);
}

// ---------------------------------------------------------------------------
// ConvolutionKernel: cached weights for one grid / gamma / closure extension
// ---------------------------------------------------------------------------

/// Owns the per-cell weight tables for one (grid, gamma) pair. Weight
/// construction is the only O(N * stencil^3) part and runs once per gamma
/// change; every integrate call afterwards is O(N).
class ConvolutionKernel {
public:
    ConvolutionKernel(const Grid1D& grid, bool periodic)
        : grid_(&grid), periodic_(periodic) {}

    void set_gamma(double gamma) {
        if (gamma == gamma_ && !left_.empty()) return;
        if (!(gamma > 0.0)) throw std::invalid_argument("ConvolutionKernel: gamma must be > 0");
        gamma_ = gamma;
        build();
    }

    double gamma() const { return gamma_; }
    const Grid1D& grid() const { return *grid_; }
    bool periodic() const { return periodic_; }
    int weno_fallback_cells() const { return fallback_cells_; }

    const CellWeights& left_cell(int i) const { return left_[static_cast<std::size_t>(i - 1)]; }
    const CellWeights& right_cell(int i) const { return right_[static_cast<std::size_t>(i)]; }

    /// J^L for all cells (J[0] unused). xi, when non-null, receives the
    /// per-cell smoothness ratio (1 in linear mode or on fallback cells).
    void integrate_JL(const std::vector<double>& v, QuadratureMode mode,
                      std::vector<double>& J, std::vector<double>* xi) const {
        const int n = grid_->num_cells();
        J.assign(static_cast<std::size_t>(n) + 1, 0.0);
        if (xi) xi->assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int i = 1; i <= n; ++i)
            eval_cell(left_[static_cast<std::size_t>(i - 1)], v, mode,
                      J[static_cast<std::size_t>(i)], xi ? &(*xi)[static_cast<std::size_t>(i)] : nullptr);
    }

    /// J^R indexed by the cell's left node (J[N] unused).
    void integrate_JR(const std::vector<double>& v, QuadratureMode mode,
                      std::vector<double>& J, std::vector<double>* xi) const {
        const int n = grid_->num_cells();
        J.assign(static_cast<std::size_t>(n) + 1, 0.0);
        if (xi) xi->assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int i = 0; i < n; ++i)
            eval_cell(right_[static_cast<std::size_t>(i)], v, mode,
                      J[static_cast<std::size_t>(i)], xi ? &(*xi)[static_cast<std::size_t>(i)] : nullptr);
    }

private:
    const Grid1D* grid_;
    bool periodic_;
    double gamma_ = 0.0;
    std::vector<CellWeights> left_;   // cells 1..N at [i-1]
    std::vector<CellWeights> right_;  // cells 0..N-1 at [i]
    int fallback_cells_ = 0;

    // Wraps a node index into [0, N] for periodic extension and returns the
    // node coordinate with the appropriate period shift.
    double ghost_coord(int j) const {
        const int n = grid_->num_cells();
        double shift = 0.0;
        while (j < 0) { j += n; shift -= grid_->length(); }
        while (j > n) { j -= n; shift += grid_->length(); }
        return grid_->node(j) + shift;
    }
    int ghost_vidx(int j) const {
        const int n = grid_->num_cells();
        while (j < 0) j += n;
        while (j > n) j -= n;
        return j;
    }

    void build() {
        const int n = grid_->num_cells();
        if (n < 5)
            throw std::invalid_argument("ConvolutionKernel: grid too small for the 6-point stencil");
        fallback_cells_ = 0;
        left_.resize(static_cast<std::size_t>(n));
        right_.resize(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            // Left cell [x_{i-1}, x_i]; local coord s = (y - x_{i-1}) / dx_i.
            const double dx = grid_->width(i);
            const double nu = gamma_ * dx;
            const auto mom = exp_moments(nu);
            std::array<double, 6> z{};
            std::array<int, 6> vidx{};
            bool centered = true;
            if (periodic_) {
                for (int j = 0; j < 6; ++j) {
                    const int g = i - 3 + j;
                    z[static_cast<std::size_t>(j)] = (ghost_coord(g) - grid_->node(i - 1)) / dx;
                    vidx[static_cast<std::size_t>(j)] = ghost_vidx(g);
                }
            } else {
                const int start = std::clamp(i - 3, 0, n - 5);
                centered = (start == i - 3);
                for (int j = 0; j < 6; ++j) {
                    const int g = start + j;
                    z[static_cast<std::size_t>(j)] = (grid_->node(g) - grid_->node(i - 1)) / dx;
                    vidx[static_cast<std::size_t>(j)] = g;
                }
            }
            auto& cw = left_[static_cast<std::size_t>(i - 1)];
            cw = qdetail::build_cell_weights(z, mom.left, nu, centered, &fallback_cells_);
            cw.vidx = vidx;
        }
        for (int i = 0; i < n; ++i) {
            // Right cell [x_i, x_{i+1}]; mirrored coord s = (x_{i+1} - y)/dx,
            // so nodes are fed in descending order and the measure is again
            // the left one.
            const double dx = grid_->width(i + 1);
            const double nu = gamma_ * dx;
            const auto mom = exp_moments(nu);
            std::array<double, 6> z{};
            std::array<int, 6> vidx{};
            bool centered = true;
            if (periodic_) {
                for (int j = 0; j < 6; ++j) {
                    const int g = i + 3 - j;
                    z[static_cast<std::size_t>(j)] = (grid_->node(i + 1) - ghost_coord(g)) / dx;
                    vidx[static_cast<std::size_t>(j)] = ghost_vidx(g);
                }
            } else {
                const int start = std::clamp(i - 2, 0, n - 5);
                centered = (start == i - 2);
                for (int j = 0; j < 6; ++j) {
                    const int g = start + 5 - j;
                    z[static_cast<std::size_t>(j)] = (grid_->node(i + 1) - grid_->node(g)) / dx;
                    vidx[static_cast<std::size_t>(j)] = g;
                }
            }
            auto& cw = right_[static_cast<std::size_t>(i)];
            cw = qdetail::build_cell_weights(z, mom.left, nu, centered, &fallback_cells_);
            cw.vidx = vidx;
        }
    }

    void eval_cell(const CellWeights& cw, const std::vector<double>& v,
                   QuadratureMode mode, double& J, double* xi) const {
        if (mode == QuadratureMode::Linear || !cw.weno_ok) {
            double s = 0;
            for (int j = 0; j < 6; ++j)
                s += cw.big[static_cast<std::size_t>(j)] *
                     v[static_cast<std::size_t>(cw.vidx[static_cast<std::size_t>(j)])];
            J = s;
            if (xi) *xi = 1.0;
            return;
        }
        std::array<double, 4> v0{}, v1{}, v2{};
        for (int j = 0; j < 4; ++j) {
            v0[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(cw.vidx[static_cast<std::size_t>(j)])];
            v1[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(cw.vidx[static_cast<std::size_t>(j + 1)])];
            v2[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(cw.vidx[static_cast<std::size_t>(j + 2)])];
        }
        const WenoCell wc = qdetail::weno_eval(cw, v0, v1, v2);
        J = wc.J;
        if (xi) *xi = wc.xi;
    }
};

}  // namespace hjsolve

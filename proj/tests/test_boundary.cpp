#include <catch2/catch_amalgamated.hpp>

#include "hjsolve/boundary.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using namespace hjsolve;

namespace {

std::vector<double> sample(const Grid1D& g, double (*f)(double)) {
    std::vector<double> v(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) v[static_cast<std::size_t>(i)] = f(g.node(i));
    return v;
}

}  // namespace

TEST_CASE("extrapolation: polynomials reproduced exactly") {
    const Grid1D g = make_perturbed_grid(0.0, 1.0, 20, 0.1, 3);
    const auto quad = sample(g, [](double x) { return x * x; });
    const auto bl = extrapolate_derivatives(g, quad, Side::Left, 3);
    CHECK(bl.d[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(bl.d[1] == Catch::Approx(2.0).margin(1e-9));
    CHECK(bl.d[2] == Catch::Approx(0.0).margin(1e-8));
    const auto br = extrapolate_derivatives(g, quad, Side::Right, 3);
    CHECK(br.d[0] == Catch::Approx(2.0).margin(1e-10));
    CHECK(br.d[1] == Catch::Approx(2.0).margin(1e-9));

    const std::vector<double> c(static_cast<std::size_t>(g.num_nodes()), 4.2);
    const auto bc = extrapolate_derivatives(g, c, Side::Left, 2);
    CHECK(bc.d[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(bc.d[1] == Catch::Approx(0.0).margin(1e-11));
    CHECK(bc.provenance == DerivProvenance::Extrapolation);
}

TEST_CASE("extrapolation converges on smooth data") {
    auto first_deriv_err = [](int n) {
        const Grid1D g = make_uniform_grid(0.0, 1.0, n);
        const auto v = sample(g, [](double x) { return std::sin(3 * x); });
        const auto b = extrapolate_derivatives(g, v, Side::Right, 3);
        return std::fabs(b.d[0] - 3 * std::cos(3.0));
    };
    const double e1 = first_deriv_err(20), e2 = first_deriv_err(40);
    CHECK(e2 < e1);
    CHECK(std::log(e1 / e2) / std::log(2.0) > 3.0);  // degree-4 interpolant
}

TEST_CASE("Dirichlet wall, linear H: all cascade levels in closed form") {
    // H(u) = 2u: u = -f'/2, phi_xx = f''/4, phi_xxx = -f'''/8.
    Hamiltonian1D ham;
    ham.H = [](double u, double, double) { return 2.0 * u; };
    ham.dH = [](double, double, double) { return 2.0; };
    ham.d2H = [](double) { return 0.0; };
    BoundaryData1D data;
    data.f = [](double t) { return std::sin(t); };
    data.f1 = [](double t) { return std::cos(t); };
    data.f2 = [](double t) { return -std::sin(t); };
    data.f3 = [](double t) { return -std::cos(t); };
    const double t = 0.4;
    const auto b = ilw_dirichlet_1d(ham, Side::Left, 0.0, data, t, 0.0, 3);
    CHECK(b.d[0] == Catch::Approx(-std::cos(t) / 2).margin(1e-12));
    CHECK(b.d[1] == Catch::Approx(-std::sin(t) / 4).margin(1e-12));
    CHECK(b.d[2] == Catch::Approx(std::cos(t) / 8).margin(1e-12));
    CHECK(b.provenance == DerivProvenance::ILW);
}

TEST_CASE("Dirichlet wall, Burgers: inflow root selection") {
    // H(u) = u^2/2, f' = -1/2, so H(u) = 1/2 has roots u = 1 and u = -1.
    // At a left wall only H'(u) = u > 0 admits inflow, selecting u = 1.
    Hamiltonian1D ham;
    ham.H = [](double u, double, double) { return 0.5 * u * u; };
    ham.dH = [](double u, double, double) { return u; };
    ham.d2H = [](double) { return 1.0; };
    BoundaryData1D data;
    data.f1 = [](double) { return -0.5; };
    data.f2 = [](double) { return 0.0; };
    data.f3 = [](double) { return 0.0; };
    const auto bl = ilw_dirichlet_1d(ham, Side::Left, 0.0, data, 0.0, 0.3, 3);
    CHECK(bl.d[0] == Catch::Approx(1.0).margin(1e-10));
    const auto br = ilw_dirichlet_1d(ham, Side::Right, 0.0, data, 0.0, -0.3, 3);
    CHECK(br.d[0] == Catch::Approx(-1.0).margin(1e-10));
}

TEST_CASE("Dirichlet wall, quartic H: guess-nearest tie break among roots") {
    // H(u) = (u^2-1)(u^2-4)/4 = 0 has roots +-1, +-2. H'(u) = u^3 - 2.5u is
    // positive at u = -1 and u = 2, negative at u = 1 and u = -2.
    Hamiltonian1D ham;
    ham.H = [](double u, double, double) { return 0.25 * (u * u - 1) * (u * u - 4); };
    ham.dH = [](double u, double, double) { return u * u * u - 2.5 * u; };
    ham.d2H = [](double u) { return 3 * u * u - 2.5; };
    BoundaryData1D data;
    data.f1 = [](double) { return 0.0; };
    data.f2 = [](double) { return 0.0; };
    data.f3 = [](double) { return 0.0; };
    // Left wall admits u in {-1, 2}; the guess decides.
    CHECK(ilw_dirichlet_1d(ham, Side::Left, 0.0, data, 0.0, -0.8, 3).d[0] ==
          Catch::Approx(-1.0).margin(1e-10));
    CHECK(ilw_dirichlet_1d(ham, Side::Left, 0.0, data, 0.0, 1.7, 3).d[0] ==
          Catch::Approx(2.0).margin(1e-10));
    // Right wall admits u in {1, -2}.
    CHECK(ilw_dirichlet_1d(ham, Side::Right, 0.0, data, 0.0, 0.8, 3).d[0] ==
          Catch::Approx(1.0).margin(1e-10));
    CHECK(ilw_dirichlet_1d(ham, Side::Right, 0.0, data, 0.0, -1.6, 3).d[0] ==
          Catch::Approx(-2.0).margin(1e-10));
}

TEST_CASE("Dirichlet wall equation: randomized residual and sign contract") {
    std::mt19937_64 rng = oracle::rng(77);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), pt(-2.0, 2.0),
        jitter(-0.3, 0.3);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double a3 = coef(rng), a2 = coef(rng), a1 = coef(rng), a0 = coef(rng);
        Hamiltonian1D ham;
        ham.H = [=](double u, double, double) {
            return ((a3 * u + a2) * u + a1) * u + a0;
        };
        ham.dH = [=](double u, double, double) { return (3 * a3 * u + 2 * a2) * u + a1; };
        ham.d2H = [=](double u) { return 6 * a3 * u + 2 * a2; };
        const Side side = (trial % 2 == 0) ? Side::Left : Side::Right;
        const double u0 = pt(rng);
        const double slope = ham.dH(u0, 0, 0);
        const bool inflow = (side == Side::Left) ? (slope > 1e-3) : (slope < -1e-3);
        if (!inflow) continue;  // u0 must itself be an admissible root
        BoundaryData1D data;
        const double f1 = -ham.H(u0, 0, 0);
        data.f1 = [=](double) { return f1; };
        data.f2 = [](double) { return 0.0; };
        data.f3 = [](double) { return 0.0; };
        const double guess = u0 + jitter(rng);
        const auto b = ilw_dirichlet_1d(ham, side, 0.0, data, 0.0, guess, 1);
        const double r = b.d[0];
        CHECK(std::fabs(ham.H(r, 0, 0) + f1) <= 1e-8);
        if (side == Side::Left) CHECK(ham.dH(r, 0, 0) > 0.0);
        else CHECK(ham.dH(r, 0, 0) < 0.0);
        ++checked;
    }
    CHECK(checked > 300);
}

TEST_CASE("Neumann wall: cascade closed forms") {
    Hamiltonian1D ham;  // H = u^2/2 at g = 1: H' = 1, H'' = 1
    ham.H = [](double u, double, double) { return 0.5 * u * u; };
    ham.dH = [](double u, double, double) { return u; };
    ham.d2H = [](double) { return 1.0; };

    BoundaryData1D cst;  // g constant: everything above order 1 vanishes
    cst.f = [](double) { return 1.0; };
    cst.f1 = [](double) { return 0.0; };
    cst.f2 = [](double) { return 0.0; };
    const auto b0 = ilw_neumann_1d(ham, Side::Left, 0.0, cst, 0.0, 3);
    CHECK(b0.d[0] == Catch::Approx(1.0));
    CHECK(b0.d[1] == Catch::Approx(0.0).margin(1e-14));
    CHECK(b0.d[2] == Catch::Approx(0.0).margin(1e-14));

    BoundaryData1D lin;  // g = 1 + t at t = 0: phi_xx = -g'/H' = -1
    lin.f = [](double t) { return 1.0 + t; };
    lin.f1 = [](double) { return 1.0; };
    lin.f2 = [](double) { return 0.0; };
    const auto b1 = ilw_neumann_1d(ham, Side::Left, 0.0, lin, 0.0, 2);
    CHECK(b1.d[0] == Catch::Approx(1.0));
    CHECK(b1.d[1] == Catch::Approx(-1.0).margin(1e-14));

    // phi_xxx = -(phi_txx + H'' phi_xx^2)/H' with phi_txx = -g''/H' + g'^2 H''/H'^2.
    // Here g' = 1, g'' = 0: phi_txx = 1, phi_xx = -1, so phi_xxx = -2.
    const auto b2 = ilw_neumann_1d(ham, Side::Left, 0.0, lin, 0.0, 3);
    CHECK(b2.d[2] == Catch::Approx(-2.0).margin(1e-13));

    // Outflow sign must be rejected.
    CHECK_THROWS_AS(ilw_neumann_1d(ham, Side::Right, 0.0, cst, 0.0, 2),
                    std::runtime_error);
}

TEST_CASE("2D Dirichlet edge: worked linear example") {
    // H = u + v, phi = sin(x + y - 2t). On the left edge x = 0:
    // f(s,t) = sin(s - 2t), normal derivative u = cos(s - 2t),
    // mixed phi_xy = -sin(s - 2t), phi_xx = -sin(s - 2t).
    Hamiltonian2D ham;
    ham.H = [](double u, double v, double, double, double) { return u + v; };
    ham.H1 = [](double, double, double, double, double) { return 1.0; };
    ham.H2 = [](double, double, double, double, double) { return 1.0; };
    BoundaryData2D data;
    data.f = [](double s, double t) { return std::sin(s - 2 * t); };
    data.f_t = [](double s, double t) { return -2 * std::cos(s - 2 * t); };
    data.f_tt = [](double s, double t) { return -4 * std::sin(s - 2 * t); };
    data.f_s = [](double s, double t) { return std::cos(s - 2 * t); };
    data.f_ss = [](double s, double t) { return -std::sin(s - 2 * t); };
    data.f_ts = [](double s, double t) { return 2 * std::sin(s - 2 * t); };
    const double s = 0.7, t = 0.15, w = s - 2 * t;
    double mixed = 0;
    const auto b = ilw_dirichlet_2d(ham, Side::Left, true, 0.0, s, data, t,
                                    std::cos(w) + 0.1, 3, &mixed);
    CHECK(b.d[0] == Catch::Approx(std::cos(w)).margin(1e-10));
    CHECK(mixed == Catch::Approx(-std::sin(w)).margin(1e-10));
    CHECK(b.d[1] == Catch::Approx(-std::sin(w)).margin(1e-10));
    CHECK(b.order == 2);  // the third normal derivative comes from elsewhere
}

TEST_CASE("2D Neumann edge: closed form") {
    // H = u + 2v on the left edge: phi_xx = -(g_t + H2 g_s)/H1.
    Hamiltonian2D ham;
    ham.H = [](double u, double v, double, double, double) { return u + 2 * v; };
    ham.H1 = [](double, double, double, double, double) { return 1.0; };
    ham.H2 = [](double, double, double, double, double) { return 2.0; };
    BoundaryData2D data;
    data.f = [](double s, double t) { return s + 3 * t; };
    data.f_t = [](double, double) { return 3.0; };
    data.f_s = [](double, double) { return 1.0; };
    const auto b = ilw_neumann_2d(ham, Side::Left, true, 0.0, 0.5, data, 0.2, 0.9, 2);
    CHECK(b.d[0] == Catch::Approx(0.5 + 0.6));
    CHECK(b.d[1] == Catch::Approx(-(3.0 + 2.0 * 1.0) / 1.0));
}

TEST_CASE("tangential derivative: 4th order including edge nodes") {
    auto err_at = [](int n, int j_kind) {
        const Grid1D g = make_uniform_grid(0.0, 1.0, n);
        std::vector<double> v(static_cast<std::size_t>(g.num_nodes()));
        for (int i = 0; i < g.num_nodes(); ++i)
            v[static_cast<std::size_t>(i)] = std::sin(4 * g.node(i));
        const int j = (j_kind == 0) ? 0 : (j_kind == 1 ? n : n / 2);
        return std::fabs(tangential_derivative(g, v, j) - 4 * std::cos(4 * g.node(j)));
    };
    for (int kind : {0, 1, 2}) {
        const double e1 = err_at(40, kind), e2 = err_at(80, kind);
        CHECK(std::log(e1 / e2) / std::log(2.0) > 3.5);
    }
    // Exact on quartics by construction.
    const Grid1D g = make_uniform_grid(0.0, 2.0, 10);
    std::vector<double> q(11);
    for (int i = 0; i <= 10; ++i) {
        const double x = g.node(i);
        q[static_cast<std::size_t>(i)] = x * x * x * x - x;
    }
    CHECK(tangential_derivative(g, q, 0) == Catch::Approx(-1.0).margin(1e-10));
    CHECK(tangential_derivative(g, q, 10) == Catch::Approx(4 * 8.0 - 1).margin(1e-9));
}

TEST_CASE("no admissible root raises an error") {
    Hamiltonian1D ham;  // H = u^2/2 >= 0 can never equal -1
    ham.H = [](double u, double, double) { return 0.5 * u * u; };
    ham.dH = [](double u, double, double) { return u; };
    BoundaryData1D data;
    data.f1 = [](double) { return 1.0; };  // demands H(u) = -1
    CHECK_THROWS_AS(ilw_dirichlet_1d(ham, Side::Left, 0.0, data, 0.0, 0.0, 1),
                    std::runtime_error);
}

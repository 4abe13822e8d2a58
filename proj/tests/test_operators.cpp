#include <catch2/catch_amalgamated.hpp>

#include "hjsolve/operators.hpp"

#include <cmath>
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

TEST_CASE("operators annihilate constants") {
    const Grid1D g = make_perturbed_grid(-1.0, 1.0, 32, 0.15, 5);
    std::vector<double> v(static_cast<std::size_t>(g.num_nodes()), 3.7);
    std::vector<double> out;
    for (bool periodic : {true, false}) {
        ConvolutionKernel kern(g, periodic);
        kern.set_gamma(12.0);
        const ClosureKind ck = periodic ? ClosureKind::Periodic : ClosureKind::Prescribed;
        apply_DL(v, kern, ck, 0.0, QuadratureMode::Linear, out);
        for (double x : out) CHECK(std::fabs(x) <= 1e-13);
        apply_DR(v, kern, ck, 0.0, QuadratureMode::Linear, out);
        for (double x : out) CHECK(std::fabs(x) <= 1e-13);
        apply_D0(v, kern, ck, 0.0, 0.0, out);
        for (double x : out) CHECK(std::fabs(x) <= 1e-13);
    }
}

TEST_CASE("prescribed closure collocates the boundary value") {
    const Grid1D g = make_uniform_grid(0.0, 1.0, 20);
    std::vector<double> v(21, 2.0);
    std::vector<double> out;
    ConvolutionKernel kern(g, false);
    kern.set_gamma(8.0);
    apply_DL(v, kern, ClosureKind::Prescribed, 1.0, QuadratureMode::Linear, out);
    CHECK(out.front() == Catch::Approx(1.0).margin(1e-14));
    apply_DR(v, kern, ClosureKind::Prescribed, -0.5, QuadratureMode::Linear, out);
    CHECK(out.back() == Catch::Approx(-0.5).margin(1e-14));
    apply_D0(v, kern, ClosureKind::Prescribed, 0.25, -0.75, out);
    CHECK(out.front() == Catch::Approx(0.25).margin(1e-13));
    CHECK(out.back() == Catch::Approx(-0.75).margin(1e-13));
}

TEST_CASE("operators reject non-finite input") {
    const Grid1D g = make_uniform_grid(0.0, 1.0, 10);
    std::vector<double> v(11, 1.0);
    v[4] = std::nan("");
    std::vector<double> out;
    ConvolutionKernel kern(g, false);
    kern.set_gamma(4.0);
    CHECK_THROWS_AS(apply_DL(v, kern, ClosureKind::Prescribed, 0.0,
                             QuadratureMode::Linear, out),
                    std::runtime_error);
}

// D_L[v](x) = -sum_{p=1}^{k} (-1/g)^p (v^(p)(x) - v^(p)(a) e^{-g(x-a)})
//             - (-1/g)^{k+1} I^L[v^(k+1)](x) + C_a e^{-g(x-a)},
// the exact integration-by-parts identity, with the remainder integral
// evaluated by adaptive quadrature.
TEST_CASE("D_L matches its exact Taylor/remainder identity") {
    const double a = -M_PI, b = M_PI, gamma = 50.0, c_a = 0.37;
    const Grid1D g = make_uniform_grid(a, b, 200);
    const auto v = sample(g, [](double x) { return std::sin(x); });
    std::vector<double> dl;
    ConvolutionKernel kern(g, false);
    kern.set_gamma(gamma);
    apply_DL(v, kern, ClosureKind::Prescribed, c_a, QuadratureMode::Linear, dl);

    auto d1 = [](double x) { return std::cos(x); };
    auto d2 = [](double x) { return -std::sin(x); };
    auto d3 = [](double x) { return -std::cos(x); };
    auto d4 = [](double x) { return std::sin(x); };
    for (int i : {0, 1, 7, 50, 100, 150, 193, 199, 200}) {
        const double x = g.node(i);
        const double ea = std::exp(-gamma * (x - a));
        double expect = c_a * ea;
        const double inv = -1.0 / gamma;
        expect -= inv * (d1(x) - d1(a) * ea);
        expect -= inv * inv * (d2(x) - d2(a) * ea);
        expect -= inv * inv * inv * (d3(x) - d3(a) * ea);
        expect -= inv * inv * inv * inv * oracle::IL_direct(d4, a, x, gamma);
        CHECK(dl[static_cast<std::size_t>(i)] == Catch::Approx(expect).margin(1e-8));
    }
}

// Mirror identity for D_R with (1/g)^p and the right endpoint.
TEST_CASE("D_R matches its exact Taylor/remainder identity") {
    const double a = -M_PI, b = M_PI, gamma = 50.0, c_b = -0.21;
    const Grid1D g = make_uniform_grid(a, b, 200);
    const auto v = sample(g, [](double x) { return std::sin(x); });
    std::vector<double> dr;
    ConvolutionKernel kern(g, false);
    kern.set_gamma(gamma);
    apply_DR(v, kern, ClosureKind::Prescribed, c_b, QuadratureMode::Linear, dr);

    auto d1 = [](double x) { return std::cos(x); };
    auto d2 = [](double x) { return -std::sin(x); };
    auto d3 = [](double x) { return -std::cos(x); };
    auto d4 = [](double x) { return std::sin(x); };
    for (int i : {0, 1, 7, 50, 100, 150, 193, 199, 200}) {
        const double x = g.node(i);
        const double eb = std::exp(-gamma * (b - x));
        double expect = c_b * eb;
        const double inv = 1.0 / gamma;
        expect -= inv * (d1(x) - d1(b) * eb);
        expect -= inv * inv * (d2(x) - d2(b) * eb);
        expect -= inv * inv * inv * (d3(x) - d3(b) * eb);
        expect -= inv * inv * inv * inv * oracle::IR_direct(d4, x, b, gamma);
        CHECK(dr[static_cast<std::size_t>(i)] == Catch::Approx(expect).margin(1e-8));
    }
}

// D_0 identity truncated after the second-derivative term:
// D_0[v] = -(1/g)^2 (v'' + closure combinations) - prescribed-value terms
//          - (1/g)^4 (I^0[v''''] + its closure combinations).
TEST_CASE("D_0 matches its exact expansion with prescribed closures") {
    const double a = -M_PI, b = M_PI, gamma = 50.0, c_a = 0.13, c_b = -0.42;
    const Grid1D g = make_uniform_grid(a, b, 200);
    const auto v = sample(g, [](double x) { return std::sin(x); });
    std::vector<double> d0;
    ConvolutionKernel kern(g, false);
    kern.set_gamma(gamma);
    apply_D0(v, kern, ClosureKind::Prescribed, c_a, c_b, d0);

    auto d2 = [](double x) { return -std::sin(x); };
    auto d4 = [](double x) { return std::sin(x); };
    const double mu = std::exp(-gamma * (b - a));
    const double om = 1.0 - mu * mu;
    const double i0a = oracle::I0_direct(d4, a, b, a, gamma);
    const double i0b = oracle::I0_direct(d4, a, b, b, gamma);
    for (int i : {0, 1, 7, 50, 100, 150, 193, 199, 200}) {
        const double x = g.node(i);
        const double ea = std::exp(-gamma * (x - a));
        const double eb = std::exp(-gamma * (b - x));
        const double g2 = 1.0 / (gamma * gamma);
        const double i0x = oracle::I0_direct(d4, a, b, x, gamma);
        double expect = -g2 * (d2(x) + (mu * d2(b) - d2(a)) / om * ea +
                               (mu * d2(a) - d2(b)) / om * eb);
        expect -= (mu * c_b - c_a) / om * ea + (mu * c_a - c_b) / om * eb;
        expect -= g2 * g2 * (i0x + (mu * i0b - i0a) / om * ea + (mu * i0a - i0b) / om * eb);
        CHECK(d0[static_cast<std::size_t>(i)] == Catch::Approx(expect).margin(1e-8));
    }
    // Interior leading behavior: D_0[v] ~ -v''/gamma^2.
    const double x = g.node(100);
    CHECK(d0[100] == Catch::Approx(std::sin(x) / (gamma * gamma)).margin(3e-7));
}

TEST_CASE("gamma D_L is a first-order derivative (periodic)") {
    const double gamma = 50.0;
    const Grid1D g = make_uniform_grid(-M_PI, M_PI, 200);
    const auto v = sample(g, [](double x) { return std::sin(x); });
    std::vector<double> dl;
    ConvolutionKernel kern(g, true);
    kern.set_gamma(gamma);
    apply_DL(v, kern, ClosureKind::Periodic, 0.0, QuadratureMode::Linear, dl);
    double err = 0;
    for (int i = 0; i < g.num_nodes(); ++i)
        err = std::max(err, std::fabs(gamma * dl[static_cast<std::size_t>(i)] -
                                      std::cos(g.node(i))));
    CHECK(err <= 1.5 / gamma);
    CHECK(err >= 0.1 / gamma);  // genuinely first order, not superconvergent
}

TEST_CASE("reconstructions annihilate constants") {
    const Grid1D g = make_uniform_grid(-1.0, 1.0, 24);
    std::vector<double> v(25, -1.9);
    ConvolutionKernel pk(g, true), bk(g, false);
    pk.set_gamma(9.0);
    bk.set_gamma(9.0);
    for (int k = 1; k <= 3; ++k) {
        ReconstructOptions opt;
        opt.order = k;
        const auto pr = reconstruct_periodic(v, pk, opt);
        for (double x : pr.minus) CHECK(std::fabs(x) <= 1e-12);
        for (double x : pr.plus) CHECK(std::fabs(x) <= 1e-12);
        BoundaryDerivatives bl, br;
        bl.side = Side::Left;
        br.side = Side::Right;
        bl.order = br.order = 3;
        const auto bb = reconstruct_bounded(v, bk, bl, br, opt);
        for (double x : bb.minus) CHECK(std::fabs(x) <= 1e-12);
        for (double x : bb.plus) CHECK(std::fabs(x) <= 1e-12);
    }
}

TEST_CASE("bounded reconstruction is exact for linear data") {
    const Grid1D g = make_perturbed_grid(0.0, 2.0, 30, 0.1, 9);
    const auto v = sample(g, [](double x) { return x; });
    ConvolutionKernel kern(g, false);
    kern.set_gamma(15.0);
    BoundaryDerivatives bl, br;
    bl.side = Side::Left;
    br.side = Side::Right;
    bl.order = br.order = 3;
    bl.d = {1.0, 0.0, 0.0};
    br.d = {1.0, 0.0, 0.0};
    ReconstructOptions opt;
    opt.order = 3;
    const auto r = reconstruct_bounded(v, kern, bl, br, opt);
    for (double x : r.minus) CHECK(x == Catch::Approx(1.0).margin(1e-11));
    for (double x : r.plus) CHECK(x == Catch::Approx(1.0).margin(1e-11));
}

TEST_CASE("bounded reconstruction collocates the boundary derivative") {
    const Grid1D g = make_uniform_grid(-M_PI, M_PI, 40);
    const auto v = sample(g, [](double x) { return std::sin(x - 0.3); });
    ConvolutionKernel kern(g, false);
    kern.set_gamma(20.0);
    BoundaryDerivatives bl, br;
    bl.side = Side::Left;
    br.side = Side::Right;
    bl.order = br.order = 3;
    const double xa = -M_PI - 0.3, xb = M_PI - 0.3;
    bl.d = {std::cos(xa), -std::sin(xa), -std::cos(xa)};
    br.d = {std::cos(xb), -std::sin(xb), -std::cos(xb)};
    for (int k = 1; k <= 3; ++k) {
        ReconstructOptions opt;
        opt.order = k;
        const auto r = reconstruct_bounded(v, kern, bl, br, opt);
        CHECK(r.minus.front() == Catch::Approx(bl.d[0]).margin(1e-12));
        CHECK(r.plus.back() == Catch::Approx(br.d[0]).margin(1e-12));
    }
}

TEST_CASE("filtered mode with linear quadrature degenerates to unfiltered") {
    const Grid1D g = make_uniform_grid(-1.0, 1.0, 40);
    const auto v = sample(g, [](double x) { return std::sin(M_PI * x); });
    ConvolutionKernel pk(g, true);
    pk.set_gamma(30.0);
    ReconstructOptions plain, filt;
    plain.order = filt.order = 3;
    filt.filtered = true;  // xi stays 1 in linear mode, so sigma = 1
    const auto r0 = reconstruct_periodic(v, pk, plain);
    const auto r1 = reconstruct_periodic(v, pk, filt);
    for (std::size_t i = 0; i < r0.minus.size(); ++i) {
        CHECK(std::fabs(r0.minus[i] - r1.minus[i]) <= 1e-13);
        CHECK(std::fabs(r0.plus[i] - r1.plus[i]) <= 1e-13);
        CHECK(r1.sigma_minus[i] == 1.0);
        CHECK(r1.sigma_plus[i] == 1.0);
    }
}

TEST_CASE("reconstruction order k = 1, 2, 3 on refining meshes") {
    // gamma = 2 / dx mimics beta = 1, CFL = 0.5, alpha = 1.
    const double a = -M_PI, b = M_PI;
    const double x0 = 0.3;

    auto periodic_error = [&](int k, int n) {
        const Grid1D g = make_uniform_grid(a, b, n);
        const auto v = sample(g, [](double x) { return std::sin(x); });
        ConvolutionKernel kern(g, true);
        kern.set_gamma(2.0 * n / (b - a));
        ReconstructOptions opt;
        opt.order = k;
        const auto r = reconstruct_periodic(v, kern, opt);
        double e = 0;
        for (int i = 0; i < g.num_nodes(); ++i) {
            e = std::max(e, std::fabs(r.minus[static_cast<std::size_t>(i)] - std::cos(g.node(i))));
            e = std::max(e, std::fabs(r.plus[static_cast<std::size_t>(i)] - std::cos(g.node(i))));
        }
        return e;
    };
    auto bounded_error = [&](int k, int n) {
        const Grid1D g = make_uniform_grid(a, b, n);
        std::vector<double> v(static_cast<std::size_t>(g.num_nodes()));
        for (int i = 0; i < g.num_nodes(); ++i)
            v[static_cast<std::size_t>(i)] = std::sin(g.node(i) - x0);
        ConvolutionKernel kern(g, false);
        kern.set_gamma(2.0 * n / (b - a));
        BoundaryDerivatives bl, br;
        bl.side = Side::Left;
        br.side = Side::Right;
        bl.order = br.order = 3;
        bl.d = {std::cos(a - x0), -std::sin(a - x0), -std::cos(a - x0)};
        br.d = {std::cos(b - x0), -std::sin(b - x0), -std::cos(b - x0)};
        ReconstructOptions opt;
        opt.order = k;
        const auto r = reconstruct_bounded(v, kern, bl, br, opt);
        double e = 0;
        for (int i = 0; i < g.num_nodes(); ++i) {
            const double ref = std::cos(g.node(i) - x0);
            e = std::max(e, std::fabs(r.minus[static_cast<std::size_t>(i)] - ref));
            e = std::max(e, std::fabs(r.plus[static_cast<std::size_t>(i)] - ref));
        }
        return e;
    };

    for (int k = 1; k <= 3; ++k) {
        double prev_p = periodic_error(k, 40), prev_b = bounded_error(k, 40);
        double slope_p = 0, slope_b = 0;
        for (int n : {80, 160, 320}) {
            const double ep = periodic_error(k, n), ebd = bounded_error(k, n);
            slope_p = std::log(prev_p / ep) / std::log(2.0);
            slope_b = std::log(prev_b / ebd) / std::log(2.0);
            prev_p = ep;
            prev_b = ebd;
        }
        INFO("k = " << k);
        CHECK(slope_p >= k - 0.25);
        CHECK(slope_b >= k - 0.25);
    }
}

TEST_CASE("reconstruction order bounds are enforced") {
    const Grid1D g = make_uniform_grid(0.0, 1.0, 10);
    std::vector<double> v(11, 0.0);
    ConvolutionKernel kern(g, true);
    kern.set_gamma(5.0);
    ReconstructOptions opt;
    opt.order = 4;
    CHECK_THROWS_AS(reconstruct_periodic(v, kern, opt), std::invalid_argument);
    opt.order = 2;
    BoundaryDerivatives bl, br;
    bl.order = br.order = 1;  // too few derivatives for k = 2
    ConvolutionKernel bk(g, false);
    bk.set_gamma(5.0);
    CHECK_THROWS_AS(reconstruct_bounded(v, bk, bl, br, opt), std::invalid_argument);
}

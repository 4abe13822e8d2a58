#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

namespace hjsolve {

/// 1D mesh of N+1 strictly increasing nodes on [a,b]. Possibly nonuniform.
/// Immutable after construction; safe to share across threads.
class Grid1D {
public:
    Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 5)
            throw std::invalid_argument("Grid1D: need at least 5 nodes");
        widths_.resize(nodes_.size() - 1);
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            widths_[i - 1] = nodes_[i] - nodes_[i - 1];
            if (!(widths_[i - 1] > 0.0))
                throw std::invalid_argument("Grid1D: nodes must be strictly increasing");
        }
    }

    double a() const { return nodes_.front(); }
    double b() const { return nodes_.back(); }
    double length() const { return b() - a(); }

    /// Number of cells N (nodes are 0..N).
    int num_cells() const { return static_cast<int>(widths_.size()); }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }

    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    /// Width of cell i, i.e. x_i - x_{i-1}, for i = 1..N.
    double width(int i) const { return widths_[static_cast<std::size_t>(i - 1)]; }

    double min_width() const {
        double w = widths_[0];
        for (double v : widths_) w = std::min(w, v);
        return w;
    }
    double max_width() const {
        double w = widths_[0];
        for (double v : widths_) w = std::max(w, v);
        return w;
    }

    bool is_uniform(double rel_tol = 1e-12) const {
        return (max_width() - min_width()) <= rel_tol * max_width();
    }

    const std::vector<double>& nodes() const { return nodes_; }

    /// Plain-text dump, one node per line.
    void write_nodes(std::ostream& os) const {
        os.precision(17);
        for (double x : nodes_) os << x << "\n";
    }

private:
    std::vector<double> nodes_;
    std::vector<double> widths_;
};

inline Grid1D make_uniform_grid(double a, double b, int n_cells) {
    if (!(a < b)) throw std::invalid_argument("make_uniform_grid: require a < b");
    if (n_cells < 4) throw std::invalid_argument("make_uniform_grid: require N >= 4");
    std::vector<double> nodes(static_cast<std::size_t>(n_cells) + 1);
    const double h = (b - a) / n_cells;
    for (int i = 0; i <= n_cells; ++i) nodes[static_cast<std::size_t>(i)] = a + i * h;
    nodes.back() = b;
    return Grid1D(std::move(nodes));
}

/// Uniform grid with interior nodes jittered by rho*dx*u_i, u_i ~ U[-1,1]
/// from a seeded generator. Endpoints stay fixed, so the domain is exact
/// and the ordering invariant holds for rho < 0.5.
inline Grid1D make_perturbed_grid(double a, double b, int n_cells, double rho,
                                  std::uint64_t seed) {
    if (!(rho >= 0.0 && rho < 0.5))
        throw std::invalid_argument("make_perturbed_grid: require 0 <= rho < 0.5");
    if (!(a < b)) throw std::invalid_argument("make_perturbed_grid: require a < b");
    if (n_cells < 4) throw std::invalid_argument("make_perturbed_grid: require N >= 4");
    std::vector<double> nodes(static_cast<std::size_t>(n_cells) + 1);
    const double h = (b - a) / n_cells;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    nodes.front() = a;
    for (int i = 1; i < n_cells; ++i)
        nodes[static_cast<std::size_t>(i)] = a + i * h + rho * h * unif(rng);
    nodes.back() = b;
    return Grid1D(std::move(nodes));
}

/// Tensor-product mesh: an x-axis grid and a y-axis grid.
struct Grid2D {
    Grid1D x;
    Grid1D y;
};

/// Nodal values on a Grid1D plus the time they represent.
struct Field1D {
    std::vector<double> values;
    double time = 0.0;
};

/// Nodal values phi(i,j) on a Grid2D, row-major in j (y) with x fastest.
struct Field2D {
    std::vector<double> values;
    int nx = 0;  // nodes in x
    int ny = 0;  // nodes in y
    double time = 0.0;

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

}  // namespace hjsolve

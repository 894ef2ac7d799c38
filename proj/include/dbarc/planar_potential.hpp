#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dbarc/grid.hpp"

namespace dbarc::planar {

struct ComponentDecomposition {
    GridSet disc;                     // D on the grid
    std::vector<GridSet> components;  // D_j, largest first
    std::vector<GridSet> W;           // W[k-1] = D minus D_1..D_k
};

// W must lie in the open unit disc of its own grid.
ComponentDecomposition complement_components(const GridSet& W);

struct DirichletEig {
    double lambda = 0;
    RField v;  // zero off the mask, L2 norm 1
    double residual = 0;
    int iterations = 0;
};

DirichletEig dirichlet_ground_state(const GridSet& mask);

struct RayleighStage {
    int k = 0;
    GridSet Wk;
    DirichletEig eig;
};

struct RayleighSequence {
    std::vector<RayleighStage> stages;
    double max_lambda = 0;
    std::string notice;
};

RayleighSequence rayleigh_sequence(const ComponentDecomposition& d, int K);
RayleighSequence rayleigh_sequence(const GridSet& W, int K);

// Mean of log|z| over a square cell of side h centred at the origin.
double log_cell_mean(double h);

struct GreenResult {
    RField phi;
    RField residual;  // Delta_h phi - f on nodes with a full stencil
};

// (1/2pi) log|.| convolved with f by FFT, exact singular cell.
GreenResult greens_potential(const RField& f);

// integral of f(w)/|z-w| dA(w) by FFT, exact singular cell.
RField newtonian_potential(const RField& f);

// (1/2pi) log-kernel sum evaluated at the boundary ring, interior from the 5-point Poisson
// solve, so Delta_h phi = f holds to solver precision.
GreenResult discrete_greens_potential(const RField& f);

// Dirichlet 5-point Poisson solver on the interior of a grid box, factored once.
class PoissonBox {
public:
    explicit PoissonBox(const GridGeom& g);
    ~PoissonBox();
    PoissonBox(PoissonBox&&) noexcept;
    PoissonBox& operator=(PoissonBox&&) noexcept;

    const GridGeom& geom() const;
    // Delta_h u = f in the interior, u = boundary on the outer ring.
    std::vector<double> solve(const std::vector<double>& f, const std::vector<double>& boundary) const;
    // Same, iteratively refined in quad precision; returns the final max |Delta_h u - f|.
    std::vector<quad> solve_refined(const std::vector<quad>& f, const std::vector<double>& boundary,
                                    double* residual = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> p_;
};

// (1/2pi) sum_w log|z-w| f(w) h^2 at the nodes of the outer ring; zero elsewhere.
std::vector<double> log_kernel_boundary(const GridGeom& g, const std::vector<double>& f);

template <class T>
T laplace_h(const Field<T>& u, int i, int j) {
    const double h2 = u.g.h * u.g.h;
    return (u(i + 1, j) + u(i - 1, j) + u(i, j + 1) + u(i, j - 1) - 4 * u(i, j)) / T(h2);
}

}  // namespace dbarc::planar

#pragma once

#include <string>
#include <vector>

#include "dbarc/grid.hpp"

namespace dbarc::planar {

struct HolePeriod {
    GridSet hole;       // 8-connected component of the complement
    GridSet loop_set;   // hole plus its 8-neighbour ring; the loop is its boundary
    double period = 0;  // n * outward flux of Phi across the loop
    double distance_to_lattice = 0;  // to the nearest multiple of 2pi
    bool computable = true;          // loop fits inside the region
};

// Theta lives on cell centres: cell (a, b) has corners (a, b), (a, b+1), (a+1, b), (a+1, b+1).
template <class T>
struct ConjugateResult {
    GridGeom cells;
    std::vector<std::uint8_t> dual;     // cell has all four corners in the region
    std::vector<std::uint8_t> reached;  // connected to the basepoint cell
    std::vector<T> theta;               // unwrapped along the spanning tree
    std::vector<int> parent;            // tree parent cell, -1 at the root
    std::vector<HolePeriod> periods;
    std::vector<T> periods_exact;       // same periods at full precision
    double closure_max = 0;  // non-tree edge mismatch, distance to 2piZ
    double harmonic_residual = 0;  // max |h^2 Delta_h Phi| relative to the largest edge difference
    bool single_valued = true;
    std::string diagnostic;
};

struct ConjugateOptions {
    double harmonic_tol = 1e-3;
    double period_tol = 1e-6;  // times 2pi
};

// Integrates n(-Phi_y dx + Phi_x dy) on the dual grid from the cell at basepoint (i, j).
template <class T>
ConjugateResult<T> harmonic_conjugate(const Field<T>& Phi, const GridSet& region, T n, int bi, int bj,
                                      const ConjugateOptions& opt = {});

// n times the outward flux of Phi across the boundary of the node set S:
// sum over edges (p in S, q not in S) of Phi(q) - Phi(p).
template <class T>
T loop_period(const Field<T>& Phi, const GridSet& S, T n);

// 8-connected components of grid minus region that do not touch the grid border.
std::vector<GridSet> region_holes(const GridSet& region);
GridSet dilate8(const GridSet& s);

}  // namespace dbarc::planar

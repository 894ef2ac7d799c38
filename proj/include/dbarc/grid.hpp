#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dbarc/common.hpp"

namespace dbarc {

// Node (i, j) sits at x = x0 + j*h, y = y0 + i*h. Row-major storage.
struct GridGeom {
    int rows = 0, cols = 0;
    double h = 0, x0 = 0, y0 = 0;

    std::size_t size() const { return std::size_t(rows) * cols; }
    std::size_t idx(int i, int j) const { return std::size_t(i) * cols + j; }
    double x(int j) const { return x0 + j * h; }
    double y(int i) const { return y0 + i * h; }
    cplx z(int i, int j) const { return {x(j), y(i)}; }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < rows && j < cols; }
    bool same(const GridGeom& o) const {
        return rows == o.rows && cols == o.cols && h == o.h && x0 == o.x0 && y0 == o.y0;
    }

    // Square grid with a node at the origin and half-width >= L.
    static GridGeom centered(double L, double h);
};

template <class T>
struct Field {
    GridGeom g;
    std::vector<T> v;

    Field() = default;
    explicit Field(GridGeom geom, T fill = T{}) : g(geom), v(geom.size(), fill) {}
    T& operator()(int i, int j) { return v[g.idx(i, j)]; }
    const T& operator()(int i, int j) const { return v[g.idx(i, j)]; }
};

using RField = Field<double>;

struct GridSet {
    GridGeom g;
    std::vector<std::uint8_t> mask;

    GridSet() = default;
    explicit GridSet(GridGeom geom) : g(geom), mask(geom.size(), 0) {}

    bool operator()(int i, int j) const { return g.inside(i, j) && mask[g.idx(i, j)]; }
    void set(int i, int j, bool on = true) { mask[g.idx(i, j)] = on; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    double area() const { return double(count()) * g.h * g.h; }

    static GridSet from_predicate(const GridGeom& g, const std::function<bool(cplx)>& in);
};

GridSet set_union(const GridSet& a, const GridSet& b);
GridSet set_minus(const GridSet& a, const GridSet& b);
GridSet set_intersect(const GridSet& a, const GridSet& b);
bool is_subset(const GridSet& a, const GridSet& b);

// 4-connected components of m, largest first, ties by first node in row-major order.
std::vector<GridSet> components4(const GridSet& m);

// Open unit disc |z| < 1 on g.
GridSet unit_disc(const GridGeom& g);

// Nodes of m whose four neighbours are all in m.
GridSet interior_nodes(const GridSet& m);

// Exact Euclidean distance (in length units) from every node to the nearest node of m.
RField distance_to(const GridSet& m);

// Plain-text mask (rows of 0/1, first row = top) plus JSON sidecar {h, origin:[x,y]}.
// origin is the position of the bottom-left node.
GridSet read_mask(const std::string& path, const std::string& sidecar);
void write_mask(const GridSet& m, const std::string& path, const std::string& sidecar);

// Nearest-node lookup of src onto the geometry g.
GridSet resample(const GridSet& src, const GridGeom& g);

}  // namespace dbarc

#include "dbarc/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <type_traits>

#include <quadmath.h>

namespace dbarc::planar {

namespace {

inline double todbl(double x) { return x; }
inline double todbl(quad x) { return double(x); }
inline double absd(double x) { return std::fabs(x); }
inline quad absd(quad x) { return fabsq(x); }
inline double rnd(double x) { return std::nearbyint(x); }
inline quad rnd(quad x) { return nearbyintq(x); }

template <class T>
T two_pi() {
    if constexpr (std::is_same_v<T, quad>) return 2 * M_PIq;
    else return 2 * kPi;
}

template <class T>
T lattice_distance(T p) {
    T tp = two_pi<T>();
    return absd(p - tp * rnd(p / tp));
}

}  // namespace

GridSet dilate8(const GridSet& s) {
    GridSet r(s.g);
    for (int i = 0; i < s.g.rows; ++i)
        for (int j = 0; j < s.g.cols; ++j) {
            bool on = false;
            for (int di = -1; di <= 1 && !on; ++di)
                for (int dj = -1; dj <= 1 && !on; ++dj) on = s(i + di, j + dj);
            r.set(i, j, on);
        }
    return r;
}

std::vector<GridSet> region_holes(const GridSet& region) {
    const auto& g = region.g;
    std::vector<int> label(g.size(), -1);
    std::vector<GridSet> out;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            if (region(i, j) || label[g.idx(i, j)] >= 0) continue;
            GridSet comp(g);
            bool border = false;
            std::queue<std::pair<int, int>> Q;
            Q.push({i, j});
            label[g.idx(i, j)] = 0;
            while (!Q.empty()) {
                auto [a, b] = Q.front();
                Q.pop();
                comp.set(a, b);
                if (a == 0 || b == 0 || a == g.rows - 1 || b == g.cols - 1) border = true;
                for (int da = -1; da <= 1; ++da)
                    for (int db = -1; db <= 1; ++db) {
                        int p = a + da, q = b + db;
                        if (g.inside(p, q) && !region(p, q) && label[g.idx(p, q)] < 0) {
                            label[g.idx(p, q)] = 0;
                            Q.push({p, q});
                        }
                    }
            }
            if (!border) out.push_back(std::move(comp));
        }
    return out;
}

template <class T>
T loop_period(const Field<T>& Phi, const GridSet& S, T n) {
    const auto& g = S.g;
    T acc = 0;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            if (!S(i, j)) continue;
            const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int p = i + di[d], q = j + dj[d];
                if (g.inside(p, q) && !S(p, q)) acc += Phi(p, q) - Phi(i, j);
            }
        }
    return n * acc;
}

template <class T>
ConjugateResult<T> harmonic_conjugate(const Field<T>& Phi, const GridSet& region, T n, int bi, int bj,
                                      const ConjugateOptions& opt) {
    const auto& g = region.g;
    require(g.same(Phi.g), "conjugate: Phi and region on different grids");
    require(region(bi, bj), "conjugate: basepoint not in region");
    ConjugateResult<T> r;
    r.cells = g;
    r.cells.rows = g.rows - 1;
    r.cells.cols = g.cols - 1;
    r.cells.x0 = g.x0 + g.h / 2;
    r.cells.y0 = g.y0 + g.h / 2;
    const auto& c = r.cells;
    r.dual.assign(c.size(), 0);
    for (int a = 0; a < c.rows; ++a)
        for (int b = 0; b < c.cols; ++b)
            r.dual[c.idx(a, b)] = region(a, b) && region(a, b + 1) && region(a + 1, b) && region(a + 1, b + 1);

    // harmonicity on nodes surrounded by dual cells
    T worst = 0, scale = 0;
    for (int i = 1; i + 1 < g.rows; ++i)
        for (int j = 1; j + 1 < g.cols; ++j) {
            if (!(r.dual[c.idx(i - 1, j - 1)] && r.dual[c.idx(i - 1, j)] && r.dual[c.idx(i, j - 1)] &&
                  r.dual[c.idx(i, j)]))
                continue;
            T lap = Phi(i + 1, j) + Phi(i - 1, j) + Phi(i, j + 1) + Phi(i, j - 1) - 4 * Phi(i, j);
            worst = std::max(worst, absd(lap));
            scale = std::max(scale, absd(Phi(i + 1, j) - Phi(i, j)));
            scale = std::max(scale, absd(Phi(i, j + 1) - Phi(i, j)));
        }
    r.harmonic_residual = scale > 0 ? todbl(worst / scale) : 0.0;
    if (r.harmonic_residual > opt.harmonic_tol)
        throw InputError("conjugate: Phi is not discretely harmonic on the region (relative residual " +
                         std::to_string(r.harmonic_residual) + ")");

    // increments: east move crosses the vertical edge (a, b+1)-(a+1, b+1), north move the
    // horizontal edge (a+1, b)-(a+1, b+1)
    auto east = [&](int a, int b) { return -n * (Phi(a + 1, b + 1) - Phi(a, b + 1)); };
    auto north = [&](int a, int b) { return n * (Phi(a + 1, b + 1) - Phi(a + 1, b)); };

    int root_a = -1, root_b = -1;
    for (auto [a, b] : {std::pair{bi, bj}, std::pair{bi - 1, bj}, std::pair{bi, bj - 1}, std::pair{bi - 1, bj - 1}})
        if (c.inside(a, b) && r.dual[c.idx(a, b)] && root_a < 0) root_a = a, root_b = b;
    require(root_a >= 0, "conjugate: basepoint has no surrounding dual cell");

    r.theta.assign(c.size(), T(0));
    r.reached.assign(c.size(), 0);
    r.parent.assign(c.size(), -1);
    std::queue<std::pair<int, int>> Q;
    Q.push({root_a, root_b});
    r.reached[c.idx(root_a, root_b)] = 1;
    while (!Q.empty()) {
        auto [a, b] = Q.front();
        Q.pop();
        const T t0 = r.theta[c.idx(a, b)];
        // row-major neighbour order
        const int da[] = {-1, 0, 0, 1}, db[] = {0, -1, 1, 0};
        for (int d = 0; d < 4; ++d) {
            int p = a + da[d], q = b + db[d];
            if (!c.inside(p, q) || !r.dual[c.idx(p, q)] || r.reached[c.idx(p, q)]) continue;
            T inc = d == 0 ? -north(p, q) : d == 1 ? -east(p, q) : d == 2 ? east(a, b) : north(a, b);
            r.theta[c.idx(p, q)] = t0 + inc;
            r.reached[c.idx(p, q)] = 1;
            r.parent[c.idx(p, q)] = static_cast<int>(c.idx(a, b));
            Q.push({p, q});
        }
    }

    T closure = 0;
    for (int a = 0; a < c.rows; ++a)
        for (int b = 0; b < c.cols; ++b) {
            if (!r.reached[c.idx(a, b)]) continue;
            if (b + 1 < c.cols && r.reached[c.idx(a, b + 1)]) {
                T m = r.theta[c.idx(a, b + 1)] - r.theta[c.idx(a, b)] - east(a, b);
                closure = std::max(closure, lattice_distance(m));
            }
            if (a + 1 < c.rows && r.reached[c.idx(a + 1, b)]) {
                T m = r.theta[c.idx(a + 1, b)] - r.theta[c.idx(a, b)] - north(a, b);
                closure = std::max(closure, lattice_distance(m));
            }
        }
    r.closure_max = todbl(closure);

    const double tol = opt.period_tol * 2 * kPi;
    for (auto& hole : region_holes(region)) {
        HolePeriod hp;
        hp.loop_set = dilate8(hole);
        // the loop's crossing cells need every corner outside the hole in the region
        GridSet outer = dilate8(hp.loop_set);
        for (int i = 0; i < g.rows && hp.computable; ++i)
            for (int j = 0; j < g.cols; ++j)
                if (outer(i, j) && !hole(i, j) && !region(i, j)) {
                    hp.computable = false;
                    break;
                }
        hp.hole = std::move(hole);
        T p = hp.computable ? loop_period(Phi, hp.loop_set, n) : T(0);
        hp.period = todbl(p);
        hp.distance_to_lattice = todbl(lattice_distance(p));
        if (hp.computable && hp.distance_to_lattice > tol) r.single_valued = false;
        r.periods_exact.push_back(p);
        r.periods.push_back(std::move(hp));
    }
    if (r.closure_max > tol) r.single_valued = false;
    if (!r.single_valued) r.diagnostic = "conjugate not single-valued after exponentiation";
    return r;
}

template ConjugateResult<double> harmonic_conjugate(const Field<double>&, const GridSet&, double, int, int,
                                                    const ConjugateOptions&);
template ConjugateResult<quad> harmonic_conjugate(const Field<quad>&, const GridSet&, quad, int, int,
                                                  const ConjugateOptions&);
template double loop_period(const Field<double>&, const GridSet&, double);
template quad loop_period(const Field<quad>&, const GridSet&, quad);

}  // namespace dbarc::planar

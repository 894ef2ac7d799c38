#include "dbarc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <json.hpp>

namespace dbarc {

GridGeom GridGeom::centered(double L, double h) {
    require(L > 0 && h > 0, "grid: extent and spacing must be positive");
    int m = static_cast<int>(std::ceil(L / h - 1e-9));
    GridGeom g;
    g.rows = g.cols = 2 * m + 1;
    g.h = h;
    g.x0 = g.y0 = -m * h;
    return g;
}

std::size_t GridSet::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

GridSet GridSet::from_predicate(const GridGeom& g, const std::function<bool(cplx)>& in) {
    GridSet s(g);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) s.set(i, j, in(g.z(i, j)));
    return s;
}

static void same_grid(const GridSet& a, const GridSet& b) {
    if (!a.g.same(b.g)) throw InputError("grid sets live on different grids");
}

GridSet set_union(const GridSet& a, const GridSet& b) {
    same_grid(a, b);
    GridSet r = a;
    for (std::size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] | b.mask[k];
    return r;
}

GridSet set_minus(const GridSet& a, const GridSet& b) {
    same_grid(a, b);
    GridSet r = a;
    for (std::size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] && !b.mask[k];
    return r;
}

GridSet set_intersect(const GridSet& a, const GridSet& b) {
    same_grid(a, b);
    GridSet r = a;
    for (std::size_t k = 0; k < r.mask.size(); ++k) r.mask[k] = a.mask[k] & b.mask[k];
    return r;
}

bool is_subset(const GridSet& a, const GridSet& b) {
    same_grid(a, b);
    for (std::size_t k = 0; k < a.mask.size(); ++k)
        if (a.mask[k] && !b.mask[k]) return false;
    return true;
}

std::vector<GridSet> components4(const GridSet& m) {
    const auto& g = m.g;
    std::vector<int> label(g.size(), -1);
    std::vector<GridSet> out;
    std::queue<std::pair<int, int>> Q;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            if (!m(i, j) || label[g.idx(i, j)] >= 0) continue;
            int id = static_cast<int>(out.size());
            out.emplace_back(g);
            label[g.idx(i, j)] = id;
            Q.push({i, j});
            while (!Q.empty()) {
                auto [a, b] = Q.front();
                Q.pop();
                out[id].set(a, b);
                const int da[] = {1, -1, 0, 0}, db[] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int p = a + da[d], q = b + db[d];
                    if (m(p, q) && label[g.idx(p, q)] < 0) {
                        label[g.idx(p, q)] = id;
                        Q.push({p, q});
                    }
                }
            }
        }
    // discovery order already sorts ties by seed; stable sort keeps it
    std::vector<std::size_t> counts(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) counts[k] = out[k].count();
    std::vector<std::size_t> order(out.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return counts[a] > counts[b]; });
    std::vector<GridSet> sorted;
    for (auto k : order) sorted.push_back(std::move(out[k]));
    return sorted;
}

GridSet unit_disc(const GridGeom& g) {
    return GridSet::from_predicate(g, [](cplx z) { return std::abs(z) < 1.0; });
}

GridSet interior_nodes(const GridSet& m) {
    GridSet r(m.g);
    for (int i = 0; i < m.g.rows; ++i)
        for (int j = 0; j < m.g.cols; ++j)
            r.set(i, j, m(i, j) && m(i + 1, j) && m(i - 1, j) && m(i, j + 1) && m(i, j - 1));
    return r;
}

// 1-D squared distance transform of a sampled function (lower envelope of parabolas).
static void edt1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    const double inf = std::numeric_limits<double>::infinity();
    int first = 0;
    while (first < n && f[first] == inf) ++first;
    if (first == n) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    v[0] = first;
    z[0] = -inf;
    z[1] = inf;
    for (int q = first + 1; q < n; ++q) {
        if (f[q] == inf) continue;
        auto cross = [&](int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
        double s = cross(v[k]);
        while (s <= z[k]) s = cross(v[--k]);
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

RField distance_to(const GridSet& m) {
    const auto& g = m.g;
    const double inf = std::numeric_limits<double>::infinity();
    RField out(g, inf);
    if (m.empty()) return out;
    std::vector<double> f, d;
    std::vector<double> tmp(g.size());
    f.resize(g.rows);
    d.resize(g.rows);
    for (int j = 0; j < g.cols; ++j) {
        for (int i = 0; i < g.rows; ++i) f[i] = m(i, j) ? 0.0 : inf;
        edt1d(f, d);
        for (int i = 0; i < g.rows; ++i) tmp[g.idx(i, j)] = d[i];
    }
    f.resize(g.cols);
    d.resize(g.cols);
    for (int i = 0; i < g.rows; ++i) {
        for (int j = 0; j < g.cols; ++j) f[j] = tmp[g.idx(i, j)];
        edt1d(f, d);
        for (int j = 0; j < g.cols; ++j) out(i, j) = std::sqrt(d[j]) * g.h;
    }
    return out;
}

GridSet read_mask(const std::string& path, const std::string& sidecar) {
    std::ifstream in(path);
    if (!in) throw InputError("mask: cannot read " + path);
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::string r;
        for (char c : line) {
            if (c == '0' || c == '1') r.push_back(c);
            else if (c != ' ' && c != '\t' && c != '\r' && c != ',')
                throw InputError("mask: unexpected character in " + path);
        }
        if (!r.empty()) rows.push_back(r);
    }
    if (rows.empty()) throw InputError("mask: file " + path + " is empty");
    for (const auto& r : rows)
        if (r.size() != rows[0].size()) throw InputError("mask: ragged rows in " + path);
    std::ifstream js(sidecar);
    if (!js) throw InputError("mask: cannot read sidecar " + sidecar);
    nlohmann::json meta;
    try {
        js >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("mask: sidecar ") + e.what());
    }
    GridGeom g;
    g.rows = static_cast<int>(rows.size());
    g.cols = static_cast<int>(rows[0].size());
    try {
        g.h = meta.at("h").get<double>();
        g.x0 = meta.at("origin").at(0).get<double>();
        g.y0 = meta.at("origin").at(1).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("mask: sidecar field ") + e.what());
    }
    if (!(g.h > 0)) throw InputError("mask: sidecar field h must be positive");
    GridSet s(g);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) s.set(i, j, rows[g.rows - 1 - i][j] == '1');
    return s;
}

void write_mask(const GridSet& m, const std::string& path, const std::string& sidecar) {
    std::ofstream out(path);
    for (int i = m.g.rows - 1; i >= 0; --i) {
        for (int j = 0; j < m.g.cols; ++j) out << (m(i, j) ? '1' : '0');
        out << '\n';
    }
    std::ofstream js(sidecar);
    js << nlohmann::json{{"h", m.g.h}, {"origin", {m.g.x0, m.g.y0}}}.dump() << '\n';
}

GridSet resample(const GridSet& src, const GridGeom& g) {
    GridSet r(g);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            int si = static_cast<int>(std::lround((g.y(i) - src.g.y0) / src.g.h));
            int sj = static_cast<int>(std::lround((g.x(j) - src.g.x0) / src.g.h));
            r.set(i, j, src(si, sj));
        }
    return r;
}

}  // namespace dbarc

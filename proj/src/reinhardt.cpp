#include "dbarc/reinhardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
// the Boost 1.74 pchip header calls unqualified isnan
namespace boost::math::interpolators { using std::isnan; }
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dbarc/simplex.hpp"

namespace dbarc::reinhardt {

using Vec = std::vector<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct RadialSamples {
    using Pchip = boost::math::interpolators::pchip<Vec>;
    std::unique_ptr<Pchip> upper, lower;
    double lo = 0, hi = 0;
    double R(double r) const { return (*upper)(std::clamp(r, lo, hi)); }
    double Rmin(double r) const { return lower ? (*lower)(std::clamp(r, lo, hi)) : 0.0; }
};

namespace {

double dot(const Vec& a, const Vec& x) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
}

double safe_log(double v) { return v > 0 ? std::log(v) : -kInf; }

}  // namespace

double Profile::level(const Vec& x) const {
    switch (type) {
    case ProfileType::HRep: {
        double v = -kInf;
        for (std::size_t i = 0; i < A.size(); ++i) v = std::max(v, dot(A[i], x) - b[i]);
        return v;
    }
    case ProfileType::Ball: {
        double m = *std::max_element(x.begin(), x.end());
        double s = 0;
        for (double t : x) s += std::exp(2 * (t - m));
        return 2 * m + std::log(s);
    }
    case ProfileType::Radial: {
        double v = x[0] - std::log(r1.back());
        if (r1.front() > 0) v = std::max(v, std::log(r1.front()) - x[0]);
        if (v > 0) return v;
        double r = std::exp(x[0]);
        v = std::max(v, x[1] - safe_log(interp->R(r)));
        if (!r2min.empty()) v = std::max(v, safe_log(interp->Rmin(r)) - x[1]);
        return v;
    }
    case ProfileType::Product: {
        double v = -kInf;
        std::size_t off = 0;
        for (const auto& f : factors) {
            Vec y(x.begin() + off, x.begin() + off + f.dim);
            v = std::max(v, f.level(y));
            off += f.dim;
        }
        return v;
    }
    }
    return kInf;
}

Profile hrep(std::vector<Vec> A, Vec b) {
    require(!A.empty() && A.size() == b.size(), "hrep: need matching nonempty A and b");
    Profile p;
    p.type = ProfileType::HRep;
    p.dim = int(A[0].size());
    require(p.dim >= 1, "hrep: zero-dimensional rows");
    for (const auto& r : A) require(int(r.size()) == p.dim, "hrep: ragged rows");
    p.A = std::move(A);
    p.b = std::move(b);
    return p;
}

Profile radial(Vec r1, Vec r2max, Vec r2min) {
    require(r1.size() >= 4, "radial: need at least 4 samples");
    require(r2max.size() == r1.size(), "radial: r2max length mismatch");
    require(r2min.empty() || r2min.size() == r1.size(), "radial: r2min length mismatch");
    require(r1[0] >= 0, "radial: radii must be nonnegative");
    for (std::size_t k = 1; k < r1.size(); ++k) require(r1[k] > r1[k - 1], "radial: r1 must increase");
    for (std::size_t k = 0; k < r1.size(); ++k) {
        require(r2max[k] >= 0, "radial: negative profile value");
        if (!r2min.empty()) require(r2min[k] >= 0 && r2min[k] <= r2max[k], "radial: r2min must lie in [0, r2max]");
    }
    Profile p;
    p.type = ProfileType::Radial;
    p.dim = 2;
    p.r1 = r1;
    p.r2max = r2max;
    p.r2min = r2min;
    auto s = std::make_shared<RadialSamples>();
    s->lo = r1.front();
    s->hi = r1.back();
    s->upper = std::make_unique<RadialSamples::Pchip>(Vec(r1), Vec(r2max));
    if (!r2min.empty()) s->lower = std::make_unique<RadialSamples::Pchip>(Vec(r1), Vec(r2min));
    p.interp = std::move(s);
    return p;
}

Profile ball(int dim) {
    require(dim >= 1, "ball: dimension must be >= 1");
    Profile p;
    p.type = ProfileType::Ball;
    p.dim = dim;
    return p;
}

Profile product(std::vector<Profile> factors) {
    require(factors.size() >= 2, "product: need at least two factors");
    Profile p;
    p.type = ProfileType::Product;
    for (const auto& f : factors) p.dim += f.dim;
    p.factors = std::move(factors);
    return p;
}

namespace {

using nlohmann::json;

Profile profile_from_json(const json& j) {
    require(j.is_object() && j.contains("type"), "model: profile needs a type");
    const std::string t = j.at("type").get<std::string>();
    const json d = j.value("data", json::object());
    if (t == "hrep") return hrep(d.at("A").get<std::vector<Vec>>(), d.at("b").get<Vec>());
    if (t == "radial")
        return radial(d.at("r1").get<Vec>(), d.at("r2max").get<Vec>(), d.value("r2min", Vec{}));
    if (t == "ball") return ball(d.at("dim").get<int>());
    if (t == "product") {
        std::vector<Profile> fs;
        for (const auto& f : d.at("factors")) fs.push_back(profile_from_json(f));
        return product(std::move(fs));
    }
    throw InputError("model: unknown profile type '" + t + "'");
}

json profile_to_json(const Profile& p) {
    switch (p.type) {
    case ProfileType::HRep: return {{"type", "hrep"}, {"data", {{"A", p.A}, {"b", p.b}}}};
    case ProfileType::Radial: {
        json d = {{"r1", p.r1}, {"r2max", p.r2max}};
        if (!p.r2min.empty()) d["r2min"] = p.r2min;
        return {{"type", "radial"}, {"data", d}};
    }
    case ProfileType::Ball: return {{"type", "ball"}, {"data", {{"dim", p.dim}}}};
    case ProfileType::Product: {
        json fs = json::array();
        for (const auto& f : p.factors) fs.push_back(profile_to_json(f));
        return {{"type", "product"}, {"data", {{"factors", fs}}}};
    }
    }
    return {};
}

// Upper bound of x_j over the log image (+inf if unbounded).
double coord_sup(const Profile& p, int j) {
    switch (p.type) {
    case ProfileType::HRep: {
        Vec c(p.dim, 0.0);
        c[j] = 1;
        auto r = lp::maximize(c, p.A, p.b);
        require(r.status != lp::Status::Infeasible, "hrep: empty log image");
        return r.status == lp::Status::Unbounded ? kInf : r.value;
    }
    case ProfileType::Ball: return 0;
    case ProfileType::Radial:
        return j == 0 ? std::log(p.r1.back()) : std::log(*std::max_element(p.r2max.begin(), p.r2max.end()));
    case ProfileType::Product:
        for (const auto& f : p.factors) {
            if (j < f.dim) return coord_sup(f, j);
            j -= f.dim;
        }
    }
    return kInf;
}

constexpr double kFloor = -6;

Vec sample_box_point(const Profile& p, std::mt19937_64& rng) {
    Vec x(p.dim);
    for (int j = 0; j < p.dim; ++j) {
        double hi = std::min(coord_sup(p, j), 6.0);
        std::uniform_real_distribution<double> U(kFloor, hi + 0.1);
        x[j] = U(rng);
    }
    return x;
}

std::vector<Vec> inside_samples(const Profile& p, int want, std::mt19937_64& rng) {
    std::vector<Vec> pts;
    for (int t = 0; t < 400 * want && int(pts.size()) < want; ++t) {
        Vec x = sample_box_point(p, rng);
        if (p.level(x) < 0) pts.push_back(std::move(x));
    }
    return pts;
}

Vec interior_point(const Profile& p) {
    if (p.type == ProfileType::HRep) {
        // maximize the uniform slack
        std::vector<Vec> A = p.A;
        for (auto& r : A) r.push_back(1.0);
        Vec cap(p.dim + 1, 0.0);
        cap[p.dim] = 1;
        A.push_back(cap);
        Vec b = p.b;
        b.push_back(1.0);
        auto r = lp::maximize(cap, A, b);
        require(r.status == lp::Status::Optimal && r.value > 1e-9, "hrep: log image has empty interior");
        r.x.pop_back();
        return r.x;
    }
    for (double t = 0.25; t <= 64; t *= 2) {
        Vec x(p.dim, -t);
        if (p.level(x) < 0) return x;
    }
    std::mt19937_64 rng(7);
    auto pts = inside_samples(p, 64, rng);
    require(!pts.empty(), "model: log image appears empty");
    Vec c(p.dim, 0.0);
    for (const auto& x : pts)
        for (int j = 0; j < p.dim; ++j) c[j] += x[j] / pts.size();
    return c;
}

bool pure_hrep(const Profile& p) {
    if (p.type == ProfileType::HRep) return true;
    if (p.type != ProfileType::Product) return false;
    return std::all_of(p.factors.begin(), p.factors.end(), pure_hrep);
}

// Block-diagonal H-representation of a product of H-representations.
void flatten_hrep(const Profile& p, int off, int n, std::vector<Vec>& A, Vec& b) {
    if (p.type == ProfileType::HRep) {
        for (std::size_t i = 0; i < p.A.size(); ++i) {
            Vec r(n, 0.0);
            for (int j = 0; j < p.dim; ++j) r[off + j] = p.A[i][j];
            A.push_back(std::move(r));
            b.push_back(p.b[i]);
        }
        return;
    }
    for (const auto& f : p.factors) flatten_hrep(f, off, n, A, b), off += f.dim;
}

}  // namespace

bool in_log_image(const ReinhardtModel& m, const Vec& x) {
    require(int(x.size()) == m.n, "log image: point dimension mismatch");
    return m.profile.level(x) < 0;
}

LogImage log_image(const ReinhardtModel& m, unsigned seed) {
    LogImage L;
    L.region = m.profile;
    if (m.profile.type == ProfileType::HRep) {
        L.verdict = "pseudoconvex-compatible";
        return L;
    }
    std::mt19937_64 rng(seed);
    auto pts = inside_samples(m.profile, 2000, rng);
    L.worst_midpoint = -kInf;
    for (std::size_t k = 0; k + 1 < pts.size(); k += 2) {
        Vec mid(m.n);
        for (int j = 0; j < m.n; ++j) mid[j] = 0.5 * (pts[k][j] + pts[k + 1][j]);
        L.worst_midpoint = std::max(L.worst_midpoint, m.profile.level(mid));
        ++L.pairs_tested;
    }
    L.convex = L.worst_midpoint <= 1e-9;
    L.verdict = L.convex ? "pseudoconvex-compatible" : "not convex";
    return L;
}

bool RecessionCone::contains(const ReinhardtModel& m, const Vec& d) const {
    require(int(d.size()) == m.n, "recession cone: direction dimension mismatch");
    if (!sampled) {
        for (const auto& r : A)
            if (dot(r, d) > 1e-12) return false;
        return true;
    }
    Vec x0 = interior_point(m.profile);
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
        Vec x = x0;
        for (int j = 0; j < m.n; ++j) x[j] += t * d[j];
        if (!(m.profile.level(x) < 0)) return false;
    }
    return true;
}

RecessionCone recession_cone(const ReinhardtModel& m) {
    RecessionCone C;
    if (pure_hrep(m.profile)) {
        Vec b;
        flatten_hrep(m.profile, 0, m.n, C.A, b);
    } else {
        C.sampled = true;
    }
    for (int j = 0; j < m.n; ++j) {
        Vec d(m.n, 0.0);
        d[j] = -1;
        C.contains_neg_e.push_back(C.contains(m, d));
    }
    return C;
}

ReinhardtModel make_model(Profile p, std::vector<bool> complete, std::string name) {
    ReinhardtModel m;
    m.n = p.dim;
    require(m.n >= 1, "model: dimension must be >= 1");
    if (complete.empty()) complete.assign(m.n, true);
    require(int(complete.size()) == m.n, "model: completeness flags must have length n");
    m.profile = std::move(p);
    m.complete = std::move(complete);
    m.name = std::move(name);
    interior_point(m.profile);
    auto L = log_image(m);
    if (!L.convex) throw InputError("model: log image is not convex, domain is not pseudoconvex");
    auto C = recession_cone(m);
    for (int j = 0; j < m.n; ++j)
        if (m.complete[j] && !C.contains_neg_e[j])
            throw InputError("model: declared complete in z" + std::to_string(j + 1) +
                             " but the projection does not reach that hyperplane");
    return m;
}

ReinhardtModel model_from_json(const json& j) {
    try {
        Profile p = profile_from_json(j.at("profile"));
        if (j.contains("n")) require(j.at("n").get<int>() == p.dim, "model: n does not match the profile");
        return make_model(std::move(p), j.value("complete", std::vector<bool>{}), j.value("name", std::string{}));
    } catch (const json::exception& e) {
        throw InputError(std::string("model: malformed JSON: ") + e.what());
    }
}

json model_to_json(const ReinhardtModel& m) {
    return {{"n", m.n}, {"profile", profile_to_json(m.profile)}, {"complete", m.complete}, {"name", m.name}};
}

ReinhardtModel bidisc() { return make_model(hrep({{1, 0}, {0, 1}}, {0, 0}), {true, true}, "bidisc"); }

ReinhardtModel unit_ball(int n) { return make_model(ball(n), {}, "ball"); }

ReinhardtModel punctured_ball() { return make_model(ball(2), {false, true}, "punctured-ball"); }

ReinhardtModel disc_times_ball() { return make_model(product({hrep({{1}}, {0}), ball(2)}), {}, "disc-x-ball"); }

ReinhardtModel named_model(const std::string& name) {
    if (name == "bidisc") return bidisc();
    if (name == "ball") return unit_ball(2);
    if (name == "ball3") return unit_ball(3);
    if (name == "punctured-ball") return punctured_ball();
    if (name == "disc-x-ball") return disc_times_ball();
    throw InputError("unknown model name '" + name + "'");
}

namespace {

struct Face {
    int dim = 0;
    bool interior = false;
    std::string kind;
    std::vector<int> support;
    Vec point;
};

int rank_of(const std::vector<Vec>& rows, int n) {
    if (rows.empty()) return 0;
    Eigen::MatrixXd M(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rows[i][j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    return int(lu.rank());
}

// Faces by exact active set: S is the equality set of some point iff the remaining rows can be
// made strictly slack.
std::vector<Face> hrep_faces(const Profile& p) {
    const int m = int(p.A.size()), n = p.dim;
    require(m <= 16, "hrep: face enumeration limited to 16 half-spaces");
    std::vector<Face> out;
    for (unsigned S = 0; S < (1u << m); ++S) {
        std::vector<Vec> A, E, act;
        Vec b, f;
        std::vector<int> sup;
        for (int i = 0; i < m; ++i) {
            Vec r = p.A[i];
            if (S >> i & 1) {
                r.push_back(0.0);
                E.push_back(r);
                f.push_back(p.b[i]);
                act.push_back(p.A[i]);
                sup.push_back(i);
            } else {
                r.push_back(1.0);
                A.push_back(r);
                b.push_back(p.b[i]);
            }
        }
        Vec c(n + 1, 0.0);
        c[n] = 1;
        A.push_back(c);
        b.push_back(1.0);
        auto r = lp::maximize(c, A, b, E, f);
        if (r.status != lp::Status::Optimal || r.value <= 1e-9) continue;
        Face F;
        F.dim = n - rank_of(act, n);
        F.interior = S == 0;
        F.kind = F.interior ? "interior" : "face";
        F.support = sup;
        r.x.pop_back();
        F.point = r.x;
        out.push_back(std::move(F));
    }
    return out;
}

// Maximal runs (>= 3 samples) on which the log-log graph is affine.
std::vector<std::pair<int, int>> affine_runs(const Vec& r1, const Vec& r2) {
    std::vector<int> idx;
    for (std::size_t k = 0; k < r1.size(); ++k)
        if (r1[k] > 0 && r2[k] > 0) idx.push_back(int(k));
    std::vector<std::pair<int, int>> runs;
    int start = -1;
    for (std::size_t t = 0; t + 2 < idx.size(); ++t) {
        double ux = std::log(r1[idx[t + 1]]) - std::log(r1[idx[t]]);
        double uy = std::log(r2[idx[t + 1]]) - std::log(r2[idx[t]]);
        double vx = std::log(r1[idx[t + 2]]) - std::log(r1[idx[t + 1]]);
        double vy = std::log(r2[idx[t + 2]]) - std::log(r2[idx[t + 1]]);
        double s = std::fabs(ux * vy - uy * vx) / (std::hypot(ux, uy) * std::hypot(vx, vy));
        bool flat = s <= 1e-8;
        if (flat && start < 0) start = int(t);
        if (!flat && start >= 0) runs.push_back({idx[start], idx[t + 1]}), start = -1;
    }
    if (start >= 0) runs.push_back({idx[start], idx.back()});
    return runs;
}

std::vector<Face> radial_faces(const Profile& p) {
    std::vector<Face> out;
    out.push_back({2, true, "interior", {}, interior_point(p)});
    auto add_runs = [&](const Vec& r2, const char* kind) {
        for (auto [a, b] : affine_runs(p.r1, r2))
            out.push_back({1, false, kind, {a, b}, {std::log(p.r1[a]), std::log(r2[a])}});
    };
    add_runs(p.r2max, "segment");
    if (!p.r2min.empty()) add_runs(p.r2min, "lower segment");
    const int last = int(p.r1.size()) - 1;
    double lo_last = p.r2min.empty() ? 0.0 : p.r2min[last];
    if (p.r2max[last] > lo_last)
        out.push_back({1, false, "side", {last, last}, {std::log(p.r1[last]), std::log(p.r2max[last]) - 1}});
    if (p.r1[0] > 0) {
        double lo0 = p.r2min.empty() ? 0.0 : p.r2min[0];
        if (p.r2max[0] > lo0)
            out.push_back({1, false, "side", {0, 0}, {std::log(p.r1[0]), std::log(p.r2max[0]) - 1}});
    }
    out.push_back({0, false, "boundary point", {}, {}});
    return out;
}

std::vector<Face> all_faces(const Profile& p) {
    switch (p.type) {
    case ProfileType::HRep: return hrep_faces(p);
    case ProfileType::Radial: return radial_faces(p);
    case ProfileType::Ball:
        return {{p.dim, true, "interior", {}, Vec(p.dim, -1.0 - 0.5 * std::log(double(p.dim)))},
                {0, false, "boundary point", {}, {}}};
    case ProfileType::Product: {
        std::vector<Face> acc = {{0, true, "", {}, {}}};
        for (const auto& f : p.factors) {
            std::vector<Face> next;
            for (const auto& a : acc)
                for (const auto& g : all_faces(f)) {
                    Face c;
                    c.dim = a.dim + g.dim;
                    c.interior = a.interior && g.interior;
                    c.kind = a.kind.empty() ? g.kind : a.kind + " x " + g.kind;
                    c.support = a.support;
                    c.support.insert(c.support.end(), g.support.begin(), g.support.end());
                    c.point = a.point;
                    c.point.insert(c.point.end(), g.point.begin(), g.point.end());
                    next.push_back(std::move(c));
                }
            acc = std::move(next);
        }
        return acc;
    }
    }
    return {};
}

// Log image of the slice {z_j = 0, j dropped}, on the kept coordinates. dim 0 when nothing is kept.
Profile slice(const Profile& p, const std::vector<bool>& drop) {
    int kept = 0;
    for (bool d : drop) kept += !d;
    Profile s;
    s.dim = kept;
    if (kept == 0) return s;
    switch (p.type) {
    case ProfileType::HRep: {
        s.type = ProfileType::HRep;
        for (std::size_t i = 0; i < p.A.size(); ++i) {
            bool vanishes = false;
            Vec r;
            for (int j = 0; j < p.dim; ++j) {
                if (drop[j]) vanishes |= p.A[i][j] > 0;
                else r.push_back(p.A[i][j]);
            }
            if (vanishes) continue;
            s.A.push_back(std::move(r));
            s.b.push_back(p.b[i]);
        }
        return s;
    }
    case ProfileType::Ball: return ball(kept);
    case ProfileType::Radial:
        if (drop[0]) return hrep({{1.0}}, {std::log(p.interp->R(p.r1.front()))});
        return hrep({{1.0}}, {std::log(p.r1.back())});
    case ProfileType::Product: {
        std::vector<Profile> fs;
        int off = 0;
        for (const auto& f : p.factors) {
            std::vector<bool> d(drop.begin() + off, drop.begin() + off + f.dim);
            Profile sf = slice(f, d);
            if (sf.dim > 0) fs.push_back(std::move(sf));
            off += f.dim;
        }
        if (fs.size() == 1) return fs[0];
        return product(std::move(fs));
    }
    }
    return s;
}

}  // namespace

std::vector<FlatPiece> flat_pieces(const ReinhardtModel& m, int q) {
    require(q >= 1 && q <= m.n - 1, "flat pieces: need 1 <= q <= n-1");
    std::vector<FlatPiece> out;
    for (auto& F : all_faces(m.profile))
        if (!F.interior && F.dim >= q) out.push_back({F.dim, F.kind, F.support, F.point});
    return out;
}

std::vector<HyperplaneVariety> hyperplane_varieties(const ReinhardtModel& m, int q) {
    auto C = recession_cone(m);
    std::vector<HyperplaneVariety> out;
    for (unsigned J = 1; J < (1u << m.n); ++J) {
        std::vector<bool> drop(m.n);
        std::vector<int> zeros;
        bool reach = true, deleted = false;
        for (int j = 0; j < m.n; ++j)
            if (J >> j & 1) {
                drop[j] = true;
                zeros.push_back(j + 1);
                reach &= C.contains_neg_e[j];
                deleted |= !m.complete[j];
            }
        if (!reach) continue;
        const int k = m.n - int(zeros.size());
        if (k < q) continue;
        if (deleted) {
            out.push_back({zeros, k, "deleted coordinate hyperplane"});
            continue;
        }
        Profile s = slice(m.profile, drop);
        if (s.type == ProfileType::HRep && s.A.empty()) continue;
        for (auto& F : all_faces(s))
            if (!F.interior && F.dim >= q) out.push_back({zeros, F.dim, "flat face of the slice: " + F.kind});
    }
    return out;
}

Verdict compactness_verdict(const ReinhardtModel& m, int q) {
    Verdict v;
    v.pieces = flat_pieces(m, q);
    if (q == m.n - 1) {
        v.verdict = v.pieces.empty() ? "compact" : "non-compact";
        v.rule = "q = n-1: compact iff no flat boundary piece of dimension n-1 off the coordinate hyperplanes";
        return v;
    }
    if (!v.pieces.empty()) {
        v.verdict = "non-compact";
        v.rule = "flat boundary piece of dimension >= q off the coordinate hyperplanes";
        return v;
    }
    v.hyperplane = hyperplane_varieties(m, q);
    if (v.hyperplane.empty()) {
        v.verdict = "compact-by-sufficiency";
        v.rule = "no boundary variety of dimension >= q anywhere";
    } else {
        v.verdict = "unknown";
        v.rule = "varieties of dimension >= q only inside coordinate hyperplanes";
    }
    return v;
}

namespace {

double sup_norm2(const Profile& p) {
    switch (p.type) {
    case ProfileType::Ball: return 1;
    case ProfileType::Radial: {
        double s = 0;
        for (std::size_t k = 0; k < p.r1.size(); ++k) s = std::max(s, p.r1[k] * p.r1[k] + p.r2max[k] * p.r2max[k]);
        return s;
    }
    case ProfileType::HRep: {
        for (int j = 0; j < p.dim; ++j)
            if (!std::isfinite(coord_sup(p, j))) return kInf;
        double s = 0;
        for (auto& F : hrep_faces(p)) {
            if (F.dim != 0) continue;
            double t = 0;
            for (double x : F.point) t += std::exp(2 * x);
            s = std::max(s, t);
        }
        return s;
    }
    case ProfileType::Product: {
        double s = 0;
        for (const auto& f : p.factors) s += sup_norm2(f);
        return s;
    }
    }
    return kInf;
}

}  // namespace

double diameter(const ReinhardtModel& m) { return 2 * std::sqrt(sup_norm2(m.profile)); }


namespace {

// log of the integral of e^{c x} over (lo, hi)
double log_exp_integral(double c, double lo, double hi) {
    if (!std::isfinite(hi)) return kInf;
    if (!std::isfinite(lo)) return c > 0 ? c * hi - std::log(c) : kInf;
    if (c == 0) return std::log(hi - lo);
    if (c > 0) return c * hi + std::log(-std::expm1(-c * (hi - lo))) - std::log(c);
    return c * lo + std::log(-std::expm1(c * (hi - lo))) - std::log(-c);
}

bool is_box(const Profile& p) {
    for (const auto& r : p.A)
        if (std::count_if(r.begin(), r.end(), [](double v) { return v != 0; }) != 1) return false;
    return true;
}

double box_log_moment(const Profile& p, const int* a) {
    double s = 0;
    for (int j = 0; j < p.dim; ++j) {
        double lo = -kInf, hi = kInf;
        for (std::size_t i = 0; i < p.A.size(); ++i) {
            double v = p.A[i][j];
            if (v > 0) hi = std::min(hi, p.b[i] / v);
            if (v < 0) lo = std::max(lo, p.b[i] / v);
        }
        require(hi > lo, "hrep: empty log image");
        s += std::log(2 * kPi) + log_exp_integral(2.0 * a[j] + 2, lo, hi);
    }
    return s;
}

double hrep2_log_moment(const Profile& p, const int* a) {
    const double c1 = 2.0 * a[0] + 2, c2 = 2.0 * a[1] + 2;
    const double U = coord_sup(p, 0);
    if (!std::isfinite(U) || !std::isfinite(coord_sup(p, 1))) return kInf;
    auto r = lp::maximize({-1.0, 0.0}, p.A, p.b);
    const double L = r.status == lp::Status::Unbounded ? -kInf : -r.value;
    bool has_lower = false;
    for (const auto& row : p.A) has_lower |= row[1] < 0;
    if (!has_lower && c2 <= 0) return kInf;
    if (!std::isfinite(L) && c1 <= 0) return kInf;

    auto inner = [&](double x1) {
        double lo = -kInf, hi = kInf;
        for (std::size_t i = 0; i < p.A.size(); ++i) {
            double v = p.A[i][1], t = (p.b[i] - p.A[i][0] * x1);
            if (v > 0) hi = std::min(hi, t / v);
            if (v < 0) lo = std::max(lo, t / v);
        }
        if (!(hi > lo)) return 0.0;
        return std::exp(log_exp_integral(c2, lo, hi) + c1 * (x1 - U));
    };
    std::vector<double> cuts;
    if (std::isfinite(L)) cuts.push_back(L);
    cuts.push_back(U);
    for (std::size_t i = 0; i < p.A.size(); ++i)
        for (std::size_t k = i + 1; k < p.A.size(); ++k) {
            double det = p.A[i][0] * p.A[k][1] - p.A[i][1] * p.A[k][0];
            if (std::fabs(det) < 1e-14) continue;
            double x1 = (p.b[i] * p.A[k][1] - p.A[i][1] * p.b[k]) / det;
            if (x1 > L && x1 < U) cuts.push_back(x1);
        }
    std::sort(cuts.begin(), cuts.end());
    using boost::math::quadrature::gauss_kronrod;
    double s = 0;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t)
        s += gauss_kronrod<double, 61>::integrate(inner, cuts[t], cuts[t + 1], 10, 1e-13);
    if (!std::isfinite(L)) {
        boost::math::quadrature::exp_sinh<double> es;
        const double x0 = cuts.front();
        s += es.integrate([&](double u) { return inner(x0 - u); }, 1e-13);
    }
    return 2 * std::log(2 * kPi) + c1 * U + std::log(s);
}

double radial_log_moment(const Profile& p, const int* a) {
    const double e1 = 2.0 * a[0] + 1, e2 = 2.0 * a[1] + 2;
    const bool annular = !p.r2min.empty();
    if (p.r1.front() == 0 && a[0] < 0) return kInf;
    if (e2 <= 0) {
        if (!annular) return kInf;
        for (double v : p.r2min)
            if (v <= 0) return kInf;
    }
    const auto& S = *p.interp;
    auto integrand = [&](double r) {
        double R = S.R(r), Rm = S.Rmin(r);
        double fib = e2 == 0 ? std::log(R / Rm) : (std::pow(R, e2) - std::pow(Rm, e2)) / e2;
        return std::pow(r, e1) * fib;
    };
    using boost::math::quadrature::gauss_kronrod;
    double s = 0;
    for (std::size_t k = 0; k + 1 < p.r1.size(); ++k)
        s += gauss_kronrod<double, 31>::integrate(integrand, p.r1[k], p.r1[k + 1], 8, 1e-13);
    return 2 * std::log(2 * kPi) + std::log(s);
}

double profile_log_moment(const Profile& p, const int* a) {
    switch (p.type) {
    case ProfileType::Ball: {
        int total = 0;
        double s = p.dim * std::log(kPi);
        for (int j = 0; j < p.dim; ++j) {
            if (a[j] < 0) return kInf;
            total += a[j];
            s += std::lgamma(a[j] + 1.0);
        }
        return s - std::lgamma(total + p.dim + 1.0);
    }
    case ProfileType::HRep:
        if (is_box(p)) return box_log_moment(p, a);
        if (p.dim == 2) return hrep2_log_moment(p, a);
        throw InputError("moment: non-box H-representations are supported only in C^2");
    case ProfileType::Radial: return radial_log_moment(p, a);
    case ProfileType::Product: {
        double s = 0;
        for (const auto& f : p.factors) s += profile_log_moment(f, a), a += f.dim;
        return s;
    }
    }
    return kInf;
}

}  // namespace

double log_moment(const ReinhardtModel& m, const MultiIndex& alpha) {
    require(int(alpha.size()) == m.n, "moment: multi-index length must be n");
    return profile_log_moment(m.profile, alpha.data());
}

double moment(const ReinhardtModel& m, const MultiIndex& alpha) { return std::exp(log_moment(m, alpha)); }

std::vector<MultiIndex> monomial_basis(int n, int N) {
    require(n >= 1 && N >= 0, "basis: need n >= 1 and N >= 0");
    std::vector<MultiIndex> out;
    MultiIndex cur(n);
    auto rec = [&](auto&& self, int j, int left) -> void {
        if (j == n - 1) {
            cur[j] = left;
            out.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) cur[j] = v, self(self, j + 1, left - v);
    };
    for (int d = 0; d <= N; ++d) rec(rec, 0, d);
    return out;
}

MomentTable::MomentTable(const ReinhardtModel& m, int degree) : model_(&m), degree_(degree), usable_(-1) {
    const double floor = std::log(std::numeric_limits<double>::min());
    std::vector<bool> ok(degree + 1, true);
    for (auto& a : monomial_basis(m.n, degree)) {
        double v = log_moment(m, a);
        if (!std::isfinite(v)) throw InputError("moment table: divergent moment, monomial not in L^2");
        int d = 0;
        for (int x : a) d += x;
        if (v < floor) ok[d] = false;
        table_[a] = v;
    }
    while (usable_ + 1 <= degree && ok[usable_ + 1]) ++usable_;
}

double MomentTable::log_mu(const MultiIndex& a) const {
    auto it = table_.find(a);
    return it != table_.end() ? it->second : log_moment(*model_, a);
}

KernelDiag bergman_kernel_diag(const ReinhardtModel& m, const std::vector<cplx>& z, int cutoff) {
    require(int(z.size()) == m.n, "kernel: point dimension mismatch");
    require(cutoff >= 1, "kernel: cutoff must be >= 1");
    Vec lz(m.n);
    bool off_axes = true;
    for (int j = 0; j < m.n; ++j) {
        double a = std::abs(z[j]);
        lz[j] = a > 0 ? std::log(a) : -kInf;
        off_axes &= a > 0;
    }
    if (off_axes) require(in_log_image(m, lz), "kernel: point is not interior");
    MomentTable T(m, cutoff);
    KernelDiag K;
    K.shells.assign(cutoff + 1, 0.0);
    for (const auto& a : monomial_basis(m.n, cutoff)) {
        double lt = -T.log_mu(a);
        int d = 0;
        bool zero = false;
        for (int j = 0; j < m.n; ++j) {
            d += a[j];
            if (a[j] == 0) continue;
            if (!std::isfinite(lz[j])) zero = true;
            else lt += 2 * a[j] * lz[j];
        }
        if (!zero) K.shells[d] += std::exp(lt);
    }
    for (double s : K.shells) K.value += s;
    double last = K.shells[cutoff], prev = K.shells[cutoff - 1];
    K.shell_ratio = prev > 0 ? last / prev : 0.0;
    K.converged = K.shell_ratio < 1;
    K.tail_bound = K.converged ? last * K.shell_ratio / (1 - K.shell_ratio) : kInf;
    return K;
}

OperatorMatrix commutator_matrix(const ReinhardtModel& m, int j, int cutoff) {
    require(cutoff >= 1, "commutator: cutoff must be >= 1");
    require(j >= 0 && j <= m.n, "commutator: j must be in [0, n]");
    MomentTable T(m, cutoff + 1);
    OperatorMatrix M;
    M.cutoff = cutoff;
    if (T.usable_degree() < cutoff + 1) {
        M.cutoff = T.usable_degree() - 1;
        if (M.cutoff < 1) throw ConsistencyError("commutator: moments underflow already at degree 2");
        M.notice = "moment underflow above degree " + std::to_string(T.usable_degree()) + "; cutoff reduced to " +
                   std::to_string(M.cutoff);
    }
    M.basis = monomial_basis(m.n, M.cutoff);
    std::map<MultiIndex, int> pos;
    for (std::size_t k = 0; k < M.basis.size(); ++k) pos[M.basis[k]] = int(k);
    M.column_norms.assign(M.basis.size(), 0.0);
    for (std::size_t col = 0; col < M.basis.size(); ++col) {
        const auto& a = M.basis[col];
        if (j == 0) {
            M.projected.push_back({int(col), int(col), 1.0});
            M.entries.push_back({int(col), int(col), 0.0});
            continue;
        }
        const int c = j - 1;
        MultiIndex up = a;
        ++up[c];
        double lmu = T.log_mu(a);
        double full = std::exp(T.log_mu(up) - lmu);  // ||conj(z_j) e_a||^2
        double proj = 0;
        if (a[c] >= 1) {
            MultiIndex dn = a;
            --dn[c];
            proj = std::exp(lmu - T.log_mu(dn));
            M.projected.push_back({pos.at(dn), int(col), std::sqrt(proj)});
        }
        double nrm = std::sqrt(std::max(full - proj, 0.0));
        M.column_norms[col] = nrm;
        M.entries.push_back({int(col), int(col), -nrm});
    }
    M.singular_values = M.column_norms;
    std::sort(M.singular_values.begin(), M.singular_values.end(), std::greater<>());
    M.decay.assign(M.cutoff + 1, 0.0);
    for (std::size_t col = 0; col < M.basis.size(); ++col) {
        int d = 0;
        for (int x : M.basis[col]) d += x;
        M.decay[d] = std::max(M.decay[d], M.column_norms[col]);
    }
    for (int d = M.cutoff - 1; d >= 0; --d) M.decay[d] = std::max(M.decay[d], M.decay[d + 1]);
    return M;
}

double pairing(const ReinhardtModel& m, const MultiIndex& a, const MultiIndex& b, const MultiIndex& c,
               const MultiIndex& d) {
    require(int(a.size()) == m.n && int(b.size()) == m.n && int(c.size()) == m.n && int(d.size()) == m.n,
            "pairing: multi-index length must be n");
    MultiIndex g1(m.n), g2(m.n);
    for (int j = 0; j < m.n; ++j) g1[j] = a[j] + d[j], g2[j] = b[j] + c[j];
    if (g1 != g2) return 0.0;
    return moment(m, g1);
}

CanonicalReport canonical_solution_witness(const ReinhardtModel& m, int m_max, int cutoff) {
    require(m.n == 2, "canonical witness: model must live in C^2");
    const auto& p = m.profile;
    require(p.type == ProfileType::Product || (p.type == ProfileType::HRep && is_box(p)),
            "canonical witness: model must be of product type");
    require(m_max >= 0 && cutoff >= 0, "canonical witness: m_max and cutoff must be >= 0");
    CanonicalReport R;
    R.diameter = diameter(m);
    R.ratio_min = kInf;
    const MultiIndex none = {0, 0}, bar2 = {0, 1};
    auto basis = monomial_basis(2, cutoff);
    for (int k = 0; k <= m_max; ++k) {
        const MultiIndex zk = {k, 0};
        const double nk = moment(m, zk);
        CanonicalRow row;
        row.m = k;
        row.ratio = std::sqrt(pairing(m, zk, bar2, zk, bar2) / nk);
        for (const auto& beta : basis) {
            double v = std::fabs(pairing(m, zk, bar2, beta, none)) / std::sqrt(nk * moment(m, beta));
            row.max_pairing = std::max(row.max_pairing, v);
        }
        for (int l = 0; l <= m_max; ++l) {
            if (l == k) continue;
            const MultiIndex zl = {l, 0};
            double v = std::fabs(pairing(m, zk, bar2, zl, bar2)) / std::sqrt(nk * moment(m, zl));
            R.family_pairing_max = std::max(R.family_pairing_max, v);
        }
        R.orthogonality_max = std::max(R.orthogonality_max, row.max_pairing);
        R.ratio_min = std::min(R.ratio_min, row.ratio);
        R.ratio_max = std::max(R.ratio_max, row.ratio);
        // dbar(conj(z2) e_k) = e_k dz2-bar has unit norm
        R.hormander_worst = std::max(R.hormander_worst, row.ratio * row.ratio / (R.diameter * R.diameter) / std::exp(1.0));
        R.rows.push_back(row);
    }
    R.non_compact_proxy = R.orthogonality_max <= 1e-14 && R.family_pairing_max <= 1e-14 && R.ratio_min > 0 &&
                          R.ratio_min >= 0.5 * R.ratio_max;
    R.conclusion = R.non_compact_proxy
                       ? "orthogonal family of canonical solutions with norms bounded below: no convergent subsequence"
                       : "inconclusive";
    return R;
}

}  // namespace dbarc::reinhardt

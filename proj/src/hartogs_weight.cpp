#include <algorithm>
#include <climits>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <quadmath.h>

#include "dbarc/hartogs.hpp"

namespace dbarc::hartogs {

using planar::PoissonBox;

GridGeom pipeline_grid(int N) {
    require(N >= 16 && N % 2 == 0, "hartogs: grid N must be even and >= 16");
    const double h = 2.0 / N;
    return GridGeom::centered(2 + 2 * h, h);
}

GridSet spoked_disc(const GridGeom& g, int holes) {
    require(holes >= 1 && holes <= 40, "spoked disc: holes must be in 1..40");
    return GridSet::from_predicate(g, [holes](cplx z) {
        const double r = std::abs(z);
        if (r >= 0.94) return false;
        if (r <= 0.3 || r >= 0.88) return true;
        for (int s = 0; s < holes; ++s) {
            cplx w = z * std::polar(1.0, -2 * kPi * s / holes);
            if (w.real() > 0 && std::fabs(w.imag()) < 0.02) return true;
        }
        return false;
    });
}

RField base_weight(const GridSet& W) {
    require(!W.empty(), "base weight: W is empty");
    RField d = distance_to(W);
    RField phi(W.g, 0.0);
    for (std::size_t t = 0; t < phi.v.size(); ++t) phi.v[t] = d.v[t] > 0 ? std::exp(-1.0 / d.v[t]) : 0.0;
    return phi;
}

std::array<double, 4> flatness_audit(const RField& phi, const GridSet& W) {
    static const double binom[5][5] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1}};
    std::array<double, 4> out{};
    const auto& g = phi.g;
    for (int p = 1; p <= 4; ++p) {
        const int lo = -p / 2;
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) {
                if (!W(i, j) || !g.inside(i + lo, j + lo) || !g.inside(i + lo + p, j + lo + p)) continue;
                double dx = 0, dy = 0;
                for (int t = 0; t <= p; ++t) {
                    double w = ((p - t) % 2 ? -1.0 : 1.0) * binom[p][t];
                    dx += w * phi(i, j + lo + t);
                    dy += w * phi(i + lo + t, j);
                }
                out[p - 1] = std::max({out[p - 1], std::fabs(dx), std::fabs(dy)});
            }
    }
    return out;
}

Sequences select_sequences(const std::vector<quad>& I, const std::vector<double>& S) {
    require(!I.empty() && I.size() == S.size(), "sequences: need matching nonempty I and S");
    for (std::size_t j = 0; j < I.size(); ++j) require(I[j] > 0 && S[j] > 0, "sequences: psi_j must be positive");
    const quad tp = 2 * M_PIq;
    Sequences q;
    q.I = I;
    q.S = S;
    std::uint64_t n = 1;
    while (tp / (quad(n) * I[0]) > 1) {
        if (n > UINT64_MAX / 2) throw ConsistencyError("sequences: n_1 exceeds 64 bits");
        n *= 2;
    }
    q.n.push_back(n);
    q.c.push_back(tp / (quad(n) * I[0]));
    for (std::size_t j = 1; j < I.size(); ++j) {
        quad bound = 1;
        bound = std::min(bound, q.c[j - 1] * quad(S[j - 1]) / quad(S[j]));
        bound = std::min(bound, 1 / (quad(n) * quad(S[j])));
        auto ok = [&](quad m) { return tp / (m * quad(n) * I[j]) <= bound; };
        quad mq = std::max(quad(2), ceilq(tp / (quad(n) * I[j] * bound)));
        if (mq > quad(UINT64_MAX / n)) throw ConsistencyError("sequences: n_j exceeds 64 bits");
        auto m = std::uint64_t(mq);
        while (m > 2 && ok(quad(m - 1))) --m;
        while (!ok(quad(m))) ++m;
        if (m > UINT64_MAX / n) throw ConsistencyError("sequences: n_j exceeds 64 bits");
        q.m.push_back(m);
        n *= m;
        q.n.push_back(n);
        q.c.push_back(tp / (quad(n) * I[j]));
    }
    return q;
}

GridSet WeightSpec::Wk(int k) const {
    GridSet r = dec.disc;
    for (int i = 0; i < k; ++i) r = set_minus(r, dec.components[used[i]]);
    return r;
}

WeightSpec build_weight(const GridSet& W, int K) {
    require(K >= 1, "hartogs: need at least one stage");
    if (W.empty()) throw DegenerateDomain("hartogs: W is empty");
    WeightSpec s;
    s.W = W;
    s.dec = planar::complement_components(W);
    s.phi = base_weight(W);
    const auto& g = W.g;
    const quad h2 = quad(g.h) * quad(g.h);
    std::vector<quad> I;
    std::vector<double> S;
    for (int j = 0; j < int(s.dec.components.size()) && int(s.used.size()) < K; ++j) {
        const auto& Dj = s.dec.components[j];
        quad acc = 0;
        double sup = 0;
        for (std::size_t t = 0; t < g.size(); ++t)
            if (Dj.mask[t]) acc += quad(s.phi.v[t]), sup = std::max(sup, s.phi.v[t]);
        if (!(acc > 0)) {
            s.notices.push_back("component " + std::to_string(j + 1) + " carries no weight; skipped");
            continue;
        }
        s.used.push_back(j);
        I.push_back(acc * h2);
        S.push_back(sup);
    }
    if (s.used.empty()) throw DegenerateDomain("hartogs: D minus W has no weighted component");
    if (int(s.used.size()) < K)
        s.notices.push_back("only " + std::to_string(s.used.size()) + " stages available");
    s.seq = select_sequences(I, S);

    const int J = s.stages();
    PoissonBox box(g);
    s.phi_tilde = RField(g, 0.0);
    s.Phi = Field<quad>(g, quad(0));
    std::size_t total = 0;
    GridSet all(g);
    for (int j = 0; j < J; ++j) {
        const auto& Dj = s.dec.components[s.used[j]];
        RField pt(g, 0.0);
        std::vector<quad> f(g.size(), quad(0));
        std::vector<double> fd(g.size(), 0.0);
        const quad nc = quad(s.seq.n[j]) * s.seq.c[j];
        for (std::size_t t = 0; t < g.size(); ++t)
            if (Dj.mask[t]) {
                pt.v[t] = double(s.seq.c[j] * quad(s.phi.v[t]));
                f[t] = nc * quad(s.phi.v[t]);
                fd[t] = double(f[t]);
            }
        for (std::size_t t = 0; t < g.size(); ++t) s.phi_tilde.v[t] += pt.v[t];
        s.psi_tilde.push_back(std::move(pt));
        Field<quad> X(g);
        double res = 0;
        X.v = box.solve_refined(f, planar::log_kernel_boundary(g, fd), &res);
        s.xi_residual.push_back(res);
        for (std::size_t t = 0; t < g.size(); ++t) s.Phi.v[t] += X.v[t] / quad(s.seq.n[j]);
        s.Xi.push_back(std::move(X));
        total += Dj.count();
        all = set_union(all, Dj);
    }

    auto& a = s.audit;
    for (int j = 0; j < J; ++j) {
        quad mass = quad(s.seq.n[j]) * s.seq.c[j] * s.seq.I[j];
        a.mass_dev = std::max(a.mass_dev, double(fabsq(mass - 2 * M_PIq)));
        if (j + 1 < J) {
            quad sj = s.seq.c[j] * quad(S[j]), sn = s.seq.c[j + 1] * quad(S[j + 1]);
            if (sn > sj) a.sup_monotone = false;
            a.max_nj_sup_next = std::max(a.max_nj_sup_next, double(quad(s.seq.n[j]) * sn));
            if (s.seq.n[j + 1] % s.seq.n[j] != 0) a.divisible = false;
        }
    }
    a.disjoint = all.count() == total;
    return s;
}

Field<quad> holomorphic_part(const WeightSpec& s, int k) {
    require(k >= 0 && k <= s.stages(), "hartogs: stage out of range");
    Field<quad> F(s.W.g, quad(0));
    if (k == 0) return F;
    const std::uint64_t nk = s.seq.n[k - 1];
    for (int i = 0; i < k; ++i) {
        const quad r = quad(nk / s.seq.n[i]);
        for (std::size_t t = 0; t < F.v.size(); ++t) F.v[t] += r * s.Xi[i].v[t];
    }
    return F;
}

Field<quad> remainder_part(const WeightSpec& s, int k) {
    require(k >= 1 && k <= s.stages(), "hartogs: stage out of range");
    Field<quad> F(s.W.g, quad(0));
    const std::uint64_t nk = s.seq.n[k - 1];
    for (int i = k; i < s.stages(); ++i) {
        const quad r = 1 / quad(s.seq.n[i] / nk);
        for (std::size_t t = 0; t < F.v.size(); ++t) F.v[t] += r * s.Xi[i].v[t];
    }
    return F;
}

double rim_profile(double r) { return -0.5 * std::log(4 - r * r); }

namespace {

double smoother(double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s * s * s * (s * (6 * s - 15) + 10);
}

double bump(double t, double a, double b) { return t > a && t < b ? std::pow((t - a) * (b - t), 3) : 0.0; }

// Radial Laplacian profile F = A b_early + B b_late + Delta L * sigma.
struct Radial {
    double M = 0, A = 0, B = 0, late_a = 1.6;
    static constexpr double kEarly0 = 1.0, kEarly1 = 1.7, kBlend0 = 1.6, kMatch = 1.8;

    static double lapL(double t) { return 8 / std::pow(4 - t * t, 2); }
    static double sigma(double t) { return smoother((t - kBlend0) / (kMatch - kBlend0)); }
    double early(double t) const { return bump(t, kEarly0, kEarly1); }
    double late(double t) const { return bump(t, late_a, kMatch); }
    double F(double t) const { return A * early(t) + B * late(t) + lapL(t) * sigma(t); }

    // integral over (1, r) of t f(t) log(r/t), split at the profile's breakpoints
    template <class Fn>
    static double lift(Fn f, double r, double a) {
        double cuts[] = {1.0, kBlend0, a, kEarly1, kMatch};
        std::sort(std::begin(cuts), std::end(cuts));
        double s = 0, lo = 1.0;
        for (double c : cuts) {
            if (c <= lo) continue;
            double hi = std::min(c, r);
            s += boost::math::quadrature::gauss<double, 30>::integrate(
                [&](double t) { return t * f(t) * std::log(r / t); }, lo, hi);
            lo = hi;
            if (lo >= r) break;
        }
        return s;
    }
    template <class Fn>
    static double flux(Fn f, double a) {
        double cuts[] = {1.0, kBlend0, a, kEarly1, kMatch};
        std::sort(std::begin(cuts), std::end(cuts));
        double s = 0;
        for (int k = 0; k + 1 < 5; ++k)
            if (cuts[k + 1] > cuts[k])
                s += boost::math::quadrature::gauss<double, 30>::integrate([&](double t) { return t * f(t); },
                                                                            cuts[k], cuts[k + 1]);
        return s;
    }

    double P(double r) const { return M / (2 * kPi) * std::log(r); }
    double g(double r) const {
        if (r <= 1) return 0;
        if (r >= kMatch) return rim_profile(r) - P(r);
        return lift([&](double t) { return F(t); }, r, late_a);
    }
};

}  // namespace

double Extension::value_at(double r) const {
    Radial R{M, A, B, Radial::kMatch - late_width};
    return R.P(r) + R.g(r);
}

Extension assemble_weight(const WeightSpec& s) {
    const auto& g = s.W.g;
    Extension e;
    for (int j = 0; j < s.stages(); ++j) e.M += double(2 * M_PIq / quad(s.seq.n[j]));
    const double Rm = Radial::kMatch;
    double width = Rm - Radial::kBlend0;
    for (e.attempts = 1; e.attempts <= 10; ++e.attempts, width /= 2) {
        Radial R;
        R.M = e.M;
        R.late_a = Rm - width;
        auto early = [&](double t) { return R.early(t); };
        auto late = [&](double t) { return R.late(t); };
        auto blend = [&](double t) { return Radial::lapL(t) * Radial::sigma(t); };
        const double Tf = Rm * Rm / (4 - Rm * Rm) - e.M / (2 * kPi);
        const double Tv = rim_profile(Rm) - R.P(Rm);
        const double me = Radial::flux(early, R.late_a), ml = Radial::flux(late, R.late_a);
        const double mL = Radial::flux(blend, R.late_a);
        const double ve = Radial::lift(early, Rm, R.late_a), vl = Radial::lift(late, Rm, R.late_a);
        const double vL = Radial::lift(blend, Rm, R.late_a);
        const double det = me * vl - ml * ve;
        R.A = ((Tf - mL) * vl - ml * (Tv - vL)) / det;
        R.B = (me * (Tv - vL) - ve * (Tf - mL)) / det;
        e.A = R.A;
        e.B = R.B;
        e.late_width = width;
        if (!(R.A > 0 && R.B >= 0)) continue;

        e.Phi_ext = Field<quad>(g, quad(0));
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) {
                const double r = std::abs(g.z(i, j));
                if (r >= 2) continue;
                const quad Phi = s.Phi(i, j);
                if (r <= 1) {
                    e.Phi_ext(i, j) = Phi;
                    continue;
                }
                const double chi = 1 - smoother((r - 1.2) / 0.4);
                const quad P = R.P(r);
                quad v = chi == 1 ? Phi : quad(chi) * (Phi - P) + P;
                e.Phi_ext(i, j) = v + quad(R.g(r));
            }
        e.min_laplacian = INFINITY;
        e.nodes_checked = 0;
        const quad h2 = quad(g.h) * quad(g.h);
        for (int i = 1; i + 1 < g.rows; ++i)
            for (int j = 1; j + 1 < g.cols; ++j) {
                const double r = std::abs(g.z(i, j));
                if (!(r > 1 && r < 2 - 2 * g.h)) continue;
                const auto& F = e.Phi_ext;
                quad lap = (F(i + 1, j) + F(i - 1, j) + F(i, j + 1) + F(i, j - 1) - 4 * F(i, j)) / h2;
                e.min_laplacian = std::min(e.min_laplacian, double(lap));
                ++e.nodes_checked;
            }
        e.subharmonic = e.min_laplacian > 0;
        if (e.subharmonic) return e;
    }
    throw ConsistencyError("assemble_weight: extension not strictly subharmonic outside D after 10 attempts");
}

}  // namespace dbarc::hartogs

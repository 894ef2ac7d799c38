#include <algorithm>
#include <cmath>

#include <quadmath.h>

#include "dbarc/hartogs.hpp"

namespace dbarc::hartogs {

using planar::ConjugateOptions;

double fibre_dirichlet_pairing(int l, int p, double rho) {
    require(l >= 0 && p >= 0 && rho > 0, "fibre pairing: need l, p >= 0 and rho > 0");
    const double a = l + p + 1, b = l + 2 * p + 2;
    return kPi * std::pow(rho, 2 * l + 4 * p + 4) / (4 * a * a * b);
}

namespace {

struct Integrator {
    const GridGeom& g;
    quad full = 0, coarse = 0;
    void add(int i, int j, double f) {
        full += f;
        if (i % 2 == 0 && j % 2 == 0) coarse += f;
    }
    Estimate done() const {
        const double h2 = g.h * g.h;
        double I = double(full) * h2, I2 = double(coarse) * 4 * h2;
        return {I, (I - I2) / 3};
    }
};

// d/dzbar at a node by central differences.
template <class Get>
cplx dzbar(const GridGeom& g, int i, int j, Get f) {
    double fx = (f(i, j + 1) - f(i, j - 1)) / (2 * g.h);
    double fy = (f(i + 1, j) - f(i - 1, j)) / (2 * g.h);
    return 0.5 * cplx(fx, fy);
}

quad wrap(quad x) {
    const quad tp = 2 * M_PIq;
    return x - tp * nearbyintq(x / tp);
}

}  // namespace

WitnessForm witness_form(const WeightSpec& s, int k) {
    require(k >= 1 && k <= s.stages(), "witness: stage out of range");
    const auto& g = s.W.g;
    WitnessForm wf;
    wf.k = k;
    wf.n = s.seq.n[k - 1];
    wf.Wk = s.Wk(k);
    auto eig = planar::dirichlet_ground_state(wf.Wk);
    wf.lambda = eig.lambda;
    wf.v = eig.v;

    // basepoint at the peak of v
    std::size_t best = 0;
    for (std::size_t t = 0; t < g.size(); ++t)
        if (wf.v.v[t] > wf.v.v[best]) best = t;
    const int bi = int(best / g.cols), bj = int(best % g.cols);
    const Field<quad> F = holomorphic_part(s, k);
    auto conj = planar::harmonic_conjugate<quad>(F, wf.Wk, quad(1), bi, bj, ConjugateOptions{1e-3, 1e-6});
    wf.closure = conj.closure_max;
    wf.periods_ok = conj.single_valued;
    for (std::size_t h = 0; h < conj.periods.size(); ++h) {
        const auto& hole = conj.periods[h].hole;
        int stage = 0;
        for (int j = 1; j <= k && !stage; ++j) {
            const auto& Dj = s.dec.components[s.used[j - 1]];
            for (std::size_t t = 0; t < g.size(); ++t)
                if (Dj.mask[t] && hole.mask[t]) {
                    stage = j;
                    break;
                }
        }
        quad expect = stage ? 2 * M_PIq * quad(wf.n / s.seq.n[stage - 1]) : quad(0);
        double dev = conj.periods[h].computable ? double(fabsq(conj.periods_exact[h] - expect) / (2 * M_PIq)) : INFINITY;
        wf.hole_stage.push_back(stage);
        wf.period_dev.push_back(dev);
        if (!(dev <= 1e-6)) wf.periods_ok = false;
    }
    if (!wf.periods_ok)
    {
        std::string msg = "witness: conjugate not single-valued after exponentiation at stage " + std::to_string(k) +
                          " (closure " + std::to_string(wf.closure) + ", " + conj.diagnostic;
        for (std::size_t h = 0; h < wf.period_dev.size(); ++h)
            msg += "; hole stage " + std::to_string(wf.hole_stage[h]) + " dev " + std::to_string(wf.period_dev[h]);
        throw ConsistencyError(msg + ")");
    }

    // gradient identity at cell centres: route A from n Phi and Theta (mod 2pi), route B from n(Phi - Phi_k)
    const Field<quad> Rk = remainder_part(s, k);
    const quad nq = quad(wf.n);
    const auto& c = conj.cells;
    auto reached = [&](int a, int b) { return c.inside(a, b) && conj.reached[c.idx(a, b)]; };
    auto th = [&](int a, int b) { return conj.theta[c.idx(a, b)]; };
    auto nPhi = [&](int i, int j) { return nq * s.Phi(i, j); };
    // (n Phi_y + Theta_x) h across the vertical edge between cells (a, b-1) and (a, b)
    auto vert = [&](int a, int b) { return wrap(nPhi(a + 1, b) - nPhi(a, b) + th(a, b) - th(a, b - 1)); };
    // (n Phi_x - Theta_y) h across the horizontal edge between cells (a-1, b) and (a, b)
    auto horz = [&](int a, int b) { return wrap(nPhi(a, b + 1) - nPhi(a, b) - (th(a, b) - th(a - 1, b))); };
    const double h = g.h;
    for (int a = 1; a + 1 < c.rows; ++a)
        for (int b = 1; b + 1 < c.cols; ++b) {
            if (!(reached(a, b) && reached(a, b - 1) && reached(a, b + 1) && reached(a - 1, b) && reached(a + 1, b)))
                continue;
            double ax = double((horz(a, b) + horz(a + 1, b)) / 2) / h;
            double ay = double((vert(a, b) + vert(a, b + 1)) / 2) / h;
            cplx A = 0.5 * cplx(ax, ay);
            double bx = double((Rk(a, b + 1) - Rk(a, b) + Rk(a + 1, b + 1) - Rk(a + 1, b)) / 2) / h;
            double by = double((Rk(a + 1, b) - Rk(a, b) + Rk(a + 1, b + 1) - Rk(a, b + 1)) / 2) / h;
            cplx B = 0.5 * cplx(bx, by);
            wf.gradient_identity = std::max(wf.gradient_identity, std::abs(A - B));
        }
    return wf;
}

void energy(const WeightSpec& s, WitnessForm& wf) {
    const auto& g = s.W.g;
    const int k = wf.k;
    const double n = double(wf.n);
    const Field<quad> Rk = remainder_part(s, k);
    RField Phi(g), W(g);
    for (std::size_t t = 0; t < g.size(); ++t) Phi.v[t] = double(s.Phi.v[t]), W.v[t] = double(Rk.v[t]);
    const auto& v = wf.v;
    const auto& pt = s.phi_tilde;

    Integrator N0{g}, F2{g}, Nn{g}, Q{g}, B{g};
    double lo = INFINITY, hi = 0, first = 0;
    for (int i = 1; i + 1 < g.rows; ++i)
        for (int j = 1; j + 1 < g.cols; ++j) {
            const double vv = v(i, j);
            const cplx vz = dzbar(g, i, j, [&](int p, int q) { return v(p, q); });
            if (vv == 0 && vz == 0.0) continue;
            const double e2 = std::exp(-2 * Phi(i, j));
            const cplx Pz = std::conj(dzbar(g, i, j, [&](int p, int q) { return Phi(p, q); }));
            const cplx wz = dzbar(g, i, j, [&](int p, int q) { return W(p, q); });
            const double v2 = vv * vv, pz2 = std::norm(Pz);
            const double weight = n / (n + 1) * e2 + 4 * e2 * e2 * pz2;
            if (vv != 0) lo = std::min(lo, weight), hi = std::max(hi, weight);
            N0.add(i, j, kPi * v2 * weight);
            F2.add(i, j, kPi * v2);
            Nn.add(i, j, kPi * v2 * e2 * e2 / (4 * n * (n + 2)) + kPi * v2 * pz2 * e2 * e2 * e2 / (n * (n + 1)));
            const cplx G = vz + vv * wz;
            const cplx beta = -2 * e2 * Pz;
            const double beta_zb = -2 * e2 * (pt(i, j) / 4 - 2 * pz2);
            Q.add(i, j, kPi / 2 * n * v2 * e2 * pt(i, j) + kPi * v2 + kPi * n / (n + 1) * std::norm(G) * e2 +
                            kPi * std::norm(G * beta + vv * beta_zb));
            B.add(i, j, n * v2 * pt(i, j) / 4 + v2 + std::norm(vz) + v2 * std::norm(wz));
            first += n * v2 * pt(i, j) / 4 * g.h * g.h;
        }
    wf.N0 = N0.done();
    wf.f_norm2 = F2.done();
    wf.Nneg = Nn.done();
    wf.Q = Q.done();
    wf.B = B.done();
    wf.N0_lo = kPi * lo;
    wf.N0_hi = kPi * hi;
    wf.first_term = first;

    double sup = 0;
    for (std::size_t t = 0; t < g.size(); ++t)
        if (wf.Wk.mask[t]) sup = std::max(sup, pt.v[t]);
    wf.nk_sup_next = n * sup;

    RField rest(g, 0.0);
    for (int j = k; j < s.stages(); ++j)
        for (std::size_t t = 0; t < g.size(); ++t) rest.v[t] += n * s.psi_tilde[j].v[t];
    RField T = planar::newtonian_potential(rest);
    wf.newton_sup = 0;
    for (std::size_t t = 0; t < g.size(); ++t)
        if (wf.Wk.mask[t]) wf.newton_sup = std::max(wf.newton_sup, T.v[t] / (4 * kPi));
    wf.newton_constant = wf.nk_sup_next > 0 ? wf.newton_sup / wf.nk_sup_next : 0.0;
    wf.energy_constant = wf.Q.value / wf.B.value;
    wf.low_confidence = std::fabs(wf.Q.error) > 0.1 * wf.Q.value;
}

double omega_diameter(const Extension& e, int stride) {
    require(stride >= 1, "diameter: stride must be >= 1");
    const auto& g = e.Phi_ext.g;
    std::vector<cplx> z;
    std::vector<double> R;
    for (int i = 0; i < g.rows; i += stride)
        for (int j = 0; j < g.cols; j += stride) {
            cplx p = g.z(i, j);
            if (std::abs(p) >= 2) continue;
            z.push_back(p);
            R.push_back(std::exp(-double(e.Phi_ext(i, j))));
        }
    double best = 0;
    for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = a; b < z.size(); ++b)
            best = std::max(best, std::norm(z[a] - z[b]) + (R[a] + R[b]) * (R[a] + R[b]));
    return std::sqrt(best);
}

ViolationReport violation_report(const std::vector<WitnessForm>& forms, const std::vector<double>& eps,
                                 double diameter) {
    ViolationReport r;
    r.eps = eps;
    r.diameter = diameter;
    const int K = int(forms.size());
    if (K >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& f : forms) {
            double x = std::log(double(f.n)), y = std::log(f.Nneg.value);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        r.slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);
    }
    for (const auto& f : forms) {
        double t = f.N0.value / (diameter * diameter) / (std::exp(1.0) * f.Q.value);
        r.hormander_worst = std::max(r.hormander_worst, t);
        if (t > 1) ++r.hormander_violations;
    }
    if (K < 2 || !(r.slope < -1)) {
        r.verdict = "inconclusive: too few stages to exhibit decay of the weak norm";
        return r;
    }
    const auto& last = forms.back();
    const int pmax = int(std::floor(std::log10(last.N0.value / (2 * last.Nneg.value))));
    for (int p = 0; p <= pmax; ++p) r.C.push_back(std::pow(10.0, p));
    for (double e : eps) {
        bool all = !r.C.empty();
        for (double C : r.C) {
            Certificate best{e, C, 0, -INFINITY};
            for (const auto& f : forms) {
                double d = f.N0.value - e * f.Q.value - C * f.Nneg.value;
                if (d > best.deficit) best = {e, C, f.k, d};
            }
            r.best.push_back(best);
            if (!(best.deficit > 0)) all = false;
        }
        if (all) r.falsified_eps.push_back(e);
    }
    r.verdict = r.falsified_eps.empty() ? "no violation detected" : "compactness estimate falsified";
    return r;
}

Run run_pipeline(const GridSet& W, int K, const std::vector<double>& eps) {
    Run run;
    run.spec = build_weight(W, K);
    run.flatness = flatness_audit(run.spec.phi, W);
    run.ext = assemble_weight(run.spec);
    for (int k = 1; k <= run.spec.stages(); ++k) {
        auto wf = witness_form(run.spec, k);
        energy(run.spec, wf);
        run.forms.push_back(std::move(wf));
    }
    run.report = violation_report(run.forms, eps, omega_diameter(run.ext));
    return run;
}

}  // namespace dbarc::hartogs

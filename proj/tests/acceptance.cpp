// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <quadmath.h>

#include <Eigen/Dense>

#include "dbarc/hartogs.hpp"
#include "dbarc/hermitian_forms.hpp"
#include "dbarc/planar_potential.hpp"
#include "dbarc/reinhardt.hpp"
#include "dbarc/wedge_bergman.hpp"

using namespace dbarc;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void need(bool c, const std::string& what) {
        if (!c) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (t > limit_s) o.need(false, fmt("runtime %.1f s over %.0f s", t, limit_s));
    if (!o.ok) ++failures;
    std::printf("%s %d %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", id, name, t, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
}

// ---- 1: frame sums against an independent eigen decomposition

Outcome frames() {
    Outcome o;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    auto gauss = [&](int r, int c) {
        Eigen::MatrixXcd A(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) A(i, j) = cplx(nd(rng), nd(rng));
        return A;
    };
    double worst_gap = INFINITY, worst_eq = 0;
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXcd A = gauss(4, 4);
        Eigen::MatrixXcd Hm = (A + A.adjoint()) / 2.0;
        hermitian::HermitianMatrix H(Hm);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hm);
        for (int q = 1; q <= 3; ++q) {
            double lowest = es.eigenvalues().head(q).sum();
            const double got = hermitian::min_q_eigensum(H, q);
            worst_eq = std::max(worst_eq, std::fabs(got - lowest));
            for (int s = 0; s < 200; ++s) {
                Eigen::MatrixXcd T = Eigen::HouseholderQR<Eigen::MatrixXcd>(gauss(4, q)).householderQ() *
                                     Eigen::MatrixXcd::Identity(4, q);
                double sum = (T.adjoint() * Hm * T).trace().real();
                worst_gap = std::min(worst_gap, sum - got);
            }
            auto r = hermitian::check_lemma5(H, q, 0.0, 50, rng);
            worst_eq = std::max(worst_eq, std::fabs(r.eigen_frame_sum - lowest));
            o.need(r.frames_bounded && r.equality_attained, "lemma report flags");
            auto V = es.eigenvectors().leftCols(q);
            worst_eq = std::max(worst_eq, std::fabs((V.adjoint() * Hm * V).trace().real() - got));
        }
    }
    o.need(worst_gap >= -1e-9, fmt("frame below eigensum by %.3e", -worst_gap));
    o.need(worst_eq <= 1e-9, fmt("equality off by %.3e", worst_eq));
    if (o.ok) o.detail = fmt("min frame margin %.3e, equality %.1e", worst_gap, worst_eq);
    return o;
}

// ---- 2: Dirichlet eigenvalues

GridSet box(double w, double hgt, int N) {
    GridGeom g;
    g.h = 1.0 / N;
    g.cols = int(std::lround(w * N)) + 1;
    g.rows = int(std::lround(hgt * N)) + 1;
    GridSet s(g);
    for (int i = 1; i + 1 < g.rows; ++i)
        for (int j = 1; j + 1 < g.cols; ++j) s.set(i, j);
    return s;
}

Outcome dirichlet() {
    Outcome o;
    const double sq = 2 * kPi * kPi, rect = kPi * kPi * 1.25, disc = 5.783185962946785;  // j_{0,1}^2
    double a = planar::dirichlet_ground_state(box(1, 1, 256)).lambda;
    double b = planar::dirichlet_ground_state(unit_disc(GridGeom::centered(1.01, 1.0 / 256))).lambda;
    double c = planar::dirichlet_ground_state(box(2, 1, 256)).lambda;
    o.need(std::fabs(a / sq - 1) <= 0.01, fmt("square %.5f", a));
    o.need(std::fabs(b / disc - 1) <= 0.015, fmt("disc %.5f", b));
    o.need(std::fabs(c / rect - 1) <= 0.01, fmt("rectangle %.5f", c));
    // Swiss cheese: disc of radius 0.9 minus four discs of radius 0.15 centred on |z| = 0.5
    const auto g = GridGeom::centered(1.01, 1.0 / 256);
    auto cheese = GridSet::from_predicate(g, [](cplx z) {
        if (std::abs(z) >= 0.9) return false;
        for (int k = 0; k < 4; ++k)
            if (std::abs(z - std::polar(0.5, kPi / 2 * k + 0.3)) < 0.15) return false;
        return true;
    });
    auto seq = planar::rayleigh_sequence(cheese, 5);
    o.need(seq.stages.size() == 5, "expected five nested stages");
    for (std::size_t k = 1; k < seq.stages.size(); ++k) {
        o.need(is_subset(seq.stages[k].Wk, seq.stages[k - 1].Wk), "masks not nested");
        o.need(seq.stages[k].eig.lambda >= seq.stages[k - 1].eig.lambda,
               fmt("lambda drops at stage %.0f", double(k + 1)));
    }
    if (o.ok)
        o.detail = fmt("square %.4f disc %.4f rect %.4f", a, b, c) +
                   fmt(", nested %.3f .. %.3f", seq.stages.front().eig.lambda, seq.stages.back().eig.lambda);
    return o;
}

// ---- 3-5: the Hartogs pipeline, run once

hartogs::Run run;

Outcome pipeline() {
    Outcome o;
    const auto g = hartogs::pipeline_grid(256);
    run = hartogs::run_pipeline(hartogs::spoked_disc(g), 6);
    const auto& s = run.spec;
    const int K = s.stages();
    o.need(K == 6, fmt("only %.0f stages", K));

    // (a) invariants recomputed from the fields
    double mass = 0;
    for (int j = 0; j < K; ++j) {
        quad I = 0;
        const auto& Dj = s.dec.components[s.used[j]];
        for (std::size_t t = 0; t < g.size(); ++t)
            if (Dj.mask[t]) I += quad(s.phi.v[t]);
        I *= quad(g.h) * quad(g.h);
        mass = std::max(mass, double(fabsq(quad(s.seq.n[j]) * s.seq.c[j] * I - 2 * M_PIq)));
    }
    o.need(mass <= 1e-20, fmt("mass deviation %.2e", mass));
    std::vector<double> sup(K, 0.0);
    for (int j = 0; j < K; ++j)
        for (double x : s.psi_tilde[j].v) sup[j] = std::max(sup[j], x);
    for (int j = 0; j + 1 < K; ++j) {
        o.need(s.seq.n[j + 1] % s.seq.n[j] == 0, "n_j does not divide n_{j+1}");
        o.need(sup[j + 1] <= sup[j], "psi~ sups not monotone");
        o.need(double(s.seq.n[j]) * sup[j + 1] <= 1, "n_j sup psi~_{j+1} > 1");
    }
    for (std::size_t t = 0; t < g.size(); ++t) {
        int owners = 0;
        for (int j = 0; j < K; ++j) owners += s.psi_tilde[j].v[t] != 0;
        if (owners > 1) {
            o.need(false, "overlapping supports");
            break;
        }
    }
    o.need(s.audit.ok(), "library audit disagrees");

    double pdev = 0, fdev = 0, bmin = INFINITY, bmax = 0;
    for (const auto& f : run.forms) {
        for (double d : f.period_dev) pdev = std::max(pdev, d);
        double n2 = 0;
        for (double x : f.v.v) n2 += x * x;
        fdev = std::max(fdev, std::fabs(kPi * n2 * g.h * g.h - kPi));
        fdev = std::max(fdev, std::fabs(f.f_norm2.value - kPi));
        bmin = std::min(bmin, f.B.value), bmax = std::max(bmax, f.B.value);
    }
    o.need(pdev <= 1e-6, fmt("period deviation %.2e (units of 2pi)", pdev));
    o.need(fdev <= 1e-4, fmt("|f|^2 off by %.2e", fdev));
    o.need(bmax / bmin <= 10, fmt("B ratio %.2f", bmax / bmin));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& f : run.forms) {
        double x = std::log(double(f.n)), y = std::log(f.Nneg.value);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);
    o.need(slope >= -2.3 && slope <= -1.7, fmt("Nneg slope %.3f", slope));

    const auto& r = run.report;
    o.need(!r.falsified_eps.empty() && !r.C.empty(), "no falsified epsilon");
    for (double e : r.falsified_eps)
        for (double C : r.C) {
            double best = -INFINITY;
            for (const auto& f : run.forms) best = std::max(best, f.N0.value - e * f.Q.value - C * f.Nneg.value);
            o.need(best > 0, fmt("deficit %.3e at eps %.0e C %.0e", best, e, C));
        }
    if (o.ok)
        o.detail = fmt("slope %.4f, B ratio %.2f, ", slope, bmax / bmin) +
                   fmt("falsified at eps %.0e up to C = %.0e", r.falsified_eps.front(), r.C.back());
    return o;
}

Outcome proof_chain() {
    Outcome o;
    const auto& s = run.spec;
    o.need(!run.forms.empty(), "pipeline did not run");
    double worst_sup = 0, worst_grad = 0, worst_c = 0;
    for (const auto& f : run.forms) {
        double sup = 0;
        for (int j = f.k; j < s.stages(); ++j)
            for (std::size_t t = 0; t < f.Wk.g.size(); ++t)
                if (f.Wk.mask[t]) sup = std::max(sup, s.psi_tilde[j].v[t]);
        worst_sup = std::max(worst_sup, double(f.n) * sup);
        worst_grad = std::max(worst_grad, f.gradient_identity);
        o.need(std::isfinite(f.newton_constant) && f.newton_sup >= 0, "Newtonian bound not finite");
        worst_c = std::max(worst_c, f.newton_constant);
    }
    o.need(worst_sup <= 1, fmt("n_k sup psi~ = %.4f", worst_sup));
    o.need(worst_grad <= 1e-4, fmt("gradient identity %.2e", worst_grad));
    if (o.ok) o.detail = fmt("n_k sup %.4f, gradient identity %.1e, Newtonian constant %.4f", worst_sup, worst_grad, worst_c);
    return o;
}

Outcome hormander() {
    Outcome o;
    const double D = run.report.diameter;
    o.need(D > 0, "no diameter");
    int bad = 0;
    double worst = 0;
    for (const auto& f : run.forms) {
        double t = f.N0.value / (D * D) / (std::exp(1.0) * f.Q.value);
        worst = std::max(worst, t);
        bad += t > 1;
    }
    for (const char* name : {"bidisc", "disc-x-ball"}) {
        auto m = reinhardt::named_model(name);
        if (m.n != 2) continue;
        auto w = reinhardt::canonical_solution_witness(m, 40);
        worst = std::max(worst, w.hormander_worst);
        bad += w.hormander_worst > 1;
    }
    o.need(bad == 0, fmt("%.0f violations, worst ratio %.3f", bad, worst));
    if (o.ok) o.detail = fmt("worst ratio %.4f, D = %.4f", worst, D);
    return o;
}

// ---- 6: wedge family

Outcome wedge_witness() {
    Outcome o;
    const double delta0 = 0.224877;  // frozen from the Gram closed form before the build
    wedge::WedgeFamily fam;
    double norm_dev = 0;
    for (int j = 1; j <= 40; ++j)
        norm_dev = std::max(norm_dev, std::abs(wedge::wedge_norm_quadrature(fam, fam.W1(), j, j) - 1.0));
    o.need(norm_dev <= 1e-8, fmt("norm on W1 off by %.2e", norm_dev));
    auto far = wedge::restriction_witness(fam, 40);
    const double limit = std::sqrt(fam.alpha0 / fam.alpha);
    o.need(std::fabs(far.rows.back().norm_restricted - limit) <= 1e-6,
           fmt("restricted norm %.9f vs %.9f", far.rows.back().norm_restricted, limit));
    const auto S = fam.W0r3();
    double dmin = INFINITY;
    for (int i = 3; i <= 20; ++i)
        for (int j = i + 1; j <= 20; ++j) {
            double d2 = (wedge::wedge_norm(fam, S, i, i) + wedge::wedge_norm(fam, S, j, j) -
                         2.0 * wedge::wedge_norm(fam, S, i, j).real()).real();
            dmin = std::min(dmin, std::sqrt(d2));
        }
    o.need(dmin >= delta0, fmt("min distance %.6f below %.6f", dmin, delta0));
    if (o.ok) o.detail = fmt("min distance %.6f, restricted norm at j = 40 %.9f", dmin, far.rows.back().norm_restricted);
    return o;
}

// ---- 7: commutator ratios

Outcome commutators() {
    Outcome o;
    auto Mb = reinhardt::commutator_matrix(reinhardt::bidisc(), 2, 64);
    auto Mball = reinhardt::commutator_matrix(reinhardt::unit_ball(2), 2, 64);
    auto Mp = reinhardt::commutator_matrix(reinhardt::punctured_ball(), 2, 64);
    double db = 0, dball = 0, dp = 0;
    for (std::size_t c = 0; c < Mb.basis.size(); ++c) {
        const auto& a = Mb.basis[c];
        if (a[1] != 0) continue;
        if (a[0] <= 50) db = std::max(db, std::fabs(Mb.column_norms[c] - 1 / std::sqrt(2.0)));
        dball = std::max(dball, std::fabs(Mball.column_norms[c] - 1 / std::sqrt(a[0] + 3.0)));
    }
    o.need(Mp.entries.size() == Mball.entries.size(), "punctured basis differs");
    for (std::size_t k = 0; k < std::min(Mp.entries.size(), Mball.entries.size()); ++k) {
        o.need(Mp.entries[k].row == Mball.entries[k].row && Mp.entries[k].col == Mball.entries[k].col,
               "punctured sparsity differs");
        dp = std::max(dp, std::fabs(Mp.entries[k].value - Mball.entries[k].value));
    }
    o.need(db <= 1e-10, fmt("bidisc ratio off by %.2e", db));
    o.need(dball <= 1e-10, fmt("ball ratio off by %.2e", dball));
    o.need(dp <= 1e-12, fmt("punctured ball differs by %.2e", dp));
    if (o.ok) o.detail = fmt("deviations %.1e, %.1e, %.1e", db, dball, dp);
    return o;
}

// ---- 8: verdict matrix

Outcome verdicts() {
    Outcome o;
    struct Case {
        const char* model;
        int q;
        bool compact;
    };
    const Case cases[] = {{"bidisc", 1, false}, {"ball", 1, true},  {"punctured-ball", 1, true},
                          {"disc-x-ball", 2, false}, {"ball3", 1, true}, {"ball3", 2, true}};
    for (const auto& c : cases) {
        auto v = reinhardt::compactness_verdict(reinhardt::named_model(c.model), c.q);
        bool compact = v.verdict == "compact" || v.verdict == "compact-by-sufficiency";
        bool non = v.verdict == "non-compact";
        o.need(c.compact ? compact : non, std::string(c.model) + " q=" + std::to_string(c.q) + " gave " + v.verdict);
    }
    return o;
}

}  // namespace

int main() {
    criterion(1, "frame sums bounded by the q smallest eigenvalues", 5, frames);
    criterion(2, "Dirichlet eigenvalues and nested monotonicity", 60, dirichlet);
    criterion(3, "Hartogs witness pipeline falsifies the compactness estimate", 600, pipeline);
    criterion(4, "proof-chain bounds", 60, proof_chain);
    criterion(5, "Hormander sanity bound on constructed forms", 60, hormander);
    criterion(6, "wedge restriction witness", 5, wedge_witness);
    criterion(7, "commutator dichotomy", 30, commutators);
    criterion(8, "Reinhardt verdict matrix", 10, verdicts);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures ? 1 : 0;
}

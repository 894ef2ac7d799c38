#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Sparse>

#include "dbarc/hartogs.hpp"

using namespace dbarc;
using namespace dbarc::hartogs;

namespace {

GridSet disc(const GridGeom& g, double r) {
    return GridSet::from_predicate(g, [r](cplx z) { return std::abs(z) < r; });
}

// <G, g> for the radial problem by second-order finite differences in r
double radial_pairing(int l, int p, double rho, int M) {
    const double h = rho / M;
    Eigen::SparseMatrix<double> A(M, M);
    Eigen::VectorXd f(M);
    std::vector<Eigen::Triplet<double>> T;
    for (int i = 0; i < M; ++i) {
        double r = (i + 0.5) * h, rm = i * h, rp = (i + 1) * h;
        double diag = (rm + rp) / (r * h * h) + double(l * l) / (r * r);
        if (i == 0) diag -= rm / (r * h * h);  // r = 0 flux vanishes
        if (i + 1 == M) diag += rp / (r * h * h);  // ghost node for G(rho) = 0
        T.emplace_back(i, i, diag);
        if (i > 0) T.emplace_back(i, i - 1, -rm / (r * h * h));
        if (i + 1 < M) T.emplace_back(i, i + 1, -rp / (r * h * h));
        f[i] = std::pow(r, l + 2 * p);
    }
    A.setFromTriplets(T.begin(), T.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    Eigen::VectorXd G = lu.solve(f);
    double s = 0;
    for (int i = 0; i < M; ++i) s += G[i] * f[i] * (i + 0.5) * h * h;
    return 2 * kPi * s;
}

}  // namespace

TEST_CASE("base weight matches exp(-1/d) with a brute-force node distance") {
    auto g = pipeline_grid(32);
    auto W = disc(g, 0.5);
    auto phi = base_weight(W);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, int(g.size()) - 1);
    for (int s = 0; s < 200; ++s) {
        std::size_t t = pick(rng);
        int i = int(t / g.cols), j = int(t % g.cols);
        double d = INFINITY;
        for (int a = 0; a < g.rows; ++a)
            for (int b = 0; b < g.cols; ++b)
                if (W(a, b)) d = std::min(d, std::abs(g.z(i, j) - g.z(a, b)));
        double want = W(i, j) ? 0.0 : std::exp(-1 / d);
        CHECK(phi.v[t] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("flatness audit vanishes on W at N = 256") {
    auto g = pipeline_grid(256);
    auto W = spoked_disc(g);
    auto a = flatness_audit(base_weight(W), W);
    for (double x : a) CHECK(x <= 1e-12);
}

TEST_CASE("sequence selection against an exhaustive scan") {
    const double tp = 2 * kPi;
    std::vector<quad> I = {1, 0.5, 0.01};
    std::vector<double> S = {0.2, 0.1, 0.3};
    auto q = select_sequences(I, S);
    REQUIRE(q.n.size() == 3);
    CHECK(q.n[0] == 8);
    CHECK(double(q.c[0]) == doctest::Approx(tp / 8));
    double c = tp / 8;
    std::uint64_t n = 8;
    for (int j = 1; j < 3; ++j) {
        double bound = std::min({1.0, c * S[j - 1] / S[j], 1 / (n * S[j])});
        std::uint64_t m = 2;
        while (tp / (double(m) * n * double(I[j])) > bound) ++m;
        CHECK(q.m[j - 1] == m);
        n *= m;
        CHECK(q.n[j] == n);
        c = tp / (n * double(I[j]));
        CHECK(double(q.n[j] * q.c[j] * q.I[j]) == doctest::Approx(tp).epsilon(1e-15));
    }
    CHECK_THROWS_AS(select_sequences({1, 1e-19, 1e-19}, {1, 1, 1}), ConsistencyError);
}

TEST_CASE("fibre pairing closed form against a radial solve") {
    CHECK(fibre_dirichlet_pairing(0, 0, 1.0) == doctest::Approx(kPi / 8).epsilon(1e-15));
    for (int l : {0, 1, 3})
        for (int p : {0, 1, 2})
            for (double rho : {0.5, 1.3})
                CHECK(fibre_dirichlet_pairing(l, p, rho) ==
                      doctest::Approx(radial_pairing(l, p, rho, 4000)).epsilon(1e-5));
}

TEST_CASE("energies with the weight switched off reduce to the flat Dirichlet form") {
    auto g = pipeline_grid(256);
    auto s = build_weight(spoked_disc(g), 2);
    for (auto& x : s.Phi.v) x = 0;
    for (auto& X : s.Xi)
        for (auto& x : X.v) x = 0;
    for (auto& p : s.psi_tilde)
        for (auto& x : p.v) x = 0;
    for (auto& x : s.phi_tilde.v) x = 0;
    WitnessForm wf;
    wf.k = 1;
    wf.n = s.seq.n[0];
    wf.Wk = s.Wk(1);
    auto eig = planar::dirichlet_ground_state(wf.Wk);
    wf.lambda = eig.lambda;
    wf.v = eig.v;
    energy(s, wf);
    const double n = double(wf.n);
    CHECK(wf.f_norm2.value == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(wf.N0.value == doctest::Approx(kPi * n / (n + 1)).epsilon(1e-12));
    CHECK(wf.Nneg.value == doctest::Approx(kPi / (4 * n * (n + 2))).epsilon(1e-12));
    CHECK(wf.Q.value == doctest::Approx(kPi + kPi * n / (n + 1) * (wf.B.value - 1)).epsilon(1e-12));
    // central differences sit within a few percent of the five-point eigenvalue
    CHECK(wf.B.value - 1 == doctest::Approx(wf.lambda / 4).epsilon(0.05));
}

TEST_CASE("full pipeline on the spoked disc") {
    auto g = pipeline_grid(256);
    auto run = run_pipeline(spoked_disc(g), 6);
    const auto& s = run.spec;
    REQUIRE(s.stages() == 6);
    CHECK(s.audit.ok());
    for (std::size_t j = 1; j < s.seq.n.size(); ++j) CHECK(s.seq.n[j] % s.seq.n[j - 1] == 0);

    CHECK(run.ext.subharmonic);
    CHECK(run.ext.value_at(1.9) == doctest::Approx(rim_profile(1.9)).epsilon(1e-12));
    CHECK(rim_profile(1.9) == doctest::Approx(0.4708042700).epsilon(1e-9));
    // continuity of the radial profile across the matching radius
    CHECK(run.ext.value_at(1.8 - 1e-7) == doctest::Approx(run.ext.value_at(1.8 + 1e-7)).epsilon(1e-6));
    CHECK(run.ext.value_at(1.0) == doctest::Approx(0.0));

    double bmin = INFINITY, bmax = 0;
    for (const auto& f : run.forms) {
        CHECK(f.periods_ok);
        for (double d : f.period_dev) CHECK(d <= 1e-6);
        CHECK(f.f_norm2.value == doctest::Approx(kPi).epsilon(1e-4));
        CHECK(f.gradient_identity <= 1e-4);
        CHECK(f.nk_sup_next <= 1.0);
        CHECK(f.N0.value <= f.N0_hi * f.f_norm2.value / kPi + 1e-12);
        CHECK(f.N0.value >= f.N0_lo * f.f_norm2.value / kPi - 1e-12);
        CHECK(!f.low_confidence);
        bmin = std::min(bmin, f.B.value), bmax = std::max(bmax, f.B.value);
    }
    CHECK(bmax / bmin <= 10);
    CHECK(run.report.slope >= -2.3);
    CHECK(run.report.slope <= -1.7);
    CHECK(run.report.hormander_violations == 0);
    CHECK(!run.report.falsified_eps.empty());
}

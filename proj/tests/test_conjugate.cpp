#include <doctest.h>

#include <cmath>

#include "dbarc/conjugate.hpp"
#include "dbarc/planar_potential.hpp"

using namespace dbarc;
using namespace dbarc::planar;

namespace {

GridSet annulus(const GridGeom& g, double a, double b) {
    return GridSet::from_predicate(g, [=](cplx z) { return std::abs(z) > a && std::abs(z) < b; });
}

RField sample(const GridGeom& g, double (*f)(cplx)) {
    RField F(g);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) F(i, j) = f(g.z(i, j));
    return F;
}

RField blob(const GridGeom& g, cplx c, double a, double mass) {
    RField f(g);
    double s = 0;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            double t = std::norm(g.z(i, j) - c) / (a * a);
            f(i, j) = t < 1 ? std::pow(1 - t, 3) : 0.0;
            s += f(i, j) * g.h * g.h;
        }
    for (auto& x : f.v) x *= mass / s;
    return f;
}

}  // namespace

TEST_CASE("log|z| on an annulus: period 2pi and Theta tracks arg z") {
    auto g = GridGeom::centered(1.0, 1.0 / 128);
    auto region = annulus(g, 0.3, 0.9);
    auto Phi = sample(g, [](cplx z) { return std::log(std::abs(z) + 1e-300); });
    int bi = g.rows / 2, bj = g.cols / 2 + 77;  // z = 0.6
    // sampled log|z| is harmonic only to O(h^4) per node; tree cycles accumulate ~1e-4
    auto r = harmonic_conjugate(Phi, region, 1.0, bi, bj, ConjugateOptions{1e-3, 2e-5});
    REQUIRE(r.periods.size() == 1);
    CHECK(r.periods[0].computable);
    CHECK(std::abs(r.periods[0].period - 2 * kPi) < 1e-6 * 2 * kPi);
    CHECK(r.single_valued);
    // exp(i Theta) against z/|z| up to the basepoint phase
    const auto& c = r.cells;
    cplx z0 = c.z(bi, bj);
    double worst = 0;
    for (int a = 0; a < c.rows; ++a)
        for (int b = 0; b < c.cols; ++b)
            if (r.reached[c.idx(a, b)]) {
                cplx z = c.z(a, b);
                cplx want = (z / std::abs(z)) / (z0 / std::abs(z0));
                worst = std::max(worst, std::abs(std::polar(1.0, r.theta[c.idx(a, b)]) - want));
            }
    CHECK(worst < 1e-3);
}

TEST_CASE("fundamental solution has unit period") {
    auto g = GridGeom::centered(1.0, 1.0 / 128);
    auto Phi = sample(g, [](cplx z) { return std::log(std::abs(z) + 1e-300) / (2 * kPi); });
    auto r = harmonic_conjugate(Phi, annulus(g, 0.3, 0.9), 1.0, g.rows / 2, g.cols / 2 + 77);
    CHECK(std::abs(r.periods[0].period - 1.0) < 1e-6);
    CHECK_FALSE(r.single_valued);
    CHECK(r.diagnostic == "conjugate not single-valued after exponentiation");
}

TEST_CASE("simply connected region has no periods") {
    auto g = GridGeom::centered(1.0, 1.0 / 64);
    auto region = GridSet::from_predicate(g, [](cplx z) { return std::abs(z) < 0.8; });
    auto Phi = sample(g, [](cplx z) { return z.real() * z.real() - z.imag() * z.imag() + 3 * z.imag(); });
    for (double n : {1.0, 7.0, 1024.0}) {
        auto r = harmonic_conjugate(Phi, region, n, g.rows / 2, g.cols / 2);
        CHECK(r.periods.empty());
        CHECK(r.closure_max < 1e-9 * n);
        CHECK(r.single_valued);
    }
}

TEST_CASE("green potential of a 2pi/n blob gives period 2pi") {
    auto g = GridGeom::centered(1.0, 1.0 / 128);
    const double n = 12;
    auto f = blob(g, cplx(0.05, 0.02), 0.2, 2 * kPi / n);
    auto region = annulus(g, 0.3, 0.95);
    auto exact = discrete_greens_potential(f).phi;
    auto r = harmonic_conjugate(exact, region, n, g.rows / 2, g.cols / 2 + 70);
    CHECK(std::abs(r.periods[0].period - 2 * kPi) < 1e-10);
    CHECK(r.single_valued);
    CHECK(r.closure_max < 1e-10);
    auto fft = greens_potential(f).phi;
    auto r2 = harmonic_conjugate(fft, region, n, g.rows / 2, g.cols / 2 + 70);
    CHECK(std::abs(r2.periods[0].period - 2 * kPi) < 1e-3);
}

TEST_CASE("period additivity over a union of holes") {
    auto g = GridGeom::centered(1.0, 1.0 / 96);
    cplx c1(-0.4, 0.1), c2(0.35, -0.2);
    RField f = blob(g, c1, 0.1, 0.7);
    RField f2 = blob(g, c2, 0.12, 1.9);
    for (std::size_t t = 0; t < f.v.size(); ++t) f.v[t] += f2.v[t];
    auto Phi = discrete_greens_potential(f).phi;
    auto region = GridSet::from_predicate(
        g, [&](cplx z) { return std::abs(z) < 0.95 && std::abs(z - c1) > 0.15 && std::abs(z - c2) > 0.17; });
    auto r = harmonic_conjugate(Phi, region, 1.0, g.rows / 2, g.cols / 2);
    REQUIRE(r.periods.size() == 2);
    double sum = r.periods[0].period + r.periods[1].period;
    auto big = GridSet::from_predicate(g, [](cplx z) { return std::abs(z) < 0.8; });
    CHECK(std::abs(loop_period(Phi, big, 1.0) - sum) < 1e-8);
    CHECK(std::abs(sum - 2.6) < 1e-8);
}

TEST_CASE("quad-precision conjugate of a refined potential") {
    auto g = GridGeom::centered(1.0, 1.0 / 64);
    const quad n = 1ULL << 40;
    auto f = blob(g, 0.0, 0.2, 1.0);
    std::vector<quad> fq(f.v.size());
    for (std::size_t t = 0; t < fq.size(); ++t) fq[t] = quad(f.v[t]) * (2 * kPi / double(n)) ;
    PoissonBox box(g);
    Field<quad> Phi(g);
    std::vector<double> fd(fq.size());
    for (std::size_t t = 0; t < fq.size(); ++t) fd[t] = double(fq[t]);
    Phi.v = box.solve_refined(fq, log_kernel_boundary(g, fd));
    quad mass = 0;
    for (auto x : fq) mass += x * quad(g.h) * quad(g.h);
    auto r = harmonic_conjugate<quad>(Phi, annulus(g, 0.3, 0.95), n, g.rows / 2, g.cols / 2 + 40);
    REQUIRE(r.periods.size() == 1);
    quad expect = n * mass;
    CHECK(std::abs(double(r.periods_exact[0] - expect)) < 1e-20);
}

TEST_CASE("non-harmonic input is rejected") {
    auto g = GridGeom::centered(1.0, 1.0 / 64);
    auto Phi = sample(g, [](cplx z) { return std::norm(z); });
    CHECK_THROWS_AS(harmonic_conjugate(Phi, annulus(g, 0.3, 0.9), 1.0, g.rows / 2, g.cols / 2 + 40), InputError);
}

#include <doctest.h>

#include <cmath>

#include "dbarc/wedge_bergman.hpp"

using namespace dbarc;
using namespace dbarc::wedge;

TEST_CASE("normalization on W1, closed form and quadrature") {
    WedgeFamily fam;
    for (int j : {1, 2, 3, 5, 10, 20, 30, 40}) {
        CHECK(std::abs(wedge_norm(fam, fam.W1(), j, j) - 1.0) < 1e-12);
        CHECK(std::abs(wedge_norm_quadrature(fam, fam.W1(), j, j) - 1.0) < 1e-8);
    }
}

TEST_CASE("restricted diagonal follows the power law") {
    WedgeFamily fam;
    for (int j = 1; j <= 20; ++j) {
        double a = fam.a(j);
        double want = fam.alpha0 / fam.alpha * std::pow(fam.r3 / fam.R, 2 - 2 * a);
        CHECK(wedge_norm(fam, fam.W0r3(), j, j).real() == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("off-diagonal entries against the mpmath polar quadrature value") {
    WedgeFamily fam;
    cplx ref(0.15373269084993950, -0.06367816553015515);
    CHECK(std::abs(wedge_norm(fam, fam.W0r3(), 1, 2) - ref) < 1e-14);
    CHECK(std::abs(wedge_norm_quadrature(fam, fam.W0r3(), 1, 2) - ref) < 1e-10);
    CHECK(std::abs(wedge_norm_quadrature(fam, fam.W1(), 1, 2) - wedge_norm(fam, fam.W1(), 1, 2)) < 1e-8);
    CHECK(std::abs(wedge_norm(fam, fam.W1(), 2, 1) - std::conj(wedge_norm(fam, fam.W1(), 1, 2))) < 1e-15);
}

TEST_CASE("gram is positive semidefinite and audited") {
    WedgeFamily fam;
    std::mt19937_64 rng(2);
    GramAudit audit;
    auto G1 = gram(fam, fam.W1(), 1, rng, &audit);
    CHECK(std::abs(G1(0, 0) - 1.0) < 1e-14);
    for (auto S : {fam.W1(), fam.W0r3()}) {
        auto G = gram(fam, S, 20, rng, &audit);
        CHECK(audit.entries == 3);
        CHECK(audit.max_deviation < 1e-8);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("restriction witness with the frozen constant") {
    WedgeFamily fam;
    auto rep = restriction_witness(fam, 20);
    CHECK(rep.delta == doctest::Approx(0.22487731863522338).epsilon(1e-12));
    CHECK(rep.delta_i == 3);
    CHECK(rep.delta_j == 4);
    CHECK(rep.no_convergent_subsequence);
    for (auto& r : rep.rows) CHECK(std::abs(r.norm_W1 - 1) < 1e-12);
    for (std::size_t k = 1; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].norm_restricted > rep.rows[k - 1].norm_restricted);
    auto far = restriction_witness(fam, 40);
    CHECK(std::abs(far.rows.back().norm_restricted - std::sqrt(0.5)) < 1e-6);
    auto one = restriction_witness(fam, 1);
    CHECK(one.verdict == "norm floor only");
    CHECK(one.norm_floor == doctest::Approx(std::sqrt(0.125)));
}

TEST_CASE("consecutive distances stay away from zero") {
    WedgeFamily fam;
    for (int j = 3; j < 20; ++j) {
        auto S = fam.W0r3();
        double d2 = (wedge_norm(fam, S, j, j) + wedge_norm(fam, S, j + 1, j + 1) - 2.0 * wedge_norm(fam, S, j, j + 1)).real();
        CHECK(std::sqrt(d2) >= kDelta0);
    }
}

TEST_CASE("bad geometry is rejected") {
    WedgeFamily fam;
    fam.r3 = 2;
    CHECK_THROWS_AS(restriction_witness(fam, 3), InputError);
    WedgeFamily ok;
    CHECK_THROWS_AS(wedge_norm(ok, Sector{1, 2 * kPi}, 1, 1), InputError);
}

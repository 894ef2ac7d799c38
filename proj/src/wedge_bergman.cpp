#include "dbarc/wedge_bergman.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dbarc::wedge {

double WedgeFamily::a(int j) const {
    require(j >= 1 && j <= 52, "wedge: index j must be in [1, 52]");
    return -std::expm1(-j * std::log(2.0));
}

void WedgeFamily::validate() const {
    require(0 < alpha0 && alpha0 <= alpha && alpha < 2 * kPi, "wedge: need 0 < alpha0 <= alpha < 2pi");
    require(0 < r3 && r3 < R, "wedge: need 0 < r3 < R");
}

cplx f(const WedgeFamily& fam, int j, cplx z) {
    double a = fam.a(j);
    double r = std::abs(z), th = std::arg(z);
    if (th > kPi / 2) th -= 2 * kPi;  // cut on the positive imaginary axis
    double c = std::sqrt((2 - 2 * a) / fam.alpha) * std::pow(fam.R, a - 1);
    return c * std::pow(r, -a) * std::polar(1.0, -a * th);
}

static void check_sector(const WedgeFamily& fam, const Sector& S) {
    fam.validate();
    require(S.rho > 0, "wedge: sector radius must be positive");
    require(S.beta > 0 && S.beta < 2 * kPi, "wedge: sector must avoid the branch cut");
}

cplx wedge_norm(const WedgeFamily& fam, const Sector& S, int i, int j) {
    check_sector(fam, S);
    double ai = fam.a(i), aj = fam.a(j);
    // 2 - ai - aj without cancellation
    double g = std::ldexp(1.0, -i) + std::ldexp(1.0, -j);
    if (!(g > 0)) throw InputError("wedge: a_i + a_j >= 2");
    double d = ai - aj;
    double radial = std::sqrt((2 - 2 * ai) * (2 - 2 * aj)) / fam.alpha * std::pow(fam.R, -g) *
                    std::pow(S.rho, g) / g;
    double ang = d == 0 ? S.beta : 2 * std::sin(d * S.beta / 2) / d;
    return radial * ang * std::polar(1.0, d * kPi / 2);
}

cplx wedge_norm_quadrature(const WedgeFamily& fam, const Sector& S, int i, int j) {
    check_sector(fam, S);
    using boost::math::quadrature::gauss_kronrod;
    const double g = std::ldexp(1.0, -i) + std::ldexp(1.0, -j);
    const double t0 = -kPi / 2 - S.beta / 2, t1 = -kPi / 2 + S.beta / 2;
    auto shell = [&](bool imag) {
        auto inner = [&](double th) {
            auto radial = [&](double r) {
                cplx z = std::polar(r, th);
                cplx v = f(fam, i, z) * std::conj(f(fam, j, z)) * r;
                return imag ? v.imag() : v.real();
            };
            return gauss_kronrod<double, 31>::integrate(radial, S.rho / 2, S.rho, 5, 1e-11);
        };
        return gauss_kronrod<double, 31>::integrate(inner, t0, t1, 5, 1e-11);
    };
    // shell k contributes 2^{-k g} times the outer shell
    double geo = -1.0 / std::expm1(-g * std::log(2.0));
    return cplx(shell(false), shell(true)) * geo;
}

Eigen::MatrixXcd gram(const WedgeFamily& fam, const Sector& S, int m, std::mt19937_64& rng, GramAudit* audit,
                      int audited) {
    require(m >= 1, "gram: m must be >= 1");
    Eigen::MatrixXcd G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            G(i, j) = wedge_norm(fam, S, i + 1, j + 1);
            G(j, i) = std::conj(G(i, j));
        }
    std::uniform_int_distribution<int> pick(0, m - 1);
    double worst = 0;
    for (int t = 0; t < audited; ++t) {
        int i = pick(rng), j = pick(rng);
        double dev = std::abs(wedge_norm_quadrature(fam, S, i + 1, j + 1) - G(i, j));
        worst = std::max(worst, dev);
    }
    if (audit) *audit = {audited, worst};
    if (worst > 1e-6) throw ConsistencyError("gram: quadrature audit deviates by " + std::to_string(worst));
    return G;
}

WitnessReport restriction_witness(const WedgeFamily& fam, int m, double delta0) {
    require(m >= 1, "wedge: m must be >= 1");
    fam.validate();
    WitnessReport rep;
    rep.delta0 = delta0;
    rep.limit_norm = std::sqrt(fam.alpha0 / fam.alpha);
    const auto S0 = fam.W0r3();
    Eigen::MatrixXcd G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = wedge_norm(fam, S0, i + 1, j + 1);
    rep.norm_floor = std::numeric_limits<double>::infinity();
    rep.delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        WitnessRow row;
        row.j = i + 1;
        row.a = fam.a(i + 1);
        row.norm_W1 = std::sqrt(wedge_norm(fam, fam.W1(), i + 1, i + 1).real());
        row.norm_restricted = std::sqrt(G(i, i).real());
        row.min_pairwise = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            double d2 = G(i, i).real() + G(j, j).real() - 2 * G(i, j).real();
            double d = std::sqrt(std::max(d2, 0.0));
            row.min_pairwise = std::min(row.min_pairwise, d);
            if (d < rep.delta) rep.delta = d, rep.delta_i = std::min(i, j) + 1, rep.delta_j = std::max(i, j) + 1;
        }
        rep.norm_floor = std::min(rep.norm_floor, row.norm_restricted);
        rep.rows.push_back(row);
    }
    if (m < 2) {
        rep.delta = 0;
        rep.rows[0].min_pairwise = 0;
        rep.verdict = "norm floor only";
        return rep;
    }
    rep.no_convergent_subsequence = rep.delta >= delta0 && rep.norm_floor > 0;
    rep.verdict = rep.no_convergent_subsequence ? "no convergent subsequence" : "inconclusive";
    return rep;
}

}  // namespace dbarc::wedge

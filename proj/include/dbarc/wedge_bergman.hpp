#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbarc/common.hpp"

namespace dbarc::wedge {

// {|z| < rho, |arg z + pi/2| < beta/2}: symmetric about the negative imaginary axis.
struct Sector {
    double rho = 1;
    double beta = kPi / 2;
};

struct WedgeFamily {
    double R = 1;
    double alpha = kPi / 2;
    double alpha0 = kPi / 4;
    double r3 = 0.25;

    // a_j = 1 - 2^{-j}
    double a(int j) const;
    void validate() const;
    Sector W1() const { return {R, alpha}; }
    Sector W0r3() const { return {r3, alpha0}; }
};

// f_j(z) = sqrt((2-2a)/alpha) R^{a-1} z^{-a}, arg z taken in (-3pi/2, pi/2).
cplx f(const WedgeFamily& fam, int j, cplx z);

// <f_i, f_j> = integral over S of f_i conj(f_j), closed form.
cplx wedge_norm(const WedgeFamily& fam, const Sector& S, int i, int j);

// Same inner product by nested Gauss-Kronrod over the outer dyadic shell, scaled by the
// self-similar geometric factor.
cplx wedge_norm_quadrature(const WedgeFamily& fam, const Sector& S, int i, int j);

struct GramAudit {
    int entries = 0;
    double max_deviation = 0;
};

// Throws ConsistencyError when an audited entry deviates by more than 1e-6.
Eigen::MatrixXcd gram(const WedgeFamily& fam, const Sector& S, int m, std::mt19937_64& rng,
                      GramAudit* audit = nullptr, int audited = 3);

struct WitnessRow {
    int j = 0;
    double a = 0, norm_W1 = 0, norm_restricted = 0, min_pairwise = 0;
};

struct WitnessReport {
    std::vector<WitnessRow> rows;
    double delta = 0;  // min pairwise restricted distance (0 if fewer than 2 rows)
    int delta_i = 0, delta_j = 0;
    double norm_floor = 0;
    double limit_norm = 0;  // sqrt(alpha0/alpha)
    double delta0 = 0;
    bool no_convergent_subsequence = false;
    std::string verdict;
};

// Frozen from the closed-form Gram for the default geometry, j in [3, 20].
inline constexpr double kDelta0 = 0.224877;

WitnessReport restriction_witness(const WedgeFamily& fam, int m, double delta0 = kDelta0);

}  // namespace dbarc::wedge

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dbarc/conjugate.hpp"
#include "dbarc/grid.hpp"
#include "dbarc/planar_potential.hpp"

namespace dbarc::hartogs {

// Square grid of half-width 2 + 2h with h = 2/N, so the unit disc is N nodes across and the
// radius-2 disc fits with a margin.
GridGeom pipeline_grid(int N);

// Disc |z| < 0.94 minus `holes` sectors 0.3 < |z| < 0.88, separated by spokes of width 0.04.
GridSet spoked_disc(const GridGeom& g, int holes = 5);

// exp(-1/dist(z, W)); 0 on W.
RField base_weight(const GridSet& W);

// Max over W nodes of the order-p centred differences of phi along x and y, p = 1..4.
std::array<double, 4> flatness_audit(const RField& phi, const GridSet& W);

struct Sequences {
    std::vector<std::uint64_t> n;
    std::vector<std::uint64_t> m;  // m[j] = n[j+1] / n[j]
    std::vector<quad> c;
    std::vector<quad> I;     // integral of psi_j
    std::vector<double> S;   // sup of psi_j
};

// n_1: least power of 2 with c_1 <= 1. Then the least integer m >= 2 with
// 2pi/(m n_j I_{j+1}) <= min{1, c_j S_j / S_{j+1}, 1/(n_j S_{j+1})}.
// Throws ConsistencyError when n leaves 64 bits.
Sequences select_sequences(const std::vector<quad>& I, const std::vector<double>& S);

struct InvariantAudit {
    double mass_dev = 0;         // max |n_j c_j I_j - 2pi|, quad
    bool sup_monotone = true;    // ||psi~_{j+1}|| <= ||psi~_j||
    double max_nj_sup_next = 0;  // max n_j ||psi~_{j+1}||
    bool divisible = true;       // n_{j+1} mod n_j == 0
    bool disjoint = true;
    bool ok() const { return mass_dev <= 1e-20 && sup_monotone && max_nj_sup_next <= 1 && divisible && disjoint; }
};

struct WeightSpec {
    GridSet W;
    RField phi;
    planar::ComponentDecomposition dec;
    std::vector<int> used;  // component index per stage
    Sequences seq;
    std::vector<RField> psi_tilde;
    RField phi_tilde;
    std::vector<Field<quad>> Xi;  // Delta_h Xi_j = n_j psi~_j
    std::vector<double> xi_residual;
    Field<quad> Phi;  // sum_j Xi_j / n_j
    InvariantAudit audit;
    std::vector<std::string> notices;

    int stages() const { return int(used.size()); }
    GridSet Wk(int k) const;  // D minus the first k used components
};

// W on a pipeline grid; at most K stages.
WeightSpec build_weight(const GridSet& W, int K);

// n_k Phi_k = sum_{i<=k} (n_k/n_i) Xi_i and n_k (Phi - Phi_k) = sum_{i>k} (n_k/n_i) Xi_i.
Field<quad> holomorphic_part(const WeightSpec& s, int k);
Field<quad> remainder_part(const WeightSpec& s, int k);

double rim_profile(double r);  // -log(4 - r^2) / 2

struct Extension {
    Field<quad> Phi_ext;  // 0 at nodes with |z| >= 2
    double M = 0;         // total mass of phi~
    double A = 0, B = 0, late_width = 0;
    int attempts = 0;
    double min_laplacian = 0;  // over nodes with 1 < |z| < 2 - 2h
    long nodes_checked = 0;
    bool subharmonic = false;
    double value_at(double r) const;  // radial part P + g
};

// Throws ConsistencyError when positivity fails after 10 attempts.
Extension assemble_weight(const WeightSpec& s);

// <G, g> for -Delta G = g = r^{l+2p} e^{i l theta} on |w| < rho with G = 0 on the circle.
double fibre_dirichlet_pairing(int l, int p, double rho);

struct Estimate {
    double value = 0;
    double error = 0;  // (I_h - I_2h) / 3
};

struct WitnessForm {
    int k = 0;
    std::uint64_t n = 0;
    double lambda = 0;
    GridSet Wk;
    RField v;
    std::vector<int> hole_stage;     // stage j of each hole of W_k
    std::vector<double> period_dev;  // |P - 2pi n_k/n_j| / 2pi
    bool periods_ok = false;
    double closure = 0;
    Estimate N0, f_norm2, Nneg, Q, B;
    double N0_lo = 0, N0_hi = 0;
    double gradient_identity = 0;  // max |route A - route B| at cell centres
    double first_term = 0;         // integral of n |v|^2 Phi_{z zbar}
    double nk_sup_next = 0;        // n_k ||phi~||_{L^inf(W_k)}
    double newton_sup = 0, newton_constant = 0;
    double energy_constant = 0;    // Q / B
    bool low_confidence = false;
};

// Stage k in 1..stages(). Refuses (ConsistencyError) when a period is off the lattice.
WitnessForm witness_form(const WeightSpec& s, int k);
void energy(const WeightSpec& s, WitnessForm& wf);

// sup |p - p'| over Omega = {|w| < exp(-Phi_ext(z)), |z| < 2}, brute force on every stride-th node.
double omega_diameter(const Extension& e, int stride = 8);

struct Certificate {
    double eps = 0, C = 0;
    int k = 0;
    double deficit = 0;
};

struct ViolationReport {
    std::vector<double> eps, C;
    std::vector<Certificate> best;  // per (eps, C), the stage with the largest deficit
    std::vector<double> falsified_eps;
    double slope = 0;  // least-squares slope of log Nneg against log n
    double diameter = 0;
    double hormander_worst = 0;  // max over k of (1/D^2) N0 / (e Q)
    int hormander_violations = 0;
    std::string verdict;
};

ViolationReport violation_report(const std::vector<WitnessForm>& forms, const std::vector<double>& eps,
                                 double diameter);

struct Run {
    WeightSpec spec;
    Extension ext;
    std::vector<WitnessForm> forms;
    ViolationReport report;
    std::array<double, 4> flatness{};
};

Run run_pipeline(const GridSet& W, int K, const std::vector<double>& eps = {1e-3, 1e-2, 0.1});

}  // namespace dbarc::hartogs

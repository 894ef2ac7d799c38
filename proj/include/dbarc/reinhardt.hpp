#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbarc/common.hpp"

namespace dbarc::reinhardt {

// Log image descriptions. x_j = log|z_j|.
//   HRep:    {A x <= b}
//   Radial:  C^2 only, {x1 <= log r1max, log r2min(e^x1) < x2 < log r2max(e^x1)} from samples
//   Ball:    {sum e^{2 x_j} < 1}
//   Product: factors on consecutive coordinate blocks
enum class ProfileType { HRep, Radial, Ball, Product };

struct RadialSamples;

struct Profile {
    ProfileType type = ProfileType::HRep;
    int dim = 0;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<double> r1, r2max, r2min;  // r2min empty when the fibres are discs
    std::vector<Profile> factors;
    std::shared_ptr<const RadialSamples> interp;

    // Convex level function; the log image is {level < 0}.
    double level(const std::vector<double>& x) const;
};

Profile hrep(std::vector<std::vector<double>> A, std::vector<double> b);
Profile radial(std::vector<double> r1, std::vector<double> r2max, std::vector<double> r2min = {});
Profile ball(int dim);
Profile product(std::vector<Profile> factors);

struct ReinhardtModel {
    int n = 0;
    Profile profile;
    std::vector<bool> complete;
    std::string name;
};

// Validates dimensions, convexity of the log image and the completeness flags.
ReinhardtModel make_model(Profile p, std::vector<bool> complete, std::string name = "");
ReinhardtModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ReinhardtModel& m);

// Built-in models.
ReinhardtModel bidisc();
ReinhardtModel unit_ball(int n);
ReinhardtModel punctured_ball();  // ball in C^2 minus {z1 = 0}
ReinhardtModel disc_times_ball();  // D x B^2 in C^3
ReinhardtModel named_model(const std::string& name);

struct LogImage {
    Profile region;
    bool convex = true;
    int pairs_tested = 0;
    double worst_midpoint = 0;  // max level at midpoints of inside pairs
    std::string verdict;        // "pseudoconvex-compatible" or "not convex"
};

LogImage log_image(const ReinhardtModel& m, unsigned seed = 1);
bool in_log_image(const ReinhardtModel& m, const std::vector<double>& x);

struct RecessionCone {
    std::vector<std::vector<double>> A;  // {d : A d <= 0}; empty for sampled profiles
    bool sampled = false;
    std::vector<bool> contains_neg_e;
    bool contains(const ReinhardtModel& m, const std::vector<double>& d) const;
};

RecessionCone recession_cone(const ReinhardtModel& m);

struct FlatPiece {
    int dim = 0;
    std::string kind;          // "face", "segment", "side", or a product of these
    std::vector<int> support;  // active rows (hrep) or sample index range (radial)
    std::vector<double> point;  // a finite point of the piece in log coordinates
};

std::vector<FlatPiece> flat_pieces(const ReinhardtModel& m, int q);

// Boundary varieties inside coordinate hyperplanes of dimension >= q.
struct HyperplaneVariety {
    std::vector<int> zero_coords;
    int dim = 0;
    std::string reason;
};
std::vector<HyperplaneVariety> hyperplane_varieties(const ReinhardtModel& m, int q);

struct Verdict {
    std::string verdict;  // compact | non-compact | compact-by-sufficiency | unknown
    std::string rule;
    std::vector<FlatPiece> pieces;
    std::vector<HyperplaneVariety> hyperplane;
};

Verdict compactness_verdict(const ReinhardtModel& m, int q);

using MultiIndex = std::vector<int>;

// log mu(alpha); +inf when the moment diverges.
double log_moment(const ReinhardtModel& m, const MultiIndex& alpha);
double moment(const ReinhardtModel& m, const MultiIndex& alpha);

// All alpha >= 0 with |alpha| <= N, by degree then lexicographically descending.
std::vector<MultiIndex> monomial_basis(int n, int N);

class MomentTable {
public:
    MomentTable(const ReinhardtModel& m, int degree);
    double log_mu(const MultiIndex& a) const;
    double mu(const MultiIndex& a) const { return std::exp(log_mu(a)); }
    int degree() const { return degree_; }
    int usable_degree() const { return usable_; }  // highest degree with no underflow

private:
    const ReinhardtModel* model_;
    int degree_, usable_;
    std::map<MultiIndex, double> table_;
};

struct KernelDiag {
    double value = 0;
    std::vector<double> shells;
    double shell_ratio = 0;
    double tail_bound = 0;
    bool converged = true;
};

KernelDiag bergman_kernel_diag(const ReinhardtModel& m, const std::vector<cplx>& z, int cutoff = 64);

struct Entry {
    int row = 0, col = 0;
    double value = 0;
};

// [P, conj(z_j)] on the span of normalized monomials. j = 0 means the constant multiplier 1.
// Columns are mutually orthogonal (distinct rotation characters), so the operator is
// diagonal in the basis of normalized images (I - P)(conj(z_j) e_alpha).
struct OperatorMatrix {
    std::vector<MultiIndex> basis;
    std::vector<Entry> projected;   // P(conj(z_j) e_alpha) in the normalized monomial basis
    std::vector<Entry> entries;     // the commutator on the complement basis
    std::vector<double> column_norms;
    std::vector<double> singular_values;
    std::vector<double> decay;      // decay[d] = max column norm over degree >= d
    int cutoff = 0;
    std::string notice;
};

OperatorMatrix commutator_matrix(const ReinhardtModel& m, int j, int cutoff = 64);

// <z^a conj(z)^b, z^c conj(z)^d> over the domain; exactly 0 unless a + d = b + c.
double pairing(const ReinhardtModel& m, const MultiIndex& a, const MultiIndex& b, const MultiIndex& c,
               const MultiIndex& d);

struct CanonicalRow {
    int m = 0;
    double ratio = 0;  // ||conj(z2) z1^m|| / ||z1^m||
    double max_pairing = 0;
};

struct CanonicalReport {
    std::vector<CanonicalRow> rows;
    double orthogonality_max = 0;  // over beta with |beta| <= cutoff
    double family_pairing_max = 0;
    double ratio_min = 0, ratio_max = 0;
    double diameter = 0;
    double hormander_worst = 0;  // max of (1/D^2)||u||^2 / (e ||dbar u||^2)
    bool non_compact_proxy = false;
    std::string conclusion;
};

CanonicalReport canonical_solution_witness(const ReinhardtModel& m, int m_max, int cutoff = 64);

// sup |z - w| over the closure, from the log image.
double diameter(const ReinhardtModel& m);

}  // namespace dbarc::reinhardt

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dbarc/common.hpp"

namespace dbarc::hermitian {

class HermitianMatrix {
public:
    // Throws unless m is square and m(j,k) == conj(m(k,j)) bit for bit.
    explicit HermitianMatrix(Eigen::MatrixXcd m);
    // Averages m with its adjoint first; for finite-difference data.
    static HermitianMatrix symmetrized(const Eigen::MatrixXcd& m);

    int n() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& entries() const { return m_; }
    cplx operator()(int j, int k) const { return m_(j, k); }

private:
    Eigen::MatrixXcd m_;
};

// Coefficients of a (0,q)-form on increasing q-tuples, tuples in lexicographic order.
class FormVector {
public:
    FormVector(int n, int q);
    FormVector(int n, int q, std::vector<cplx> coeffs);

    int n() const { return n_; }
    int q() const { return q_; }
    const std::vector<cplx>& coeffs() const { return c_; }
    std::vector<cplx>& coeffs() { return c_; }

    // Tuple i as a bitmask over {0..n-1}.
    std::uint32_t tuple(std::size_t i) const { return tuples_[i]; }
    std::size_t size() const { return c_.size(); }
    cplx at(std::uint32_t mask) const;
    // u_{jK}: zero when j is in K, else sign(sort (j,K)) * u_{sorted}.
    cplx extended(int j, std::uint32_t K) const;
    double norm2() const;

private:
    int n_, q_;
    std::vector<cplx> c_;
    std::vector<std::uint32_t> tuples_;
    std::vector<std::int32_t> index_;  // mask -> position, -1 if not a q-tuple
};

// Increasing k-subsets of {0..n-1} as bitmasks, lexicographic order.
std::vector<std::uint32_t> increasing_tuples(int n, int k);

double hessian_form_hq(const HermitianMatrix& H, const FormVector& u);
double min_q_eigensum(const HermitianMatrix& H, int q);

// n x q matrix with orthonormal columns, Haar distributed.
Eigen::MatrixXcd random_frame(int n, int q, std::mt19937_64& rng);
double frame_sum(const HermitianMatrix& H, const Eigen::MatrixXcd& T);

struct Lemma5Report {
    double min_eigensum = 0;
    double min_frame_sum = 0;    // smallest over sampled frames
    double eigen_frame_sum = 0;  // frame of the q lowest eigenvectors
    bool frames_bounded = false;
    bool equality_attained = false;
    bool satisfied = false;      // min_eigensum >= M - tol
    int frames = 0;
};

Lemma5Report check_lemma5(const HermitianMatrix& H, int q, double M, int frames,
                          std::mt19937_64& rng, double tol = 1e-9);

struct PqSample {
    std::vector<cplx> point;
    double lambda = 0;
    HermitianMatrix hessian;
};

struct PqCertificate {
    int n = 0;
    int q = 1;
    double M = 0;
    double tolerance = 0;
    std::vector<PqSample> samples;
};

struct PqVerdict {
    bool pass = false;
    bool hessian_ok = true;
    bool normalization_ok = true;
    std::optional<std::size_t> worst_sample_index;
    double worst_margin = 0;  // min over samples of eigensum - M
    std::vector<std::size_t> normalization_violations;
    std::vector<std::size_t> hessian_failures;
};

PqVerdict verify_pq_certificate(const PqCertificate& cert);

using RealFn = std::function<double(std::span<const cplx>)>;

// Centered second differences, O(h^2).
HermitianMatrix fd_complex_hessian(const RealFn& f, std::span<const cplx> z, double h);

PqCertificate make_certificate(const RealFn& lambda, const std::vector<std::vector<cplx>>& points,
                               int q, double M, double h, double tolerance);

PqCertificate certificate_from_json(const nlohmann::json& j);
nlohmann::json certificate_to_json(const PqCertificate& c);
nlohmann::json verdict_to_json(const PqVerdict& v);

}  // namespace dbarc::hermitian

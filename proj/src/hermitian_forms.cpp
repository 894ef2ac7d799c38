#include "dbarc/hermitian_forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace dbarc::hermitian {

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    require(m_.rows() >= 1 && m_.rows() == m_.cols(), "hermitian: matrix must be square, n >= 1");
    for (Eigen::Index j = 0; j < m_.rows(); ++j)
        for (Eigen::Index k = 0; k <= j; ++k)
            if (m_(j, k) != std::conj(m_(k, j)))
                throw InputError("hermitian: entries not conjugate-symmetric at (" +
                                 std::to_string(j) + "," + std::to_string(k) + ")");
}

HermitianMatrix HermitianMatrix::symmetrized(const Eigen::MatrixXcd& m) {
    require(m.rows() == m.cols(), "hermitian: matrix must be square");
    Eigen::MatrixXcd s = 0.5 * (m + m.adjoint());
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        s(j, j) = s(j, j).real();
        for (Eigen::Index k = 0; k < j; ++k) s(k, j) = std::conj(s(j, k));
    }
    return HermitianMatrix(std::move(s));
}

std::vector<std::uint32_t> increasing_tuples(int n, int k) {
    std::vector<std::uint32_t> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::uint32_t m = 0;
        for (int i : idx) m |= 1u << i;
        out.push_back(m);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int r = i + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
    }
    return out;
}

FormVector::FormVector(int n, int q) : n_(n), q_(q) {
    require(n >= 1 && n <= 16, "form: n must be in [1,16]");
    require(q >= 1 && q <= n, "form: q must be in [1,n]");
    tuples_ = increasing_tuples(n, q);
    c_.assign(tuples_.size(), cplx{});
    index_.assign(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < tuples_.size(); ++i) index_[tuples_[i]] = static_cast<std::int32_t>(i);
}

FormVector::FormVector(int n, int q, std::vector<cplx> coeffs) : FormVector(n, q) {
    require(coeffs.size() == c_.size(), "form: coefficient count must be binomial(n,q)");
    c_ = std::move(coeffs);
}

cplx FormVector::at(std::uint32_t mask) const {
    auto i = index_.at(mask);
    return i < 0 ? cplx{} : c_[static_cast<std::size_t>(i)];
}

cplx FormVector::extended(int j, std::uint32_t K) const {
    if (K & (1u << j)) return {};
    // moving j into place passes every element of K below it
    int below = std::popcount(K & ((1u << j) - 1));
    cplx v = at(K | (1u << j));
    return (below % 2) ? -v : v;
}

double FormVector::norm2() const {
    double s = 0;
    for (auto& c : c_) s += std::norm(c);
    return s;
}

double hessian_form_hq(const HermitianMatrix& H, const FormVector& u) {
    if (H.n() != u.n()) throw InputError("hq: dimension mismatch");
    const int n = u.n();
    cplx total{};
    Eigen::VectorXcd x(n);
    for (auto K : increasing_tuples(n, u.q() - 1)) {
        for (int j = 0; j < n; ++j) x(j) = u.extended(j, K);
        // sum_{j,k} H_jk x_j conj(x_k)
        total += (x.transpose() * H.entries() * x.conjugate()).value();
    }
    double scale = std::max(1.0, H.entries().cwiseAbs().maxCoeff() * u.norm2());
    if (std::abs(total.imag()) > 1e-12 * scale * n)
        throw ConsistencyError("hq: imaginary residue above tolerance");
    return total.real();
}

static Eigen::VectorXd eigenvalues(const HermitianMatrix& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.entries(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double min_q_eigensum(const HermitianMatrix& H, int q) {
    require(q >= 1 && q <= H.n(), "eigensum: q out of range");
    return eigenvalues(H).head(q).sum();
}

Eigen::MatrixXcd random_frame(int n, int q, std::mt19937_64& rng) {
    require(q >= 1 && q <= n, "frame: q out of range");
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix column phases so the distribution is Haar
    for (int j = 0; j < n; ++j) {
        double a = std::abs(R(j, j));
        if (a > 0) Q.col(j) *= R(j, j) / a;
    }
    return Q.leftCols(q);
}

double frame_sum(const HermitianMatrix& H, const Eigen::MatrixXcd& T) {
    double s = 0;
    for (Eigen::Index j = 0; j < T.cols(); ++j)
        s += (T.col(j).adjoint() * H.entries() * T.col(j))(0, 0).real();
    return s;
}

Lemma5Report check_lemma5(const HermitianMatrix& H, int q, double M, int frames,
                          std::mt19937_64& rng, double tol) {
    require(frames >= 1, "lemma5: frames must be >= 1");
    require(q >= 1 && q <= H.n(), "lemma5: q out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.entries());
    Lemma5Report r;
    r.frames = frames;
    r.min_eigensum = es.eigenvalues().head(q).sum();
    r.min_frame_sum = std::numeric_limits<double>::infinity();
    for (int f = 0; f < frames; ++f)
        r.min_frame_sum = std::min(r.min_frame_sum, frame_sum(H, random_frame(H.n(), q, rng)));
    r.eigen_frame_sum = frame_sum(H, es.eigenvectors().leftCols(q));
    r.frames_bounded = r.min_frame_sum >= r.min_eigensum - tol;
    r.equality_attained = std::abs(r.eigen_frame_sum - r.min_eigensum) <= tol;
    r.satisfied = r.min_eigensum >= M - tol;
    return r;
}

PqVerdict verify_pq_certificate(const PqCertificate& cert) {
    require(cert.tolerance >= 0, "certificate: tolerance must be >= 0");
    require(cert.q >= 1 && cert.q <= cert.n, "certificate: q out of range");
    PqVerdict v;
    v.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cert.samples.size(); ++i) {
        const auto& s = cert.samples[i];
        if (s.hessian.n() != cert.n) throw InputError("certificate: sample " + std::to_string(i) + " has wrong dimension");
        if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) v.normalization_violations.push_back(i);
        double margin = min_q_eigensum(s.hessian, cert.q) - cert.M;
        if (margin < -cert.tolerance) v.hessian_failures.push_back(i);
        if (margin < v.worst_margin) {
            v.worst_margin = margin;
            v.worst_sample_index = i;
        }
    }
    if (cert.samples.empty()) v.worst_margin = 0;
    v.normalization_ok = v.normalization_violations.empty();
    v.hessian_ok = v.hessian_failures.empty();
    v.pass = v.normalization_ok && v.hessian_ok;
    return v;
}

HermitianMatrix fd_complex_hessian(const RealFn& f, std::span<const cplx> z, double h) {
    require(h > 0, "fd hessian: h must be positive");
    const int n = static_cast<int>(z.size());
    const int d = 2 * n;
    // fresh copy per evaluation so shifted points are exact
    auto at = [&](int a, double sa, int b, double sb) {
        std::vector<cplx> p(z.begin(), z.end());
        for (auto [c, s] : {std::pair{a, sa}, std::pair{b, sb}}) {
            if (c < 0) continue;
            if (c < n) p[c] += s;
            else p[c - n] += cplx(0, s);
        }
        return f(p);
    };
    const double f0 = at(-1, 0, -1, 0);
    Eigen::MatrixXd R(d, d);  // real Hessian in (x_1..x_n, y_1..y_n)
    for (int a = 0; a < d; ++a) {
        R(a, a) = (at(a, h, -1, 0) - 2 * f0 + at(a, -h, -1, 0)) / (h * h);
        for (int b = 0; b < a; ++b) {
            double acc = at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h);
            R(a, b) = R(b, a) = acc / (4 * h * h);
        }
    }
    Eigen::MatrixXcd H(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            H(j, k) = 0.25 * cplx(R(j, k) + R(n + j, n + k), R(j, n + k) - R(n + j, k));
    return HermitianMatrix::symmetrized(H);
}

PqCertificate make_certificate(const RealFn& lambda, const std::vector<std::vector<cplx>>& points,
                               int q, double M, double h, double tolerance) {
    require(!points.empty(), "certificate: no sample points");
    PqCertificate c;
    c.n = static_cast<int>(points.front().size());
    c.q = q;
    c.M = M;
    c.tolerance = tolerance;
    for (const auto& z : points) {
        require(static_cast<int>(z.size()) == c.n, "certificate: inconsistent point dimension");
        c.samples.push_back({z, lambda(z), fd_complex_hessian(lambda, z, h)});
    }
    return c;
}

using nlohmann::json;

static std::vector<cplx> read_point(const json& j, int n) {
    std::vector<cplx> p;
    for (const auto& e : j) {
        if (e.is_array()) p.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        else p.emplace_back(e.get<double>(), 0.0);
    }
    require(static_cast<int>(p.size()) == n, "certificate: point must have n entries");
    return p;
}

PqCertificate certificate_from_json(const json& j) {
    try {
        PqCertificate c;
        c.n = j.at("n").get<int>();
        c.q = j.at("q").get<int>();
        c.M = j.at("M").get<double>();
        c.tolerance = j.value("tolerance", 0.0);
        require(c.n >= 1 && c.n <= 16, "certificate: n out of range");
        require(c.q >= 1 && c.q <= c.n, "certificate: q out of range");
        require(c.tolerance >= 0, "certificate: tolerance must be >= 0");
        for (const auto& s : j.at("samples")) {
            auto flat = s.at("hessian").get<std::vector<double>>();
            require(flat.size() == static_cast<std::size_t>(2 * c.n * c.n),
                    "certificate: hessian must hold n*n re/im pairs");
            Eigen::MatrixXcd H(c.n, c.n);
            for (int r = 0; r < c.n; ++r)
                for (int k = 0; k < c.n; ++k)
                    H(r, k) = {flat[2 * (r * c.n + k)], flat[2 * (r * c.n + k) + 1]};
            c.samples.push_back({read_point(s.at("point"), c.n), s.at("lambda").get<double>(),
                                 HermitianMatrix(std::move(H))});
        }
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string("certificate: ") + e.what());
    }
}

json certificate_to_json(const PqCertificate& c) {
    json samples = json::array();
    for (const auto& s : c.samples) {
        json pt = json::array();
        for (auto z : s.point) pt.push_back({z.real(), z.imag()});
        std::vector<double> flat;
        for (int r = 0; r < c.n; ++r)
            for (int k = 0; k < c.n; ++k) {
                flat.push_back(s.hessian(r, k).real());
                flat.push_back(s.hessian(r, k).imag());
            }
        samples.push_back({{"point", pt}, {"lambda", s.lambda}, {"hessian", flat}});
    }
    return {{"n", c.n}, {"q", c.q}, {"M", c.M}, {"tolerance", c.tolerance}, {"samples", samples}};
}

json verdict_to_json(const PqVerdict& v) {
    json j = {{"pass", v.pass},
              {"worst_margin", v.worst_margin},
              {"hessian_ok", v.hessian_ok},
              {"normalization_ok", v.normalization_ok},
              {"normalization_violations", v.normalization_violations},
              {"hessian_failures", v.hessian_failures}};
    j["worst_sample_index"] = v.worst_sample_index ? json(*v.worst_sample_index) : json(nullptr);
    return j;
}

}  // namespace dbarc::hermitian

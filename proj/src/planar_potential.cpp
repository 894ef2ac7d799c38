#include "dbarc/planar_potential.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <fftw3.h>
#include <quadmath.h>

namespace dbarc::planar {

ComponentDecomposition complement_components(const GridSet& W) {
    ComponentDecomposition d;
    d.disc = unit_disc(W.g);
    if (!is_subset(W, d.disc)) throw InputError("W must lie in the open unit disc");
    d.components = components4(set_minus(d.disc, W));
    GridSet acc = d.disc;
    for (const auto& c : d.components) {
        acc = set_minus(acc, c);
        d.W.push_back(acc);
    }
    return d;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct MaskIndex {
    std::vector<int> id;  // node -> unknown, -1 outside
    std::vector<std::size_t> node;
};

MaskIndex index_mask(const GridSet& m) {
    MaskIndex ix;
    ix.id.assign(m.g.size(), -1);
    for (std::size_t k = 0; k < m.mask.size(); ++k)
        if (m.mask[k]) {
            ix.id[k] = static_cast<int>(ix.node.size());
            ix.node.push_back(k);
        }
    return ix;
}

// -Delta_h on the mask with zero values off it.
SpMat neg_laplacian(const GridSet& m, const MaskIndex& ix) {
    const auto& g = m.g;
    const double s = 1.0 / (g.h * g.h);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(ix.node.size() * 5);
    for (std::size_t r = 0; r < ix.node.size(); ++r) {
        int i = static_cast<int>(ix.node[r] / g.cols), j = static_cast<int>(ix.node[r] % g.cols);
        t.emplace_back(r, r, 4 * s);
        const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d)
            if (m(i + di[d], j + dj[d])) t.emplace_back(r, ix.id[g.idx(i + di[d], j + dj[d])], -s);
    }
    SpMat A(ix.node.size(), ix.node.size());
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

}  // namespace

DirichletEig dirichlet_ground_state(const GridSet& mask) {
    if (mask.empty()) throw DegenerateDomain("dirichlet: mask has no interior node");
    auto ix = index_mask(mask);
    SpMat A = neg_laplacian(mask, ix);
    const auto n = static_cast<Eigen::Index>(ix.node.size());

    Eigen::SimplicialLDLT<SpMat> solver(A);
    if (solver.info() != Eigen::Success) throw ConsistencyError("dirichlet: factorization failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
    DirichletEig out;
    double rq = 0, res = 0;
    bool shifted = false;
    for (int it = 1; it <= 400; ++it) {
        Eigen::VectorXd y = solver.solve(x);
        x = y.normalized();
        Eigen::VectorXd Ax = A * x;
        rq = x.dot(Ax);
        res = (Ax - rq * x).norm();
        out.iterations = it;
        if (res <= 1e-9 * rq) break;
        // slow contraction (nearly equal low modes): shift towards the current estimate once
        if (!shifted && it == 30) {
            SpMat S = A;
            for (Eigen::Index k = 0; k < n; ++k) S.coeffRef(k, k) -= 0.999 * rq;
            solver.compute(S);
            if (solver.info() != Eigen::Success) throw ConsistencyError("dirichlet: shifted factorization failed");
            shifted = true;
        }
    }
    if (x.sum() < 0) x = -x;
    out.lambda = rq;
    out.residual = res;
    out.v = RField(mask.g, 0.0);
    const double scale = 1.0 / mask.g.h;  // h^2 sum v^2 = 1
    for (Eigen::Index r = 0; r < n; ++r) out.v.v[ix.node[r]] = x(r) * scale;
    if (res > 1e-8 * rq) throw ConsistencyError("dirichlet: inverse iteration did not converge");
    return out;
}

RayleighSequence rayleigh_sequence(const ComponentDecomposition& d, int K) {
    require(K >= 0, "rayleigh: K must be >= 0");
    RayleighSequence s;
    int avail = static_cast<int>(d.W.size());
    if (K > avail) {
        s.notice = "requested " + std::to_string(K) + " stages, only " + std::to_string(avail) + " components";
        K = avail;
    }
    for (int k = 1; k <= K; ++k) {
        const auto& Wk = d.W[k - 1];
        if (Wk.empty()) {
            s.notice = "W_" + std::to_string(k) + " is empty; truncated to K = " + std::to_string(k - 1);
            break;
        }
        RayleighStage st{k, Wk, dirichlet_ground_state(Wk)};
        s.max_lambda = std::max(s.max_lambda, st.eig.lambda);
        s.stages.push_back(std::move(st));
    }
    return s;
}

RayleighSequence rayleigh_sequence(const GridSet& W, int K) {
    return rayleigh_sequence(complement_components(W), K);
}

double log_cell_mean(double h) {
    return std::log(h) - 1.5 + kPi / 4 - 0.5 * std::log(2.0);
}

namespace {

// Linear convolution of f (rows x cols) with a kernel given on offsets, via zero padding.
template <class Kernel>
std::vector<double> convolve(const GridGeom& g, const std::vector<double>& f, Kernel kern) {
    const int R = g.rows, C = g.cols, PR = 2 * R, PC = 2 * C;
    const int PCh = PC / 2 + 1;
    std::vector<double> a(std::size_t(PR) * PC, 0.0), k(std::size_t(PR) * PC, 0.0);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) a[std::size_t(i) * PC + j] = f[g.idx(i, j)];
    for (int i = 0; i < PR; ++i)
        for (int j = 0; j < PC; ++j) {
            int di = i < R ? i : i - PR, dj = j < C ? j : j - PC;
            if (std::abs(di) < R && std::abs(dj) < C) k[std::size_t(i) * PC + j] = kern(di, dj);
        }
    auto* A = fftw_alloc_complex(std::size_t(PR) * PCh);
    auto* K = fftw_alloc_complex(std::size_t(PR) * PCh);
    fftw_plan pa = fftw_plan_dft_r2c_2d(PR, PC, a.data(), A, FFTW_ESTIMATE);
    fftw_plan pk = fftw_plan_dft_r2c_2d(PR, PC, k.data(), K, FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pk);
    for (std::size_t t = 0; t < std::size_t(PR) * PCh; ++t) {
        double re = A[t][0] * K[t][0] - A[t][1] * K[t][1];
        double im = A[t][0] * K[t][1] + A[t][1] * K[t][0];
        A[t][0] = re;
        A[t][1] = im;
    }
    fftw_plan pb = fftw_plan_dft_c2r_2d(PR, PC, A, a.data(), FFTW_ESTIMATE);
    fftw_execute(pb);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pk);
    fftw_destroy_plan(pb);
    fftw_free(A);
    fftw_free(K);
    std::vector<double> out(g.size());
    const double norm = 1.0 / (double(PR) * PC);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) out[g.idx(i, j)] = a[std::size_t(i) * PC + j] * norm;
    return out;
}

RField residual_map(const RField& phi, const RField& f) {
    RField r(phi.g, 0.0);
    for (int i = 1; i + 1 < phi.g.rows; ++i)
        for (int j = 1; j + 1 < phi.g.cols; ++j) r(i, j) = laplace_h(phi, i, j) - f(i, j);
    return r;
}

}  // namespace

GreenResult greens_potential(const RField& f) {
    const auto& g = f.g;
    require(g.h > 0 && g.rows >= 3 && g.cols >= 3, "green: grid too small");
    const double h = g.h, c = 1.0 / (2 * kPi), self = c * log_cell_mean(h);
    auto conv = convolve(g, f.v, [&](int di, int dj) {
        if (di == 0 && dj == 0) return self;
        return c * 0.5 * std::log(h * h * (double(di) * di + double(dj) * dj));
    });
    GreenResult out;
    out.phi = RField(g);
    for (std::size_t t = 0; t < conv.size(); ++t) out.phi.v[t] = conv[t] * h * h;
    out.residual = residual_map(out.phi, f);
    return out;
}

RField newtonian_potential(const RField& f) {
    const auto& g = f.g;
    const double h = g.h;
    // integral of 1/|w| over the centred cell is 4 asinh(1) h
    const double self = 4 * std::asinh(1.0) / h;
    auto conv = convolve(g, f.v, [&](int di, int dj) {
        if (di == 0 && dj == 0) return self;
        return 1.0 / (h * std::hypot(double(di), double(dj)));
    });
    RField out(g);
    for (std::size_t t = 0; t < conv.size(); ++t) out.v[t] = conv[t] * h * h;
    return out;
}

std::vector<double> log_kernel_boundary(const GridGeom& g, const std::vector<double>& f) {
    RField F(g);
    F.v = f;
    auto phi = greens_potential(F).phi;
    std::vector<double> b(g.size(), 0.0);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j)
            if (i == 0 || j == 0 || i == g.rows - 1 || j == g.cols - 1) b[g.idx(i, j)] = phi(i, j);
    return b;
}

GreenResult discrete_greens_potential(const RField& f) {
    PoissonBox box(f.g);
    auto b = log_kernel_boundary(f.g, f.v);
    GreenResult out;
    out.phi = RField(f.g);
    out.phi.v = box.solve(f.v, b);
    out.residual = residual_map(out.phi, f);
    return out;
}

// Fast sine-transform solver: the Dirichlet 5-point Laplacian is diagonal in the DST-I basis.
struct PoissonBox::Impl {
    GridGeom g;
    int m = 0, n = 0;  // interior rows, cols
    std::vector<double> eig;

    void apply_inverse(std::vector<double>& rhs) const {
        fftw_plan p = fftw_plan_r2r_2d(m, n, rhs.data(), rhs.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
        fftw_execute(p);
        for (std::size_t t = 0; t < rhs.size(); ++t) rhs[t] /= eig[t];
        fftw_execute(p);
        fftw_destroy_plan(p);
        const double s = 1.0 / (4.0 * (m + 1) * (n + 1));
        for (auto& x : rhs) x *= s;
    }
};

PoissonBox::PoissonBox(const GridGeom& g) : p_(std::make_unique<Impl>()) {
    require(g.rows >= 3 && g.cols >= 3, "poisson: grid too small");
    p_->g = g;
    p_->m = g.rows - 2;
    p_->n = g.cols - 2;
    p_->eig.resize(std::size_t(p_->m) * p_->n);
    for (int a = 0; a < p_->m; ++a)
        for (int b = 0; b < p_->n; ++b)
            p_->eig[std::size_t(a) * p_->n + b] = 4.0 - 2 * std::cos(kPi * (a + 1) / (p_->m + 1)) -
                                                  2 * std::cos(kPi * (b + 1) / (p_->n + 1));
}

PoissonBox::~PoissonBox() = default;
PoissonBox::PoissonBox(PoissonBox&&) noexcept = default;
PoissonBox& PoissonBox::operator=(PoissonBox&&) noexcept = default;

const GridGeom& PoissonBox::geom() const { return p_->g; }

std::vector<double> PoissonBox::solve(const std::vector<double>& f, const std::vector<double>& boundary) const {
    const auto& g = p_->g;
    require(f.size() == g.size() && boundary.size() == g.size(), "poisson: field size mismatch");
    const int m = p_->m, n = p_->n;
    const double h2 = g.h * g.h;
    // (4u - sum nbrs) = -h^2 f, known boundary neighbours moved right
    std::vector<double> rhs(std::size_t(m) * n);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= n; ++j) {
            double r = -h2 * f[g.idx(i, j)];
            if (i == 1) r += boundary[g.idx(0, j)];
            if (i == m) r += boundary[g.idx(m + 1, j)];
            if (j == 1) r += boundary[g.idx(i, 0)];
            if (j == n) r += boundary[g.idx(i, n + 1)];
            rhs[std::size_t(i - 1) * n + (j - 1)] = r;
        }
    p_->apply_inverse(rhs);
    std::vector<double> u = boundary;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= n; ++j) u[g.idx(i, j)] = rhs[std::size_t(i - 1) * n + (j - 1)];
    return u;
}

std::vector<quad> PoissonBox::solve_refined(const std::vector<quad>& f, const std::vector<double>& boundary,
                                            double* residual) const {
    const auto& g = p_->g;
    require(f.size() == g.size() && boundary.size() == g.size(), "poisson: field size mismatch");
    const int m = p_->m, n = p_->n;
    const quad h2 = quad(g.h) * quad(g.h);
    std::vector<double> fd(f.size());
    for (std::size_t t = 0; t < f.size(); ++t) fd[t] = double(f[t]);
    auto u0 = solve(fd, boundary);
    std::vector<quad> u(u0.begin(), u0.end());
    std::vector<double> r(std::size_t(m) * n);
    double rmax = 0;
    for (int pass = 0; pass < 8; ++pass) {
        quad fmax = 0, umax = 0, worst = 0;
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= n; ++j) {
                quad lap = u[g.idx(i + 1, j)] + u[g.idx(i - 1, j)] + u[g.idx(i, j + 1)] + u[g.idx(i, j - 1)] -
                           4 * u[g.idx(i, j)];
                quad res = f[g.idx(i, j)] * h2 - lap;  // h^2 (f - Delta_h u)
                quad a = res < 0 ? -res : res;
                quad fa = f[g.idx(i, j)] < 0 ? -f[g.idx(i, j)] : f[g.idx(i, j)];
                quad ua = u[g.idx(i, j)] < 0 ? -u[g.idx(i, j)] : u[g.idx(i, j)];
                umax = ua > umax ? ua : umax;
                worst = a > worst ? a : worst;
                fmax = fa > fmax ? fa : fmax;
                r[std::size_t(i - 1) * n + (j - 1)] = -double(res);
            }
        rmax = double(worst / h2);
        if (worst <= 64 * FLT128_EPSILON * (umax + fmax * h2)) break;
        p_->apply_inverse(r);
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= n; ++j) u[g.idx(i, j)] += quad(r[std::size_t(i - 1) * n + (j - 1)]);
    }
    if (residual) *residual = rmax;
    return u;
}

}  // namespace dbarc::planar

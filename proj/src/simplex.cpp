#include "dbarc/simplex.hpp"

#include <cstddef>

#include "dbarc/common.hpp"

namespace dbarc::lp {

namespace {

constexpr double kEps = 1e-12;

// Tableau for max c.y, A y <= b, y >= 0; phase one uses one auxiliary column.
struct Tableau {
    int m, n;
    std::vector<int> B, N;
    std::vector<std::vector<double>> D;

    Tableau(const std::vector<std::vector<double>>& A, const std::vector<double>& b, const std::vector<double>& c)
        : m(int(b.size())), n(int(c.size())), B(m), N(n + 1), D(m + 2, std::vector<double>(n + 2, 0.0)) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) D[i][j] = A[i][j];
        for (int i = 0; i < m; ++i) B[i] = n + i, D[i][n] = -1, D[i][n + 1] = b[i];
        for (int j = 0; j < n; ++j) N[j] = j, D[m][j] = -c[j];
        N[n] = -1;
        D[m + 1][n] = 1;
    }

    void pivot(int r, int s) {
        double inv = 1.0 / D[r][s];
        for (int i = 0; i < m + 2; ++i)
            if (i != r)
                for (int j = 0; j < n + 2; ++j)
                    if (j != s) D[i][j] -= D[r][j] * D[i][s] * inv;
        for (int j = 0; j < n + 2; ++j)
            if (j != s) D[r][j] *= inv;
        for (int i = 0; i < m + 2; ++i)
            if (i != r) D[i][s] *= -inv;
        D[r][s] = inv;
        std::swap(B[r], N[s]);
    }

    bool run(int phase) {
        int x = phase == 1 ? m + 1 : m;
        for (;;) {
            int s = -1;
            for (int j = 0; j <= n; ++j) {
                if (phase == 2 && N[j] == -1) continue;
                if (s == -1 || D[x][j] < D[x][s] || (D[x][j] == D[x][s] && N[j] < N[s])) s = j;
            }
            if (D[x][s] > -kEps) return true;
            int r = -1;
            for (int i = 0; i < m; ++i) {
                if (D[i][s] < kEps) continue;
                if (r == -1) { r = i; continue; }
                double lhs = D[i][n + 1] / D[i][s], rhs = D[r][n + 1] / D[r][s];
                if (lhs < rhs || (lhs == rhs && B[i] < B[r])) r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }
};

}  // namespace

Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<std::vector<double>>& E, const std::vector<double>& f) {
    const std::size_t n = c.size();
    require(A.size() == b.size() && E.size() == f.size(), "lp: row count mismatch");
    // free x = y+ - y-
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    auto add = [&](const std::vector<double>& a, double v, double sign) {
        require(a.size() == n, "lp: column count mismatch");
        std::vector<double> r(2 * n);
        for (std::size_t j = 0; j < n; ++j) r[j] = sign * a[j], r[n + j] = -sign * a[j];
        rows.push_back(std::move(r));
        rhs.push_back(sign * v);
    };
    for (std::size_t i = 0; i < A.size(); ++i) add(A[i], b[i], 1);
    for (std::size_t i = 0; i < E.size(); ++i) add(E[i], f[i], 1), add(E[i], f[i], -1);
    std::vector<double> cc(2 * n);
    for (std::size_t j = 0; j < n; ++j) cc[j] = c[j], cc[n + j] = -c[j];

    Tableau T(rows, rhs, cc);
    Result res;
    int r = 0;
    for (int i = 1; i < T.m; ++i)
        if (T.D[i][T.n + 1] < T.D[r][T.n + 1]) r = i;
    if (T.m > 0 && T.D[r][T.n + 1] < -kEps) {
        T.pivot(r, T.n);
        if (!T.run(1) || T.D[T.m + 1][T.n + 1] < -1e-9) return res;
        for (int i = 0; i < T.m; ++i)
            if (T.B[i] == -1) {
                int s = -1;
                for (int j = 0; j <= T.n; ++j)
                    if (s == -1 || T.D[i][j] < T.D[i][s] || (T.D[i][j] == T.D[i][s] && T.N[j] < T.N[s])) s = j;
                T.pivot(i, s);
            }
    }
    if (!T.run(2)) {
        res.status = Status::Unbounded;
        return res;
    }
    std::vector<double> y(2 * n, 0.0);
    for (int i = 0; i < T.m; ++i)
        if (T.B[i] >= 0 && T.B[i] < T.n) y[T.B[i]] = T.D[i][T.n + 1];
    res.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) res.x[j] = y[j] - y[n + j];
    res.status = Status::Optimal;
    res.value = T.D[T.m][T.n + 1];
    return res;
}

}  // namespace dbarc::lp

#pragma once

#include <vector>

namespace dbarc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    double value = 0;
    std::vector<double> x;
};

// maximize c.x  subject to  A x <= b (rows), E x = f, x free.
// Dense two-phase simplex with Bland's rule; meant for a handful of variables.
Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                const std::vector<std::vector<double>>& E = {}, const std::vector<double>& f = {});

}  // namespace dbarc::lp

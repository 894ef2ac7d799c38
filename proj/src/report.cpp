#include "dbarc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dbarc::report {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fixed(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

std::string to_csv(const Table& t) {
    std::ostringstream o;
    for (std::size_t c = 0; c < t.header.size(); ++c) o << (c ? "," : "") << t.header[c];
    o << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) o << (c ? "," : "") << num(r[c]);
        o << "\n";
    }
    return o.str();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << body;
}

std::string svg_lines(const std::string& title, const std::vector<Series>& s, bool log_y) {
    const double W = 640, H = 400, pad = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    for (const auto& c : s)
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (log_y && !(c.y[i] > 0)) continue;
            x0 = std::min(x0, c.x[i]), x1 = std::max(x1, c.x[i]);
            y0 = std::min(y0, ty(c.y[i])), y1 = std::max(y1, ty(c.y[i]));
        }
    if (!(x1 > x0)) x0 -= 1, x1 += 1;
    if (!(y1 > y0)) y0 -= 1, y1 += 1;
    auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
    auto py = [&](double y) { return H - pad - (ty(y) - y0) / (y1 - y0) * (H - 2 * pad); };
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    o << "<text x=\"4\" y=\"" << pad + 4 << "\" font-size=\"10\">" << (log_y ? "1e" : "") << fixed(y1) << "</text>\n";
    o << "<text x=\"4\" y=\"" << H - pad << "\" font-size=\"10\">" << (log_y ? "1e" : "") << fixed(y0) << "</text>\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        o << "<polyline fill=\"none\" stroke=\"" << colours[k % 5] << "\" points=\"";
        for (std::size_t i = 0; i < s[k].x.size(); ++i)
            if (!log_y || s[k].y[i] > 0) o << fixed(px(s[k].x[i])) << "," << fixed(py(s[k].y[i])) << " ";
        o << "\"/>\n";
        o << "<text x=\"" << W - pad - 120 << "\" y=\"" << pad + 16 * (k + 1) << "\" font-size=\"11\" fill=\""
          << colours[k % 5] << "\">" << s[k].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_heatmap(const RField& f, const GridSet* clip) {
    const auto& g = f.g;
    const int stride = std::max(1, std::max(g.rows, g.cols) / 200);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t t = 0; t < g.size(); ++t)
        if (!clip || clip->mask[t]) lo = std::min(lo, f.v[t]), hi = std::max(hi, f.v[t]);
    if (!(hi > lo)) hi = lo + 1;
    const int R = (g.rows + stride - 1) / stride, C = (g.cols + stride - 1) / stride;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * C << "\" height=\"" << 2 * R << "\">\n";
    for (int i = 0; i < g.rows; i += stride)
        for (int j = 0; j < g.cols; j += stride) {
            if (clip && !(*clip)(i, j)) continue;
            int level = int(std::lround(255 * (f(i, j) - lo) / (hi - lo)));
            // rows grow upward in y
            o << "<rect x=\"" << 2 * (j / stride) << "\" y=\"" << 2 * (R - 1 - i / stride)
              << "\" width=\"2\" height=\"2\" fill=\"rgb(" << level << ",0," << 255 - level << ")\"/>\n";
        }
    o << "</svg>\n";
    return o.str();
}

json pq_json(const hermitian::PqVerdict& v, const hermitian::PqCertificate& c) {
    json j;
    j["n"] = c.n;
    j["q"] = c.q;
    j["M"] = c.M;
    j["tolerance"] = c.tolerance;
    j["samples"] = c.samples.size();
    j["pass"] = v.pass;
    j["hessian_ok"] = v.hessian_ok;
    j["normalization_ok"] = v.normalization_ok;
    j["worst_margin"] = v.worst_margin;
    if (v.worst_sample_index) j["worst_sample"] = *v.worst_sample_index;
    j["normalization_violations"] = v.normalization_violations;
    j["hessian_failures"] = v.hessian_failures;
    return j;
}

Table dirichlet_table(const planar::RayleighSequence& r) {
    Table t{{"k", "lambda", "residual", "nodes"}, {}};
    for (const auto& s : r.stages)
        t.rows.push_back({double(s.k), s.eig.lambda, s.eig.residual, double(s.Wk.count())});
    return t;
}

json hartogs_json(const hartogs::Run& r) {
    const auto& s = r.spec;
    json j;
    j["stages"] = s.stages();
    j["notices"] = s.notices;
    j["flatness"] = r.flatness;
    const auto& a = s.audit;
    j["invariants"] = {{"ok", a.ok()},
                       {"mass_deviation", a.mass_dev},
                       {"sup_monotone", a.sup_monotone},
                       {"max_nj_sup_next", a.max_nj_sup_next},
                       {"divisible", a.divisible},
                       {"disjoint", a.disjoint}};
    j["xi_residual"] = s.xi_residual;
    const auto& e = r.ext;
    j["extension"] = {{"mass", e.M},          {"A", e.A},
                      {"B", e.B},             {"late_width", e.late_width},
                      {"attempts", e.attempts}, {"min_laplacian", e.min_laplacian},
                      {"nodes_checked", e.nodes_checked}, {"subharmonic", e.subharmonic}};
    json rows = json::array();
    for (const auto& f : r.forms) {
        json w;
        w["k"] = f.k;
        w["n_k"] = f.n;
        w["lambda_k"] = f.lambda;
        w["N0"] = f.N0.value;
        w["N0_error"] = f.N0.error;
        w["f_norm2"] = f.f_norm2.value;
        w["Nneg"] = f.Nneg.value;
        w["Q"] = f.Q.value;
        w["Q_error"] = f.Q.error;
        w["B_k"] = f.B.value;
        w["energy_constant"] = f.energy_constant;
        w["period_deviation"] = f.period_dev;
        w["hole_stage"] = f.hole_stage;
        w["closure"] = f.closure;
        w["gradient_identity"] = f.gradient_identity;
        w["first_term"] = f.first_term;
        w["nk_sup_next"] = f.nk_sup_next;
        w["newton_sup"] = f.newton_sup;
        w["newton_constant"] = f.newton_constant;
        w["low_confidence"] = f.low_confidence;
        rows.push_back(w);
    }
    j["rows"] = rows;
    const auto& v = r.report;
    json certs = json::array();
    for (const auto& c : v.best) certs.push_back({{"eps", c.eps}, {"C", c.C}, {"k", c.k}, {"deficit", c.deficit}});
    j["violation"] = {{"eps", v.eps},
                      {"C", v.C},
                      {"certificates", certs},
                      {"falsified_eps", v.falsified_eps},
                      {"nneg_slope", v.slope},
                      {"diameter", v.diameter},
                      {"hormander_worst", v.hormander_worst},
                      {"hormander_violations", v.hormander_violations},
                      {"verdict", v.verdict}};
    return j;
}

Table hartogs_table(const hartogs::Run& r) {
    Table t{{"k", "n_k", "lambda_k", "N0", "f_norm2", "Nneg", "Q", "B_k"}, {}};
    for (const auto& f : r.forms)
        t.rows.push_back({double(f.k), double(f.n), f.lambda, f.N0.value, f.f_norm2.value, f.Nneg.value,
                          f.Q.value, f.B.value});
    return t;
}

json wedge_json(const wedge::WitnessReport& r) {
    return {{"delta", r.delta},
            {"delta_pair", {r.delta_i, r.delta_j}},
            {"norm_floor", r.norm_floor},
            {"limit_norm", r.limit_norm},
            {"delta0", r.delta0},
            {"no_convergent_subsequence", r.no_convergent_subsequence},
            {"verdict", r.verdict}};
}

Table wedge_table(const wedge::WitnessReport& r) {
    Table t{{"j", "a_j", "norm_W1", "norm_restricted", "min_pairwise_distance"}, {}};
    for (const auto& w : r.rows) t.rows.push_back({double(w.j), w.a, w.norm_W1, w.norm_restricted, w.min_pairwise});
    return t;
}

json verdict_json(const reinhardt::ReinhardtModel& m, int q, const reinhardt::Verdict& v) {
    json pieces = json::array(), hyp = json::array();
    for (const auto& p : v.pieces)
        pieces.push_back({{"dim", p.dim}, {"kind", p.kind}, {"support", p.support}, {"point", p.point}});
    for (const auto& h : v.hyperplane) hyp.push_back({{"zero_coords", h.zero_coords}, {"dim", h.dim}, {"reason", h.reason}});
    return {{"model", reinhardt::model_to_json(m)},
            {"q", q},
            {"verdict", v.verdict},
            {"rule", v.rule},
            {"flat_pieces", pieces},
            {"hyperplane_varieties", hyp}};
}

json commutator_json(const reinhardt::OperatorMatrix& op) {
    return {{"cutoff", op.cutoff},
            {"basis_size", op.basis.size()},
            {"largest_singular_value", op.singular_values.empty() ? 0.0 : op.singular_values.front()},
            {"decay", op.decay},
            {"notice", op.notice}};
}

Table singular_table(const reinhardt::OperatorMatrix& op) {
    Table t{{"index", "singular_value"}, {}};
    for (std::size_t i = 0; i < op.singular_values.size(); ++i) t.rows.push_back({double(i), op.singular_values[i]});
    return t;
}

json bundle(const std::vector<Entry>& entries) {
    json list = json::array();
    for (const auto& e : entries)
        list.push_back({{"experiment", e.experiment}, {"tag", e.tag}, {"verdict", e.verdict}, {"data", e.data}});
    return {{"entries", list}, {"count", entries.size()}};
}

}  // namespace dbarc::report

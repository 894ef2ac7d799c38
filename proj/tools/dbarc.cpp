#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "dbarc/report.hpp"

using namespace dbarc;
namespace fs = std::filesystem;
using report::json;

namespace {

struct Ctx {
    fs::path out = ".";
    std::uint64_t seed = 1;
    std::string file(const std::string& name) const { return (out / name).string(); }
    void put(const std::string& name, const std::string& body) const { report::write_text(file(name), body); }
    void put(const std::string& name, const json& j) const { put(name, j.dump(2) + "\n"); }
};

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot read " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

GridSet load_mask(const std::string& path) {
    std::string side = fs::path(path).replace_extension(".json").string();
    GridSet m = read_mask(path, side);
    if (m.empty()) throw DegenerateDomain(path + ": mask is empty");
    return m;
}

reinhardt::ReinhardtModel load_model(const std::string& arg) {
    if (!fs::exists(arg)) return reinhardt::named_model(arg);
    return reinhardt::model_from_json(read_json(arg));
}

report::Entry pq_check(const Ctx& c, const std::string& cert_path) {
    auto cert = hermitian::certificate_from_json(read_json(cert_path));
    auto v = hermitian::verify_pq_certificate(cert);
    json j = report::pq_json(v, cert);
    c.put("pq.json", j);
    std::printf("pq-check: %s (worst margin %.3e)\n", v.pass ? "pass" : "fail", v.worst_margin);
    return {"pq-check", "Lemma5", v.pass ? "pass" : "fail", j};
}

GridSet box(double w, double hgt, int N) {
    GridGeom g;
    g.h = 1.0 / N;
    g.cols = int(std::lround(w * N)) + 1;
    g.rows = int(std::lround(hgt * N)) + 1;
    GridSet s(g);
    for (int i = 1; i + 1 < g.rows; ++i)
        for (int j = 1; j + 1 < g.cols; ++j) s.set(i, j);
    return s;
}

report::Entry dirichlet(const Ctx& c, const std::string& shape, const std::string& mask, int N) {
    GridSet W;
    if (!mask.empty()) {
        W = load_mask(mask);
        if (N > 0) {
            const auto& s = W.g;
            GridGeom g;
            g.h = 1.0 / N;
            g.x0 = s.x0, g.y0 = s.y0;
            g.cols = int(std::lround((s.cols - 1) * s.h * N)) + 1;
            g.rows = int(std::lround((s.rows - 1) * s.h * N)) + 1;
            W = resample(W, g);
        }
    } else {
        require(N >= 8, "dirichlet: --N must be >= 8");
        if (shape == "square")
            W = box(1, 1, N);
        else if (shape == "rect")
            W = box(2, 1, N);
        else if (shape == "disc")
            W = unit_disc(GridGeom::centered(1.01, 1.0 / N));
        else
            throw InputError("dirichlet: --shape must be square, rect or disc");
    }
    auto eig = planar::dirichlet_ground_state(W);
    planar::RayleighSequence seq;
    seq.stages.push_back({0, W, eig});
    seq.max_lambda = eig.lambda;
    auto t = report::dirichlet_table(seq);
    c.put("dirichlet.csv", report::to_csv(t));
    json j = {{"lambda", eig.lambda}, {"residual", eig.residual}, {"iterations", eig.iterations}, {"h", W.g.h}};
    c.put("dirichlet.json", j);
    std::printf("dirichlet: lambda = %.6f\n", eig.lambda);
    return {"dirichlet", "Thm10", "lambda-bounded: yes", j};
}

report::Entry hartogs_run(const Ctx& c, const std::string& mask, int K, int N) {
    auto g = hartogs::pipeline_grid(N);
    GridSet W = mask.empty() ? hartogs::spoked_disc(g) : resample(load_mask(mask), g);
    if (W.empty()) throw DegenerateDomain("hartogs: mask is empty on the pipeline grid");
    auto run = hartogs::run_pipeline(W, K);
    json j = report::hartogs_json(run);
    c.put("hartogs.json", j);
    c.put("hartogs.csv", report::to_csv(report::hartogs_table(run)));
    report::Series nn{"Nneg", {}, {}}, q{"Q", {}, {}}, f{"N0", {}, {}};
    for (const auto& w : run.forms) {
        nn.x.push_back(w.k), nn.y.push_back(w.Nneg.value);
        q.x.push_back(w.k), q.y.push_back(w.Q.value);
        f.x.push_back(w.k), f.y.push_back(w.N0.value);
    }
    c.put("hartogs_energies.svg", report::svg_lines("energies against k", {nn, q, f}, true));
    RField phi(g);
    for (std::size_t t = 0; t < g.size(); ++t) phi.v[t] = double(run.spec.Phi.v[t]);
    GridSet D = unit_disc(g);
    c.put("hartogs_phi.svg", report::svg_heatmap(phi, &D));
    std::printf("hartogs: %d stages, %s\n", run.spec.stages(), run.report.verdict.c_str());
    for (const auto& cert : run.report.best)
        if (cert.deficit > 0 && cert.C == run.report.C.back())
            std::printf("  eps %.0e  C %.0e  k %d  deficit %.6f\n", cert.eps, cert.C, cert.k, cert.deficit);
    return {"hartogs", "Thm10", run.report.verdict, j};
}

report::Entry wedge_run(const Ctx& c, int m) {
    auto r = wedge::restriction_witness(wedge::WedgeFamily{}, m);
    json j = report::wedge_json(r);
    c.put("wedge.json", j);
    c.put("wedge.csv", report::to_csv(report::wedge_table(r)));
    std::printf("wedge: %s (delta %.6f)\n", r.verdict.c_str(), r.delta);
    return {"wedge", "Prop9", r.verdict, j};
}

report::Entry reinhardt_run(const Ctx& c, const std::string& model, int q) {
    auto m = load_model(model);
    auto v = reinhardt::compactness_verdict(m, q);
    json j = report::verdict_json(m, q, v);
    c.put("reinhardt.json", j);
    std::printf("reinhardt: %s, q = %d: %s\n", m.name.c_str(), q, v.verdict.c_str());
    return {"reinhardt", "Rmk10", v.verdict, j};
}

report::Entry commutator_run(const Ctx& c, const std::string& model, int jv, int cutoff) {
    auto m = load_model(model);
    auto op = reinhardt::commutator_matrix(m, jv, cutoff);
    json j = report::commutator_json(op);
    j["model"] = m.name;
    j["j"] = jv;
    c.put("commutator.json", j);
    c.put("commutator.csv", report::to_csv(report::singular_table(op)));
    report::Series s{"max column norm", {}, op.decay};
    for (std::size_t d = 0; d < op.decay.size(); ++d) s.x.push_back(double(d));
    c.put("commutator_decay.svg", report::svg_lines("commutator decay by degree", {s}, true));
    const double tail = op.decay.empty() ? 0.0 : op.decay.back();
    std::string verdict = op.decay.empty() || op.decay.front() == 0 ? "zero operator"
                          : tail < 0.5 * op.decay.front()          ? "decaying"
                                                                    : "no decay";
    std::printf("commutator: %s, j = %d, decay %.4f -> %.4f (%s)\n", m.name.c_str(), jv,
                op.decay.empty() ? 0.0 : op.decay.front(), tail, verdict.c_str());
    return {"commutator", "Prop4", verdict, j};
}

report::Entry lemma5_suite(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    int bad = 0, total = 0;
    double worst = INFINITY;
    for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXcd A(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) A(a, b) = cplx(nd(rng), nd(rng));
        auto H = hermitian::HermitianMatrix::symmetrized(A);
        for (int q = 1; q <= 3; ++q) {
            auto r = hermitian::check_lemma5(H, q, 0.0, 200, rng);
            ++total;
            if (!(r.frames_bounded && r.equality_attained)) ++bad;
            worst = std::min(worst, r.min_frame_sum - r.min_eigensum);
        }
    }
    json j = {{"matrices", 100}, {"checks", total}, {"failures", bad}, {"min_frame_margin", worst}};
    return {"lemma5", "Lemma5", bad ? "fail" : "pass", j};
}

int suite(const Ctx& c) {
    std::vector<report::Entry> e;
    e.push_back(lemma5_suite(c.seed));
    auto h = hartogs_run(c, "", 6, 256);
    e.push_back(h);
    e.push_back(wedge_run(c, 20));
    json matrix = json::array();
    bool all = true;
    const std::vector<std::tuple<std::string, int, std::string>> cases = {
        {"bidisc", 1, "non-compact"},      {"ball", 1, "compact"}, {"punctured-ball", 1, "compact"},
        {"disc-x-ball", 2, "non-compact"}, {"ball3", 1, "compact"}, {"ball3", 2, "compact"}};
    for (const auto& [name, q, want] : cases) {
        auto v = reinhardt::compactness_verdict(reinhardt::named_model(name), q);
        bool ok = v.verdict == want || (want == "compact" && v.verdict == "compact-by-sufficiency");
        all = all && ok;
        matrix.push_back({{"model", name}, {"q", q}, {"verdict", v.verdict}, {"rule", v.rule}, {"expected", want}});
    }
    e.push_back({"reinhardt", "Rmk10", all ? "matches" : "mismatch", matrix});
    auto bi = reinhardt::commutator_matrix(reinhardt::bidisc(), 1, 64);
    auto ba = reinhardt::commutator_matrix(reinhardt::unit_ball(2), 1, 64);
    e.push_back({"commutator", "Prop4", "bidisc flat, ball decaying",
                 {{"bidisc", report::commutator_json(bi)}, {"ball", report::commutator_json(ba)}}});
    auto cw = reinhardt::canonical_solution_witness(reinhardt::bidisc(), 40);
    const auto& hv = h.data["violation"];
    int violations = hv["hormander_violations"].get<int>() + (cw.hormander_worst > 1 ? 1 : 0);
    e.push_back({"hormander", "Eq3-sanity", violations ? "violated" : "holds",
                 {{"hartogs_worst", hv["hormander_worst"]}, {"hartogs_diameter", hv["diameter"]},
                  {"bidisc_worst", cw.hormander_worst}, {"bidisc_diameter", cw.diameter}, {"violations", violations}}});
    c.put("bundle.json", report::bundle(e));
    std::printf("suite: %zu entries written to %s\n", e.size(), c.file("bundle.json").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dbar-Neumann compactness experiments"};
    app.require_subcommand(1);
    Ctx c;
    std::string out = ".";
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", c.seed, "random seed")->check(CLI::PositiveNumber);

    std::string cert, shape, mask, model;
    int N = 0, K = 6, grid = 256, m = 20, q = 1, jv = 1, cutoff = 64;

    auto* pq = app.add_subcommand("pq-check", "verify a (P_q) certificate");
    pq->add_option("--cert", cert)->required();
    auto* di = app.add_subcommand("dirichlet", "smallest Dirichlet eigenvalue");
    auto* so = di->add_option("--shape", shape, "square, rect or disc");
    auto* mo = di->add_option("--mask", mask, "0/1 mask with a .json sidecar");
    so->excludes(mo);
    di->add_option("--N", N, "nodes per unit length")->check(CLI::PositiveNumber);
    auto* ha = app.add_subcommand("hartogs", "non-compactness witness on a Hartogs domain");
    ha->add_option("--mask", mask);
    ha->add_option("--stages", K)->check(CLI::PositiveNumber);
    ha->add_option("--grid", grid)->check(CLI::PositiveNumber);
    auto* we = app.add_subcommand("wedge", "Bergman restriction witness on a wedge");
    we->add_option("--m", m)->check(CLI::PositiveNumber);
    auto* re = app.add_subcommand("reinhardt", "compactness verdict for a Reinhardt model");
    re->add_option("--model", model, "JSON file or built-in name")->required();
    re->add_option("--q", q)->check(CLI::PositiveNumber);
    auto* co = app.add_subcommand("commutator", "Bergman commutator spectrum");
    co->add_option("--model", model)->required();
    co->add_option("--j", jv)->check(CLI::NonNegativeNumber);
    co->add_option("--cutoff", cutoff)->check(CLI::PositiveNumber);
    auto* su = app.add_subcommand("suite", "run every experiment and write bundle.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        c.out = out;
        fs::create_directories(c.out);
        if (*pq) pq_check(c, cert);
        if (*di) {
            if (shape.empty() && mask.empty()) throw InputError("dirichlet: give --shape or --mask");
            dirichlet(c, shape, mask, mask.empty() && N == 0 ? 256 : N);
        }
        if (*ha) hartogs_run(c, mask, K, grid);
        if (*we) wedge_run(c, m);
        if (*re) reinhardt_run(c, model, q);
        if (*co) commutator_run(c, model, jv, cutoff);
        if (*su) return suite(c);
    } catch (const ConsistencyError& e) {
        std::fprintf(stderr, "consistency failure: %s\n", e.what());
        return 3;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}

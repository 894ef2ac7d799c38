#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dbarc/grid.hpp"
#include "dbarc/hartogs.hpp"
#include "dbarc/hermitian_forms.hpp"
#include "dbarc/planar_potential.hpp"
#include "dbarc/reinhardt.hpp"
#include "dbarc/wedge_bergman.hpp"

namespace dbarc::report {

using nlohmann::json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Doubles are written with 17 significant digits so reruns are byte-identical.
std::string to_csv(const Table& t);
void write_text(const std::string& path, const std::string& body);

struct Series {
    std::string name;
    std::vector<double> x, y;
};
std::string svg_lines(const std::string& title, const std::vector<Series>& s, bool log_y);
std::string svg_heatmap(const RField& f, const GridSet* clip = nullptr);

json pq_json(const hermitian::PqVerdict& v, const hermitian::PqCertificate& c);
Table dirichlet_table(const planar::RayleighSequence& r);
json hartogs_json(const hartogs::Run& r);
Table hartogs_table(const hartogs::Run& r);
json wedge_json(const wedge::WitnessReport& r);
Table wedge_table(const wedge::WitnessReport& r);
json verdict_json(const reinhardt::ReinhardtModel& m, int q, const reinhardt::Verdict& v);
json commutator_json(const reinhardt::OperatorMatrix& op);
Table singular_table(const reinhardt::OperatorMatrix& op);

struct Entry {
    std::string experiment;
    std::string tag;  // the statement the verdict instantiates
    std::string verdict;
    json data;
};

json bundle(const std::vector<Entry>& entries);

}  // namespace dbarc::report

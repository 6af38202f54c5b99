#include "railplan/mps.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace railplan {

namespace {

constexpr const char* kObjectiveRow = "obj";

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

char sense_code(Sense s) {
    switch (s) {
        case Sense::le: return 'L';
        case Sense::eq: return 'E';
        case Sense::ge: return 'G';
    }
    return 'E';
}

}  // namespace

void write_mps(const MilpModel& m, std::ostream& out) {
    out << "NAME railplan\n";
    out << "ROWS\n";
    out << " N " << kObjectiveRow << "\n";
    for (const auto& c : m.constraints()) out << ' ' << sense_code(c.sense) << ' ' << c.tag << "\n";

    std::vector<std::vector<std::pair<std::size_t, double>>> by_column(m.size());
    for (std::size_t r = 0; r < m.constraints().size(); ++r) {
        for (const auto& t : m.constraints()[r].terms) by_column[std::size_t(t.var)].push_back({r, t.coef});
    }
    const auto cost = m.dense_objective();

    out << "COLUMNS\n";
    out << " MARKER 'MARKER' 'INTORG'\n";
    for (std::size_t j = 0; j < m.size(); ++j) {
        const auto& name = m.variables()[j].name;
        if (cost[j] != 0.0 || by_column[j].empty()) out << ' ' << name << ' ' << kObjectiveRow << ' ' << num(cost[j]) << "\n";
        for (const auto& [r, a] : by_column[j]) out << ' ' << name << ' ' << m.constraints()[r].tag << ' ' << num(a) << "\n";
    }
    out << " MARKER 'MARKER' 'INTEND'\n";

    out << "RHS\n";
    if (m.offset() != 0.0) out << " RHS " << kObjectiveRow << ' ' << num(-m.offset()) << "\n";
    for (const auto& c : m.constraints()) {
        if (c.rhs != 0.0) out << " RHS " << c.tag << ' ' << num(c.rhs) << "\n";
    }
    out << "RANGES\n";
    out << "BOUNDS\n";
    for (const auto& v : m.variables()) {
        if (v.integrality == Integrality::binary) {
            out << " BV BND " << v.name << "\n";
        } else {
            out << " LO BND " << v.name << ' ' << v.lower << "\n";
            out << " UP BND " << v.name << ' ' << v.upper << "\n";
        }
    }
    out << "ENDATA\n";
}

void export_mps(const MilpModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MpsError("cannot open " + path.string() + " for writing");
    write_mps(m, out);
    if (!out) throw MpsError("failed writing " + path.string());
}

MilpModel read_mps(std::istream& in) {
    enum class Section { none, rows, columns, rhs, ranges, bounds, done };
    Section section = Section::none;

    std::vector<std::string> row_names;
    std::map<std::string, Sense> row_sense;
    std::map<std::string, std::size_t> row_index;
    std::string objective_name;

    std::vector<std::string> col_names;
    std::map<std::string, std::size_t> col_index;
    std::vector<bool> col_integer;
    std::vector<std::vector<std::pair<std::size_t, double>>> row_terms;
    std::vector<double> cost;
    std::vector<double> rhs;
    double objective_rhs = 0.0;
    struct Box {
        std::int64_t lower = 0;
        std::int64_t upper = 0;
        bool binary = false;
    };
    std::vector<Box> boxes;
    bool integer_block = false;

    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) { throw MpsError("line " + std::to_string(line_no) + ": " + msg); };
    auto column = [&](const std::string& name) {
        auto it = col_index.find(name);
        if (it != col_index.end()) return it->second;
        col_index[name] = col_names.size();
        col_names.push_back(name);
        col_integer.push_back(integer_block);
        cost.push_back(0.0);
        boxes.push_back({});
        return col_names.size() - 1;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ss(line);
        std::vector<std::string> f;
        for (std::string tok; ss >> tok;) f.push_back(tok);
        if (f.empty()) continue;
        if (line[0] != ' ') {
            if (f[0] == "NAME") continue;
            if (f[0] == "ROWS") section = Section::rows;
            else if (f[0] == "COLUMNS") section = Section::columns;
            else if (f[0] == "RHS") section = Section::rhs;
            else if (f[0] == "RANGES") section = Section::ranges;
            else if (f[0] == "BOUNDS") section = Section::bounds;
            else if (f[0] == "ENDATA") section = Section::done;
            else fail("unknown section " + f[0]);
            continue;
        }
        switch (section) {
            case Section::rows: {
                if (f.size() != 2) fail("malformed row");
                if (f[0] == "N") {
                    objective_name = f[1];
                    break;
                }
                Sense s = f[0] == "L" ? Sense::le : f[0] == "G" ? Sense::ge : Sense::eq;
                if (f[0] != "L" && f[0] != "G" && f[0] != "E") fail("unknown row type " + f[0]);
                row_index[f[1]] = row_names.size();
                row_names.push_back(f[1]);
                row_sense[f[1]] = s;
                row_terms.emplace_back();
                rhs.push_back(0.0);
                break;
            }
            case Section::columns: {
                if (f.size() >= 3 && f[1] == "'MARKER'") {
                    integer_block = f[2] == "'INTORG'";
                    break;
                }
                if (f.size() != 3 && f.size() != 5) fail("malformed column entry");
                const std::size_t j = column(f[0]);
                for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                    const double v = std::stod(f[k + 1]);
                    if (f[k] == objective_name) {
                        cost[j] += v;
                    } else {
                        auto it = row_index.find(f[k]);
                        if (it == row_index.end()) fail("unknown row " + f[k]);
                        row_terms[it->second].push_back({j, v});
                    }
                }
                break;
            }
            case Section::rhs: {
                if (f.size() != 3 && f.size() != 5) fail("malformed rhs entry");
                for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                    const double v = std::stod(f[k + 1]);
                    if (f[k] == objective_name) {
                        objective_rhs = v;
                    } else {
                        auto it = row_index.find(f[k]);
                        if (it == row_index.end()) fail("unknown row " + f[k]);
                        rhs[it->second] = v;
                    }
                }
                break;
            }
            case Section::ranges: fail("ranges are not supported"); break;
            case Section::bounds: {
                if (f.size() < 3) fail("malformed bound");
                auto it = col_index.find(f[2]);
                if (it == col_index.end()) fail("unknown column " + f[2]);
                Box& b = boxes[it->second];
                if (f[0] == "BV") {
                    b = {0, 1, true};
                } else if (f[0] == "LO" || f[0] == "UP" || f[0] == "FX") {
                    if (f.size() != 4) fail("bound without value");
                    const double v = std::stod(f[3]);
                    if (v != std::floor(v)) fail("fractional bound on integer column");
                    if (f[0] != "UP") b.lower = std::int64_t(v);
                    if (f[0] != "LO") b.upper = std::int64_t(v);
                } else {
                    fail("unsupported bound type " + f[0]);
                }
                break;
            }
            default: fail("data outside a section");
        }
    }
    if (section != Section::done) throw MpsError("missing ENDATA");

    MilpModel m;
    for (std::size_t j = 0; j < col_names.size(); ++j) {
        if (!col_integer[j]) throw MpsError("continuous column " + col_names[j] + " is not supported");
        const Box& b = boxes[j];
        m.add_variable(col_names[j], VarFamily::other, "", b.lower, b.upper,
                       b.binary ? Integrality::binary : Integrality::integer);
    }
    for (std::size_t j = 0; j < cost.size(); ++j) m.add_objective(VarRef(j), cost[j], CostGroup::other);
    if (objective_rhs != 0.0) m.add_offset(-objective_rhs, CostGroup::other);
    for (std::size_t r = 0; r < row_names.size(); ++r) {
        std::vector<Term> terms;
        for (const auto& [j, a] : row_terms[r]) terms.push_back({VarRef(j), a});
        m.add_constraint(std::move(terms), row_sense[row_names[r]], rhs[r], row_names[r]);
    }
    return m;
}

MilpModel import_mps(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MpsError("cannot open " + path.string());
    return read_mps(in);
}

}  // namespace railplan

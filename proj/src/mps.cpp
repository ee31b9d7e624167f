#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stormuc/milp.hpp"

namespace stormuc {

namespace {

bool fits(const std::string& s) { return !s.empty() && s.size() <= 8 && s.find(' ') == std::string::npos; }

// shortest %g form that fits a 12-character field
std::string num(double v) {
    char buf[64];
    for (int prec = 17; prec >= 1; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::string(buf).size() <= 12 && std::strtod(buf, nullptr) == v) return buf;
    }
    for (int prec = 12; prec >= 1; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::string(buf).size() <= 12) return buf;
    }
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

// fields start at columns 2, 5, 15, 25, 40, 50
std::string line(const std::string& f1, const std::string& f2, const std::string& f3 = "", const std::string& f4 = "",
                 const std::string& f5 = "", const std::string& f6 = "") {
    std::string s = " " + pad(f1, 2) + " " + pad(f2, 8);
    if (!f3.empty()) s += "  " + pad(f3, 8);
    if (!f4.empty()) s += "  " + pad(f4, 12);
    if (!f5.empty()) s += "   " + pad(f5, 8);
    if (!f6.empty()) s += "  " + f6;
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::vector<std::string> mangle(const std::vector<std::string>& names, char prefix,
                                std::vector<std::pair<std::string, std::string>>& table) {
    std::set<std::string> keep;
    for (const auto& n : names)
        if (fits(n)) keep.insert(n);
    std::vector<std::string> out;
    std::set<std::string> used;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::string n = names[i];
        if (!fits(n) || used.count(n)) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i);
            n = buf;
            while (used.count(n) || keep.count(n)) n[0] = static_cast<char>(n[0] + 1);
            table.push_back({n, names[i]});
        }
        used.insert(n);
        out.push_back(n);
    }
    return out;
}

}  // namespace

std::string MpsNameTable::to_text() const {
    std::ostringstream os;
    os << "# kind mangled original\n";
    for (const auto& [m, o] : rows) os << "row " << m << " " << o << "\n";
    for (const auto& [m, o] : columns) os << "col " << m << " " << o << "\n";
    return os.str();
}

std::string mps_string(const MilpProblem& P, MpsNameTable* table) {
    P.validate();
    MpsNameTable t;
    std::vector<std::string> rn, cn;
    for (const auto& r : P.rows) rn.push_back(r.name);
    for (const auto& v : P.vars) cn.push_back(v.name);
    // OBJ is reserved for the objective row
    for (auto& n : rn)
        if (n == "OBJ") n = "OBJ_ROW";
    rn = mangle(rn, 'R', t.rows);
    cn = mangle(cn, 'C', t.columns);

    std::vector<std::vector<std::pair<int, double>>> cols(P.vars.size());
    for (std::size_t i = 0; i < P.rows.size(); ++i)
        for (auto [j, a] : P.rows[i].coeffs) cols[j].push_back({static_cast<int>(i), a});

    std::ostringstream os;
    std::string pname = fits(P.name) ? P.name : P.name.substr(0, 8);
    os << "NAME          " << pname << "\n";
    os << "ROWS\n";
    os << line("N", "OBJ") << "\n";
    for (std::size_t i = 0; i < P.rows.size(); ++i) {
        const char* s = P.rows[i].sense == Sense::LE ? "L" : P.rows[i].sense == Sense::GE ? "G" : "E";
        os << line(s, rn[i]) << "\n";
    }
    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < P.vars.size(); ++j) {
        const bool is_int = P.vars[j].kind == VarKind::Binary;
        if (is_int != in_int) {
            char mk[16];
            std::snprintf(mk, sizeof mk, "M%07d", marker++);
            os << "    " << pad(mk, 8) << "  'MARKER'                 " << (is_int ? "'INTORG'" : "'INTEND'") << "\n";
            in_int = is_int;
        }
        std::vector<std::pair<std::string, double>> entries;
        if (P.objective[j] != 0.0) entries.push_back({"OBJ", P.objective[j]});
        for (auto [i, a] : cols[j]) entries.push_back({rn[i], a});
        // a column with no entries still has to be declared
        if (entries.empty()) entries.push_back({"OBJ", 0.0});
        for (std::size_t k = 0; k < entries.size(); k += 2) {
            if (k + 1 < entries.size())
                os << line("", cn[j], entries[k].first, num(entries[k].second), entries[k + 1].first, num(entries[k + 1].second)) << "\n";
            else
                os << line("", cn[j], entries[k].first, num(entries[k].second)) << "\n";
        }
    }
    if (in_int) {
        char mk[16];
        std::snprintf(mk, sizeof mk, "M%07d", marker++);
        os << "    " << pad(mk, 8) << "  'MARKER'                 'INTEND'\n";
    }
    os << "RHS\n";
    std::vector<std::pair<std::string, double>> rhs;
    if (P.objective_offset != 0.0) rhs.push_back({"OBJ", -P.objective_offset});
    for (std::size_t i = 0; i < P.rows.size(); ++i)
        if (P.rows[i].rhs != 0.0) rhs.push_back({rn[i], P.rows[i].rhs});
    for (std::size_t k = 0; k < rhs.size(); k += 2) {
        if (k + 1 < rhs.size()) os << line("", "RHS", rhs[k].first, num(rhs[k].second), rhs[k + 1].first, num(rhs[k + 1].second)) << "\n";
        else os << line("", "RHS", rhs[k].first, num(rhs[k].second)) << "\n";
    }
    os << "BOUNDS\n";
    for (std::size_t j = 0; j < P.vars.size(); ++j) {
        const auto& v = P.vars[j];
        if (v.kind == VarKind::Binary && v.lb == 0.0 && v.ub == 1.0) {
            os << line("BV", "BND", cn[j]) << "\n";
            continue;
        }
        if (v.lb == v.ub) {
            os << line("FX", "BND", cn[j], num(v.lb)) << "\n";
            continue;
        }
        if (std::isinf(v.lb) && std::isinf(v.ub)) {
            os << line("FR", "BND", cn[j]) << "\n";
            continue;
        }
        if (std::isinf(v.lb)) os << line("MI", "BND", cn[j]) << "\n";
        else if (v.lb != 0.0 || v.ub < 0.0) os << line("LO", "BND", cn[j], num(v.lb)) << "\n";
        if (std::isfinite(v.ub)) os << line("UP", "BND", cn[j], num(v.ub)) << "\n";
    }
    os << "ENDATA\n";
    if (table) *table = t;
    return os.str();
}

MpsNameTable export_mps(const MilpProblem& problem, const std::string& path) {
    MpsNameTable t;
    std::string text = mps_string(problem, &t);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write MPS file " + path);
    f << text;
    std::ofstream g(path + ".names");
    if (!g) throw std::runtime_error("cannot write name table " + path + ".names");
    g << t.to_text();
    return t;
}

MilpProblem parse_mps(const std::string& text) {
    MilpProblem P;
    std::istringstream in(text);
    std::string raw, section;
    std::map<std::string, int> row_index;
    std::string obj_row;
    bool in_int = false;
    int lineno = 0;
    auto fail = [&](const std::string& what) { throw std::runtime_error("MPS line " + std::to_string(lineno) + ": " + what); };
    auto column = [&](const std::string& name) {
        auto it = P.index_map.find(name);
        if (it != P.index_map.end()) return it->second;
        return P.add_var(name, in_int ? VarKind::Binary : VarKind::Continuous, 0.0, in_int ? 1.0 : kInf);
    };
    std::vector<std::vector<std::pair<int, double>>> coeffs;
    while (std::getline(in, raw)) {
        ++lineno;
        if (raw.empty() || raw[0] == '*') continue;
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (raw[0] != ' ') {
            section = tok[0];
            if (section == "NAME") P.name = tok.size() > 1 ? tok[1] : "";
            if (section == "ENDATA") break;
            continue;
        }
        if (section == "ROWS") {
            if (tok.size() != 2) fail("bad ROWS entry");
            if (tok[0] == "N") { obj_row = tok[1]; continue; }
            Sense s = tok[0] == "L" ? Sense::LE : tok[0] == "G" ? Sense::GE : tok[0] == "E" ? Sense::EQ : (fail("bad row type"), Sense::LE);
            row_index[tok[1]] = static_cast<int>(P.rows.size());
            P.rows.push_back({tok[1], {}, s, 0.0});
            coeffs.emplace_back();
        } else if (section == "COLUMNS") {
            if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                in_int = tok[2] == "'INTORG'";
                continue;
            }
            if (tok.size() != 3 && tok.size() != 5) fail("bad COLUMNS entry");
            int j = column(tok[0]);
            for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                double v = std::stod(tok[k + 1]);
                if (tok[k] == obj_row) P.objective[j] = v;
                else {
                    auto it = row_index.find(tok[k]);
                    if (it == row_index.end()) fail("unknown row " + tok[k]);
                    coeffs[it->second].push_back({j, v});
                }
            }
        } else if (section == "RHS") {
            for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                double v = std::stod(tok[k + 1]);
                if (tok[k] == obj_row) P.objective_offset = -v;
                else {
                    auto it = row_index.find(tok[k]);
                    if (it == row_index.end()) fail("unknown row " + tok[k]);
                    P.rows[it->second].rhs = v;
                }
            }
        } else if (section == "BOUNDS") {
            if (tok.size() < 3) fail("bad BOUNDS entry");
            auto it = P.index_map.find(tok[2]);
            if (it == P.index_map.end()) fail("unknown column " + tok[2]);
            Variable& v = P.vars[it->second];
            const std::string& type = tok[0];
            double val = tok.size() > 3 ? std::stod(tok[3]) : 0.0;
            if (type == "UP") v.ub = val;
            else if (type == "LO") v.lb = val;
            else if (type == "FX") v.lb = v.ub = val;
            else if (type == "FR") { v.lb = -kInf; v.ub = kInf; }
            else if (type == "MI") v.lb = -kInf;
            else if (type == "BV") { v.kind = VarKind::Binary; v.lb = 0; v.ub = 1; }
            else fail("unsupported bound type " + type);
        }
    }
    for (std::size_t i = 0; i < P.rows.size(); ++i) {
        std::sort(coeffs[i].begin(), coeffs[i].end());
        P.rows[i].coeffs = coeffs[i];
    }
    return P;
}

}  // namespace stormuc

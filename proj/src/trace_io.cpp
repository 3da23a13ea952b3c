#include "turnon/trace_io.hpp"

#include "turnon/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace turnon {

namespace fs = std::filesystem;

const std::vector<StateColumn>& state_columns() {
    static const std::vector<StateColumn> cols{
        {"v_gs_s1", &CircuitState::v_gs_s1}, {"v_gs_s2", &CircuitState::v_gs_s2},
        {"v_m", &CircuitState::v_m},         {"i_l", &CircuitState::i_l},
        {"q_rr_removed", &CircuitState::q_rr_removed},
        {"v_ds_s1", &CircuitState::v_ds_s1}, {"v_ds_s2", &CircuitState::v_ds_s2},
    };
    return cols;
}

const std::vector<CurrentColumn>& current_columns() {
    using B = BranchCurrents;
    static const std::vector<CurrentColumn> cols{
        {"i_rs1", &B::i_rs1},
        {"i_rs2", &B::i_rs2},
        {"i_cgs_s1", &B::i_cgs_s1},
        {"i_cgd_s1", &B::i_cgd_s1},
        {"i_cds_s1", &B::i_cds_s1},
        {"i_cpar_gd_s1", &B::i_cpar_gd_s1},
        {"i_cpar_ds_s1", &B::i_cpar_ds_s1},
        {"i_cgs_s2", &B::i_cgs_s2},
        {"i_cgd_s2", &B::i_cgd_s2},
        {"i_cds_s2", &B::i_cds_s2},
        {"i_cpar_gd_s2", &B::i_cpar_gd_s2},
        {"i_cpar_ds_s2", &B::i_cpar_ds_s2},
        {"i_crr_s2", &B::i_crr_s2},
        {"i_g_s1", &B::i_g_s1},
        {"i_g_s2", &B::i_g_s2},
        {"i_c_s1", &B::i_c_s1},
        {"i_c_s2", &B::i_c_s2},
        {"i_d_s1", &B::i_d_s1},
        {"i_d_s2", &B::i_d_s2},
        {"i_dc", &B::i_dc},
    };
    return cols;
}

const std::vector<std::string>& derivative_columns() {
    static const std::vector<std::string> cols{"dv_gs_s1_dt", "dv_gs_s2_dt", "dv_m_dt", "di_l_dt"};
    return cols;
}

void write_trace_csv(const fs::path& path, const WaveformTrace& trace,
                     const std::string& manifest_hash) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string() + ": cannot write");
    }
    out << "# manifest_hash=" << manifest_hash << '\n';
    out << "# config_hash=" << trace.config_hash << '\n';
    out << "t";
    for (const auto& c : state_columns()) out << ',' << c.name;
    for (const auto& c : current_columns()) out << ',' << c.name;
    for (const auto& c : derivative_columns()) out << ',' << c;
    out << '\n';
    char buf[32];
    auto put = [&](Real v) {
        std::snprintf(buf, sizeof buf, "%.12e", v);
        out << buf;
    };
    for (std::size_t i = 0; i < trace.size(); ++i) {
        put(trace.t[i]);
        for (const auto& c : state_columns()) {
            out << ',';
            put(trace.states[i].*c.member);
        }
        for (const auto& c : current_columns()) {
            out << ',';
            put(trace.currents[i].*c.member);
        }
        for (int k = 0; k < CircuitSystem::kDim; ++k) {
            out << ',';
            put(trace.dxdt[i][k]);
        }
        out << '\n';
    }
}

WaveformTrace read_trace_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open trace");
    }
    WaveformTrace tr;
    std::map<std::string, std::size_t> index;
    std::vector<std::string> header;
    std::string line;
    int line_no = 0;
    std::vector<Real> row;
    auto column = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw ConfigError(path.string() + ": missing column '" + name + "'");
        }
        return it->second;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# config_hash=";
            if (line.rfind(key, 0) == 0) tr.config_hash = line.substr(key.size());
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (header.empty()) {
            while (std::getline(ss, cell, ',')) {
                index[cell] = header.size();
                header.push_back(cell);
            }
            continue;
        }
        row.clear();
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            row.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number");
            }
        }
        if (row.size() != header.size()) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": column count mismatch");
        }
        CircuitState s;
        s.t = row[column("t")];
        for (const auto& c : state_columns()) s.*c.member = row[column(c.name)];
        BranchCurrents b;
        for (const auto& c : current_columns()) b.*c.member = row[column(c.name)];
        b.i_l = s.i_l;
        CircuitSystem::Vector x;
        x << s.v_gs_s1, s.v_gs_s2, s.v_m, s.i_l;
        CircuitSystem::Vector d;
        for (int k = 0; k < CircuitSystem::kDim; ++k) d[k] = row[column(derivative_columns()[k])];
        if (!tr.t.empty() && !(s.t > tr.t.back())) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": time must be strictly increasing");
        }
        tr.t.push_back(s.t);
        tr.states.push_back(s);
        tr.currents.push_back(b);
        tr.x.push_back(x);
        tr.dxdt.push_back(d);
    }
    if (tr.empty()) {
        throw ConfigError(path.string() + ": no samples");
    }
    return tr;
}

nlohmann::json markers_to_json(const std::vector<Marker>& markers) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Marker& m : markers) {
        arr.push_back({{"name", m.name}, {"t_s", m.t}, {"direction", m.direction}});
    }
    return arr;
}

std::vector<Marker> markers_from_json(const nlohmann::json& j) {
    std::vector<Marker> out;
    for (const auto& m : j) {
        out.push_back(Marker{m.at("name").get<std::string>(), m.at("t_s").get<Real>(),
                             m.at("direction").get<int>()});
    }
    return out;
}

std::pair<CircuitState, BranchCurrents> interpolate_sample(const WaveformTrace& trace, Real time) {
    if (trace.size() == 1 || time <= trace.t.front()) {
        return {trace.states.front(), trace.currents.front()};
    }
    if (time >= trace.t.back()) {
        return {trace.states.back(), trace.currents.back()};
    }
    const auto it = std::upper_bound(trace.t.begin(), trace.t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - trace.t.begin()) - 1;
    const Real w = (time - trace.t[i]) / (trace.t[i + 1] - trace.t[i]);
    CircuitState s;
    s.t = time;
    for (const auto& c : state_columns()) {
        s.*c.member = (1 - w) * (trace.states[i].*c.member) + w * (trace.states[i + 1].*c.member);
    }
    BranchCurrents b;
    for (const auto& c : current_columns()) {
        b.*c.member = (1 - w) * (trace.currents[i].*c.member) + w * (trace.currents[i + 1].*c.member);
    }
    b.i_l = s.i_l;
    return {s, b};
}

}  // namespace turnon

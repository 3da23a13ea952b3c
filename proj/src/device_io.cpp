#include "turnon/device_io.hpp"

#include "json_fields.hpp"
#include "turnon/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace turnon {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(trim(cell));
    }
    return out;
}

/// Rows of numbers under an exact header; `#` lines and blank lines are skipped.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path,
                                                  const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool seen_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto cells = split(t);
        if (!seen_header) {
            if (cells != header) {
                std::string expected;
                for (const auto& h : header) {
                    expected += (expected.empty() ? "" : ",") + h;
                }
                throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected header '" + expected + "'");
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size()) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " columns");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size()) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                                  c + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (!seen_header) {
        throw ConfigError(path.string() + ": empty file");
    }
    return rows;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CapacitanceCurve read_capacitance_csv(const fs::path& path) {
    const auto rows = read_numeric_csv(path, {"v", "c"});
    std::vector<Real> v;
    std::vector<Real> c;
    for (const auto& r : rows) {
        v.push_back(r[0]);
        c.push_back(r[1]);
    }
    try {
        return CapacitanceCurve(std::move(v), std::move(c));
    } catch (const Error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_capacitance_csv(const fs::path& path, const CapacitanceCurve& curve) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string() + ": cannot write");
    }
    out << "v,c\n";
    for (std::size_t i = 0; i < curve.voltages().size(); ++i) {
        out << fmt(curve.voltages()[i]) << ',' << fmt(curve.capacitances()[i]) << '\n';
    }
}

std::vector<IVSample> read_iv_csv(const fs::path& path) {
    const auto rows = read_numeric_csv(path, {"vgs", "vds", "id"});
    std::vector<IVSample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(IVSample{r[0], r[1], r[2]});
    }
    return out;
}

void write_iv_csv(const fs::path& path, const IVGrid& grid) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string() + ": cannot write");
    }
    out << "vgs,vds,id\n";
    for (const IVSample& s : grid.samples()) {
        out << fmt(s.v_gs) << ',' << fmt(s.v_ds) << ',' << fmt(s.i_d) << '\n';
    }
}

DeviceModel device_from_manifest_json(const nlohmann::json& manifest, const fs::path& base_dir) {
    const detail::Fields f(manifest, "device",
                           {"name", "iv_grid_csv", "c_gd_csv", "c_ds_csv", "c_gs_F", "c_par_gd_F",
                            "c_par_ds_F", "v_th_V", "q_rr_C", "v_ee_ref_V"});
    DeviceModel dev;
    dev.name = f.text("name", "device");
    const auto iv_path = base_dir / f.text("iv_grid_csv");
    try {
        dev.iv = IVGrid::from_samples(read_iv_csv(iv_path));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(iv_path.string() + ": " + e.what());
    }
    dev.c_gd = read_capacitance_csv(base_dir / f.text("c_gd_csv"));
    dev.c_ds = read_capacitance_csv(base_dir / f.text("c_ds_csv"));
    dev.c_gs = f.number("c_gs_F");
    dev.c_par_gd = f.number("c_par_gd_F", 0.0);
    dev.c_par_ds = f.number("c_par_ds_F", 0.0);
    dev.v_th = f.number("v_th_V");
    dev.q_rr = f.number("q_rr_C", 0.0);
    dev.v_ee_ref = f.number("v_ee_ref_V", 0.0);
    dev.validate();
    return dev;
}

DeviceModel load_device_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open device manifest");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return device_from_manifest_json(j, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

fs::path write_device_files(const fs::path& dir, const std::string& stem, const DeviceModel& dev) {
    fs::create_directories(dir);
    const std::string iv = stem + "_iv.csv";
    const std::string cgd = stem + "_cgd.csv";
    const std::string cds = stem + "_cds.csv";
    write_iv_csv(dir / iv, dev.iv);
    write_capacitance_csv(dir / cgd, dev.c_gd);
    write_capacitance_csv(dir / cds, dev.c_ds);
    nlohmann::json j{{"name", dev.name},       {"iv_grid_csv", iv},        {"c_gd_csv", cgd},
                     {"c_ds_csv", cds},        {"c_gs_F", dev.c_gs},       {"c_par_gd_F", dev.c_par_gd},
                     {"c_par_ds_F", dev.c_par_ds}, {"v_th_V", dev.v_th},   {"q_rr_C", dev.q_rr},
                     {"v_ee_ref_V", dev.v_ee_ref}};
    const fs::path manifest = dir / (stem + ".json");
    std::ofstream out(manifest);
    out << j.dump(2) << '\n';
    return manifest;
}

std::string device_fingerprint(const DeviceModel& dev) {
    std::string bytes;
    auto add = [&](double v) { bytes.append(reinterpret_cast<const char*>(&v), sizeof v); };
    for (const IVSample& s : dev.iv.samples()) {
        add(s.v_gs);
        add(s.v_ds);
        add(s.i_d);
    }
    for (const CapacitanceCurve* c : {&dev.c_gd, &dev.c_ds}) {
        for (std::size_t i = 0; i < c->voltages().size(); ++i) {
            add(c->voltages()[i]);
            add(c->capacitances()[i]);
        }
    }
    for (double v : {dev.c_gs, dev.c_par_gd, dev.c_par_ds, dev.v_th, dev.q_rr, dev.v_ee_ref}) {
        add(v);
    }
    return fnv1a_hex(bytes);
}

}  // namespace turnon

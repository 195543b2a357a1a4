#include "cevld/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cevld {

namespace {

constexpr char kMagic[8] = {'C', 'E', 'V', 'L', 'D', 'E', '1', '\n'};

void write_comments(std::ostream& os, const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
}

// Parse `a,b` rows, skipping comments; returns column pairs.
std::vector<std::pair<double, double>> read_two_columns(std::istream& is,
                                                        const std::string& header) {
    std::vector<std::pair<double, double>> rows;
    std::string line;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            if (line != header)
                throw std::runtime_error("csv: expected header '" + header + "', got '" + line + "'");
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("csv: malformed row: " + line);
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    if (!seen_header) throw std::runtime_error("csv: missing header '" + header + "'");
    if (rows.empty()) throw std::runtime_error("csv: no data rows");
    return rows;
}

template <class T>
void put_le(std::ostream& os, T v) {
    // Little-endian on every platform this builds for; memcpy keeps it UB-free.
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw std::runtime_error("binary: truncated stream");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& os, const GridPath& path,
                    const std::vector<std::string>& comments) {
    write_comments(os, comments);
    os << "t,value\n";
    for (std::size_t i = 0; i < path.values.size(); ++i)
        os << format_full(path.time(i)) << ',' << format_full(path.values[i]) << '\n';
}

GridPath read_path_csv(std::istream& is) {
    const auto rows = read_two_columns(is, "t,value");
    if (rows.size() < 2) throw std::runtime_error("csv: a path needs at least 2 nodes");
    const double T = rows.back().first;
    std::vector<double> values;
    values.reserve(rows.size());
    const double dt = T / static_cast<double>(rows.size() - 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i].first - dt * static_cast<double>(i)) > 1e-9 * std::max(1.0, T))
            throw std::runtime_error("csv: path grid is not uniform");
        values.push_back(rows[i].second);
    }
    return GridPath(T, std::move(values));
}

void write_control_csv(std::ostream& os, const ControlPath& h,
                       const std::vector<std::string>& comments) {
    write_comments(os, comments);
    os << "t,hdot\n";
    for (std::size_t i = 0; i < h.hdot.size(); ++i)
        os << format_full(h.dt() * static_cast<double>(i)) << ',' << format_full(h.hdot[i])
           << '\n';
}

ControlPath read_control_csv(std::istream& is) {
    const auto rows = read_two_columns(is, "t,hdot");
    // Rows sit at interval left endpoints, so the horizon is N * dt with
    // dt recovered from the first two rows (single-row controls are rejected:
    // the horizon would be ambiguous).
    if (rows.size() < 2) throw std::runtime_error("csv: a control needs at least 2 intervals");
    const double dt = rows[1].first - rows[0].first;
    if (!(dt > 0.0)) throw std::runtime_error("csv: control grid is not increasing");
    std::vector<double> hdot;
    hdot.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i].first - dt * static_cast<double>(i)) > 1e-9 * std::max(1.0, dt * rows.size()))
            throw std::runtime_error("csv: control grid is not uniform");
        hdot.push_back(rows[i].second);
    }
    return ControlPath(dt * static_cast<double>(rows.size()), std::move(hdot));
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& e,
                        const std::vector<std::string>& comments) {
    write_comments(os, comments);
    os << "path_id,t,value\n";
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        const auto path = e.path(p);
        for (std::size_t i = 0; i <= e.steps; ++i)
            os << p << ',' << format_full(e.time(i)) << ',' << format_full(path[i]) << '\n';
    }
}

void write_ensemble_binary(std::ostream& os, const PathEnsemble& e) {
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint64_t>(os, e.steps);
    put_le<std::uint64_t>(os, e.n_paths);
    put_le<double>(os, e.horizon);
    put_le<std::uint64_t>(os, e.seed);
    for (double v : e.values) put_le<double>(os, v);
    for (double v : e.log_weights) put_le<double>(os, v);
}

PathEnsemble read_ensemble_binary(std::istream& is) {
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("binary: bad magic");
    PathEnsemble e;
    e.steps = get_le<std::uint64_t>(is);
    e.n_paths = get_le<std::uint64_t>(is);
    e.horizon = get_le<double>(is);
    e.seed = get_le<std::uint64_t>(is);
    e.values.resize((e.steps + 1) * e.n_paths);
    e.log_weights.resize(e.n_paths);
    for (auto& v : e.values) v = get_le<double>(is);
    for (auto& v : e.log_weights) v = get_le<double>(is);
    return e;
}

} // namespace cevld

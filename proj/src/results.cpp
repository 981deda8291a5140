#include "alignlab/results.hpp"

#include "alignlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace alignlab {

namespace fs = std::filesystem;

std::size_t ResultTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("column '" + name + "' not found", "result table");
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("read failed", path.string());
    return os.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed", path.string());
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string format_certificate(const CheckCertificate& cert) {
    std::ostringstream os;
    os << "certificate " << cert.name << "\n";
    os << "  passed = " << (cert.passed ? "true" : "false") << "\n";
    os << "  tolerance = " << fmt(cert.tolerance) << "\n";
    for (const auto& w : cert.witness)
        os << "  witness " << w.name << " = " << fmt(w.value) << "\n";
    if (!cert.notes.empty()) os << "  notes = " << cert.notes << "\n";
    return os.str();
}

std::vector<std::string> write_results(const TrajectoryBundle& bundle,
                                       const WeightVector& weights,
                                       std::span<const double> sup_gap,
                                       std::span<const CheckCertificate> certificates,
                                       const fs::path& dir,
                                       const std::string& scenario_text,
                                       std::uint64_t seed) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + ec.message(), dir.string());

    const auto& times = bundle.state_path.times;
    std::size_t n_needs = bundle.state_path.values.empty()
                              ? 0
                              : bundle.state_path.values[0].size();
    std::size_t n_ctrl = bundle.control_path.values.empty()
                             ? 0
                             : bundle.control_path.values[0].size();

    std::vector<std::string> files;

    // Trajectory table.
    {
        std::ostringstream os;
        os << "t";
        for (std::size_t i = 1; i <= n_needs; ++i) os << ",x_" << i;
        for (std::size_t i = 1; i <= n_needs; ++i) os << ",costate_" << i;
        if (n_ctrl == 1)
            os << ",control";
        else
            for (std::size_t i = 1; i <= n_ctrl; ++i) os << ",control_" << i;
        os << ",discounted_utility\n";

        for (std::size_t k = 0; k < times.size(); ++k) {
            os << fmt(times[k]);
            for (std::size_t i = 0; i < n_needs; ++i)
                os << "," << fmt(bundle.state_path.values[k][i]);
            for (std::size_t i = 0; i < n_needs; ++i)
                os << "," << fmt(bundle.costate_path.values[k][i]);
            for (std::size_t i = 0; i < n_ctrl; ++i)
                os << "," << fmt(bundle.control_path.values[k][i]);
            os << "," << fmt(bundle.running_utility.empty()
                                 ? 0.0
                                 : bundle.running_utility[k]);
            os << "\n";
        }
        write_text_file(dir / "trajectories.csv", os.str());
        files.push_back("trajectories.csv");
    }

    // Alignment gap series (feeds the log-scale error plot).
    {
        std::ostringstream os;
        os << "t,sup_gap\n";
        for (std::size_t k = 0; k < sup_gap.size() && k < times.size(); ++k)
            os << fmt(times[k]) << "," << fmt(sup_gap[k]) << "\n";
        write_text_file(dir / "gap.csv", os.str());
        files.push_back("gap.csv");
    }

    // Certificate report.
    {
        std::ostringstream os;
        for (const auto& cert : certificates) os << format_certificate(cert) << "\n";
        write_text_file(dir / "certificates.txt", os.str());
        files.push_back("certificates.txt");
    }

    // Manifest.
    {
        std::ostringstream os;
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(scenario_text)));
        os << "scenario_hash = " << hash << "\n";
        os << "seed = " << seed << "\n";
        os << "weights_l1 = " << fmt(l1_norm(weights)) << "\n";
        os << "truncation_tail_weight = " << fmt(0.0) << "\n";
        os << "converged = " << (bundle.converged ? "true" : "false") << "\n";
        os << "iterations = " << bundle.iterations << "\n";
        os << "utility_integral = " << fmt(bundle.utility_integral) << "\n";
        os << "clamp_events = " << bundle.clamp_events << "\n";
        os << "files:\n";
        for (const auto& f : files) os << "  " << f << "\n";
        write_text_file(dir / "manifest.txt", os.str());
        files.push_back("manifest.txt");
    }
    return files;
}

ResultTable read_result_table(const fs::path& path) {
    std::string text = read_text_file(path);
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty result table", path.string());
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) {
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw IoError("malformed numeric cell '" + cell + "'", path.string());
            row.push_back(v);
        }
        if (row.size() != table.header.size())
            throw IoError("row width does not match header", path.string());
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace alignlab

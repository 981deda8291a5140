#pragma once

#include "alignlab/control.hpp"
#include "alignlab/theorems.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace alignlab {

// In-memory form of an emitted trajectory table.
struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const; // throws IoError if absent
};

// FNV-1a 64-bit content hash (manifest fingerprints).
std::uint64_t fnv1a64(const std::string& data);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Emits the run outputs into `dir`:
//   trajectories.csv  t, x_1..x_N, costate_1..costate_N, control columns,
//                     running discounted utility (17 significant digits,
//                     comma separated, LF line endings)
//   gap.csv           t, sup-norm ideal-vs-delivered gap
//   certificates.txt  one certificate per block: name, passed, witnesses,
//                     tolerance
//   manifest.txt      scenario hash, seed, file list
// Returns the relative names of the files written.
std::vector<std::string> write_results(const TrajectoryBundle& bundle,
                                       const WeightVector& weights,
                                       std::span<const double> sup_gap,
                                       std::span<const CheckCertificate> certificates,
                                       const std::filesystem::path& dir,
                                       const std::string& scenario_text,
                                       std::uint64_t seed);

ResultTable read_result_table(const std::filesystem::path& path);

std::string format_certificate(const CheckCertificate& cert);

} // namespace alignlab

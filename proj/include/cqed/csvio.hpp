#ifndef CQED_CSVIO_HPP
#define CQED_CSVIO_HPP

#include <string>

#include "cqed/corr.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/steady.hpp"

namespace cqed {

/// Scientific notation with 9 significant digits, '.' separator. All CSV
/// numbers go through this so reruns are byte-identical.
std::string format_sci(double v);

std::string trajectory_csv(const Trajectory& traj);
std::string sweep_csv(const SweepResult& sweep);
std::string two_time_csv(const TwoTimeGrid& grid);
std::string spectrum_csv(const Spectrum& spec);
std::string cross_correlation_csv(const CrossCorrelationResult& cc);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Hex SHA-256 of a byte string (scenario digests for the run manifest).
std::string sha256_hex(const std::string& bytes);

}  // namespace cqed

#endif

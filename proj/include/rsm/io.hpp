#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsm/core.hpp"
#include "rsm/solver.hpp"

namespace rsm {

// CSV with one row per line; an empty cell or a case-insensitive NaN token is
// a masked-out entry. All rows must have the same length.
MaskedMatrix load_matrix(const std::string& path);

// Inverse of load_matrix: masked cells as NaN, 17 significant digits so the
// round trip is bit-lossless.
void save_matrix(const MaskedMatrix& M, const std::string& path);
void save_dense(index_t m, index_t n, const std::vector<double>& values, const std::string& path);

// Content hash of dims, mask, and observed values (hidden cells excluded).
std::uint64_t dataset_checksum(const MaskedMatrix& M);

// Full provenance record for one decompose run.
struct RunReport {
  DecompositionReport result;
  index_t rank = 0;
  Mode mode = Mode::M1;
  index_t block = 0;
  index_t vectors_per_trial = 0;
  std::uint64_t trials = 0;
  std::string trial_source;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int workers = 0;
  double gram_rank_tol = 0.0;
  std::uint64_t checksum = 0;
  std::string version;
};

RunReport make_report(const RsmConfig& cfg, const DecompositionReport& rep, std::uint64_t checksum);

std::string serialize_report(const RunReport& r);
RunReport parse_report(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace rsm

#include "rsm/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rsm/version.hpp"

namespace rsm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool is_nan_token(const std::string& t) {
  if (t.size() != 3) return false;
  return std::tolower(static_cast<unsigned char>(t[0])) == 'n' &&
         std::tolower(static_cast<unsigned char>(t[1])) == 'a' &&
         std::tolower(static_cast<unsigned char>(t[2])) == 'n';
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void format_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

} // namespace

MaskedMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_io, "cannot open file: " + path);

  std::vector<std::vector<std::pair<bool, double>>> rows;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break; // trailing newline
    std::vector<std::pair<bool, double>> row;
    for (const std::string& raw : split_cells(line)) {
      const std::string cell = trim(raw);
      if (cell.empty() || is_nan_token(cell)) {
        row.emplace_back(false, 0.0);
        continue;
      }
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end != begin + cell.size() || !std::isfinite(v))
        fail(errc::parse_io, "non-numeric token '" + cell + "' in " + path);
      row.emplace_back(true, v);
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      fail(errc::parse_io, "ragged row " + std::to_string(rows.size() + 1) + " in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty() || width == 0) fail(errc::parse_io, "empty matrix in " + path);

  MaskedMatrix M(static_cast<index_t>(rows.size()), static_cast<index_t>(width));
  for (index_t i = 0; i < M.m; ++i)
    for (index_t j = 0; j < M.n; ++j) {
      const auto& [known, v] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (known) M.set(i, j, v);
    }
  return M;
}

void save_matrix(const MaskedMatrix& M, const std::string& path) {
  if (M.m < 1 || M.n < 1) fail(errc::invalid_config, "cannot save an empty matrix");
  std::string out;
  out.reserve(static_cast<std::size_t>(M.m * M.n) * 8);
  for (index_t i = 0; i < M.m; ++i) {
    for (index_t j = 0; j < M.n; ++j) {
      if (j) out += ',';
      if (M.known(i, j))
        format_value(out, M(i, j));
      else
        out += "NaN";
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void save_dense(index_t m, index_t n, const std::vector<double>& values, const std::string& path) {
  if (m < 1 || n < 1) fail(errc::invalid_config, "cannot save an empty matrix");
  if (static_cast<index_t>(values.size()) != m * n)
    fail(errc::invalid_config, "save_dense: size does not match dims");
  std::string out;
  out.reserve(values.size() * 8);
  for (index_t i = 0; i < m; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (j) out += ',';
      format_value(out, values[static_cast<std::size_t>(i * n + j)]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
}

} // namespace

std::uint64_t dataset_checksum(const MaskedMatrix& M) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(M.m), static_cast<std::uint64_t>(M.n)};
  fnv_bytes(h, dims, sizeof dims);
  for (index_t i = 0; i < M.m; ++i)
    for (index_t j = 0; j < M.n; ++j) {
      const unsigned char k = M.known(i, j) ? 1 : 0;
      fnv_bytes(h, &k, 1);
      if (k) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(M(i, j));
        fnv_bytes(h, &bits, sizeof bits);
      }
    }
  return h;
}

namespace {

const char* source_name(PlanSource s) {
  switch (s) {
    case PlanSource::theorem3_bound: return "theorem3";
    case PlanSource::heuristic: return "heuristic";
    case PlanSource::explicit_count: return "explicit";
  }
  return "explicit";
}

PlanSource source_from_name(const std::string& s) {
  if (s == "theorem3") return PlanSource::theorem3_bound;
  if (s == "heuristic") return PlanSource::heuristic;
  return PlanSource::explicit_count;
}

} // namespace

RunReport make_report(const RsmConfig& cfg, const DecompositionReport& rep, std::uint64_t checksum) {
  RunReport r;
  r.result = rep;
  r.rank = cfg.rank;
  r.mode = cfg.mode;
  r.block = cfg.block > 0 ? cfg.block : cfg.rank + 1;
  r.vectors_per_trial = cfg.vectors_per_trial;
  r.trials = cfg.plan.trials;
  r.trial_source = source_name(cfg.plan.source);
  r.epsilon = cfg.plan.epsilon;
  r.seed = cfg.seed;
  r.workers = cfg.workers;
  r.gram_rank_tol = cfg.gram_rank_tol;
  r.checksum = checksum;
  r.version = VERSION;
  return r;
}

std::string serialize_report(const RunReport& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["dataset_checksum"] = r.checksum;
  j["seed"] = r.seed;
  j["config"] = {{"rank", r.rank},
                 {"mode", mode_name(r.mode)},
                 {"block", r.block},
                 {"vectors_per_trial", r.vectors_per_trial},
                 {"trials", r.trials},
                 {"trial_source", r.trial_source},
                 {"epsilon", r.epsilon},
                 {"workers", r.workers},
                 {"gram_rank_tol", r.gram_rank_tol}};
  j["e"] = r.result.e;
  j["trials_attempted"] = r.result.trials_attempted;
  j["trials_accepted"] = r.result.trials_accepted;
  j["z"] = r.result.z;
  j["underdetermined_rows"] = r.result.underdetermined_rows;
  j["gram_rank"] = r.result.gram_rank;
  j["borderline_rank_gate"] = r.result.borderline_rank_gate;
  j["wall_time"] = r.result.wall_time;
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_io, std::string("bad report json: ") + e.what());
  }
  try {
    RunReport r;
    r.version = j.at("version").get<std::string>();
    r.checksum = j.at("dataset_checksum").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    r.rank = c.at("rank").get<index_t>();
    r.mode = c.at("mode").get<std::string>() == "m2" ? Mode::M2 : Mode::M1;
    r.block = c.at("block").get<index_t>();
    r.vectors_per_trial = c.at("vectors_per_trial").get<index_t>();
    r.trials = c.at("trials").get<std::uint64_t>();
    r.trial_source = c.at("trial_source").get<std::string>();
    r.epsilon = c.at("epsilon").get<double>();
    r.workers = c.at("workers").get<int>();
    r.gram_rank_tol = c.at("gram_rank_tol").get<double>();
    r.result.e = j.at("e").get<double>();
    r.result.trials_attempted = j.at("trials_attempted").get<std::uint64_t>();
    r.result.trials_accepted = j.at("trials_accepted").get<std::uint64_t>();
    r.result.z = j.at("z").get<std::uint64_t>();
    r.result.underdetermined_rows = j.at("underdetermined_rows").get<index_t>();
    r.result.gram_rank = j.at("gram_rank").get<index_t>();
    r.result.borderline_rank_gate = j.at("borderline_rank_gate").get<bool>();
    r.result.wall_time = j.at("wall_time").get<double>();
    (void)source_from_name(r.trial_source);
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_io, std::string("bad report json: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::parse_io, "cannot open file for writing: " + path);
  out << text;
  if (!out) fail(errc::parse_io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse_io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace rsm

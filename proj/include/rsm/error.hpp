#pragma once

#include <stdexcept>
#include <string>

namespace rsm {

enum class errc {
  invalid_config,        // bad parameters, dimension mismatch, domain error
  parse_io,              // unreadable file, malformed CSV, bad JSON
  insufficient_coverage, // mask too sparse: rank gate failed or plan infeasible
  internal,              // numerical backend failure
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline const char* category_name(errc c) noexcept {
  switch (c) {
    case errc::invalid_config: return "invalid_config";
    case errc::parse_io: return "parse_io";
    case errc::insufficient_coverage: return "insufficient_coverage";
    case errc::internal: return "internal";
  }
  return "internal";
}

// Process exit codes: 0 ok, 2 invalid config, 3 parse/IO, 4 insufficient
// coverage. 1 is left to unexpected termination.
inline int exit_code(errc c) noexcept {
  switch (c) {
    case errc::invalid_config: return 2;
    case errc::parse_io: return 3;
    case errc::insufficient_coverage: return 4;
    case errc::internal: return 1;
  }
  return 1;
}

} // namespace rsm

#pragma once

#include <stdexcept>
#include <string>

namespace ncpd {

/// Error categories. The CLI maps these onto process exit codes:
/// config/bounds/dimension -> 2, parse -> 3, everything else -> 4.
enum class errc {
  config,      ///< invalid parameter or parameter combination
  bounds,      ///< index or range outside its valid window
  dimension,   ///< shape mismatch or input too small
  parse,       ///< malformed input file
  degenerate,  ///< degenerate data (e.g. zero-variance column, duplicate points)
  numerical,   ///< linear-algebra solver failure
  inference,   ///< resampling could not produce usable pseudo-samples
  contract,    ///< broken internal invariant
};

/// Exception carrying an errc; every error thrown by the library is one of these.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace ncpd

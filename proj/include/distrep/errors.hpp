#pragma once

#include <stdexcept>
#include <string>

namespace distrep {

// Failure taxonomy shared by the library and the CLI (exit-code mapping lives
// in the CLI). Every throw site picks the most specific code.
enum class Errc {
  malformed_header,
  unparseable_row,
  empty_input,
  all_data_discarded,
  degenerate_sample,
  grid_too_coarse,
  grid_mismatch,
  empty_sample,
  all_weights_vanish,
  singular_covariance,
  zero_response_variance,
  zero_frechet_variance,
  degenerate_group_variance,
  empty_cluster,
  empty_series,
  empty_mask,
  nonpositive_part,
  dimension_mismatch,
  invalid_argument,
  io_failure,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace distrep

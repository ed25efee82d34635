#pragma once

#include <stdexcept>
#include <string>

namespace rtpsim {

// Failure categories surfaced by the library. Configuration problems map to
// CLI exit code 2; everything here derives from std::runtime_error so callers
// can also treat failures uniformly.
enum class errc {
  // network / topology
  cycle_detected,
  disconnected_node,
  duplicate_line,
  non_positive_impedance,
  dimension_mismatch,
  // cluster specifications
  infeasible_spec,
  length_mismatch,
  // response model / likelihood
  non_positive_inner_product,
  all_zero_likelihood,
  // belief state
  empty_support,
  non_simplex_weights,
  // price selection
  no_feasible_price,
  // records / files / configuration
  incomplete_record,
  parse_error,
  config_error,
};

const char* errc_name(errc code) noexcept;

class sim_error : public std::runtime_error {
 public:
  sim_error(errc code, const std::string& detail);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void throw_error(errc code, const std::string& detail);

}  // namespace rtpsim

#include "rtpsim/errors.hpp"

namespace rtpsim {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::cycle_detected: return "CycleDetected";
    case errc::disconnected_node: return "DisconnectedNode";
    case errc::duplicate_line: return "DuplicateLine";
    case errc::non_positive_impedance: return "NonPositiveImpedance";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::infeasible_spec: return "InfeasibleSpec";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::non_positive_inner_product: return "NonPositiveInnerProduct";
    case errc::all_zero_likelihood: return "AllZeroLikelihood";
    case errc::empty_support: return "EmptySupport";
    case errc::non_simplex_weights: return "NonSimplexWeights";
    case errc::no_feasible_price: return "NoFeasiblePrice";
    case errc::incomplete_record: return "IncompleteRecord";
    case errc::parse_error: return "ParseError";
    case errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

sim_error::sim_error(errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
      code_(code) {}

void throw_error(errc code, const std::string& detail) {
  throw sim_error(code, detail);
}

}  // namespace rtpsim

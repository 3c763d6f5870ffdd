#pragma once

#include <stdexcept>
#include <string>

namespace retroscatter
{

enum class ErrorCode
{
  degenerate_angles,
  angle_out_of_range,
  invalid_argument,
  packing_failure,
  invalid_involution,
  not_normalized,
  budget_infeasible,
  max_bounces_exceeded,
  singular_hit,
  not_in_a,
  out_of_range,
  index_out_of_range,
  grid_mismatch,
  empty_input,
  mass_mismatch,
  weight_mismatch,
  infeasible,
  not_symmetric,
  negative_entry,
  not_permutation_matrix,
  not_involution,
  forbidden_corner,
  denominator_overflow,
  parse_error,
};

//! Name of an error code, e.g. "PackingFailure".
const char* to_string(ErrorCode code);

//! Library exception carrying a machine-readable code.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, std::string const& what);

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, std::string const& what);

}  // namespace retroscatter

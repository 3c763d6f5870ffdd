#include "retroscatter/error.hpp"

namespace retroscatter
{

const char* to_string(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::degenerate_angles: return "DegenerateAngles";
        case ErrorCode::angle_out_of_range: return "AngleOutOfRange";
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::packing_failure: return "PackingFailure";
        case ErrorCode::invalid_involution: return "InvalidInvolution";
        case ErrorCode::not_normalized: return "NotNormalized";
        case ErrorCode::budget_infeasible: return "BudgetInfeasible";
        case ErrorCode::max_bounces_exceeded: return "MaxBouncesExceeded";
        case ErrorCode::singular_hit: return "SingularHit";
        case ErrorCode::not_in_a: return "NotInA";
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::index_out_of_range: return "IndexOutOfRange";
        case ErrorCode::grid_mismatch: return "GridMismatch";
        case ErrorCode::empty_input: return "EmptyInput";
        case ErrorCode::mass_mismatch: return "MassMismatch";
        case ErrorCode::weight_mismatch: return "WeightMismatch";
        case ErrorCode::infeasible: return "Infeasible";
        case ErrorCode::not_symmetric: return "NotSymmetric";
        case ErrorCode::negative_entry: return "NegativeEntry";
        case ErrorCode::not_permutation_matrix: return "NotPermutationMatrix";
        case ErrorCode::not_involution: return "NotInvolution";
        case ErrorCode::forbidden_corner: return "ForbiddenCorner";
        case ErrorCode::denominator_overflow: return "DenominatorOverflow";
        case ErrorCode::parse_error: return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string const& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what)
    , code_(code)
{
}

void fail(ErrorCode code, std::string const& what)
{
    throw Error(code, what);
}

}  // namespace retroscatter

#include "uqprop/errors.hpp"

#include <sstream>

namespace uqprop {

namespace {

std::string dimension_message(const std::string& what, long expected, long actual) {
  std::ostringstream os;
  os << what << ": expected dimension " << expected << ", got " << actual;
  return os.str();
}

std::string rank_message(const std::string& what, long rank, long expected_rank) {
  std::ostringstream os;
  os << what << ": matrix is rank deficient (rank " << rank << " of " << expected_rank << ")";
  return os.str();
}

std::string jitter_message(const std::string& what, double jitter) {
  std::ostringstream os;
  os << what << " (attempted jitter " << jitter << ")";
  return os.str();
}

}  // namespace

DimensionMismatch::DimensionMismatch(const std::string& what, long expected, long actual)
    : ContractError(dimension_message(what, expected, actual)), expected_(expected), actual_(actual) {}

SingularMatrixError::SingularMatrixError(const std::string& what, long rank, long expected_rank)
    : NumericalError(rank_message(what, rank, expected_rank)), rank_(rank) {}

FactorizationError::FactorizationError(const std::string& what, double attempted_jitter)
    : NumericalError(jitter_message(what, attempted_jitter)), jitter_(attempted_jitter) {}

}  // namespace uqprop

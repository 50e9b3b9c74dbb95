#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smds {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// An n x d matrix whose rows are embedded points.
template <typename Scalar>
using Configuration = Matrix<Scalar>;

enum class ErrorCode {
  NotSquare,
  Asymmetric,
  NegativeEntry,
  NonzeroDiagonal,
  NonFinite,
  DimensionMismatch,
  InfiniteRatio,
  DisconnectedWeights,
  DimensionTooLarge,
  LipschitzViolation,
  DisconnectedGraph,
  MaxCyclesExceeded,
  InvalidArgument,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "not-square";
    case ErrorCode::Asymmetric: return "asymmetric";
    case ErrorCode::NegativeEntry: return "negative-entry";
    case ErrorCode::NonzeroDiagonal: return "nonzero-diagonal";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::InfiniteRatio: return "infinite-ratio";
    case ErrorCode::DisconnectedWeights: return "disconnected-weights";
    case ErrorCode::DimensionTooLarge: return "dimension-too-large";
    case ErrorCode::LipschitzViolation: return "lipschitz-violation";
    case ErrorCode::DisconnectedGraph: return "disconnected-graph";
    case ErrorCode::MaxCyclesExceeded: return "max-cycles-exceeded";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace smds

#ifndef SPLA_ERROR_HPP
#define SPLA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace spla {

enum class ErrorKind {
  InvalidArgument,
  NonSymmetric,
  NoConvergence,
  NotPositiveDefinite,
  RankDeficient,
  ConstantColumn,
  DataFormat,
  NonSquareBlock,
  IsolatedVariable,
  InconsistentPartition,
  EmptyGrid,
  SingularDraw,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ConstantColumn: return "ConstantColumn";
    case ErrorKind::DataFormat: return "DataFormat";
    case ErrorKind::NonSquareBlock: return "NonSquareBlock";
    case ErrorKind::IsolatedVariable: return "IsolatedVariable";
    case ErrorKind::InconsistentPartition: return "InconsistentPartition";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::SingularDraw: return "SingularDraw";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by the input file rather than the numerics.
  bool is_data_error() const noexcept {
    return kind_ == ErrorKind::DataFormat || kind_ == ErrorKind::ConstantColumn;
  }

 private:
  ErrorKind kind_;
};

}  // namespace spla

#endif  // SPLA_ERROR_HPP

#ifndef SPLA_DATA_HPP
#define SPLA_DATA_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spla/error.hpp"
#include "spla/linalg.hpp"
#include "spla/matrix.hpp"

namespace spla {

/// N observations of M named variables.
class DataMatrix {
 public:
  DataMatrix(Matrix values, std::vector<std::string> names)
      : values_(std::move(values)), names_(std::move(names)) {
    if (values_.rows() < 2)
      throw Error(ErrorKind::DataFormat, "need at least two observations");
    if (values_.cols() < 1) throw Error(ErrorKind::DataFormat, "need at least one variable");
    if (names_.size() != values_.cols())
      throw Error(ErrorKind::DataFormat, "variable name count does not match column count");
    if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size())
      throw Error(ErrorKind::DataFormat, "variable names must be unique");
    if (!values_.all_finite()) throw Error(ErrorKind::DataFormat, "non-finite cell");
  }

  /// Unnamed variables get X1..XM.
  explicit DataMatrix(Matrix values) : DataMatrix(values, default_names(values.cols())) {}

  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  Index n_obs() const noexcept { return values_.rows(); }
  Index n_vars() const noexcept { return values_.cols(); }

  static std::vector<std::string> default_names(Index m) {
    std::vector<std::string> n;
    for (Index j = 0; j < m; ++j) n.push_back("X" + std::to_string(j + 1));
    return n;
  }

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

/// Symmetric positive-definite covariance (or correlation) matrix.
/// Positive definiteness is checked on construction.
class CovMatrix {
 public:
  CovMatrix(Matrix values, std::vector<std::string> names, bool is_correlation = false)
      : values_(std::move(values)), names_(std::move(names)), is_correlation_(is_correlation) {
    if (!values_.is_square() || values_.rows() == 0)
      throw Error(ErrorKind::InvalidArgument, "covariance must be square and nonempty");
    if (names_.size() != values_.rows())
      throw Error(ErrorKind::InvalidArgument, "variable name count does not match dimension");
    if (!values_.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite covariance entry");
    const double ref = std::max(values_.max_abs(), 1e-300);
    if (asymmetry(values_) > 1e-10 * std::max(ref, 1.0))
      throw Error(ErrorKind::NonSymmetric, "covariance is not symmetric");
    // Exact symmetry downstream.
    for (Index i = 0; i < values_.rows(); ++i)
      for (Index j = i + 1; j < values_.cols(); ++j)
        values_(j, i) = values_(i, j) = 0.5 * (values_(i, j) + values_(j, i));
    if (is_correlation_)
      for (Index i = 0; i < values_.rows(); ++i)
        if (std::abs(values_(i, i) - 1.0) > 1e-10)
          throw Error(ErrorKind::InvalidArgument, "correlation matrix needs a unit diagonal");
    (void)cholesky_upper(values_);
  }

  explicit CovMatrix(Matrix values, bool is_correlation = false)
      : CovMatrix(values, DataMatrix::default_names(values.rows()), is_correlation) {}

  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool is_correlation() const noexcept { return is_correlation_; }
  Index dim() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }
  double trace() const { return values_.trace(); }

  /// Correlation matrix with the same variable names.
  CovMatrix to_correlation() const {
    Matrix c = values_;
    const Index m = dim();
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) c(i, j) = values_(i, j) / std::sqrt(values_(i, i) * values_(j, j));
    for (Index i = 0; i < m; ++i) c(i, i) = 1.0;
    return CovMatrix(std::move(c), names_, true);
  }

 private:
  Matrix values_;
  std::vector<std::string> names_;
  bool is_correlation_;
};

inline Vector column_means(const Matrix& x) {
  Vector mean(x.cols(), 0.0);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

inline DataMatrix center(const DataMatrix& d) {
  Matrix x = d.values();
  const Vector mean = column_means(x);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) -= mean[j];
  return DataMatrix(std::move(x), d.names());
}

/// Centers and scales every column to unit sample variance (divisor N−1).
inline DataMatrix standardize(const DataMatrix& d) {
  Matrix x = center(d).values();
  const double denom = static_cast<double>(x.rows() - 1);
  for (Index j = 0; j < x.cols(); ++j) {
    double ss = 0.0;
    for (Index i = 0; i < x.rows(); ++i) ss += x(i, j) * x(i, j);
    const double sd = std::sqrt(ss / denom);
    if (!(sd > 1e-12))
      throw Error(ErrorKind::ConstantColumn, "variable '" + d.names()[j] + "' is constant");
    for (Index i = 0; i < x.rows(); ++i) x(i, j) /= sd;
  }
  return DataMatrix(std::move(x), d.names());
}

/// (N−1)⁻¹ xᵀx of the centered sample. Throws NotPositiveDefinite for collinear samples.
inline CovMatrix sample_cov(const DataMatrix& d, bool is_correlation = false) {
  const Matrix x = center(d).values();
  Matrix s = transpose_times(x, x);
  s *= 1.0 / static_cast<double>(x.rows() - 1);
  if (is_correlation)
    for (Index i = 0; i < s.rows(); ++i) s(i, i) = 1.0;
  return CovMatrix(std::move(s), d.names(), is_correlation);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Parses CSV text: a header row of variable names followed by numeric rows.
/// Diagnostics name the 1-based file line and column.
inline DataMatrix parse_csv(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  Index line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line).empty()) throw Error(ErrorKind::DataFormat, source + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  for (auto f : detail::split_commas(line)) {
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
    if (f.empty())
      throw Error(ErrorKind::DataFormat, source + ": line " + std::to_string(line_no) + ": empty variable name");
    names.emplace_back(f);
  }
  const Index m = names.size();

  std::vector<double> cells;
  Index n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != m)
      throw Error(ErrorKind::DataFormat, source + ": line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(m) + " fields, found " +
                                             std::to_string(fields.size()));
    for (Index j = 0; j < m; ++j) {
      const auto f = fields[j];
      double value = 0.0;
      const auto* first = f.data();
      const auto* last = f.data() + f.size();
      if (!f.empty() && *first == '+') ++first;
      const auto res = std::from_chars(first, last, value);
      if (f.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(value))
        throw Error(ErrorKind::DataFormat, source + ": line " + std::to_string(line_no) + ", column " +
                                               std::to_string(j + 1) + " (" + names[j] +
                                               "): not a number: '" + std::string(f) + "'");
      cells.push_back(value);
    }
    ++n;
  }
  Matrix x(n, m);
  std::copy(cells.begin(), cells.end(), x.data().begin());
  return DataMatrix(std::move(x), std::move(names));
}

inline DataMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::DataFormat, path + ": cannot open file");
  return parse_csv(in, path);
}

}  // namespace spla

#endif  // SPLA_DATA_HPP

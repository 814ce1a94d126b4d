#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <optional>
#include <vector>

namespace cuckoowalk {

using BigInt = boost::multiprecision::cpp_int;

/// Exact Stirling numbers of the second kind via S(a,b) = b S(a-1,b) + S(a-1,b-1).
///
/// Rows up to `memo_rows` are tabulated in the constructor and read-only
/// afterwards; larger rows (up to `a_max`) are recomputed with a rolling row.
class StirlingOracle {
 public:
  explicit StirlingOracle(std::size_t a_max = 2000, std::size_t memo_rows = 200);

  /// S(a, b). Throws InvalidArgument for a > a_max.
  [[nodiscard]] BigInt stirling2(std::size_t a, std::size_t b) const;
  /// b! S(a, b): labelled surjections [a] -> [b].
  [[nodiscard]] BigInt surjections(std::size_t a, std::size_t b) const;

  [[nodiscard]] std::size_t a_max() const noexcept { return a_max_; }
  [[nodiscard]] std::size_t memo_rows() const noexcept { return rows_.size(); }
  /// Tabulated row a (a < memo_rows()), entries b = 0..a.
  [[nodiscard]] const std::vector<BigInt>& row(std::size_t a) const { return rows_.at(a); }

 private:
  std::size_t a_max_;
  std::vector<std::vector<BigInt>> rows_;
};

/// b! S(a, b) from a shared oracle with the default bounds (a <= 2000).
BigInt stirling_exact(std::size_t a, std::size_t b);

/// Natural log of a positive big integer; -inf for zero.
double log_big(const BigInt& value);

/// Root r > 0 of r / (1 - e^{-r}) = g, g > 1, to relative tolerance 1e-12.
double saddle_root(double g);

struct MoserWymanApprox {
  double r;
  double h;
  double log_value;              ///< log of a! (e^r-1)^b / (2 r^a sqrt(h b))
  std::optional<double> value;   ///< exp(log_value) when it fits a double
};

/// Saddle-point approximation of b! S(a, b) for a = b g with g > 1 + 1e-6.
/// Throws InvalidArgument when a/b is too close to 1, ConvergenceError when
/// the root solve fails.
MoserWymanApprox stirling_moser_wyman(std::size_t a, std::size_t b);

}  // namespace cuckoowalk

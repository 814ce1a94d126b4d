#include "cuckoowalk/stirling.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cuckoowalk/error.hpp"

namespace cuckoowalk {

StirlingOracle::StirlingOracle(std::size_t a_max, std::size_t memo_rows) : a_max_(a_max) {
  const std::size_t rows = std::min(memo_rows, a_max + 1);
  rows_.reserve(rows);
  for (std::size_t a = 0; a < rows; ++a) {
    std::vector<BigInt> row(a + 1);
    if (a == 0) {
      row[0] = 1;
    } else {
      const auto& prev = rows_[a - 1];
      for (std::size_t b = 1; b <= a; ++b) {
        BigInt value = b < a ? prev[b] * b : BigInt(0);
        value += prev[b - 1];
        row[b] = std::move(value);
      }
    }
    rows_.push_back(std::move(row));
  }
}

BigInt StirlingOracle::stirling2(std::size_t a, std::size_t b) const {
  if (a > a_max_) {
    throw InvalidArgument("Stirling oracle bound exceeded: a = " + std::to_string(a) + " > " +
                          std::to_string(a_max_));
  }
  if (b > a) return 0;
  if (a < rows_.size()) return rows_[a][b];

  // Rolling row restricted to columns 0..b, seeded from the last tabulated row.
  std::vector<BigInt> row(b + 1, 0);
  std::size_t start = 0;
  if (!rows_.empty()) {
    start = rows_.size() - 1;
    const auto& seed = rows_.back();
    for (std::size_t j = 0; j <= std::min(b, start); ++j) row[j] = seed[j];
  } else {
    row[0] = 1;
  }
  for (std::size_t r = start + 1; r <= a; ++r) {
    for (std::size_t j = std::min(b, r); j >= 1; --j) {
      row[j] = row[j] * j + row[j - 1];
    }
    row[0] = 0;
  }
  return row[b];
}

BigInt StirlingOracle::surjections(std::size_t a, std::size_t b) const {
  BigInt value = stirling2(a, b);
  for (std::size_t k = 2; k <= b; ++k) value *= k;
  return value;
}

BigInt stirling_exact(std::size_t a, std::size_t b) {
  static const StirlingOracle oracle;
  return oracle.surjections(a, b);
}

double log_big(const BigInt& value) {
  if (value <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 1000) return std::log(value.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

double saddle_root(double g) {
  if (!(g > 1.0)) throw InvalidArgument("saddle root needs g > 1");
  // r / (1 - e^{-r}) increases from 1 (r -> 0) and exceeds r, so [tiny, g] brackets the root.
  const auto f = [g](double r) { return r / -std::expm1(-r) - g; };
  double lo = std::min(1e-9, (g - 1.0) * 1e-3);
  double hi = g;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw ConvergenceError("saddle root is not bracketed");

  std::uintmax_t iterations = 200;
  const auto tol = [](double a, double b) { return std::fabs(a - b) <= 1e-13 * std::fabs(b); };
  const auto [left, right] = boost::math::tools::toms748_solve(f, lo, hi, tol, iterations);
  if (iterations >= 200) throw ConvergenceError("saddle root solve did not converge");
  return 0.5 * (left + right);
}

MoserWymanApprox stirling_moser_wyman(std::size_t a, std::size_t b) {
  if (b == 0) throw InvalidArgument("Moser-Wyman approximation needs b >= 1");
  const double g = static_cast<double>(a) / static_cast<double>(b);
  if (!(g > 1.0 + 1e-6)) throw InvalidArgument("Moser-Wyman approximation needs a/b > 1 + 1e-6");

  const double r = saddle_root(g);
  const double em1 = std::expm1(r);
  const double h = std::numbers::pi * r * std::exp(r) * (em1 - r) / (2.0 * em1 * em1);
  const double ad = static_cast<double>(a);
  const double bd = static_cast<double>(b);
  const double log_value =
      std::lgamma(ad + 1.0) + bd * std::log(em1) - std::numbers::ln2 - ad * std::log(r) - 0.5 * std::log(h * bd);

  MoserWymanApprox out{r, h, log_value, std::nullopt};
  if (log_value < std::log(std::numeric_limits<double>::max())) out.value = std::exp(log_value);
  return out;
}

}  // namespace cuckoowalk

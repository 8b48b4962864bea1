#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace recsp {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  outside_support,
  infinite_ratio,
  out_of_range,
  exhausted,
  parse_error,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

enum class LawKind : uint8_t { gaussian, uniform };

/// One-dimensional marginal law. Only the fields of the active kind are
/// meaningful; construct through the named factories, which validate.
struct Dim1Law {
  LawKind kind = LawKind::gaussian;
  double mean = 0.0;
  double stddev = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static Dim1Law gaussian(double mean, double stddev);
  static Dim1Law uniform(double lo, double hi);

  double support_lo() const;
  double support_hi() const;
};

struct FactorizedDistribution {
  std::vector<Dim1Law> dims;

  FactorizedDistribution() = default;
  explicit FactorizedDistribution(std::vector<Dim1Law> d);

  size_t dim() const { return dims.size(); }
};

/// Coding problem: encode one sample of `target` (Q) using `prior` (P).
/// Construction enforces matching dimensionality and Q << P per dimension.
struct RecTask {
  FactorizedDistribution target;  // Q
  FactorizedDistribution prior;   // P

  RecTask() = default;
  RecTask(FactorizedDistribution q, FactorizedDistribution p);

  size_t dim() const { return target.dim(); }
};

/// A divergence in bits that may be infinite. Callers must check
/// `unbounded` before using `bits`; this keeps the diverging case explicit
/// instead of smuggling it through a float infinity.
struct Divergence {
  double bits = 0.0;
  bool unbounded = false;

  static Divergence finite(double b) { return {b, false}; }
  static Divergence infinite() { return {0.0, true}; }
};

// 1D building blocks.
double log2_pdf(const Dim1Law& law, double z);  // -inf outside a uniform's support
double cdf(const Dim1Law& law, double z);
double quantile(const Dim1Law& law, double u);  // throws for u outside [0, 1]
double standard_normal_cdf(double x);
double standard_normal_quantile(double u);

// Factorized operations.
double log2_density(const FactorizedDistribution& dist, std::span<const double> z);
double log2_ratio(const RecTask& task, std::span<const double> z);
double kl_bits(const RecTask& task);
std::vector<double> dimwise_kl_bits(const RecTask& task);
Divergence renyi_inf_bits(const RecTask& task);
Divergence dim_renyi_inf_bits(const Dim1Law& q, const Dim1Law& p);

// JSON round-trip of a factorized distribution:
//   {"dims":[{"kind":"gaussian","mean":m,"std":s}|{"kind":"uniform","lo":a,"hi":b}, ...]}
std::string distribution_to_json(const FactorizedDistribution& dist);
FactorizedDistribution distribution_from_json(const std::string& json);

}  // namespace recsp

#include "distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace recsp {

namespace {

constexpr double kLog2E = std::numbers::log2e;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLog2TwoPi = 0.5 * std::log2(2.0 * std::numbers::pi);

// Inverse standard normal CDF: Acklam's rational approximation refined by
// one Newton step against the erfc-based CDF. The exact recipe is part of
// the wire contract (encoder and decoder must agree on quantile values),
// so do not swap this for a different approximation.
double acklam_inverse_normal(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

double gg_kl_nats(const Dim1Law& q, const Dim1Law& p) {
  double dm = q.mean - p.mean;
  double vq = q.stddev * q.stddev;
  double vp = p.stddev * p.stddev;
  return std::log(p.stddev / q.stddev) + (vq + dm * dm) / (2.0 * vp) - 0.5;
}

}  // namespace

Dim1Law Dim1Law::gaussian(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean) || !std::isfinite(stddev))
    throw Error(ErrorCode::invalid_argument, "gaussian law requires finite mean and stddev > 0");
  Dim1Law law;
  law.kind = LawKind::gaussian;
  law.mean = mean;
  law.stddev = stddev;
  return law;
}

Dim1Law Dim1Law::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::invalid_argument, "uniform law requires finite lo < hi");
  Dim1Law law;
  law.kind = LawKind::uniform;
  law.lo = lo;
  law.hi = hi;
  return law;
}

double Dim1Law::support_lo() const { return kind == LawKind::uniform ? lo : -kInf; }
double Dim1Law::support_hi() const { return kind == LawKind::uniform ? hi : kInf; }

FactorizedDistribution::FactorizedDistribution(std::vector<Dim1Law> d) : dims(std::move(d)) {
  if (dims.empty())
    throw Error(ErrorCode::invalid_argument, "distribution needs at least one dimension");
}

RecTask::RecTask(FactorizedDistribution q, FactorizedDistribution p)
    : target(std::move(q)), prior(std::move(p)) {
  if (target.dim() != prior.dim())
    throw Error(ErrorCode::dimension_mismatch, "target and prior dimensions differ");
  for (size_t d = 0; d < prior.dim(); ++d) {
    const Dim1Law& ql = target.dims[d];
    const Dim1Law& pl = prior.dims[d];
    if (pl.kind == LawKind::uniform) {
      if (ql.kind != LawKind::uniform || ql.lo < pl.lo || ql.hi > pl.hi)
        throw Error(ErrorCode::invalid_argument,
                    "target support not contained in uniform prior at dim " + std::to_string(d));
    }
  }
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double standard_normal_quantile(double u) {
  if (u <= 0.0) return -kInf;
  if (u >= 1.0) return kInf;
  double x = acklam_inverse_normal(u);
  double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (pdf > 0.0) x -= (standard_normal_cdf(x) - u) / pdf;
  return x;
}

double log2_pdf(const Dim1Law& law, double z) {
  if (law.kind == LawKind::gaussian) {
    double t = (z - law.mean) / law.stddev;
    return -std::log2(law.stddev) - kHalfLog2TwoPi - 0.5 * t * t * kLog2E;
  }
  if (z < law.lo || z > law.hi) return -kInf;
  return -std::log2(law.hi - law.lo);
}

double cdf(const Dim1Law& law, double z) {
  if (law.kind == LawKind::gaussian) return standard_normal_cdf((z - law.mean) / law.stddev);
  if (z <= law.lo) return 0.0;
  if (z >= law.hi) return 1.0;
  return (z - law.lo) / (law.hi - law.lo);
}

double quantile(const Dim1Law& law, double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw Error(ErrorCode::out_of_range, "quantile argument must lie in [0, 1]");
  if (law.kind == LawKind::uniform) return law.lo + u * (law.hi - law.lo);
  return law.mean + law.stddev * standard_normal_quantile(u);
}

double log2_density(const FactorizedDistribution& dist, std::span<const double> z) {
  if (z.size() != dist.dim())
    throw Error(ErrorCode::dimension_mismatch, "point dimension does not match distribution");
  double sum = 0.0;
  for (size_t d = 0; d < dist.dim(); ++d) sum += log2_pdf(dist.dims[d], z[d]);
  return sum;
}

double log2_ratio(const RecTask& task, std::span<const double> z) {
  if (z.size() != task.dim())
    throw Error(ErrorCode::dimension_mismatch, "point dimension does not match task");
  for (size_t d = 0; d < task.dim(); ++d) {
    const Dim1Law& pl = task.prior.dims[d];
    if (z[d] < pl.support_lo() || z[d] > pl.support_hi())
      throw Error(ErrorCode::outside_support, "point outside prior support");
  }
  double lq = log2_density(task.target, z);
  if (lq == -kInf) return -kInf;
  return lq - log2_density(task.prior, z);
}

std::vector<double> dimwise_kl_bits(const RecTask& task) {
  std::vector<double> out(task.dim());
  for (size_t d = 0; d < task.dim(); ++d) {
    const Dim1Law& q = task.target.dims[d];
    const Dim1Law& p = task.prior.dims[d];
    if (q.kind == LawKind::gaussian && p.kind == LawKind::gaussian) {
      out[d] = gg_kl_nats(q, p) * kLog2E;
    } else if (q.kind == LawKind::uniform && p.kind == LawKind::uniform) {
      if (q.lo < p.lo || q.hi > p.hi)
        throw Error(ErrorCode::invalid_argument, "uniform target not contained in uniform prior");
      out[d] = std::log2((p.hi - p.lo) / (q.hi - q.lo));
    } else if (q.kind == LawKind::uniform && p.kind == LawKind::gaussian) {
      double width = q.hi - q.lo;
      double m = 0.5 * (q.lo + q.hi);
      double second_moment = width * width / 12.0 + (m - p.mean) * (m - p.mean);
      double vp = p.stddev * p.stddev;
      double nats = -std::log(width) + std::log(p.stddev) +
                    0.5 * std::log(2.0 * std::numbers::pi) + second_moment / (2.0 * vp);
      out[d] = nats * kLog2E;
    } else {
      throw Error(ErrorCode::invalid_argument, "gaussian target over uniform prior has no finite KL");
    }
  }
  return out;
}

double kl_bits(const RecTask& task) {
  double sum = 0.0;
  for (double v : dimwise_kl_bits(task)) sum += v;
  return sum;
}

Divergence dim_renyi_inf_bits(const Dim1Law& q, const Dim1Law& p) {
  if (q.kind == LawKind::uniform && p.kind == LawKind::uniform) {
    if (q.lo < p.lo || q.hi > p.hi) return Divergence::infinite();
    return Divergence::finite(std::log2((p.hi - p.lo) / (q.hi - q.lo)));
  }
  if (q.kind == LawKind::uniform && p.kind == LawKind::gaussian) {
    // Density ratio maximised where the gaussian is smallest: the endpoint
    // of Q's support farther from the prior mean.
    double z = std::abs(q.lo - p.mean) > std::abs(q.hi - p.mean) ? q.lo : q.hi;
    return Divergence::finite(-std::log2(q.hi - q.lo) - log2_pdf(p, z));
  }
  if (q.kind == LawKind::gaussian && p.kind == LawKind::gaussian) {
    if (q.stddev > p.stddev) return Divergence::infinite();
    if (q.stddev == p.stddev) {
      if (q.mean == p.mean) return Divergence::finite(0.0);
      return Divergence::infinite();
    }
    double dm = q.mean - p.mean;
    double vq = q.stddev * q.stddev;
    double vp = p.stddev * p.stddev;
    double nats = std::log(p.stddev / q.stddev) + dm * dm / (2.0 * (vp - vq));
    return Divergence::finite(nats * kLog2E);
  }
  return Divergence::infinite();  // gaussian target over uniform prior
}

Divergence renyi_inf_bits(const RecTask& task) {
  double total = 0.0;
  for (size_t d = 0; d < task.dim(); ++d) {
    Divergence dv = dim_renyi_inf_bits(task.target.dims[d], task.prior.dims[d]);
    if (dv.unbounded) return Divergence::infinite();
    total += dv.bits;
  }
  return Divergence::finite(total);
}

std::string distribution_to_json(const FactorizedDistribution& dist) {
  nlohmann::ordered_json dims = nlohmann::ordered_json::array();
  for (const Dim1Law& law : dist.dims) {
    nlohmann::ordered_json j;
    if (law.kind == LawKind::gaussian) {
      j["kind"] = "gaussian";
      j["mean"] = law.mean;
      j["std"] = law.stddev;
    } else {
      j["kind"] = "uniform";
      j["lo"] = law.lo;
      j["hi"] = law.hi;
    }
    dims.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["dims"] = std::move(dims);
  return root.dump();
}

FactorizedDistribution distribution_from_json(const std::string& json) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad distribution JSON: ") + e.what());
  }
  if (!root.contains("dims") || !root["dims"].is_array() || root["dims"].empty())
    throw Error(ErrorCode::parse_error, "distribution JSON needs a non-empty dims array");
  std::vector<Dim1Law> dims;
  for (const auto& j : root["dims"]) {
    std::string kind = j.value("kind", "");
    if (kind == "gaussian") {
      dims.push_back(Dim1Law::gaussian(j.at("mean").get<double>(), j.at("std").get<double>()));
    } else if (kind == "uniform") {
      dims.push_back(Dim1Law::uniform(j.at("lo").get<double>(), j.at("hi").get<double>()));
    } else {
      throw Error(ErrorCode::parse_error, "unknown law kind '" + kind + "'");
    }
  }
  return FactorizedDistribution(std::move(dims));
}

}  // namespace recsp

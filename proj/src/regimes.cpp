#include "irg/regimes.hpp"

#include <cmath>
#include <stdexcept>

#include "irg/sampler.hpp"

namespace irg {

namespace {

constexpr double kSnapTol = 1e-9;

double log_ratio(std::uint64_t n, double p) {
  const double np = static_cast<double>(n) * p;
  if (!(np > 1.0))
    throw std::domain_error("expansion factor needs np > 1, got np = " +
                            std::to_string(np));
  return std::log(static_cast<double>(n)) / std::log(np);
}

}  // namespace

PhiResult expansion_factor_detail(std::uint64_t n, double p) {
  PhiResult out;
  out.ratio = log_ratio(n, p);
  const double nearest = std::round(out.ratio);
  if (std::fabs(out.ratio - nearest) <= kSnapTol && nearest >= 1.0) {
    out.snapped = true;
    out.phi = static_cast<std::uint64_t>(nearest);
  } else {
    out.phi = static_cast<std::uint64_t>(std::ceil(out.ratio));
  }
  return out;
}

std::uint64_t expansion_factor(std::uint64_t n, double p) {
  return expansion_factor_detail(n, p).phi;
}

LatticeMargin lattice_margin(std::uint64_t n, double p) {
  const double ratio = log_ratio(n, p);
  LatticeMargin out;
  out.margin = std::fabs(ratio - std::round(ratio));
  const double threshold = 2.0 * std::log(std::log(static_cast<double>(n))) /
                           std::log(static_cast<double>(n) * p);
  out.ok = out.margin >= threshold;
  return out;
}

DiamMargins diam_margins(std::uint64_t n, double p, double omega) {
  const auto phi = expansion_factor(n, p);
  const double np = static_cast<double>(n) * p;
  const double logn = std::log(static_cast<double>(n));
  DiamMargins out;
  out.upper = std::pow(np, static_cast<double>(phi)) / static_cast<double>(n) -
              omega * logn;
  out.lower = std::pow(np, static_cast<double>(phi) - 1.0) / static_cast<double>(n) -
              logn / omega;
  return out;
}

RegimeReport classify(const DeltaBounds& delta, std::uint64_t phi,
                      WalkConditionVerdict condition) {
  if (delta.delta_l.is_finite() && !check_diff2(delta))
    throw std::invalid_argument("classify: delta bounds violate the two-sided relation");
  RegimeReport out;
  out.phi = phi;
  out.delta = delta;
  out.walk_condition = condition;
  const HopCount hphi(phi);
  if (hphi < delta.delta_u) {
    out.regime = Regime::kI;
    out.interval_lo = delta.delta_u;
    out.interval_hi = delta.delta_l;
  } else if (hphi < delta.delta_l) {
    out.regime = Regime::kII;
    out.interval_lo = condition == WalkConditionVerdict::kHolds ? HopCount(phi + 1) : hphi;
    out.interval_hi = delta.delta_l;
  } else {
    out.regime = Regime::kIII;
    switch (condition) {
      case WalkConditionVerdict::kHolds:
        out.interval_lo = out.interval_hi = HopCount(phi + 1);
        break;
      case WalkConditionVerdict::kFails:
        out.interval_lo = out.interval_hi = hphi;
        break;
      case WalkConditionVerdict::kUnknown:
        out.interval_lo = hphi;
        out.interval_hi = HopCount(phi + 1);
        break;
    }
  }
  return out;
}

RegimeReport predict(const Kernel& kernel, std::uint64_t n, double p,
                     const PredictOptions& options) {
  const PhiResult phi = expansion_factor_detail(n, p);
  const DeltaBounds delta = delta_bounds(kernel, options.delta);
  WalkConditionVerdict condition = WalkConditionVerdict::kUnknown;
  if (kernel.is_steplike() && kernel.block_count() <= 12)
    condition = walk_condition(kernel, phi.phi).verdict;

  RegimeReport report;
  if (delta.delta_l.is_infinite()) {
    // Outside the theorem's hypotheses; report the pieces that still make
    // sense and flag the rest.
    report.delta = delta;
    report.phi = phi.phi;
    report.walk_condition = condition;
    report.regime = Regime::kI;
    report.interval_lo = delta.delta_u;
    report.interval_hi = delta.delta_l;
    report.theorem_applicable = false;
    report.diagnostics.push_back(
        "delta bounds are infinite: kernel is reducible or unresolved at the probed "
        "resolutions");
  } else {
    report = classify(delta, phi.phi, condition);
  }
  report.ratio = phi.ratio;
  report.phi_snapped = phi.snapped;
  if (phi.snapped)
    report.diagnostics.push_back("log n / log np sits on an integer; phi snapped");

  const LatticeMargin margin = lattice_margin(n, p);
  report.lattice_margin = margin.margin;
  report.margin_ok = margin.ok;
  if (!margin.ok)
    report.diagnostics.push_back(
        "non-lattice margin too small at this n: one-point concentration not "
        "guaranteed");

  report.omega = options.omega ? *options.omega : default_omega(n);
  const DiamMargins dm = diam_margins(n, p, report.omega);
  report.diam_margin_upper = dm.upper;
  report.diam_margin_lower = dm.lower;
  if (!(dm.upper > 0))
    report.diagnostics.push_back("upper concentration margin not positive at this n");
  if (!(dm.lower < 0))
    report.diagnostics.push_back("lower concentration margin not negative at this n");

  if (!kernel.is_steplike() && isolation(kernel) <= 0) {
    report.theorem_applicable = false;
    report.diagnostics.push_back("isolation parameter is 0: expected degrees degenerate");
  }
  return report;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kI: return "i";
    case Regime::kII: return "ii";
    case Regime::kIII: return "iii";
  }
  return "?";
}

const char* walk_condition_name(WalkConditionVerdict v) {
  switch (v) {
    case WalkConditionVerdict::kHolds: return "holds";
    case WalkConditionVerdict::kFails: return "fails";
    case WalkConditionVerdict::kUnknown: return "unknown";
  }
  return "?";
}

}  // namespace irg

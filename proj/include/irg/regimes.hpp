#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irg/hops.hpp"
#include "irg/partition.hpp"

namespace irg {

/// ceil(log n / log np), the dense-graph diameter benchmark. Ratios within
/// 1e-9 of an integer snap to it first (and are flagged in reports).
std::uint64_t expansion_factor(std::uint64_t n, double p);

struct PhiResult {
  std::uint64_t phi = 0;
  double ratio = 0;
  bool snapped = false;
};

PhiResult expansion_factor_detail(std::uint64_t n, double p);

struct LatticeMargin {
  double margin = 0;  // distance of log n / log np to the nearest integer
  bool ok = false;    // margin >= 2 loglog n / log np
};

LatticeMargin lattice_margin(std::uint64_t n, double p);

struct DiamMargins {
  double upper = 0;  // (np)^phi / n - omega * log n
  double lower = 0;  // (np)^(phi-1) / n - log n / omega
};

DiamMargins diam_margins(std::uint64_t n, double p, double omega);

enum class Regime { kI, kII, kIII };

struct RegimeReport {
  std::uint64_t phi = 0;
  double ratio = 0;
  bool phi_snapped = false;
  double lattice_margin = 0;
  bool margin_ok = false;
  double diam_margin_upper = 0;
  double diam_margin_lower = 0;
  double omega = 0;
  DeltaBounds delta;
  Regime regime = Regime::kI;
  HopCount interval_lo;
  HopCount interval_hi;
  WalkConditionVerdict walk_condition = WalkConditionVerdict::kUnknown;
  bool theorem_applicable = true;
  std::vector<std::string> diagnostics;
};

/// Regime (by phi against the two extremal diameters) and the predicted
/// diameter interval, given consistent delta bounds.
RegimeReport classify(const DeltaBounds& delta, std::uint64_t phi,
                      WalkConditionVerdict condition);

struct PredictOptions {
  std::optional<double> omega;
  DeltaOptions delta;
};

/// Full report: delta bounds, expansion factor, margins, walk condition,
/// regime and predicted interval, with diagnostics for inputs outside the
/// concentration hypotheses.
RegimeReport predict(const Kernel& kernel, std::uint64_t n, double p,
                     const PredictOptions& options = {});

const char* regime_name(Regime r);
const char* walk_condition_name(WalkConditionVerdict v);

}  // namespace irg

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "irg/expression.hpp"

namespace irg {

/// Probability density on [0, length] that is constant on each piece.
/// breakpoints has one more entry than values, starts at 0 and ends at
/// length; the density must integrate to 1 and be positive everywhere.
struct PiecewiseDensity {
  std::vector<double> breakpoints;
  std::vector<double> values;

  static PiecewiseDensity uniform(double length);
  double mass(double lo, double hi) const;
  double value_at(double x) const;
};

/// Type space: either finitely many types with point masses, or a bounded
/// real interval with a piecewise-constant density. Immutable.
class TypeSpace {
 public:
  static TypeSpace finite(std::vector<double> weights);
  static TypeSpace interval(double length, PiecewiseDensity density);
  static TypeSpace interval_uniform(double length);

  bool is_finite() const { return std::holds_alternative<Finite>(v_); }
  bool is_interval() const { return !is_finite(); }

  // Finite spaces.
  std::size_t type_count() const;
  const std::vector<double>& weights() const;

  // Interval spaces.
  double length() const;
  const PiecewiseDensity& density() const;

  /// True when the point is a valid type: an integral type index for
  /// finite spaces, a position in [0, length] for interval spaces.
  bool contains(double point) const;

  bool same_as(const TypeSpace& other) const;

 private:
  struct Finite {
    std::vector<double> weights;
  };
  struct Interval {
    double length;
    PiecewiseDensity density;
  };
  explicit TypeSpace(std::variant<Finite, Interval> v) : v_(std::move(v)) {}
  std::variant<Finite, Interval> v_;
};

struct IntervalPiece {
  double lo;
  double hi;
};

/// A positive-measure subset of the type space: a set of type indices for
/// finite spaces, a finite union of subintervals for interval spaces.
class Cell {
 public:
  static Cell of_blocks(std::vector<std::uint32_t> blocks);
  static Cell of_interval(double lo, double hi);
  static Cell of_pieces(std::vector<IntervalPiece> pieces);

  bool is_block_kind() const { return block_kind_; }
  const std::vector<std::uint32_t>& blocks() const { return blocks_; }
  const std::vector<IntervalPiece>& pieces() const { return pieces_; }

  double width() const;  // total length of the pieces (interval cells)
  bool contains(double point) const;

  /// Containment up to measure zero, with 1e-12 slack at endpoints.
  bool subset_of(const Cell& other) const;
  std::optional<Cell> intersect(const Cell& other) const;

 private:
  bool block_kind_ = false;
  std::vector<std::uint32_t> blocks_;
  std::vector<IntervalPiece> pieces_;
};

/// Curve along which a kernel is allowed to be discontinuous. Lattice
/// estimates of essential bounds skip sample pairs within one lattice step
/// of a declared curve, since the curve itself has measure zero.
struct DiscontinuityCurve {
  enum class Kind { kDiagDiff, kXLine, kYLine };
  Kind kind;
  double c;
};

/// Essential lower/upper bounds of a kernel over a pair of cells.
/// exact is true only when both values are mathematically exact (step and
/// constant kernels); lattice estimates report exact = false.
struct CellBounds {
  double lower = 0;
  double upper = 0;
  bool exact = false;
};

struct Irreducibility {
  bool irreducible = false;
  bool exact = true;  // false when certified only on the default grid
};

/// Symmetric kernel on a type space with values in [0, 1].
///
/// Variants: a constant; a step kernel (a symmetric matrix over blocks,
/// where blocks are the types of a finite space or the cells of a
/// breakpoint grid on an interval space); an analytic expression in (x, y)
/// evaluated on the canonical order x <= y and mirrored; and the banded
/// overlap kernel on [0, k+2] whose partition diameters differ by exactly 2.
class Kernel {
 public:
  static Kernel constant(TypeSpace space, double c);
  static Kernel step(TypeSpace space, std::vector<std::vector<double>> matrix,
                     std::vector<double> block_breakpoints = {});
  static Kernel analytic(TypeSpace space, const std::string& expression, double lo,
                         double hi, std::vector<DiscontinuityCurve> discontinuities = {});
  static Kernel overlap(int k, double epsilon);

  const TypeSpace& space() const { return space_; }
  const std::string& id() const { return id_; }

  double eval(double x, double y) const;

  /// Step and constant kernels have an exact block structure: the kernel is
  /// constant on block pairs. Everything block-indexed below requires this.
  bool is_steplike() const;
  std::size_t block_count() const;
  double block_measure(std::size_t b) const;
  std::size_t block_of(double point) const;
  double block_value(std::size_t a, std::size_t b) const;

  bool is_overlap() const { return std::holds_alternative<Overlap>(v_); }
  int overlap_k() const;
  double overlap_epsilon() const;
  bool is_constant() const { return std::holds_alternative<Constant>(v_); }
  bool is_analytic_expr() const { return std::holds_alternative<Analytic>(v_); }
  const std::string& expression_text() const;
  std::pair<double, double> declared_range() const;
  const std::vector<DiscontinuityCurve>& discontinuities() const;
  const std::vector<double>& step_breakpoints() const;

  /// Sound upper bound for K over a rectangle of positions (interval
  /// spaces); drives rejection sampling. Exact for constant, step and
  /// overlap kernels, the declared range top for analytic expressions.
  double sup_bound_on_rect(double xlo, double xhi, double ylo, double yhi) const;

 private:
  struct Constant {
    double c;
  };
  struct Step {
    std::vector<std::vector<double>> w;
    std::vector<double> breakpoints;  // interval spaces only
  };
  struct Analytic {
    Expression expr;
    double lo, hi;
    std::vector<DiscontinuityCurve> disc;
  };
  struct Overlap {
    int k;
    double eps;
    std::vector<DiscontinuityCurve> disc;
  };

  Kernel(TypeSpace space, std::variant<Constant, Step, Analytic, Overlap> v,
         std::string id);
  void check_point(double p) const;

  TypeSpace space_;
  std::variant<Constant, Step, Analytic, Overlap> v_;
  std::string id_;
};

/// Essential infimum of K over cellA x cellB (exact for step-structured
/// kernels, a lattice estimate otherwise).
double kernel_inf(const Kernel& kernel, const Cell& a, const Cell& b);

/// Essential supremum, same conventions as kernel_inf.
double kernel_sup(const Kernel& kernel, const Cell& a, const Cell& b);

/// Both bounds in one scan, with the exactness flag.
CellBounds cell_bounds(const Kernel& kernel, const Cell& a, const Cell& b);

/// Mean kernel value against the measure: integral of K(x, .) d(mu).
/// Exact weighted row sums for step-structured kernels, adaptive Simpson
/// quadrature with absolute tolerance 1e-9 otherwise.
double lambda_at(const Kernel& kernel, double x);

/// Essential infimum of lambda over the space; the kernel's isolation
/// parameter. Lattice minimum (256 samples) for non-step kernels.
double isolation(const Kernel& kernel);

/// Whether no positive-measure set is separated from its complement by a
/// zero kernel. Exact on block structure for step-structured kernels;
/// grid-certified (64 cells) otherwise.
Irreducibility is_irreducible(const Kernel& kernel);

/// Number of lattice sample points per cell axis used by the estimates
/// above: resolution h = cell width / kLatticePointsPerCell.
inline constexpr int kLatticePointsPerCell = 64;

// Kernel definition files (JSON, schema irg-kernel/1). Loading a saved
// kernel reproduces it exactly.
Kernel load_kernel(const std::string& path);
Kernel kernel_from_json_text(const std::string& text);
std::string kernel_to_json_text(const Kernel& kernel);
void save_kernel(const Kernel& kernel, const std::string& path);

}  // namespace irg

#include "irg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace irg {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kEdgeTol = 1e-12;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseDensity / TypeSpace

PiecewiseDensity PiecewiseDensity::uniform(double length) {
  return PiecewiseDensity{{0.0, length}, {1.0 / length}};
}

double PiecewiseDensity::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double a = std::max(lo, breakpoints[i]);
    const double b = std::min(hi, breakpoints[i + 1]);
    if (b > a) m += (b - a) * values[i];
  }
  return m;
}

double PiecewiseDensity::value_at(double x) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (x < breakpoints[i + 1] || i + 1 == values.size()) return values[i];
  }
  return values.back();
}

TypeSpace TypeSpace::finite(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("TypeSpace: no types");
  double sum = 0;
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("TypeSpace: weights must be positive");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kMassTol)
    throw std::invalid_argument("TypeSpace: weights sum to " + format_double(sum) +
                                ", expected 1");
  return TypeSpace(Finite{std::move(weights)});
}

TypeSpace TypeSpace::interval(double length, PiecewiseDensity density) {
  if (!(length > 0)) throw std::invalid_argument("TypeSpace: length must be positive");
  if (density.breakpoints.size() != density.values.size() + 1 || density.values.empty())
    throw std::invalid_argument("TypeSpace: malformed density");
  if (std::fabs(density.breakpoints.front()) > kEdgeTol ||
      std::fabs(density.breakpoints.back() - length) > kEdgeTol)
    throw std::invalid_argument("TypeSpace: density must cover [0, length]");
  for (std::size_t i = 0; i + 1 < density.breakpoints.size(); ++i) {
    if (!(density.breakpoints[i] < density.breakpoints[i + 1]))
      throw std::invalid_argument("TypeSpace: density breakpoints not increasing");
  }
  for (double v : density.values) {
    if (!(v > 0)) throw std::invalid_argument("TypeSpace: density must be positive");
  }
  const double mass = density.mass(0.0, length);
  if (std::fabs(mass - 1.0) > kMassTol)
    throw std::invalid_argument("TypeSpace: density integrates to " +
                                format_double(mass) + ", expected 1");
  return TypeSpace(Interval{length, std::move(density)});
}

TypeSpace TypeSpace::interval_uniform(double length) {
  return interval(length, PiecewiseDensity::uniform(length));
}

std::size_t TypeSpace::type_count() const {
  return std::get<Finite>(v_).weights.size();
}

const std::vector<double>& TypeSpace::weights() const {
  return std::get<Finite>(v_).weights;
}

double TypeSpace::length() const { return std::get<Interval>(v_).length; }

const PiecewiseDensity& TypeSpace::density() const {
  return std::get<Interval>(v_).density;
}

bool TypeSpace::contains(double point) const {
  if (is_finite()) {
    return point >= 0 && point < static_cast<double>(type_count()) &&
           point == std::floor(point);
  }
  return point >= 0 && point <= length();
}

bool TypeSpace::same_as(const TypeSpace& other) const {
  if (is_finite() != other.is_finite()) return false;
  if (is_finite()) return weights() == other.weights();
  return length() == other.length() &&
         density().breakpoints == other.density().breakpoints &&
         density().values == other.density().values;
}

// ---------------------------------------------------------------------------
// Cell

Cell Cell::of_blocks(std::vector<std::uint32_t> blocks) {
  if (blocks.empty()) throw std::invalid_argument("Cell: empty block set");
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  Cell c;
  c.block_kind_ = true;
  c.blocks_ = std::move(blocks);
  return c;
}

Cell Cell::of_interval(double lo, double hi) {
  return of_pieces({IntervalPiece{lo, hi}});
}

Cell Cell::of_pieces(std::vector<IntervalPiece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("Cell: empty piece list");
  std::sort(pieces.begin(), pieces.end(),
            [](const IntervalPiece& a, const IntervalPiece& b) { return a.lo < b.lo; });
  for (const auto& p : pieces) {
    if (!(p.hi > p.lo)) throw std::invalid_argument("Cell: piece has no measure");
  }
  // Merge pieces that touch; overlapping interiors are a caller error.
  std::vector<IntervalPiece> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && p.lo < merged.back().hi - kEdgeTol)
      throw std::invalid_argument("Cell: overlapping pieces");
    if (!merged.empty() && p.lo <= merged.back().hi + kEdgeTol) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  Cell c;
  c.block_kind_ = false;
  c.pieces_ = std::move(merged);
  return c;
}

double Cell::width() const {
  double w = 0;
  for (const auto& p : pieces_) w += p.hi - p.lo;
  return w;
}

bool Cell::contains(double point) const {
  if (block_kind_) {
    const auto b = static_cast<std::uint32_t>(point);
    return std::binary_search(blocks_.begin(), blocks_.end(), b);
  }
  for (const auto& p : pieces_) {
    if (point >= p.lo && point < p.hi) return true;
  }
  // The very last endpoint belongs to the last piece.
  return !pieces_.empty() && point == pieces_.back().hi;
}

bool Cell::subset_of(const Cell& other) const {
  if (block_kind_ != other.block_kind_) return false;
  if (block_kind_) {
    return std::includes(other.blocks_.begin(), other.blocks_.end(), blocks_.begin(),
                         blocks_.end());
  }
  for (const auto& p : pieces_) {
    double covered = p.lo;
    for (const auto& q : other.pieces_) {
      if (q.lo <= covered + kEdgeTol && q.hi > covered) covered = std::max(covered, q.hi);
    }
    if (covered < p.hi - kEdgeTol) return false;
  }
  return true;
}

std::optional<Cell> Cell::intersect(const Cell& other) const {
  if (block_kind_ != other.block_kind_)
    throw std::invalid_argument("Cell: mixed kinds in intersection");
  if (block_kind_) {
    std::vector<std::uint32_t> common;
    std::set_intersection(blocks_.begin(), blocks_.end(), other.blocks_.begin(),
                          other.blocks_.end(), std::back_inserter(common));
    if (common.empty()) return std::nullopt;
    return Cell::of_blocks(std::move(common));
  }
  std::vector<IntervalPiece> out;
  for (const auto& p : pieces_) {
    for (const auto& q : other.pieces_) {
      const double lo = std::max(p.lo, q.lo);
      const double hi = std::min(p.hi, q.hi);
      if (hi - lo > kEdgeTol) out.push_back({lo, hi});
    }
  }
  if (out.empty()) return std::nullopt;
  return Cell::of_pieces(std::move(out));
}

// ---------------------------------------------------------------------------
// Kernel construction

Kernel::Kernel(TypeSpace space, std::variant<Constant, Step, Analytic, Overlap> v,
               std::string id)
    : space_(std::move(space)), v_(std::move(v)), id_(std::move(id)) {}

Kernel Kernel::constant(TypeSpace space, double c) {
  if (!(c >= 0 && c <= 1))
    throw std::invalid_argument("Kernel: constant value outside [0, 1]");
  std::string id = "constant(c=" + format_double(c) + ")";
  return Kernel(std::move(space), Constant{c}, std::move(id));
}

Kernel Kernel::step(TypeSpace space, std::vector<std::vector<double>> matrix,
                    std::vector<double> block_breakpoints) {
  const std::size_t m = matrix.size();
  if (m == 0) throw std::invalid_argument("Kernel: empty step matrix");
  for (const auto& row : matrix) {
    if (row.size() != m) throw std::invalid_argument("Kernel: step matrix not square");
    for (double v : row) {
      if (!(v >= 0 && v <= 1))
        throw std::invalid_argument("Kernel: step entry outside [0, 1]");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (std::fabs(matrix[i][j] - matrix[j][i]) > kEdgeTol)
        throw std::invalid_argument("Kernel: step matrix not symmetric");
      matrix[j][i] = matrix[i][j];
    }
  }
  if (space.is_finite()) {
    if (!block_breakpoints.empty())
      throw std::invalid_argument("Kernel: breakpoints are for interval spaces");
    if (space.type_count() != m)
      throw std::invalid_argument("Kernel: matrix size does not match type count");
  } else {
    if (block_breakpoints.size() != m + 1)
      throw std::invalid_argument("Kernel: need m+1 block breakpoints");
    if (std::fabs(block_breakpoints.front()) > kEdgeTol ||
        std::fabs(block_breakpoints.back() - space.length()) > kEdgeTol)
      throw std::invalid_argument("Kernel: block breakpoints must cover the interval");
    for (std::size_t i = 0; i + 1 < block_breakpoints.size(); ++i) {
      if (!(block_breakpoints[i] < block_breakpoints[i + 1]))
        throw std::invalid_argument("Kernel: block breakpoints not increasing");
    }
  }
  std::string id = "step(m=" + std::to_string(m) + ")";
  return Kernel(std::move(space), Step{std::move(matrix), std::move(block_breakpoints)},
                std::move(id));
}

Kernel Kernel::analytic(TypeSpace space, const std::string& expression, double lo,
                        double hi, std::vector<DiscontinuityCurve> discontinuities) {
  if (!space.is_interval())
    throw std::invalid_argument("Kernel: analytic kernels need an interval space");
  if (!(lo >= 0 && hi <= 1 && lo <= hi))
    throw std::invalid_argument("Kernel: declared range must sit inside [0, 1]");
  Expression expr = Expression::parse(expression);
  // Spot-check the declared range on a coarse lattice.
  const double L = space.length();
  for (int i = 0; i < 48; ++i) {
    for (int j = i; j < 48; ++j) {
      const double x = (i + 0.5) * L / 48;
      const double y = (j + 0.5) * L / 48;
      const double v = expr.eval(std::min(x, y), std::max(x, y));
      if (!(v >= lo - 1e-9 && v <= hi + 1e-9))
        throw std::invalid_argument("Kernel: expression leaves the declared range at (" +
                                    format_double(x) + ", " + format_double(y) + ")");
    }
  }
  std::string id = "analytic(" + expression + ")";
  return Kernel(std::move(space),
                Analytic{std::move(expr), lo, hi, std::move(discontinuities)},
                std::move(id));
}

Kernel Kernel::overlap(int k, double epsilon) {
  if (k < 1) throw std::invalid_argument("Kernel: overlap needs k >= 1");
  const double eps_max = 2.0 / (k + 2);
  // Consecutive bands must overlap: (k+2)(1-eps)/k > 1.
  if (!(epsilon > 0 && epsilon < eps_max))
    throw std::invalid_argument("Kernel: overlap epsilon must lie in (0, " +
                                format_double(eps_max) + ")");
  TypeSpace space = TypeSpace::interval_uniform(static_cast<double>(k) + 2);
  std::vector<DiscontinuityCurve> disc{{DiscontinuityCurve::Kind::kDiagDiff, 1.0}};
  std::string id = "overlap(k=" + std::to_string(k) + ",eps=" + format_double(epsilon) + ")";
  return Kernel(std::move(space), Overlap{k, epsilon, std::move(disc)}, std::move(id));
}

void Kernel::check_point(double p) const {
  if (!space_.contains(p))
    throw std::domain_error("Kernel: point " + format_double(p) +
                            " outside the type space");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double overlap_eval(int k, double eps, double a, double b) {
  // Canonical order a <= b. Inside the diagonal band the value is 1; the
  // banded terms only contribute strictly beyond it.
  if (b - a <= 1.0) return 1.0;
  const double span = static_cast<double>(k) + 2.0;
  double s = 0.0;
  for (int i = 1; i <= k; ++i) {
    const double ai = (i - 1) * span * (1.0 - eps) / k;
    const double bi = i * span / k;
    if (a >= ai && b <= bi) s += (a - ai) * (bi - b);
  }
  return s;
}

}  // namespace

double Kernel::eval(double x, double y) const {
  check_point(x);
  check_point(y);
  const double a = std::min(x, y);
  const double b = std::max(x, y);
  if (const auto* c = std::get_if<Constant>(&v_)) return c->c;
  if (const auto* s = std::get_if<Step>(&v_)) {
    return s->w[block_of(a)][block_of(b)];
  }
  if (const auto* an = std::get_if<Analytic>(&v_)) {
    return an->expr.eval(a, b);
  }
  const auto& ov = std::get<Overlap>(v_);
  return overlap_eval(ov.k, ov.eps, a, b);
}

bool Kernel::is_steplike() const {
  return std::holds_alternative<Constant>(v_) || std::holds_alternative<Step>(v_);
}

std::size_t Kernel::block_count() const {
  if (std::holds_alternative<Constant>(v_)) {
    return space_.is_finite() ? space_.type_count() : 1;
  }
  if (const auto* s = std::get_if<Step>(&v_)) return s->w.size();
  throw std::logic_error("Kernel: no block structure");
}

double Kernel::block_measure(std::size_t b) const {
  if (std::holds_alternative<Constant>(v_) && space_.is_interval()) return 1.0;
  if (space_.is_finite()) return space_.weights().at(b);
  const auto& s = std::get<Step>(v_);
  return space_.density().mass(s.breakpoints[b], s.breakpoints[b + 1]);
}

std::size_t Kernel::block_of(double point) const {
  if (space_.is_finite()) return static_cast<std::size_t>(point);
  if (std::holds_alternative<Constant>(v_)) return 0;
  const auto& bp = std::get<Step>(v_).breakpoints;
  const auto it = std::upper_bound(bp.begin(), bp.end(), point);
  const std::size_t idx = static_cast<std::size_t>(it - bp.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, bp.size() - 2);
}

double Kernel::block_value(std::size_t a, std::size_t b) const {
  if (const auto* c = std::get_if<Constant>(&v_)) return c->c;
  return std::get<Step>(v_).w.at(a).at(b);
}

int Kernel::overlap_k() const { return std::get<Overlap>(v_).k; }
double Kernel::overlap_epsilon() const { return std::get<Overlap>(v_).eps; }

const std::string& Kernel::expression_text() const {
  return std::get<Analytic>(v_).expr.text();
}

std::pair<double, double> Kernel::declared_range() const {
  const auto& a = std::get<Analytic>(v_);
  return {a.lo, a.hi};
}

const std::vector<DiscontinuityCurve>& Kernel::discontinuities() const {
  static const std::vector<DiscontinuityCurve> kNone;
  if (const auto* a = std::get_if<Analytic>(&v_)) return a->disc;
  if (const auto* o = std::get_if<Overlap>(&v_)) return o->disc;
  return kNone;
}

const std::vector<double>& Kernel::step_breakpoints() const {
  return std::get<Step>(v_).breakpoints;
}

double Kernel::sup_bound_on_rect(double xlo, double xhi, double ylo, double yhi) const {
  if (const auto* c = std::get_if<Constant>(&v_)) return c->c;
  if (const auto* s = std::get_if<Step>(&v_)) {
    double best = 0;
    const std::size_t a0 = block_of(xlo), a1 = block_of(std::nextafter(xhi, xlo));
    const std::size_t b0 = block_of(ylo), b1 = block_of(std::nextafter(yhi, ylo));
    for (std::size_t a = a0; a <= a1; ++a)
      for (std::size_t b = b0; b <= b1; ++b) best = std::max(best, s->w[a][b]);
    return best;
  }
  if (const auto* an = std::get_if<Analytic>(&v_)) return an->hi;
  const auto& ov = std::get<Overlap>(v_);
  // Minimum separation between the two position ranges.
  const double gap = std::max({0.0, ylo - xhi, xlo - yhi});
  if (gap <= 1.0) return 1.0;
  // Orient so the y range sits to the right.
  double alo = xlo, ahi = xhi, blo = ylo, bhi = yhi;
  if (blo < alo) {
    std::swap(alo, blo);
    std::swap(ahi, bhi);
  }
  const double span = ov.k + 2.0;
  double bound = 0;
  for (int i = 1; i <= ov.k; ++i) {
    const double ai = (i - 1) * span * (1.0 - ov.eps) / ov.k;
    const double bi = i * span / ov.k;
    if (alo > bi || bhi < ai) continue;
    bound += std::max(0.0, std::min(ahi, bi) - ai) * std::max(0.0, bi - std::max(blo, ai));
  }
  return std::min(1.0, bound);
}

// ---------------------------------------------------------------------------
// Cell bounds

namespace {

void require_valid_cell(const TypeSpace& space, const Cell& cell, const char* which) {
  if (space.is_finite() != cell.is_block_kind())
    throw std::invalid_argument(std::string("cell ") + which +
                                " does not match the space kind");
  if (cell.is_block_kind()) {
    for (auto b : cell.blocks()) {
      if (b >= space.type_count())
        throw std::invalid_argument(std::string("cell ") + which +
                                    ": block index out of range");
    }
  } else {
    double w = 0;
    for (const auto& p : cell.pieces()) {
      if (p.lo < -kEdgeTol || p.hi > space.length() + kEdgeTol)
        throw std::invalid_argument(std::string("cell ") + which +
                                    ": piece outside the interval");
      w += p.hi - p.lo;
    }
    if (!(w > 0))
      throw std::invalid_argument(std::string("cell ") + which + ": zero measure");
  }
}

/// Lattice over an interval cell: points anchored at each piece's lower
/// breakpoint with spacing h = cell width / kLatticePointsPerCell, upper
/// edges excluded. Half-open pieces make the anchored regular lattice the
/// natural sample set.
std::vector<double> cell_lattice(const Cell& cell, double* h_out) {
  const double h = cell.width() / kLatticePointsPerCell;
  std::vector<double> pts;
  pts.reserve(kLatticePointsPerCell + cell.pieces().size());
  for (const auto& p : cell.pieces()) {
    const auto count =
        std::max<std::size_t>(1, static_cast<std::size_t>((p.hi - p.lo) / h + 1e-9));
    for (std::size_t t = 0; t < count; ++t) {
      const double x = p.lo + static_cast<double>(t) * h;
      if (x < p.hi) pts.push_back(x);
    }
    if (pts.empty() || pts.back() < p.lo) pts.push_back(p.lo);
  }
  if (h_out) *h_out = h;
  return pts;
}

bool near_discontinuity(const std::vector<DiscontinuityCurve>& curves, double a, double b,
                        double h) {
  for (const auto& c : curves) {
    switch (c.kind) {
      case DiscontinuityCurve::Kind::kDiagDiff:
        if (std::fabs((b - a) - c.c) <= h) return true;
        break;
      case DiscontinuityCurve::Kind::kXLine:
      case DiscontinuityCurve::Kind::kYLine:
        if (std::fabs(a - c.c) <= h || std::fabs(b - c.c) <= h) return true;
        break;
    }
  }
  return false;
}

std::vector<std::uint32_t> touched_blocks(const Kernel& kernel, const Cell& cell) {
  if (cell.is_block_kind()) return cell.blocks();
  std::vector<std::uint32_t> out;
  const std::size_t m = kernel.block_count();
  if (m == 1) return {0};
  const auto& bp = kernel.step_breakpoints();
  for (std::size_t b = 0; b < m; ++b) {
    for (const auto& p : cell.pieces()) {
      const double lo = std::max(p.lo, bp[b]);
      const double hi = std::min(p.hi, bp[b + 1]);
      if (hi - lo > kEdgeTol) {
        out.push_back(static_cast<std::uint32_t>(b));
        break;
      }
    }
  }
  return out;
}

}  // namespace

CellBounds cell_bounds(const Kernel& kernel, const Cell& a, const Cell& b) {
  require_valid_cell(kernel.space(), a, "A");
  require_valid_cell(kernel.space(), b, "B");

  if (kernel.is_steplike()) {
    const auto ba = touched_blocks(kernel, a);
    const auto bb = touched_blocks(kernel, b);
    CellBounds r{1.0, 0.0, true};
    for (auto i : ba) {
      for (auto j : bb) {
        const double v = kernel.block_value(i, j);
        r.lower = std::min(r.lower, v);
        r.upper = std::max(r.upper, v);
      }
    }
    return r;
  }

  double ha = 0, hb = 0;
  const auto xs = cell_lattice(a, &ha);
  const auto ys = cell_lattice(b, &hb);
  const double h_excl = std::max(ha, hb);
  const auto& curves = kernel.discontinuities();

  CellBounds r{1.0, 0.0, false};
  bool any = false;
  for (double x : xs) {
    for (double y : ys) {
      const double lo = std::min(x, y);
      const double hi = std::max(x, y);
      if (!curves.empty() && near_discontinuity(curves, lo, hi, h_excl)) continue;
      const double v = kernel.eval(lo, hi);
      r.lower = std::min(r.lower, v);
      r.upper = std::max(r.upper, v);
      any = true;
    }
  }
  if (!any) {
    // Every pair sat next to a declared curve; fall back to the full scan.
    for (double x : xs) {
      for (double y : ys) {
        const double v = kernel.eval(std::min(x, y), std::max(x, y));
        r.lower = std::min(r.lower, v);
        r.upper = std::max(r.upper, v);
      }
    }
  }
  return r;
}

double kernel_inf(const Kernel& kernel, const Cell& a, const Cell& b) {
  return cell_bounds(kernel, a, b).lower;
}

double kernel_sup(const Kernel& kernel, const Cell& a, const Cell& b) {
  return cell_bounds(kernel, a, b).upper;
}

// ---------------------------------------------------------------------------
// lambda / isolation / irreducibility

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b - a <= 0) return 0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double lambda_at(const Kernel& kernel, double x) {
  if (!kernel.space().contains(x))
    throw std::domain_error("lambda_at: point outside the type space");
  if (kernel.is_steplike()) {
    const std::size_t bx = kernel.block_of(x);
    double sum = 0;
    for (std::size_t j = 0; j < kernel.block_count(); ++j)
      sum += kernel.block_measure(j) * kernel.block_value(bx, j);
    return sum;
  }
  const auto& space = kernel.space();
  const double L = space.length();
  // Integrate between structure points: density breakpoints plus the
  // kernel's own kinks, so the quadrature only ever sees smooth spans.
  std::vector<double> cuts = space.density().breakpoints;
  cuts.push_back(x - 1.0);
  cuts.push_back(x + 1.0);
  if (kernel.is_overlap()) {
    const int k = kernel.overlap_k();
    const double span = k + 2.0;
    for (int i = 1; i <= k; ++i) {
      cuts.push_back((i - 1) * span * (1.0 - kernel.overlap_epsilon()) / k);
      cuts.push_back(i * span / k);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [L](double c) { return c < 0 || c > L; }),
             cuts.end());
  if (cuts.empty() || cuts.front() > 0) cuts.insert(cuts.begin(), 0.0);
  if (cuts.back() < L) cuts.push_back(L);

  const auto f = [&](double y) {
    return kernel.eval(x, y) * space.density().value_at(std::min(y, L));
  };
  const double tol = 1e-9 / static_cast<double>(cuts.size());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] > 1e-15) total += integrate(f, cuts[i], cuts[i + 1], tol);
  }
  return total;
}

double isolation(const Kernel& kernel) {
  if (kernel.is_steplike()) {
    double best = 1.0;
    for (std::size_t i = 0; i < kernel.block_count(); ++i) {
      double sum = 0;
      for (std::size_t j = 0; j < kernel.block_count(); ++j)
        sum += kernel.block_measure(j) * kernel.block_value(i, j);
      best = std::min(best, sum);
    }
    return best;
  }
  const double L = kernel.space().length();
  constexpr int kSamples = 256;
  double best = 1.0;
  for (int t = 0; t < kSamples; ++t) {
    best = std::min(best, lambda_at(kernel, t * L / kSamples));
  }
  return best;
}

Irreducibility is_irreducible(const Kernel& kernel) {
  std::size_t m;
  std::vector<std::vector<char>> adj;
  bool exact = true;
  if (kernel.is_steplike()) {
    m = kernel.block_count();
    adj.assign(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) adj[i][j] = kernel.block_value(i, j) > 0;
  } else {
    exact = false;
    m = 64;
    const double L = kernel.space().length();
    std::vector<Cell> cells;
    cells.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
      cells.push_back(Cell::of_interval(i * L / m, (i + 1) * L / m));
    adj.assign(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j)
        adj[i][j] = adj[j][i] = kernel_sup(kernel, cells[i], cells[j]) > 0;
  }
  // Connectivity over positive entries; isolated-in-the-kernel blocks with a
  // positive diagonal still need a cross edge to count as connected.
  std::vector<char> seen(m, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < m; ++v) {
      if (adj[u][v] && !seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  bool connected = reached == m;
  if (m == 1) connected = adj[0][0] != 0;  // the zero kernel is reducible
  return Irreducibility{connected, exact};
}

// ---------------------------------------------------------------------------
// Kernel files

namespace {

using nlohmann::json;

json space_to_json(const TypeSpace& space) {
  if (space.is_finite()) return json{{"kind", "finite"}, {"weights", space.weights()}};
  return json{{"kind", "interval"},
              {"length", space.length()},
              {"density",
               {{"breakpoints", space.density().breakpoints},
                {"values", space.density().values}}}};
}

TypeSpace space_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite")
    return TypeSpace::finite(j.at("weights").get<std::vector<double>>());
  if (kind == "interval") {
    const double length = j.at("length").get<double>();
    if (!j.contains("density")) return TypeSpace::interval_uniform(length);
    PiecewiseDensity d{j.at("density").at("breakpoints").get<std::vector<double>>(),
                       j.at("density").at("values").get<std::vector<double>>()};
    return TypeSpace::interval(length, std::move(d));
  }
  throw std::invalid_argument("kernel file: unknown space kind '" + kind + "'");
}

std::vector<std::vector<double>> mirror_matrix(std::vector<std::vector<double>> rows) {
  const std::size_t m = rows.size();
  bool upper_triangle = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m - i) upper_triangle = false;
  }
  if (!upper_triangle) return rows;
  std::vector<std::vector<double>> full(m, std::vector<double>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      full[i][i + j] = full[i + j][i] = rows[i][j];
  return full;
}

const char* curve_kind_name(DiscontinuityCurve::Kind k) {
  switch (k) {
    case DiscontinuityCurve::Kind::kDiagDiff: return "diag";
    case DiscontinuityCurve::Kind::kXLine: return "x";
    case DiscontinuityCurve::Kind::kYLine: return "y";
  }
  return "diag";
}

DiscontinuityCurve::Kind curve_kind_from_name(const std::string& s) {
  if (s == "diag") return DiscontinuityCurve::Kind::kDiagDiff;
  if (s == "x") return DiscontinuityCurve::Kind::kXLine;
  if (s == "y") return DiscontinuityCurve::Kind::kYLine;
  throw std::invalid_argument("kernel file: unknown discontinuity kind '" + s + "'");
}

}  // namespace

Kernel kernel_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  const json& kj = j.at("kernel");
  const std::string kind = kj.at("kind").get<std::string>();
  if (kind == "overlap") {
    return Kernel::overlap(kj.at("k").get<int>(), kj.at("epsilon").get<double>());
  }
  TypeSpace space = space_from_json(j.at("space"));
  if (kind == "constant") {
    return Kernel::constant(std::move(space), kj.at("value").get<double>());
  }
  if (kind == "step") {
    auto matrix = mirror_matrix(kj.at("matrix").get<std::vector<std::vector<double>>>());
    std::vector<double> bp;
    if (kj.contains("breakpoints")) bp = kj.at("breakpoints").get<std::vector<double>>();
    return Kernel::step(std::move(space), std::move(matrix), std::move(bp));
  }
  if (kind == "analytic") {
    const auto range = kj.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw std::invalid_argument("kernel file: range needs 2 values");
    std::vector<DiscontinuityCurve> disc;
    if (kj.contains("discontinuities")) {
      for (const auto& dj : kj.at("discontinuities")) {
        disc.push_back({curve_kind_from_name(dj.at("kind").get<std::string>()),
                        dj.at("c").get<double>()});
      }
    }
    return Kernel::analytic(std::move(space), kj.at("expression").get<std::string>(),
                            range[0], range[1], std::move(disc));
  }
  throw std::invalid_argument("kernel file: unknown kernel kind '" + kind + "'");
}

std::string kernel_to_json_text(const Kernel& kernel) {
  json j;
  j["schema"] = "irg-kernel/1";
  if (kernel.is_overlap()) {
    j["kernel"] = {{"kind", "overlap"},
                   {"k", kernel.overlap_k()},
                   {"epsilon", kernel.overlap_epsilon()}};
    return j.dump(2);
  }
  j["space"] = space_to_json(kernel.space());
  if (kernel.is_constant()) {
    j["kernel"] = {{"kind", "constant"}, {"value", kernel.block_value(0, 0)}};
  } else if (kernel.is_steplike()) {
    const std::size_t m = kernel.block_count();
    std::vector<std::vector<double>> w(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t jx = 0; jx < m; ++jx) w[i][jx] = kernel.block_value(i, jx);
    j["kernel"] = {{"kind", "step"}, {"matrix", w}};
    if (kernel.space().is_interval())
      j["kernel"]["breakpoints"] = kernel.step_breakpoints();
  } else {
    const auto range = kernel.declared_range();
    json disc = json::array();
    for (const auto& c : kernel.discontinuities()) {
      disc.push_back({{"kind", curve_kind_name(c.kind)}, {"c", c.c}});
    }
    j["kernel"] = {{"kind", "analytic"},
                   {"expression", kernel.expression_text()},
                   {"range", {range.first, range.second}},
                   {"discontinuities", disc}};
  }
  return j.dump(2);
}

Kernel load_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return kernel_from_json_text(ss.str());
}

void save_kernel(const Kernel& kernel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write kernel file: " + path);
  out << kernel_to_json_text(kernel) << "\n";
}

}  // namespace irg

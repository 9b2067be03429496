#ifndef SUPEROSP_SUPERRING_HPP
#define SUPEROSP_SUPERRING_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "superosp/solver.hpp"

// Finite-dimensional unital supercommutative superalgebras over Q, presented
// by a graded basis and structure constants.  These play the role of the
// coefficient superring A; the ground ring K is fixed to Q throughout, so
// K-linear always means Q-linear.

namespace superosp {

class NotInvertibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonHomogeneousError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuperAlgebraTable {
  int dim = 0;
  std::vector<Parity> degrees;  // one per basis index
  int unit = 0;                 // basis index of 1
  // e_k * e_l = sum_m sc[k][l][m] e_m
  std::vector<std::vector<RatVec>> sc;
  std::string name;  // optional preset name, informational

  const RatVec& prod(int k, int l) const { return sc[k][l]; }
  Parity deg(int k) const { return degrees[k]; }
};

using TablePtr = std::shared_ptr<const SuperAlgebraTable>;

/// Element of a SuperAlgebraTable: dense exact-rational coefficient vector.
struct AlgebraElement {
  TablePtr tab;
  RatVec c;

  AlgebraElement() = default;
  AlgebraElement(TablePtr t, RatVec v) : tab(std::move(t)), c(std::move(v)) {}
  static AlgebraElement zero(const TablePtr& t);
  static AlgebraElement one(const TablePtr& t);
  static AlgebraElement basis(const TablePtr& t, int k);

  bool is_zero() const { return vec_is_zero(c); }
  AlgebraElement component(Parity p) const;
  bool is_homogeneous() const;
  /// Degree of a nonzero homogeneous element; throws NonHomogeneousError on a
  /// mixed element, Parity::even for zero.
  Parity degree() const;
  bool operator==(const AlgebraElement& o) const;
};

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(const Rat& r, const AlgebraElement& a);
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);

/// Inverse of a homogeneous element, decided by solving a*x = 1 exactly.
/// Throws NonHomogeneousError / NotInvertibleError.  Odd nonzero elements are
/// never invertible (A^x is contained in the even part since 1/2 is present).
AlgebraElement invert(const AlgebraElement& a);
std::optional<AlgebraElement> try_invert(const AlgebraElement& a);

struct AxiomViolation {
  std::string axiom;           // which invariant failed
  std::vector<int> witness;    // basis indices witnessing the failure
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<AxiomViolation> violations;
};

/// Checks the five table invariants (unit, associativity, supercommutativity,
/// grading closure, even unit).  Malformed shapes throw std::invalid_argument
/// instead of being reported as axiom violations.
ValidationReport validate_table(const SuperAlgebraTable& t);

/// Graded basis of Der_Q(A) inside End_Q(A): exact nullspace of the graded
/// Leibniz constraints d(xy) = d(x)y + (-1)^{|d||x|} x d(y) over basis pairs.
/// Ambient coordinates: entry (t,k) of the matrix at index t*dim + k.
GradedSubspace algebra_derivations(const TablePtr& t);

/// Built-in coefficient algebras: "Q", "Geps" (Q[eps]/(eps^2)), "G1", "G2"
/// (Grassmann on 1 resp. 2 odd generators), "Qtmod<m>" (Q[t]/(t^m - 1)).
TablePtr preset_table(const std::string& name);

/// Grassmann algebra G_n on n odd generators (dim 2^n).
TablePtr grassmann_table(int n);

TablePtr table_from_json_text(const std::string& text);
std::string table_to_json_text(const SuperAlgebraTable& t);

}  // namespace superosp

#endif

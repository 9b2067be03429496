#ifndef SUPEROSP_SOLVER_HPP
#define SUPEROSP_SOLVER_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace superosp {

using Rat = mpq_class;
using Int = mpz_class;
using RatVec = std::vector<Rat>;

/// Z2 degree of a homogeneous object.
enum class Parity : unsigned char { even = 0, odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<unsigned char>(a) ^
                             static_cast<unsigned char>(b));
}
/// Koszul sign (-1)^{|a||b|}.
constexpr int koszul(Parity a, Parity b) {
  return (a == Parity::odd && b == Parity::odd) ? -1 : 1;
}
constexpr int parity_sign(Parity a) { return a == Parity::odd ? -1 : 1; }
constexpr bool is_odd(Parity a) { return a == Parity::odd; }

/// Parses "p/q" or "p" (decimal-free).  Throws std::invalid_argument on junk.
Rat parse_rat(const std::string& s);
std::string rat_str(const Rat& r);

bool vec_is_zero(const RatVec& v);
RatVec vec_add(const RatVec& a, const RatVec& b);
RatVec vec_sub(const RatVec& a, const RatVec& b);
RatVec vec_scale(const Rat& c, const RatVec& v);
void vec_axpy(RatVec& acc, const Rat& c, const RatVec& v);

/// Linear functional / constraint row, sparse over column indices.
struct SparseRow {
  std::vector<std::pair<int, Rat>> ents;  // sorted, unique columns
  void add(int col, const Rat& v);        // accumulate, keep sorted
  void compress();                        // drop zero entries
  bool empty() const { return ents.empty(); }
  Rat dot(const RatVec& v) const;
};

/// Dense exact-rational matrix, row-major.  Entries kept in lowest terms
/// (mpq_class canonicalizes on arithmetic).
struct RatMatrix {
  int rows = 0, cols = 0;
  std::vector<Rat> a;

  RatMatrix() = default;
  RatMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  Rat& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Rat& at(int i, int j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }
  static RatMatrix identity(int n);
  RatVec apply(const RatVec& v) const;  // matrix * column vector
  RatMatrix mul(const RatMatrix& o) const;
  RatMatrix add(const RatMatrix& o) const;
  RatMatrix sub(const RatMatrix& o) const;
  RatMatrix scaled(const Rat& c) const;
  bool is_zero() const;
  bool operator==(const RatMatrix& o) const;
  RatVec flatten() const { return a; }
  static RatMatrix from_flat(int r, int c, RatVec v);
};

/// An exact subspace of Q^ambient held in reduced row echelon form with unit
/// pivots.  The RREF rows are a normal form: two Subspaces are equal as sets
/// iff their rows coincide.
class Subspace {
 public:
  explicit Subspace(int ambient) : ambient_(ambient) {}
  static Subspace from_spanning(int ambient,
                                const std::vector<RatVec>& vecs);

  int ambient() const { return ambient_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<RatVec>& basis() const { return rows_; }
  const std::vector<int>& pivots() const { return pivots_; }

  /// Residual of v after subtracting its pivot-coordinate combination of the
  /// basis rows; zero iff v lies in the subspace.
  RatVec reduce(RatVec v) const;
  bool contains(const RatVec& v) const;
  bool contains(const Subspace& other) const;
  bool equals(const Subspace& other) const;

  Subspace sum(const Subspace& other) const;
  Subspace intersect(const Subspace& other) const;
  bool is_direct_with(const Subspace& other) const;

  /// Functionals on the ambient space whose common kernel is exactly this
  /// subspace: one per non-pivot column c, f_c(v) = v[c] - sum_j v[p_j] r_j[c].
  std::vector<SparseRow> complement_functionals() const;

 private:
  int ambient_;
  std::vector<RatVec> rows_;
  std::vector<int> pivots_;
};

/// A Z2-graded subspace: the even and odd homogeneous components.
struct GradedSubspace {
  Subspace even, odd;
  GradedSubspace(int ambient) : even(ambient), odd(ambient) {}
  GradedSubspace(Subspace e, Subspace o)
      : even(std::move(e)), odd(std::move(o)) {}
  int dim() const { return even.dim() + odd.dim(); }
  int dim_of(Parity p) const {
    return p == Parity::even ? even.dim() : odd.dim();
  }
  Subspace total() const { return even.sum(odd); }
};

/// Exact right nullspace {v : M v = 0}, canonical basis derived from the RREF
/// of M (free columns in increasing order).
Subspace nullspace(const RatMatrix& m);

/// Incremental exact solution of a homogeneous linear system: starts from the
/// full coordinate space and narrows it one constraint row at a time.
///
/// Elimination is fraction-free: the solution basis is kept as primitive
/// integer vectors and rows are combined integrally (v_i <- dp*v_i - di*v_p,
/// then divided by content).  The pivot is the first basis vector with a
/// nonzero dot against the incoming row, so the result is deterministic for a
/// fixed row order.
class NullspaceAccumulator {
 public:
  explicit NullspaceAccumulator(int unknowns);
  void add_row(const SparseRow& row);
  int current_dim() const { return static_cast<int>(basis_.size()); }
  Subspace result() const;  // canonical RREF form

 private:
  int unknowns_;
  std::vector<std::vector<Int>> basis_;
};

/// Coordinate solver over a fixed generating family: expresses vectors as
/// exact linear combinations of the generators (when possible).
class SpanSolver {
 public:
  SpanSolver(int ambient, const std::vector<RatVec>& gens);
  /// Coordinates c with v = sum_i c[i] * gens[i]; nullopt if v is outside the
  /// span.  For dependent generator families one fixed representative is
  /// produced.
  std::optional<RatVec> coords(const RatVec& v) const;
  const Subspace& span() const { return span_; }

 private:
  int ambient_;
  int ngens_;
  std::vector<RatVec> rref_;    // echelon rows
  std::vector<int> pivots_;
  std::vector<RatVec> expr_;    // rref_[j] = sum_i expr_[j][i] * gens[i]
  Subspace span_;
};

/// Subspace of `space` cut out by ambient-space functionals: all vectors of
/// `space` on which every functional vanishes.
Subspace cut(const Subspace& space, const std::vector<SparseRow>& functionals);

}  // namespace superosp

#endif

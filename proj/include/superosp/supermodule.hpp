#ifndef SUPEROSP_SUPERMODULE_HPP
#define SUPEROSP_SUPERMODULE_HPP

#include <memory>
#include <optional>
#include <vector>

#include "superosp/superring.hpp"

// Free A-supermodules with homogeneous bases and even supersymmetric
// A-valued forms.  Module coordinates are right coefficients, m = sum b_i a_i;
// the left action is a.m = (-1)^{|a||m|} m.a on homogeneous pieces.
//
// The underlying Q-space of M has basis {b_i e_k}, flat index i*dimA + k,
// degree beta_i + delta_k.

namespace superosp {

struct FreeSuperModule {
  TablePtr alg;
  int rank = 0;
  std::vector<Parity> degrees;  // beta_i per module basis index

  int qdim() const { return rank * alg->dim; }
  int flat(int i, int k) const { return i * alg->dim + k; }
  int mod_index(int f) const { return f / alg->dim; }
  int alg_index(int f) const { return f % alg->dim; }
  Parity qdeg(int f) const {
    return degrees[mod_index(f)] + alg->deg(alg_index(f));
  }
};

using ModulePtr = std::shared_ptr<const FreeSuperModule>;

ModulePtr make_module(TablePtr alg, std::vector<Parity> degrees);

/// Element of M as a flat Q-coordinate vector of length qdim.
struct ModuleElement {
  ModulePtr mod;
  RatVec c;

  static ModuleElement zero(const ModulePtr& m);
  /// b_i * e_k
  static ModuleElement qbasis(const ModulePtr& m, int flat_index);
  bool is_zero() const { return vec_is_zero(c); }
  ModuleElement component(Parity p) const;
  bool is_homogeneous() const;
  Parity degree() const;  // throws NonHomogeneousError on mixed
  /// Coordinate i as an element of A (m = sum b_i a_i).
  AlgebraElement coord(int i) const;
};

ModuleElement add(const ModuleElement& a, const ModuleElement& b);
ModuleElement sub(const ModuleElement& a, const ModuleElement& b);
ModuleElement scale(const Rat& r, const ModuleElement& m);
/// Right action m.a.
ModuleElement right_mult(const ModuleElement& m, const AlgebraElement& a);
/// Left action a.m = (-1)^{|a||m|} m.a per homogeneous pieces.
ModuleElement left_mult(const AlgebraElement& a, const ModuleElement& m);

/// A-quadratic form given by its Gram matrix G_ij = q(b_i, b_j).
/// On the underlying Q-basis, q(b_i e_k, b_j e_l) =
/// (-1)^{delta_k beta_j} G_ij e_k e_l; this is the unique A-bilinear
/// extension compatible with q(ma,n) = q(m,an) and q(m,na) = q(m,n)a.
class QuadraticForm {
 public:
  QuadraticForm(ModulePtr mod, std::vector<std::vector<AlgebraElement>> gram);

  const ModulePtr& mod() const { return mod_; }
  const TablePtr& alg() const { return mod_->alg; }
  int qdim() const { return mod_->qdim(); }
  const AlgebraElement& gram(int i, int j) const { return gram_[i][j]; }
  /// q on underlying Q-basis vectors (precomputed).
  const AlgebraElement& qtab(int u, int v) const { return qtab_[u][v]; }

  /// Degree-0 and supersymmetry checks, with witnesses.
  ValidationReport validate() const;
  bool is_zero_form() const;

 private:
  ModulePtr mod_;
  std::vector<std::vector<AlgebraElement>> gram_;
  std::vector<std::vector<AlgebraElement>> qtab_;
};

using FormPtr = std::shared_ptr<const QuadraticForm>;

FormPtr make_form(ModulePtr mod, std::vector<std::vector<AlgebraElement>> gram);
/// Gram from rational multiples of basis elements of A:
/// entries[i][j] = coefficient vector over the algebra basis.
FormPtr make_form_coeffs(ModulePtr mod,
                         const std::vector<std::vector<RatVec>>& entries);
/// Diagonal form with given unit multiples on an all-even module.
FormPtr diagonal_form(const TablePtr& alg, const std::vector<Rat>& diag);

AlgebraElement eval_q(const QuadraticForm& q, const ModuleElement& m,
                      const ModuleElement& n);

/// Block-diagonal orthogonal sum on the concatenated basis.
FormPtr orthogonal_sum(const QuadraticForm& q1, const QuadraticForm& q2);

/// Hyperbolic superspace H({1..n_pairs}, A): even basis h_1, h_{-1}, ...,
/// q(h_{sigma i}, h_{-mu j}) = delta_{sigma,mu} delta_{i,j}.
FormPtr hyperbolic(int n_pairs, const TablePtr& alg);

/// Exact Q-basis of {m : q(m, M) = 0}; graded.
GradedSubspace radical(const QuadraticForm& q);

enum class DiagKind { invertibly_diagonalizable, almost_diagonalizable, neither };

struct DiagClassification {
  DiagKind kind = DiagKind::neither;
  /// pairing i -> underline(i) on module basis indices, present unless neither
  std::optional<std::vector<int>> pairing;
};

/// Checks the presented basis only: q is almost diagonalizable when each
/// basis row has a single nonzero entry, at an invertible element, with the
/// partner map an involution; invertibly diagonalizable when that involution
/// is the identity.
DiagClassification classify_diagonalizability(const QuadraticForm& q);

/// Indices whose Gram row is "clean": one invertible entry at a partner with
/// the symmetric property.  Used to split M = N (paired part) + rest.
std::vector<int> detect_paired_indices(const QuadraticForm& q);

}  // namespace superosp

#endif

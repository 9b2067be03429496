#ifndef SUPEROSP_OSP_HPP
#define SUPEROSP_OSP_HPP

#include <optional>
#include <string>
#include <vector>

#include "superosp/supermodule.hpp"

// Graded Q-linear endomorphisms of the underlying space of M, the super
// bracket, the elementary operators E_{m,n}, and exact bases for osp(q) and
// eosp(q).
//
// osp(q) = {x A-linear : q(x(m),n) + (-1)^{|m||n|} q(x(n),m) = 0}.
// In right-coefficient form E_{m,n}(p) = m q(n,p) - (-1)^{|m||n|} n q(m,p).

namespace superosp {

struct SuperEndo {
  ModulePtr mod;
  RatMatrix mat;  // qdim x qdim over the Q-basis {b_i e_k}

  static SuperEndo zero(const ModulePtr& m);
  static SuperEndo identity(const ModulePtr& m);
  bool is_zero() const { return mat.is_zero(); }
  SuperEndo homogeneous_part(Parity p) const;
  bool is_homogeneous() const;
  /// Degree of a nonzero homogeneous endo (even for zero); throws on mixed.
  Parity degree() const;
  ModuleElement apply(const ModuleElement& m) const;
  /// f(m.a) = f(m).a for all m, a (right A-linearity); cached.
  bool is_a_linear() const;
  RatVec flatten() const { return mat.flatten(); }

 private:
  mutable std::optional<bool> a_linear_;
};

SuperEndo add(const SuperEndo& x, const SuperEndo& y);
SuperEndo sub(const SuperEndo& x, const SuperEndo& y);
SuperEndo scale(const Rat& r, const SuperEndo& x);
SuperEndo compose(const SuperEndo& x, const SuperEndo& y);  // x after y
SuperEndo from_flat(const ModulePtr& m, const RatVec& v);

/// [x,y] = xy - (-1)^{|x||y|} yx, computed per homogeneous parts.
SuperEndo super_bracket(const SuperEndo& x, const SuperEndo& y);

/// Right multiplication m -> m.a (always A-linear, degree |a|).
SuperEndo right_mult_op(const ModulePtr& mod, const AlgebraElement& a);
/// Left multiplication a.Id : m -> a.m = (-1)^{|a||m|} m.a.
SuperEndo a_id_op(const ModulePtr& mod, const AlgebraElement& a);
/// {e_k . Id} as a basis of A.Id inside End_Q(M).
std::vector<SuperEndo> a_id_basis(const ModulePtr& mod);

/// E_{m,n}: p -> m q(n,p) - (-1)^{|n||p|} q(m,p) n, extended Q-bilinearly in
/// (m, n) over homogeneous components.
SuperEndo make_E(const QuadraticForm& q, const ModuleElement& m,
                 const ModuleElement& n);

/// Whether x satisfies the osp identity for q on all Q-basis pairs (complete
/// by bilinearity); requires A-linearity separately.
bool osp_identity_holds(const QuadraticForm& q, const SuperEndo& x);

struct OspBasis {
  FormPtr form;
  std::vector<SuperEndo> vecs;  // homogeneous
  int dim() const { return static_cast<int>(vecs.size()); }
  int dim_of(Parity p) const;
  Subspace span() const;
};

/// Exact graded basis of osp(q): nullspace of A-linearity plus the osp
/// identity over basis pairs, per degree.
OspBasis osp_basis(const FormPtr& q);

/// Q-span of {E_{u,v}} over all Q-basis pairs of M, reduced to a graded basis.
/// This equals the span of E over all of M x M by bilinearity.
OspBasis eosp_basis(const FormPtr& q);

/// eosp restricted to pairs u in rows(I1), v in rows(I2) of the module basis
/// (the eosp(q_N, q_P) block); indices are module basis indices.
std::vector<SuperEndo> eosp_block(const FormPtr& q,
                                  const std::vector<int>& rows1,
                                  const std::vector<int>& rows2);

struct EIdentityReport {
  bool ok = true;
  int samples = 0;
  std::string first_failure;  // empty when ok
};

/// Exact verification on seeded random homogeneous tuples: antisymmetry of E,
/// the adjointness identity, [x, E_{m,n}] = E_{x(m),n} + (-1)^{|x||m|}
/// E_{m,x(n)} for x in the osp basis, and [osp, eosp] membership in span(eosp)
/// on all basis pairs.
EIdentityReport check_E_identities(const FormPtr& q, int samples,
                                   uint64_t seed);

}  // namespace superosp

#endif

#ifndef SUPEROSP_EINFTY_HPP
#define SUPEROSP_EINFTY_HPP

#include <string>
#include <vector>

#include "superosp/osp.hpp"

// The 3-graded Lie superalgebra L = (A, M, M, E) of 4-tuples (a, m, n, x)
// over a coefficient subalgebra eosp(q) <= E <= osp(q), with bracket
//
//   [(a,m,n,x),(a',m',n',x')] = ( q(m,n') - q(n,m'),
//       a.m' + x(m') - m.a' - (-1)^{|x'||m|} x'(m),
//      -a.n' + x(n') + n.a' - (-1)^{|x'||n|} x'(n),
//       E_{m,n'} + E_{n,m'} + [x,x'] ).
//
// Ambient coordinate layout: [0,dimA) the A slot, then M+ and M- slots of
// length qdim each, then E coordinates over the chosen E basis.  The element
// 1 = (1,0,0,0) is toral: [1, m+] = m+, [1, m-] = -m-, [1, L_0] = 0.

namespace superosp {

enum class EChoice { eosp, osp, explicit_span };

struct EInftyAlgebra {
  FormPtr form;
  std::vector<SuperEndo> e_basis;  // homogeneous
  EChoice choice = EChoice::eosp;

  int dim_a = 0, qdim = 0, dim_e = 0, dim = 0;
  std::vector<Parity> degrees;  // per ambient coordinate
  std::vector<int> grade3;      // 0 / +1 / -1 per ambient coordinate
  // Structure constants: brk[u][v] is the coordinate expansion of [u, v].
  std::vector<std::vector<SparseRow>> brk;

  int a_coord(int k) const { return k; }
  int mplus_coord(int f) const { return dim_a + f; }
  int mminus_coord(int f) const { return dim_a + qdim + f; }
  int e_coord(int j) const { return dim_a + 2 * qdim + j; }
  int unit_coord() const { return form->alg()->unit; }

  /// Coordinate expansion of [u, v] for arbitrary coordinate vectors.
  RatVec bracket(const RatVec& u, const RatVec& v) const;
  /// ad(u) as a dim x dim matrix, columns [u, basis_v].
  RatMatrix ad_matrix(const RatVec& u) const;
};

struct BuildReport {
  bool sl1 = false;        // antisymmetry on all homogeneous basis pairs
  bool jacobi = false;     // (SL2) on all basis triples
  bool grading3 = false;   // [L_s, L_t] in L_{s+t}
  bool toral = false;      // [1, x_s] = s x_s
  bool ok() const { return sl1 && jacobi && grading3 && toral; }
  std::string first_failure;
};

/// Builds L and verifies all structural invariants; throws
/// std::invalid_argument when E is not a subalgebra containing eosp or when
/// any bracket lands outside the E span, std::logic_error when a structural
/// invariant fails (the build is required to fail loudly).
EInftyAlgebra build_einfty(const FormPtr& q, EChoice choice,
                           std::vector<SuperEndo> explicit_e = {},
                           BuildReport* report = nullptr);

/// Exact centre basis {z : [z, L] = 0}; equal to (Ann_A M, 0, 0, 0) = 0 for
/// the free modules built here.
Subspace centre(const EInftyAlgebra& L);

struct IsoReport {
  bool built = false;
  bool degree_preserving = false;
  bool injective = false;
  bool surjective = false;  // image spans eosp(q_inf)
  bool homomorphism = false;
  int dim_l = 0, dim_eosp_qinf = 0;
  std::string first_failure;
  bool ok() const {
    return built && degree_preserving && injective && surjective &&
           homomorphism;
  }
};

/// The identification L = eosp(q_inf) for E = eosp(q), q_inf on
/// H({inf},A) + M:  a -> E_{h.a, h'}, m+ -> E_{h, m}, m- -> -E_{h', m},
/// x -> x extended by zero (h = h_inf, h' = h_{-inf}).  Verified to be a
/// degree-preserving bijective bracket homomorphism on all basis pairs.
IsoReport iso_to_eosp_qinf(const EInftyAlgebra& L);

struct ToralReport {
  bool der_eq_ad_plus_der0 = false;  // Der = ad L + (Der L)_0
  bool der0_two_defs_agree = false;  // grading-preserving == {d : d(1) in Z}
  bool ad_cap_ker1_eq_adL0 = false;  // ad L cap {d(1)=0} = ad L_0
  int dim_der = 0, dim_ad = 0, dim_der0 = 0, dim_ad_l0 = 0;
  bool ok() const {
    return der_eq_ad_plus_der0 && der0_two_defs_agree && ad_cap_ker1_eq_adL0;
  }
};

/// Exact subspace identities of the toral decomposition of Der_K L.
ToralReport check_toral_decomposition(const EInftyAlgebra& L);

}  // namespace superosp

#endif

#ifndef SUPEROSP_DERIVATIONS_HPP
#define SUPEROSP_DERIVATIONS_HPP

#include <string>
#include <vector>

#include "superosp/einfty.hpp"

// Derivation engine for L = E_infinity: the exact nullspace Der_K L of the
// graded Leibniz constraints, the inner derivations ad L, the grading
// preserving part (Der L)_0, the S/T condition spaces of End_K(M), the map
// (S,T) -> d_{S,T}, and the structure-theorem checks.
//
// Subspaces of End_Q(L) use ambient coordinates (t,u) -> t*dim + u, entry
// (t,u) being the coefficient of basis t in d(u).

namespace superosp {

/// Exact graded basis of Der_Q L: per degree, the nullspace of
/// d([u,v]) = [d(u),v] + (-1)^{|d||u|}[u,d(v)] over all ambient basis pairs.
GradedSubspace der_space(const EInftyAlgebra& L);

/// Span of ad(u) over ambient basis u.
GradedSubspace ad_space(const EInftyAlgebra& L);

struct Der0Result {
  GradedSubspace der0;
  /// grading-preserving cut == {d in Der : d(1) in Z(L)} (computed both ways)
  bool two_defs_agree = false;
};
Der0Result der0_space(const EInftyAlgebra& L);

/// The (S1)-(S3) / (T1)-(T3) solution spaces over End_Q(M), per condition and
/// in conjunction.
struct STSpaces {
  GradedSubspace s, s1, s2, s3;
  GradedSubspace t, t1, t2, t3;
};
STSpaces st_spaces(const EInftyAlgebra& L);

/// S(1) cap S(2) for a form; independent of the choice of E.
GradedSubspace s12_space(const FormPtr& q);
/// T(1) cap T(2); condition (T1) references the E span.
GradedSubspace t12_space(const FormPtr& q,
                         const std::vector<SuperEndo>& e_basis);

/// Direct evaluation of the conditions on a (possibly mixed) endomorphism,
/// checked per homogeneous part.
bool check_s_conditions(const EInftyAlgebra& L, const SuperEndo& S,
                        std::string* why = nullptr);
bool check_t_conditions(const EInftyAlgebra& L, const SuperEndo& T,
                        std::string* why = nullptr);

/// d_{S,T}(a,m,n,x) = ([S,a.Id]+[T,x], (S+T)(m), (S-T)(n), [T,a.Id]+[S,x])
/// as a flattened endomorphism of L.  Throws std::invalid_argument when the
/// pair violates its conditions.
RatVec d_from_st(const EInftyAlgebra& L, const SuperEndo& S,
                 const SuperEndo& T);

struct STPair {
  SuperEndo s, t;
};

/// Twisted bracket ([S,S']+[T,T']) + ([S,T']+[T,S']) on S + T.
STPair st_bracket(const EInftyAlgebra& L, const STPair& p, const STPair& p2);

/// Image of (S,T) -> d_{S,T} over the solved S and T spaces.
GradedSubspace dm_space(const EInftyAlgebra& L, const STSpaces& st);

/// Lift of a coefficient-algebra derivation to M = N + R (N almost
/// diagonalizable via its Gram pairing, R the zero-form block):
/// Delta_M acts by Delta on coordinates plus the diagonal correction
/// (1/2) Delta(q(n_i, n_ib)) q(n_i, n_ib)^{-1} on the N block.
/// `delta` is an endomorphism of A flattened as in algebra_derivations.
/// Throws when the pairing is absent or delta is not a derivation.
SuperEndo delta_m_lift(const FormPtr& q, const RatVec& delta);

/// (Der_Q A)_M: all delta_m_lift images over the derivation basis of A.
std::vector<SuperEndo> der_a_lifts(const FormPtr& q);

/// Basis of End_A(R) inside End_Q(M): A-linear maps supported on the given
/// module-basis rows.
std::vector<SuperEndo> end_a_block_basis(const FormPtr& q,
                                         const std::vector<int>& rows);

struct MainTheoremReport {
  int dim_der = 0, dim_ad = 0, dim_der0 = 0;
  int dim_s = 0, dim_s1 = 0, dim_s2 = 0, dim_s3 = 0;
  int dim_t = 0, dim_t1 = 0, dim_t2 = 0, dim_t3 = 0;
  int dim_dm = 0, dim_outer = 0;
  bool main1 = false;       // D_M = (Der L)_0
  bool main2 = false;       // Der = ad + D_M
  bool main3 = false;       // ad cap D_M = {d_{S,T}: S in E, T in A.Id} = ad L_0
  bool main4_split = false; // Der = ad x| d_{S0,T0}
  bool dm_injective = false;  // dim D_M = dim S + dim T
  bool toral_ok = false;
  bool t_is_a_id = false;
  bool inner_ideal = false;
  bool complement_subalgebra = false;
  std::string notes;
};

struct DerivationAnalysis {
  GradedSubspace der, ad, der0, dm;
  STSpaces st;
  MainTheoremReport main;
  DerivationAnalysis(int endo_ambient, int m_ambient)
      : der(endo_ambient), ad(endo_ambient), der0(endo_ambient),
        dm(endo_ambient),
        st{GradedSubspace(m_ambient), GradedSubspace(m_ambient),
           GradedSubspace(m_ambient), GradedSubspace(m_ambient),
           GradedSubspace(m_ambient), GradedSubspace(m_ambient),
           GradedSubspace(m_ambient), GradedSubspace(m_ambient)} {}
};

/// Runs the whole derivation pipeline and checks Theorem parts 1-4.
DerivationAnalysis analyze_derivations(const EInftyAlgebra& L);

MainTheoremReport verify_main_theorem(const EInftyAlgebra& L);

struct SDecompReport {
  std::string shape;  // "N" | "N+P" | "N+R" | "none"
  bool applicable = false;
  bool np_equal = false;    // S1 cap S2 = eosp(q_N,q_P) + S_N^P
  bool np_direct = false;
  bool has_zero_block = false;
  bool so_equal = false;      // S1 cap S2 = osp(q) + (Der A)_M
  bool so_direct = false;
  bool so_semidirect = false; // osp ideal and (Der A)_M subalgebra
  bool so_triple_equal = false;  // = eosp + End_A R + (Der A)_M
  bool endr_bracket = false;  // [(Der A)_M, End_A R] in End_A R
  int dim_s12 = 0;
  bool ok() const {
    if (!applicable) return false;
    bool base = np_equal && np_direct;
    if (!has_zero_block) return base;
    return base && so_equal && so_direct && so_semidirect &&
           so_triple_equal && endr_bracket;
  }
};

/// Checks Prop. decompositions of S1 cap S2 with both sides computed
/// independently; the N block is detected from the presented Gram basis.
SDecompReport verify_s_decompositions(const FormPtr& q);

}  // namespace superosp

#endif

#ifndef SUPEROSP_JORDAN_HPP
#define SUPEROSP_JORDAN_HPP

#include <string>
#include <vector>

#include "superosp/osp.hpp"

// The Jordan superalgebra J = A + M of the quadratic form,
//   (a + m) o (b + n) = (ab + q(m,n)) + (a.n + m.b),
// and its module X = E + M with the action
//   (x + p) . (a + m) = (x o L_a + E_{p,m}) + (x(m) + p.a),
// the left action being the Koszul flip of the right one.

namespace superosp {

struct JordanQF {
  FormPtr q;
  int dim = 0;  // dimA + qdim
  std::vector<Parity> degrees;
  // product table: jt[u][v] = coordinates of (basis u) o (basis v)
  std::vector<std::vector<RatVec>> jt;

  int a_coord(int k) const { return k; }
  int m_coord(int f) const { return q->alg()->dim + f; }
};

JordanQF make_jordan(const FormPtr& q);

RatVec jordan_mul(const JordanQF& j, const RatVec& u, const RatVec& v);

struct JordanModuleX {
  FormPtr q;
  std::vector<SuperEndo> e_basis;
  int dim = 0;  // dimE + qdim
  std::vector<Parity> degrees;
  // right action operators R_d on X for d over the J basis
  std::vector<RatMatrix> right_action;

  int e_coord(int j) const { return j; }
  int m_coord(int f) const { return static_cast<int>(e_basis.size()) + f; }
};

/// Builds the action table; throws when x o L_a escapes the E span.
JordanModuleX make_jordan_module(const FormPtr& q,
                                 const std::vector<SuperEndo>& e_basis);

struct JordanAxiomReport {
  bool jsa1 = false, jsa2 = false, jsa3 = false;
  bool jsa2_sampled = false;
  int jsa2_checks = 0;
  std::string first_failure;
  bool ok() const { return jsa1 && jsa2 && jsa3; }
};

/// (JSA1) on basis pairs, (JSA3) on basis pairs, (JSA2) on all basis
/// quadruples up to ambient dimension 12, above that on seeded pseudo-random
/// quadruples (fixed count), all exact.
JordanAxiomReport verify_jordan_axioms(const JordanQF& j, uint64_t seed,
                                       int sample_count = 4096);

struct JordanModuleReport {
  bool jsam1 = false, jsam2 = false, jsam3 = false;
  std::string first_failure;
  bool ok() const { return jsam1 && jsam2 && jsam3; }
};

JordanModuleReport verify_module_axioms(const JordanQF& j,
                                        const JordanModuleX& x);

struct DerStarReport {
  int dim_der_star_j = 0, dim_s12 = 0;
  int dim_der_star_jx = 0, dim_t12 = 0;
  bool s_restriction_bijective = false;
  bool s_bracket_compatible = false;
  bool t_restriction_bijective = false;
  std::string first_failure;
  bool ok() const {
    return s_restriction_bijective && s_bracket_compatible &&
           t_restriction_bijective;
  }
};

/// Der_*(J) = {d in Der(J) : d(A) in A, d(M) in M} and
/// Der_*(J,X) = {d in Der(J,X) : d(A) in E, d(M) in M}, with the
/// restriction-to-M maps verified against S(1) cap S(2) and T(1) cap T(2).
DerStarReport der_star_isos(const JordanQF& j, const JordanModuleX& x);

}  // namespace superosp

#endif

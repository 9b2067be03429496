#include "superosp/jordan.hpp"

#include <functional>
#include <sstream>

#include "superosp/derivations.hpp"
#include "superosp/sampling.hpp"

namespace superosp {

JordanQF make_jordan(const FormPtr& q) {
  JordanQF j;
  j.q = q;
  const int dA = q->alg()->dim;
  const int n = q->qdim();
  j.dim = dA + n;
  j.degrees.resize(j.dim);
  for (int k = 0; k < dA; ++k) j.degrees[j.a_coord(k)] = q->alg()->deg(k);
  for (int f = 0; f < n; ++f) j.degrees[j.m_coord(f)] = q->mod()->qdeg(f);

  j.jt.assign(j.dim, std::vector<RatVec>(j.dim, RatVec(j.dim, Rat(0))));
  auto put_a = [&](RatVec& out, const AlgebraElement& a) {
    for (int k = 0; k < dA; ++k) out[j.a_coord(k)] += a.c[k];
  };
  auto put_m = [&](RatVec& out, const ModuleElement& m) {
    for (int f = 0; f < n; ++f) out[j.m_coord(f)] += m.c[f];
  };
  for (int k = 0; k < dA; ++k) {
    AlgebraElement ek = AlgebraElement::basis(q->alg(), k);
    for (int l = 0; l < dA; ++l)
      put_a(j.jt[j.a_coord(k)][j.a_coord(l)],
            mul(ek, AlgebraElement::basis(q->alg(), l)));
    for (int f = 0; f < n; ++f) {
      ModuleElement bf = ModuleElement::qbasis(q->mod(), f);
      put_m(j.jt[j.a_coord(k)][j.m_coord(f)], left_mult(ek, bf));
      put_m(j.jt[j.m_coord(f)][j.a_coord(k)], right_mult(bf, ek));
    }
  }
  for (int f = 0; f < n; ++f)
    for (int g = 0; g < n; ++g)
      put_a(j.jt[j.m_coord(f)][j.m_coord(g)], q->qtab(f, g));
  return j;
}

RatVec jordan_mul(const JordanQF& j, const RatVec& u, const RatVec& v) {
  RatVec out(j.dim, Rat(0));
  for (int a = 0; a < j.dim; ++a) {
    if (u[a] == 0) continue;
    for (int b = 0; b < j.dim; ++b) {
      if (v[b] == 0) continue;
      Rat f = u[a] * v[b];
      const RatVec& p = j.jt[a][b];
      for (int w = 0; w < j.dim; ++w)
        if (p[w] != 0) out[w] += f * p[w];
    }
  }
  return out;
}

JordanModuleX make_jordan_module(const FormPtr& q,
                                 const std::vector<SuperEndo>& e_basis) {
  JordanModuleX x;
  x.q = q;
  x.e_basis = e_basis;
  const int dA = q->alg()->dim;
  const int n = q->qdim();
  const int dE = static_cast<int>(e_basis.size());
  x.dim = dE + n;
  x.degrees.resize(x.dim);
  for (int j2 = 0; j2 < dE; ++j2)
    x.degrees[x.e_coord(j2)] =
        e_basis[j2].is_zero() ? Parity::even : e_basis[j2].degree();
  for (int f = 0; f < n; ++f) x.degrees[x.m_coord(f)] = q->mod()->qdeg(f);

  std::vector<RatVec> eflat;
  for (const auto& e : e_basis) eflat.push_back(e.flatten());
  SpanSolver esolve(n * n, eflat);

  const int dimJ = dA + n;
  x.right_action.assign(dimJ, RatMatrix(x.dim, x.dim));
  // d = e_k:  (x + p).(a + 0) = (x o L_a) + (p.a)
  for (int k = 0; k < dA; ++k) {
    RatMatrix& R = x.right_action[k];
    SuperEndo la = a_id_op(q->mod(), AlgebraElement::basis(q->alg(), k));
    for (int j2 = 0; j2 < dE; ++j2) {
      SuperEndo xa = compose(e_basis[j2], la);
      auto cs = esolve.coords(xa.flatten());
      if (!cs)
        throw std::invalid_argument(
            "jordan module: x o L_a escaped the E span");
      for (int i = 0; i < dE; ++i) R.at(x.e_coord(i), x.e_coord(j2)) = (*cs)[i];
    }
    for (int f = 0; f < n; ++f) {
      ModuleElement pa = right_mult(ModuleElement::qbasis(q->mod(), f),
                                    AlgebraElement::basis(q->alg(), k));
      for (int r = 0; r < n; ++r) R.at(x.m_coord(r), x.m_coord(f)) = pa.c[r];
    }
  }
  // d = m (module basis g):  (x + p).(0 + m) = E_{p,m} + x(m)
  for (int g = 0; g < n; ++g) {
    RatMatrix& R = x.right_action[dA + g];
    ModuleElement m = ModuleElement::qbasis(q->mod(), g);
    for (int j2 = 0; j2 < dE; ++j2) {
      ModuleElement xm = e_basis[j2].apply(m);
      for (int r = 0; r < n; ++r) R.at(x.m_coord(r), x.e_coord(j2)) = xm.c[r];
    }
    for (int f = 0; f < n; ++f) {
      SuperEndo epm = make_E(*q, ModuleElement::qbasis(q->mod(), f), m);
      auto cs = esolve.coords(epm.flatten());
      if (!cs)
        throw std::invalid_argument("jordan module: E_{p,m} escaped the E span");
      for (int i = 0; i < dE; ++i) R.at(x.e_coord(i), x.m_coord(f)) = (*cs)[i];
    }
  }
  return x;
}

namespace {

bool matrix_has_degree(const RatMatrix& m, const std::vector<Parity>& degs,
                       Parity want) {
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c)
      if (m.at(r, c) != 0 && degs[r] != degs[c] + want) return false;
  return true;
}

}  // namespace

JordanAxiomReport verify_jordan_axioms(const JordanQF& j, uint64_t seed,
                                       int sample_count) {
  JordanAxiomReport rep;
  std::ostringstream why;
  const int d = j.dim;
  auto basis = [&](int u) {
    RatVec v(d, Rat(0));
    v[u] = 1;
    return v;
  };

  rep.jsa1 = true;
  for (int u = 0; u < d && rep.jsa1; ++u)
    for (int v = 0; v < d; ++v) {
      int s = koszul(j.degrees[u], j.degrees[v]);
      RatVec rhs = vec_scale(Rat(s), j.jt[v][u]);
      if (j.jt[u][v] != rhs) {
        rep.jsa1 = false;
        why << "(JSA1) fails on pair (" << u << "," << v << "); ";
        break;
      }
    }

  rep.jsa3 = true;
  for (int u = 0; u < d && rep.jsa3; ++u) {
    RatVec a = basis(u);
    RatVec a2 = jordan_mul(j, a, a);
    for (int v = 0; v < d; ++v) {
      RatVec c = basis(v);
      RatVec lhs = jordan_mul(j, jordan_mul(j, a2, c), a);
      RatVec rhs = jordan_mul(j, a2, jordan_mul(j, c, a));
      if (lhs != rhs) {
        rep.jsa3 = false;
        why << "(JSA3) fails on pair (" << u << "," << v << "); ";
        break;
      }
    }
  }

  // (JSA2) on basis quadruples (homogeneous), exhaustive up to dim 12.
  auto jsa2_holds = [&](int ua, int ub, int uc, int ud) {
    RatVec a = basis(ua), b = basis(ub), c = basis(uc), e = basis(ud);
    Parity da = j.degrees[ua], db = j.degrees[ub], dc = j.degrees[uc],
           dd = j.degrees[ud];
    RatVec lhs = jordan_mul(j, jordan_mul(j, jordan_mul(j, a, b), c), e);
    vec_axpy(lhs, Rat(koszul(dd, dc)),
             jordan_mul(j, a, jordan_mul(j, jordan_mul(j, b, e), c)));
    vec_axpy(lhs, Rat(koszul(db, da) * koszul(dd, dc)),
             jordan_mul(j, b, jordan_mul(j, jordan_mul(j, a, e), c)));
    RatVec rhs = jordan_mul(j, jordan_mul(j, a, b), jordan_mul(j, c, e));
    vec_axpy(rhs, Rat(koszul(dc, db)),
             jordan_mul(j, jordan_mul(j, a, c), jordan_mul(j, b, e)));
    vec_axpy(rhs, Rat(koszul(dd, db) * koszul(dd, dc)),
             jordan_mul(j, jordan_mul(j, a, e), jordan_mul(j, b, c)));
    return lhs == rhs;
  };
  rep.jsa2 = true;
  if (d <= 12) {
    for (int a = 0; a < d && rep.jsa2; ++a)
      for (int b = 0; b < d && rep.jsa2; ++b)
        for (int c = 0; c < d && rep.jsa2; ++c)
          for (int e = 0; e < d; ++e) {
            ++rep.jsa2_checks;
            if (!jsa2_holds(a, b, c, e)) {
              rep.jsa2 = false;
              why << "(JSA2) fails on (" << a << "," << b << "," << c << ","
                  << e << "); ";
              break;
            }
          }
  } else {
    rep.jsa2_sampled = true;
    SplitMix64 rng(seed);
    for (int s = 0; s < sample_count; ++s) {
      int a = static_cast<int>(rng.uniform(0, d - 1));
      int b = static_cast<int>(rng.uniform(0, d - 1));
      int c = static_cast<int>(rng.uniform(0, d - 1));
      int e = static_cast<int>(rng.uniform(0, d - 1));
      ++rep.jsa2_checks;
      if (!jsa2_holds(a, b, c, e)) {
        rep.jsa2 = false;
        why << "(JSA2) fails on sampled (" << a << "," << b << "," << c << ","
            << e << "); ";
        break;
      }
    }
  }
  rep.first_failure = why.str();
  return rep;
}

JordanModuleReport verify_module_axioms(const JordanQF& j,
                                        const JordanModuleX& x) {
  JordanModuleReport rep;
  std::ostringstream why;
  const int dJ = j.dim;

  // (JSAM1): both linked actions are degree-0 bilinear maps; structurally the
  // left action is the Koszul flip of the right one, so the substance is that
  // R_d is homogeneous of degree |d|.
  rep.jsam1 = true;
  for (int u = 0; u < dJ; ++u)
    if (!matrix_has_degree(x.right_action[u], x.degrees, j.degrees[u])) {
      rep.jsam1 = false;
      why << "(JSAM1) action is not graded at basis " << u << "; ";
      break;
    }

  auto r_of = [&](const RatVec& w) {
    RatMatrix m(x.dim, x.dim);
    for (int u = 0; u < dJ; ++u)
      if (w[u] != 0) m = m.add(x.right_action[u].scaled(w[u]));
    return m;
  };
  auto sbracket = [&](const RatMatrix& p, Parity dp, const RatMatrix& q2,
                      Parity dq) {
    return p.mul(q2).sub(q2.mul(p).scaled(Rat(koszul(dp, dq))));
  };

  rep.jsam2 = true;
  for (int a = 0; a < dJ && rep.jsam2; ++a)
    for (int b = 0; b < dJ && rep.jsam2; ++b)
      for (int c = 0; c < dJ; ++c) {
        Parity da = j.degrees[a], db = j.degrees[b], dc = j.degrees[c];
        RatMatrix acc(x.dim, x.dim);
        acc = acc.add(sbracket(r_of(j.jt[a][b]), da + db, x.right_action[c],
                               dc).scaled(Rat(koszul(db, dc))));
        acc = acc.add(sbracket(r_of(j.jt[c][a]), dc + da, x.right_action[b],
                               db).scaled(Rat(koszul(da, db))));
        acc = acc.add(sbracket(r_of(j.jt[b][c]), db + dc, x.right_action[a],
                               da).scaled(Rat(koszul(da, dc))));
        if (!acc.is_zero()) {
          rep.jsam2 = false;
          why << "(JSAM2) fails on (" << a << "," << b << "," << c << "); ";
          break;
        }
      }

  rep.jsam3 = true;
  for (int a = 0; a < dJ && rep.jsam3; ++a)
    for (int b = 0; b < dJ && rep.jsam3; ++b)
      for (int c = 0; c < dJ; ++c) {
        Parity da = j.degrees[a], db = j.degrees[b], dc = j.degrees[c];
        const RatMatrix &Ra = x.right_action[a], &Rb = x.right_action[b],
                        &Rc = x.right_action[c];
        RatMatrix lhs = Rc.mul(Rb).mul(Ra);
        lhs = lhs.add(Ra.mul(Rb).mul(Rc).scaled(
            Rat(koszul(da, db) * koszul(da, dc) * koszul(db, dc))));
        RatVec eb(dJ, Rat(0));
        eb[b] = 1;
        RatVec acb = jordan_mul(j, j.jt[a][c], eb);
        lhs = lhs.add(r_of(acb).scaled(Rat(koszul(db, dc))));
        RatMatrix rhs = r_of(j.jt[a][b]).mul(Rc).scaled(
            Rat(koszul(da, dc) * koszul(db, dc)));
        rhs = rhs.add(r_of(j.jt[a][c]).mul(Rb).scaled(Rat(koszul(da, db))));
        rhs = rhs.add(r_of(j.jt[c][b]).mul(Ra).scaled(Rat(koszul(db, dc))));
        if (!(lhs == rhs)) {
          rep.jsam3 = false;
          why << "(JSAM3) fails on (" << a << "," << b << "," << c << "); ";
          break;
        }
      }
  rep.first_failure = why.str();
  return rep;
}

namespace {

struct BlockUnknowns {
  std::vector<int> idx;  // flat (row,col) over rows*cols... row*ncols+col
  std::vector<int> of;
  int count() const { return static_cast<int>(idx.size()); }
};

// Unknowns for a map V -> W restricted to allowed (row, col) blocks and a
// fixed degree shift alpha.
BlockUnknowns block_unknowns(const std::vector<Parity>& wdeg,
                             const std::vector<Parity>& vdeg, Parity alpha,
                             const std::function<bool(int, int)>& allowed) {
  BlockUnknowns u;
  const int R = static_cast<int>(wdeg.size());
  const int C = static_cast<int>(vdeg.size());
  u.of.assign(static_cast<size_t>(R) * C, -1);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c)
      if (allowed(r, c) && wdeg[r] == vdeg[c] + alpha) {
        u.of[static_cast<size_t>(r) * C + c] = u.count();
        u.idx.push_back(r * C + c);
      }
  return u;
}

}  // namespace

DerStarReport der_star_isos(const JordanQF& j, const JordanModuleX& x) {
  DerStarReport rep;
  std::ostringstream why;
  const FormPtr& q = j.q;
  const int dA = q->alg()->dim;
  const int n = q->qdim();
  const int dJ = j.dim;
  const int dX = x.dim;
  const int dE = static_cast<int>(x.e_basis.size());

  // ---- Der_*(J): d(A) in A, d(M) in M, Leibniz over the J product.
  auto in_a_j = [&](int u) { return u < dA; };
  std::vector<std::vector<RatVec>> derj_parts(2);
  for (Parity alpha : {Parity::even, Parity::odd}) {
    BlockUnknowns unk = block_unknowns(
        j.degrees, j.degrees, alpha,
        [&](int r, int c) { return in_a_j(r) == in_a_j(c); });
    NullspaceAccumulator acc(unk.count());
    for (int u = 0; u < dJ; ++u) {
      int sgn = koszul(alpha, j.degrees[u]);
      for (int v = 0; v < dJ; ++v) {
        std::vector<SparseRow> rows(dJ);
        for (int s = 0; s < dJ; ++s) {
          if (j.jt[u][v][s] == 0) continue;
          for (int w = 0; w < dJ; ++w) {
            int uk = unk.of[static_cast<size_t>(w) * dJ + s];
            if (uk >= 0) rows[w].add(uk, j.jt[u][v][s]);
          }
        }
        for (int t = 0; t < dJ; ++t) {
          int uk = unk.of[static_cast<size_t>(t) * dJ + u];
          if (uk >= 0)
            for (int w = 0; w < dJ; ++w)
              if (j.jt[t][v][w] != 0) rows[w].add(uk, -j.jt[t][v][w]);
          uk = unk.of[static_cast<size_t>(t) * dJ + v];
          if (uk >= 0)
            for (int w = 0; w < dJ; ++w)
              if (j.jt[u][t][w] != 0)
                rows[w].add(uk, Rat(-sgn) * j.jt[u][t][w]);
        }
        for (auto& row : rows) acc.add_row(row);
      }
    }
    Subspace sol = acc.result();
    for (const auto& w : sol.basis()) {
      RatVec full(static_cast<size_t>(dJ) * dJ, Rat(0));
      for (int t = 0; t < unk.count(); ++t) full[unk.idx[t]] = w[t];
      derj_parts[is_odd(alpha) ? 1 : 0].push_back(std::move(full));
    }
  }

  // ---- Der_*(J, X): d(A) in E, d(M) in M, Leibniz
  //      d(u o v) = R_v d(u) + (-1)^{|u||v|} R_u d(v).
  auto allowed_jx = [&](int r, int c) {
    bool row_e = r < dE;
    bool col_a = c < dA;
    return (row_e && col_a) || (!row_e && !col_a);
  };
  std::vector<std::vector<RatVec>> derjx_parts(2);
  for (Parity alpha : {Parity::even, Parity::odd}) {
    BlockUnknowns unk = block_unknowns(x.degrees, j.degrees, alpha, allowed_jx);
    NullspaceAccumulator acc(unk.count());
    for (int u = 0; u < dJ; ++u)
      for (int v = 0; v < dJ; ++v) {
        int sgn = koszul(j.degrees[u], j.degrees[v]);
        std::vector<SparseRow> rows(dX);
        for (int s = 0; s < dJ; ++s) {
          if (j.jt[u][v][s] == 0) continue;
          for (int w = 0; w < dX; ++w) {
            int uk = unk.of[static_cast<size_t>(w) * dJ + s];
            if (uk >= 0) rows[w].add(uk, j.jt[u][v][s]);
          }
        }
        for (int t = 0; t < dX; ++t) {
          int uk = unk.of[static_cast<size_t>(t) * dJ + u];
          if (uk >= 0)
            for (int w = 0; w < dX; ++w)
              if (x.right_action[v].at(w, t) != 0)
                rows[w].add(uk, -x.right_action[v].at(w, t));
          uk = unk.of[static_cast<size_t>(t) * dJ + v];
          if (uk >= 0)
            for (int w = 0; w < dX; ++w)
              if (x.right_action[u].at(w, t) != 0)
                rows[w].add(uk, Rat(-sgn) * x.right_action[u].at(w, t));
        }
        for (auto& row : rows) acc.add_row(row);
      }
    Subspace sol = acc.result();
    for (const auto& w : sol.basis()) {
      RatVec full(static_cast<size_t>(dX) * dJ, Rat(0));
      for (int t = 0; t < unk.count(); ++t) full[unk.idx[t]] = w[t];
      derjx_parts[is_odd(alpha) ? 1 : 0].push_back(std::move(full));
    }
  }

  // ---- Restrictions to M and comparisons.
  GradedSubspace s12 = s12_space(q);
  GradedSubspace t12 = t12_space(q, x.e_basis);
  rep.dim_s12 = s12.dim();
  rep.dim_t12 = t12.dim();
  rep.dim_der_star_j =
      static_cast<int>(derj_parts[0].size() + derj_parts[1].size());
  rep.dim_der_star_jx =
      static_cast<int>(derjx_parts[0].size() + derjx_parts[1].size());

  auto restrict_j = [&](const RatVec& d) {
    SuperEndo e = SuperEndo::zero(q->mod());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        e.mat.at(r, c) = d[static_cast<size_t>(j.m_coord(r)) * dJ + j.m_coord(c)];
    return e;
  };
  auto restrict_jx = [&](const RatVec& d) {
    SuperEndo e = SuperEndo::zero(q->mod());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        e.mat.at(r, c) = d[static_cast<size_t>(x.m_coord(r)) * dJ + j.m_coord(c)];
    return e;
  };

  // Der_*(J) -> S1 cap S2: bijective and bracket compatible.
  {
    std::vector<RatVec> im[2];
    bool inj = true;
    for (int par = 0; par < 2; ++par)
      for (const auto& d : derj_parts[par]) im[par].push_back(restrict_j(d).flatten());
    Subspace im_ev = Subspace::from_spanning(n * n, im[0]);
    Subspace im_od = Subspace::from_spanning(n * n, im[1]);
    inj = im_ev.dim() + im_od.dim() == rep.dim_der_star_j;
    bool onto = im_ev.equals(s12.even) && im_od.equals(s12.odd);
    rep.s_restriction_bijective = inj && onto;
    if (!rep.s_restriction_bijective)
      why << "Der_*(J) restriction is not a bijection onto S1 cap S2; ";

    rep.s_bracket_compatible = true;
    std::vector<std::pair<RatVec, Parity>> all;
    for (const auto& d : derj_parts[0]) all.push_back({d, Parity::even});
    for (const auto& d : derj_parts[1]) all.push_back({d, Parity::odd});
    for (size_t a = 0; a < all.size() && rep.s_bracket_compatible; ++a)
      for (size_t b = 0; b < all.size(); ++b) {
        RatMatrix ma = RatMatrix::from_flat(dJ, dJ, all[a].first);
        RatMatrix mb = RatMatrix::from_flat(dJ, dJ, all[b].first);
        RatMatrix br = ma.mul(mb).sub(
            mb.mul(ma).scaled(Rat(koszul(all[a].second, all[b].second))));
        SuperEndo lhs = restrict_j(br.flatten());
        SuperEndo rhs = super_bracket(restrict_j(all[a].first),
                                      restrict_j(all[b].first));
        if (!(lhs.mat == rhs.mat)) {
          rep.s_bracket_compatible = false;
          why << "restriction does not intertwine brackets; ";
          break;
        }
      }
  }

  // Der_*(J,X) -> T1 cap T2: linear bijection.
  {
    std::vector<RatVec> im[2];
    for (int par = 0; par < 2; ++par)
      for (const auto& d : derjx_parts[par])
        im[par].push_back(restrict_jx(d).flatten());
    Subspace im_ev = Subspace::from_spanning(n * n, im[0]);
    Subspace im_od = Subspace::from_spanning(n * n, im[1]);
    bool inj = im_ev.dim() + im_od.dim() == rep.dim_der_star_jx;
    bool onto = im_ev.equals(t12.even) && im_od.equals(t12.odd);
    rep.t_restriction_bijective = inj && onto;
    if (!rep.t_restriction_bijective)
      why << "Der_*(J,X) restriction is not a bijection onto T1 cap T2; ";
  }
  rep.first_failure = why.str();
  return rep;
}

}  // namespace superosp

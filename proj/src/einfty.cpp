#include "superosp/einfty.hpp"

#include <sstream>

#include "superosp/derivations.hpp"

namespace superosp {

namespace {

// One slot of the 4-tuple.
enum Slot { SA, SMP, SMM, SX };

struct TupleValue {
  AlgebraElement a;
  ModuleElement mp, mm;
  SuperEndo x;
};

TupleValue zero_tuple(const FormPtr& q) {
  return {AlgebraElement::zero(q->alg()), ModuleElement::zero(q->mod()),
          ModuleElement::zero(q->mod()), SuperEndo::zero(q->mod())};
}

}  // namespace

RatVec EInftyAlgebra::bracket(const RatVec& u, const RatVec& v) const {
  RatVec out(dim, Rat(0));
  for (int i = 0; i < dim; ++i) {
    if (u[i] == 0) continue;
    for (int j = 0; j < dim; ++j) {
      if (v[j] == 0) continue;
      Rat f = u[i] * v[j];
      for (const auto& [w, c] : brk[i][j].ents) out[w] += f * c;
    }
  }
  return out;
}

RatMatrix EInftyAlgebra::ad_matrix(const RatVec& u) const {
  RatMatrix m(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      if (u[i] == 0) continue;
      for (const auto& [w, c] : brk[i][j].ents) m.at(w, j) += u[i] * c;
    }
  }
  return m;
}

EInftyAlgebra build_einfty(const FormPtr& q, EChoice choice,
                           std::vector<SuperEndo> explicit_e,
                           BuildReport* report) {
  EInftyAlgebra L;
  L.form = q;
  L.choice = choice;
  switch (choice) {
    case EChoice::eosp:
      L.e_basis = eosp_basis(q).vecs;
      break;
    case EChoice::osp:
      L.e_basis = osp_basis(q).vecs;
      break;
    case EChoice::explicit_span:
      L.e_basis = std::move(explicit_e);
      break;
  }
  const ModulePtr& mod = q->mod();
  const TablePtr& alg = q->alg();
  L.dim_a = alg->dim;
  L.qdim = mod->qdim();
  L.dim_e = static_cast<int>(L.e_basis.size());
  L.dim = L.dim_a + 2 * L.qdim + L.dim_e;

  const int n2 = L.qdim * L.qdim;
  std::vector<RatVec> e_flat;
  for (const auto& e : L.e_basis) {
    if (!e.is_homogeneous())
      throw std::invalid_argument("E basis vectors must be homogeneous");
    if (!e.is_a_linear() || !osp_identity_holds(*q, e))
      throw std::invalid_argument("explicit E is not contained in osp(q)");
    e_flat.push_back(e.flatten());
  }
  SpanSolver e_solver(n2, e_flat);
  if (e_solver.span().dim() != L.dim_e)
    throw std::invalid_argument("E basis vectors are linearly dependent");
  // eosp(q) must be contained in E.
  for (const auto& e : eosp_basis(q).vecs)
    if (!e_solver.span().contains(e.flatten()))
      throw std::invalid_argument("E does not contain eosp(q)");

  L.degrees.resize(L.dim);
  L.grade3.assign(L.dim, 0);
  for (int k = 0; k < L.dim_a; ++k) L.degrees[L.a_coord(k)] = alg->deg(k);
  for (int f = 0; f < L.qdim; ++f) {
    L.degrees[L.mplus_coord(f)] = mod->qdeg(f);
    L.degrees[L.mminus_coord(f)] = mod->qdeg(f);
    L.grade3[L.mplus_coord(f)] = 1;
    L.grade3[L.mminus_coord(f)] = -1;
  }
  for (int j = 0; j < L.dim_e; ++j)
    L.degrees[L.e_coord(j)] =
        L.e_basis[j].is_zero() ? Parity::even : L.e_basis[j].degree();

  // Slot and payload per ambient coordinate.
  std::vector<std::pair<Slot, int>> coord(L.dim);
  for (int k = 0; k < L.dim_a; ++k) coord[L.a_coord(k)] = {SA, k};
  for (int f = 0; f < L.qdim; ++f) {
    coord[L.mplus_coord(f)] = {SMP, f};
    coord[L.mminus_coord(f)] = {SMM, f};
  }
  for (int j = 0; j < L.dim_e; ++j) coord[L.e_coord(j)] = {SX, j};

  auto tuple_to_row = [&](const TupleValue& t) {
    SparseRow row;
    for (int k = 0; k < L.dim_a; ++k)
      if (t.a.c[k] != 0) row.add(L.a_coord(k), t.a.c[k]);
    for (int f = 0; f < L.qdim; ++f) {
      if (t.mp.c[f] != 0) row.add(L.mplus_coord(f), t.mp.c[f]);
      if (t.mm.c[f] != 0) row.add(L.mminus_coord(f), t.mm.c[f]);
    }
    if (!t.x.is_zero()) {
      auto cs = e_solver.coords(t.x.flatten());
      if (!cs)
        throw std::invalid_argument(
            "bracket escaped the chosen E span (E is not a subalgebra)");
      for (int j = 0; j < L.dim_e; ++j)
        if ((*cs)[j] != 0) row.add(L.e_coord(j), (*cs)[j]);
    }
    return row;
  };

  // Bracket of two ambient basis elements per the slot/slot case table.
  auto basis_bracket = [&](int ui, int vi) {
    auto [su, pu] = coord[ui];
    auto [sv, pv] = coord[vi];
    TupleValue t = zero_tuple(q);
    Parity du = L.degrees[ui], dv = L.degrees[vi];
    switch (su) {
      case SA: {
        AlgebraElement a = AlgebraElement::basis(alg, pu);
        if (sv == SMP)
          t.mp = left_mult(a, ModuleElement::qbasis(mod, pv));
        else if (sv == SMM)
          t.mm = scale(Rat(-1), left_mult(a, ModuleElement::qbasis(mod, pv)));
        break;
      }
      case SMP: {
        ModuleElement m = ModuleElement::qbasis(mod, pu);
        if (sv == SA)
          t.mp = scale(Rat(-1),
                       right_mult(m, AlgebraElement::basis(alg, pv)));
        else if (sv == SMM) {
          ModuleElement n = ModuleElement::qbasis(mod, pv);
          t.a = eval_q(*q, m, n);
          t.x = make_E(*q, m, n);
        } else if (sv == SX) {
          t.mp = scale(Rat(-koszul(dv, du)), L.e_basis[pv].apply(m));
        }
        break;
      }
      case SMM: {
        ModuleElement n = ModuleElement::qbasis(mod, pu);
        if (sv == SA)
          t.mm = right_mult(n, AlgebraElement::basis(alg, pv));
        else if (sv == SMP) {
          ModuleElement m = ModuleElement::qbasis(mod, pv);
          t.a = scale(Rat(-1), eval_q(*q, n, m));
          t.x = make_E(*q, n, m);
        } else if (sv == SX) {
          t.mm = scale(Rat(-koszul(dv, du)), L.e_basis[pv].apply(n));
        }
        break;
      }
      case SX: {
        const SuperEndo& x = L.e_basis[pu];
        if (sv == SMP)
          t.mp = x.apply(ModuleElement::qbasis(mod, pv));
        else if (sv == SMM)
          t.mm = x.apply(ModuleElement::qbasis(mod, pv));
        else if (sv == SX)
          t.x = super_bracket(x, L.e_basis[pv]);
        break;
      }
    }
    return tuple_to_row(t);
  };

  L.brk.assign(L.dim, std::vector<SparseRow>(L.dim));
  for (int u = 0; u < L.dim; ++u)
    for (int v = 0; v < L.dim; ++v) L.brk[u][v] = basis_bracket(u, v);

  // Structural verification; the build fails loudly on any violation.
  BuildReport rep;
  std::ostringstream why;

  rep.sl1 = true;
  for (int u = 0; u < L.dim && rep.sl1; ++u)
    for (int v = 0; v < L.dim && rep.sl1; ++v) {
      RatVec lhs(L.dim, Rat(0)), rhs(L.dim, Rat(0));
      for (const auto& [w, c] : L.brk[u][v].ents) lhs[w] = c;
      int s = -koszul(L.degrees[u], L.degrees[v]);
      for (const auto& [w, c] : L.brk[v][u].ents) rhs[w] = s * c;
      if (lhs != rhs) {
        rep.sl1 = false;
        why << "(SL1) fails on basis pair (" << u << "," << v << ")";
      }
    }

  rep.grading3 = true;
  for (int u = 0; u < L.dim && rep.grading3; ++u)
    for (int v = 0; v < L.dim && rep.grading3; ++v) {
      int g = L.grade3[u] + L.grade3[v];
      for (const auto& [w, c] : L.brk[u][v].ents)
        if (c != 0 && (std::abs(g) > 1 || L.grade3[w] != g)) {
          rep.grading3 = false;
          why << "3-grading fails on basis pair (" << u << "," << v << ")";
          break;
        }
      // degree closure too
      for (const auto& [w, c] : L.brk[u][v].ents)
        if (c != 0 && L.degrees[w] != L.degrees[u] + L.degrees[v]) {
          rep.grading3 = false;
          why << "Z2-grading fails on basis pair (" << u << "," << v << ")";
          break;
        }
    }

  rep.toral = true;
  {
    int one = L.a_coord(alg->unit);
    for (int v = 0; v < L.dim && rep.toral; ++v) {
      RatVec got(L.dim, Rat(0));
      for (const auto& [w, c] : L.brk[one][v].ents) got[w] = c;
      RatVec want(L.dim, Rat(0));
      if (L.grade3[v] != 0) want[v] = L.grade3[v];
      if (got != want) {
        rep.toral = false;
        why << "toral property fails on basis " << v;
      }
    }
  }

  rep.jacobi = true;
  for (int x = 0; x < L.dim && rep.jacobi; ++x)
    for (int y = 0; y < L.dim && rep.jacobi; ++y)
      for (int z = 0; z < L.dim; ++z) {
        // (-1)^{|x||z|}[[x,y],z] + (-1)^{|y||x|}[[y,z],x]
        //   + (-1)^{|z||y|}[[z,x],y] = 0
        RatVec acc(L.dim, Rat(0));
        auto add_term = [&](int a, int b, int c, int sgn) {
          for (const auto& [w, cw] : L.brk[a][b].ents)
            for (const auto& [w2, cw2] : L.brk[w][c].ents)
              acc[w2] += Rat(sgn) * cw * cw2;
        };
        add_term(x, y, z, koszul(L.degrees[x], L.degrees[z]));
        add_term(y, z, x, koszul(L.degrees[y], L.degrees[x]));
        add_term(z, x, y, koszul(L.degrees[z], L.degrees[y]));
        if (!vec_is_zero(acc)) {
          rep.jacobi = false;
          why << "(SL2) fails on basis triple (" << x << "," << y << "," << z
              << ")";
          break;
        }
      }

  rep.first_failure = why.str();
  if (report) *report = rep;
  if (!rep.ok())
    throw std::logic_error("E-infinity build verification failed: " +
                           rep.first_failure);
  return L;
}

Subspace centre(const EInftyAlgebra& L) {
  NullspaceAccumulator acc(L.dim);
  for (int u = 0; u < L.dim; ++u)
    for (int w = 0; w < L.dim; ++w) {
      SparseRow row;
      for (int v = 0; v < L.dim; ++v) {
        // coefficient of basis w in [v, u]
        for (const auto& [ww, c] : L.brk[v][u].ents)
          if (ww == w && c != 0) row.add(v, c);
      }
      acc.add_row(row);
    }
  return acc.result();
}

IsoReport iso_to_eosp_qinf(const EInftyAlgebra& L) {
  IsoReport rep;
  if (L.choice != EChoice::eosp)
    throw std::invalid_argument("iso_to_eosp_qinf requires E = eosp(q)");
  const FormPtr& q = L.form;
  const TablePtr& alg = q->alg();

  FormPtr qinf = orthogonal_sum(*hyperbolic(1, alg), *q);
  const ModulePtr& minf = qinf->mod();
  const int ninf = minf->qdim();
  const int shift = 2 * alg->dim;  // M coordinates sit after the h block
  OspBasis eospinf = eosp_basis(qinf);
  rep.dim_l = L.dim;
  rep.dim_eosp_qinf = eospinf.dim();

  auto h_plus = [&](int k) {  // h_inf . e_k
    return ModuleElement::qbasis(minf, minf->flat(0, k));
  };
  ModuleElement h_minus = ModuleElement::qbasis(minf, minf->flat(1, alg->unit));
  auto embed_m = [&](int f) {
    return ModuleElement::qbasis(minf, shift + f);
  };

  // phi on ambient basis coordinates of L.
  std::vector<SuperEndo> phi(L.dim, SuperEndo::zero(minf));
  for (int k = 0; k < L.dim_a; ++k)
    phi[L.a_coord(k)] = make_E(*qinf, h_plus(k), h_minus);
  for (int f = 0; f < L.qdim; ++f) {
    phi[L.mplus_coord(f)] = make_E(*qinf, h_plus(alg->unit), embed_m(f));
    phi[L.mminus_coord(f)] =
        scale(Rat(-1), make_E(*qinf, h_minus, embed_m(f)));
  }
  for (int j = 0; j < L.dim_e; ++j) {
    SuperEndo ext = SuperEndo::zero(minf);
    const RatMatrix& x = L.e_basis[j].mat;
    for (int r = 0; r < L.qdim; ++r)
      for (int c = 0; c < L.qdim; ++c)
        ext.mat.at(shift + r, shift + c) = x.at(r, c);
    phi[L.e_coord(j)] = ext;
  }
  rep.built = true;

  std::ostringstream why;
  rep.degree_preserving = true;
  for (int u = 0; u < L.dim; ++u) {
    const SuperEndo& img = phi[u];
    if (img.is_zero() ||
        (img.is_homogeneous() && img.degree() == L.degrees[u]))
      continue;
    rep.degree_preserving = false;
    why << "image of basis " << u << " is not homogeneous of its degree";
    break;
  }

  std::vector<RatVec> flat;
  for (const auto& p : phi) flat.push_back(p.flatten());
  Subspace image = Subspace::from_spanning(ninf * ninf, flat);
  rep.injective = image.dim() == L.dim;
  rep.surjective = image.equals(eospinf.span());
  if (!rep.injective) why << "; phi has a kernel";
  if (!rep.surjective) why << "; image differs from eosp(q_inf)";

  rep.homomorphism = true;
  for (int u = 0; u < L.dim && rep.homomorphism; ++u)
    for (int v = 0; v < L.dim; ++v) {
      SuperEndo lhs = super_bracket(phi[u], phi[v]);
      SuperEndo rhs = SuperEndo::zero(minf);
      for (const auto& [w, c] : L.brk[u][v].ents)
        rhs = add(rhs, scale(c, phi[w]));
      if (!(lhs.mat == rhs.mat)) {
        rep.homomorphism = false;
        why << "; bracket mismatch on pair (" << u << "," << v << ")";
        break;
      }
    }
  rep.first_failure = why.str();
  return rep;
}

ToralReport check_toral_decomposition(const EInftyAlgebra& L) {
  ToralReport rep;
  GradedSubspace der = der_space(L);
  GradedSubspace ad = ad_space(L);
  Subspace der_t = der.total(), ad_t = ad.total();
  Subspace z = centre(L);

  // (Der L)_0 via the grading-preserving cut of Der.
  Der0Result d0 = der0_space(L);
  rep.der0_two_defs_agree = d0.two_defs_agree;
  Subspace der0 = d0.der0.total();

  rep.dim_der = der_t.dim();
  rep.dim_ad = ad_t.dim();
  rep.dim_der0 = der0.dim();
  rep.der_eq_ad_plus_der0 = ad_t.sum(der0).equals(der_t);

  // ad L cap {d : d(1) = 0} = ad L_0.
  std::vector<SparseRow> unit_col;
  int one = L.a_coord(L.form->alg()->unit);
  // functionals: every coordinate of d(1), reduced modulo Z(L) = centre.
  {
    std::vector<SparseRow> zfun = z.complement_functionals();
    for (const auto& f : zfun) {
      SparseRow g;
      for (const auto& [w, c] : f.ents) g.add(w * L.dim + one, c);
      unit_col.push_back(std::move(g));
    }
  }
  Subspace ad_ker1 = cut(ad_t, unit_col);
  std::vector<RatVec> adl0;
  for (int u = 0; u < L.dim; ++u)
    if (L.grade3[u] == 0) {
      RatVec e(L.dim, Rat(0));
      e[u] = 1;
      adl0.push_back(L.ad_matrix(e).flatten());
    }
  Subspace ad_l0 = Subspace::from_spanning(L.dim * L.dim, adl0);
  rep.dim_ad_l0 = ad_l0.dim();
  rep.ad_cap_ker1_eq_adL0 = ad_ker1.equals(ad_l0);
  return rep;
}

}  // namespace superosp

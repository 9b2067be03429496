#include "superosp/osp.hpp"

#include <sstream>

#include "superosp/sampling.hpp"

namespace superosp {

SuperEndo SuperEndo::zero(const ModulePtr& m) {
  SuperEndo e;
  e.mod = m;
  e.mat = RatMatrix(m->qdim(), m->qdim());
  return e;
}

SuperEndo SuperEndo::identity(const ModulePtr& m) {
  SuperEndo e = zero(m);
  e.mat = RatMatrix::identity(m->qdim());
  return e;
}

SuperEndo SuperEndo::homogeneous_part(Parity p) const {
  SuperEndo e = zero(mod);
  const int n = mod->qdim();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (mod->qdeg(r) + mod->qdeg(c) == p) e.mat.at(r, c) = mat.at(r, c);
  return e;
}

bool SuperEndo::is_homogeneous() const {
  return homogeneous_part(Parity::even).is_zero() ||
         homogeneous_part(Parity::odd).is_zero();
}

Parity SuperEndo::degree() const {
  bool ev = !homogeneous_part(Parity::even).is_zero();
  bool od = !homogeneous_part(Parity::odd).is_zero();
  if (ev && od) throw NonHomogeneousError("endomorphism has mixed degree");
  return od ? Parity::odd : Parity::even;
}

ModuleElement SuperEndo::apply(const ModuleElement& m) const {
  if (m.mod != mod) throw std::invalid_argument("endo/module mismatch");
  return {mod, mat.apply(m.c)};
}

SuperEndo add(const SuperEndo& x, const SuperEndo& y) {
  if (x.mod != y.mod) throw std::invalid_argument("endo module mismatch");
  SuperEndo e = SuperEndo::zero(x.mod);
  e.mat = x.mat.add(y.mat);
  return e;
}

SuperEndo sub(const SuperEndo& x, const SuperEndo& y) {
  if (x.mod != y.mod) throw std::invalid_argument("endo module mismatch");
  SuperEndo e = SuperEndo::zero(x.mod);
  e.mat = x.mat.sub(y.mat);
  return e;
}

SuperEndo scale(const Rat& r, const SuperEndo& x) {
  SuperEndo e = SuperEndo::zero(x.mod);
  e.mat = x.mat.scaled(r);
  return e;
}

SuperEndo compose(const SuperEndo& x, const SuperEndo& y) {
  if (x.mod != y.mod) throw std::invalid_argument("endo module mismatch");
  SuperEndo e = SuperEndo::zero(x.mod);
  e.mat = x.mat.mul(y.mat);
  return e;
}

SuperEndo from_flat(const ModulePtr& m, const RatVec& v) {
  SuperEndo e;
  e.mod = m;
  e.mat = RatMatrix::from_flat(m->qdim(), m->qdim(), v);
  return e;
}

SuperEndo super_bracket(const SuperEndo& x, const SuperEndo& y) {
  SuperEndo out = SuperEndo::zero(x.mod);
  for (Parity a : {Parity::even, Parity::odd}) {
    SuperEndo xa = x.homogeneous_part(a);
    if (xa.is_zero()) continue;
    for (Parity b : {Parity::even, Parity::odd}) {
      SuperEndo yb = y.homogeneous_part(b);
      if (yb.is_zero()) continue;
      SuperEndo term =
          sub(compose(xa, yb), scale(Rat(koszul(a, b)), compose(yb, xa)));
      out = add(out, term);
    }
  }
  return out;
}

SuperEndo right_mult_op(const ModulePtr& mod, const AlgebraElement& a) {
  SuperEndo e = SuperEndo::zero(mod);
  for (int u = 0; u < mod->qdim(); ++u) {
    ModuleElement col = right_mult(ModuleElement::qbasis(mod, u), a);
    for (int r = 0; r < mod->qdim(); ++r) e.mat.at(r, u) = col.c[r];
  }
  return e;
}

SuperEndo a_id_op(const ModulePtr& mod, const AlgebraElement& a) {
  SuperEndo e = SuperEndo::zero(mod);
  for (int u = 0; u < mod->qdim(); ++u) {
    ModuleElement col = left_mult(a, ModuleElement::qbasis(mod, u));
    for (int r = 0; r < mod->qdim(); ++r) e.mat.at(r, u) = col.c[r];
  }
  return e;
}

std::vector<SuperEndo> a_id_basis(const ModulePtr& mod) {
  std::vector<SuperEndo> out;
  for (int k = 0; k < mod->alg->dim; ++k)
    out.push_back(a_id_op(mod, AlgebraElement::basis(mod->alg, k)));
  return out;
}

bool SuperEndo::is_a_linear() const {
  if (a_linear_) return *a_linear_;
  bool ok = true;
  for (int l = 0; l < mod->alg->dim && ok; ++l) {
    SuperEndo rl = right_mult_op(mod, AlgebraElement::basis(mod->alg, l));
    ok = compose(*this, rl).mat == compose(rl, *this).mat;
  }
  a_linear_ = ok;
  return ok;
}

SuperEndo make_E(const QuadraticForm& q, const ModuleElement& m,
                 const ModuleElement& n) {
  if (m.mod != q.mod() || n.mod != q.mod())
    throw std::invalid_argument("make_E: module mismatch");
  SuperEndo e = SuperEndo::zero(q.mod());
  for (Parity a : {Parity::even, Parity::odd}) {
    ModuleElement ma = m.component(a);
    if (ma.is_zero()) continue;
    for (Parity b : {Parity::even, Parity::odd}) {
      ModuleElement nb = n.component(b);
      if (nb.is_zero()) continue;
      int sgn = koszul(a, b);
      for (int p = 0; p < q.qdim(); ++p) {
        // q(n,p) and q(m,p) against the basis vector p.
        AlgebraElement qnp = AlgebraElement::zero(q.alg());
        AlgebraElement qmp = AlgebraElement::zero(q.alg());
        for (int v = 0; v < q.qdim(); ++v) {
          if (nb.c[v] != 0)
            qnp = add(qnp, scale(nb.c[v], q.qtab(v, p)));
          if (ma.c[v] != 0)
            qmp = add(qmp, scale(ma.c[v], q.qtab(v, p)));
        }
        ModuleElement col =
            sub(right_mult(ma, qnp), scale(Rat(sgn), right_mult(nb, qmp)));
        for (int r = 0; r < q.qdim(); ++r)
          if (col.c[r] != 0) e.mat.at(r, p) += col.c[r];
      }
    }
  }
  return e;
}

bool osp_identity_holds(const QuadraticForm& q, const SuperEndo& x) {
  const int n = q.qdim();
  const int dA = q.alg()->dim;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      int sgn = koszul(q.mod()->qdeg(u), q.mod()->qdeg(v));
      for (int s = 0; s < dA; ++s) {
        Rat acc = 0;
        for (int t = 0; t < n; ++t) {
          if (x.mat.at(t, u) != 0) acc += x.mat.at(t, u) * q.qtab(t, v).c[s];
          if (x.mat.at(t, v) != 0)
            acc += Rat(sgn) * x.mat.at(t, v) * q.qtab(t, u).c[s];
        }
        if (acc != 0) return false;
      }
    }
  return true;
}

int OspBasis::dim_of(Parity p) const {
  int d = 0;
  for (const auto& e : vecs)
    if (!e.is_zero() && e.degree() == p) ++d;
  return d;
}

Subspace OspBasis::span() const {
  std::vector<RatVec> v;
  for (const auto& e : vecs) v.push_back(e.flatten());
  int amb = form->qdim() * form->qdim();
  return Subspace::from_spanning(amb, v);
}

OspBasis osp_basis(const FormPtr& q) {
  const ModulePtr& mod = q->mod();
  const int n = q->qdim();
  const int dA = q->alg()->dim;
  std::vector<RatMatrix> rmul;
  for (int l = 0; l < dA; ++l)
    rmul.push_back(right_mult_op(mod, AlgebraElement::basis(q->alg(), l)).mat);

  OspBasis out;
  out.form = q;
  for (Parity alpha : {Parity::even, Parity::odd}) {
    std::vector<int> unk;
    std::vector<int> unk_of(n * n, -1);
    for (int t = 0; t < n; ++t)
      for (int u = 0; u < n; ++u)
        if (mod->qdeg(t) == mod->qdeg(u) + alpha) {
          unk_of[t * n + u] = static_cast<int>(unk.size());
          unk.push_back(t * n + u);
        }
    NullspaceAccumulator acc(static_cast<int>(unk.size()));
    // A-linearity: X R_l = R_l X.
    for (int l = 0; l < dA; ++l) {
      const RatMatrix& R = rmul[l];
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          SparseRow row;
          for (int s = 0; s < n; ++s) {
            int u1 = unk_of[r * n + s];
            if (u1 >= 0 && R.at(s, c) != 0) row.add(u1, R.at(s, c));
            int u2 = unk_of[s * n + c];
            if (u2 >= 0 && R.at(r, s) != 0) row.add(u2, -R.at(r, s));
          }
          acc.add_row(row);
        }
    }
    // osp identity on Q-basis pairs.
    for (int u = 0; u < n; ++u)
      for (int v = u; v < n; ++v) {
        int sgn = koszul(mod->qdeg(u), mod->qdeg(v));
        for (int s = 0; s < dA; ++s) {
          SparseRow row;
          for (int t = 0; t < n; ++t) {
            int u1 = unk_of[t * n + u];
            if (u1 >= 0 && q->qtab(t, v).c[s] != 0)
              row.add(u1, q->qtab(t, v).c[s]);
            int u2 = unk_of[t * n + v];
            if (u2 >= 0 && q->qtab(t, u).c[s] != 0)
              row.add(u2, Rat(sgn) * q->qtab(t, u).c[s]);
          }
          acc.add_row(row);
        }
      }
    Subspace sol = acc.result();
    for (const auto& w : sol.basis()) {
      RatVec full(n * n, Rat(0));
      for (size_t j = 0; j < unk.size(); ++j) full[unk[j]] = w[j];
      out.vecs.push_back(from_flat(mod, full));
    }
  }
  return out;
}

OspBasis eosp_basis(const FormPtr& q) {
  const int n = q->qdim();
  std::vector<RatVec> by_parity[2];
  for (int u = 0; u < n; ++u)
    for (int v = u; v < n; ++v) {
      SuperEndo e = make_E(*q, ModuleElement::qbasis(q->mod(), u),
                           ModuleElement::qbasis(q->mod(), v));
      if (e.is_zero()) continue;
      Parity p = q->mod()->qdeg(u) + q->mod()->qdeg(v);
      by_parity[is_odd(p) ? 1 : 0].push_back(e.flatten());
    }
  OspBasis out;
  out.form = q;
  for (int p = 0; p < 2; ++p) {
    Subspace sp = Subspace::from_spanning(n * n, by_parity[p]);
    for (const auto& row : sp.basis()) out.vecs.push_back(from_flat(q->mod(), row));
  }
  return out;
}

std::vector<SuperEndo> eosp_block(const FormPtr& q,
                                  const std::vector<int>& rows1,
                                  const std::vector<int>& rows2) {
  const int n = q->qdim();
  const int dA = q->alg()->dim;
  std::vector<RatVec> gens;
  for (int i : rows1)
    for (int k = 0; k < dA; ++k)
      for (int j : rows2)
        for (int l = 0; l < dA; ++l) {
          SuperEndo e = make_E(
              *q, ModuleElement::qbasis(q->mod(), q->mod()->flat(i, k)),
              ModuleElement::qbasis(q->mod(), q->mod()->flat(j, l)));
          if (!e.is_zero()) gens.push_back(e.flatten());
        }
  Subspace sp = Subspace::from_spanning(n * n, gens);
  std::vector<SuperEndo> out;
  for (const auto& row : sp.basis()) out.push_back(from_flat(q->mod(), row));
  return out;
}

ModuleElement random_homogeneous(SplitMix64& rng, const ModulePtr& mod,
                                 Parity p) {
  ModuleElement m = ModuleElement::zero(mod);
  for (int f = 0; f < mod->qdim(); ++f)
    if (mod->qdeg(f) == p) m.c[f] = rng.small_rat();
  return m;
}

AlgebraElement random_homogeneous(SplitMix64& rng, const TablePtr& tab,
                                  Parity p) {
  AlgebraElement a = AlgebraElement::zero(tab);
  for (int k = 0; k < tab->dim; ++k)
    if (tab->deg(k) == p) a.c[k] = rng.small_rat();
  return a;
}

EIdentityReport check_E_identities(const FormPtr& q, int samples,
                                   uint64_t seed) {
  EIdentityReport rep;
  rep.samples = samples;
  SplitMix64 rng(seed);
  OspBasis osp = osp_basis(q);
  OspBasis eosp = eosp_basis(q);
  Subspace eosp_span =
      eosp.dim() ? eosp.span() : Subspace(q->qdim() * q->qdim());

  auto fail = [&rep](const std::string& what) {
    if (rep.ok) {
      rep.ok = false;
      rep.first_failure = what;
    }
  };

  for (int s = 0; s < samples && rep.ok; ++s) {
    ModuleElement m = random_homogeneous(rng, q->mod(), rng.parity());
    ModuleElement n = random_homogeneous(rng, q->mod(), rng.parity());
    ModuleElement p = random_homogeneous(rng, q->mod(), rng.parity());
    ModuleElement r = random_homogeneous(rng, q->mod(), rng.parity());
    Parity dm = m.degree(), dn = n.degree(), dp = p.degree(), dr = r.degree();

    SuperEndo Emn = make_E(*q, m, n);
    // antisymmetry
    SuperEndo rhs = scale(Rat(-koszul(dm, dn)), make_E(*q, n, m));
    if (!(Emn.mat == rhs.mat)) {
      fail("antisymmetry failed at sample " + std::to_string(s));
      break;
    }
    // adjointness
    AlgebraElement lhs_a = eval_q(*q, Emn.apply(p), r);
    int sgn = koszul(dm + dn, dp + dr);
    AlgebraElement rhs_a =
        scale(Rat(sgn), eval_q(*q, make_E(*q, p, r).apply(m), n));
    if (!(lhs_a == rhs_a)) {
      fail("adjointness failed at sample " + std::to_string(s));
      break;
    }
    // membership in osp
    if (!Emn.is_a_linear() || !osp_identity_holds(*q, Emn)) {
      fail("E_{m,n} not in osp at sample " + std::to_string(s));
      break;
    }
    // [x, E_{m,n}] = E_{x(m),n} + (-1)^{|x||m|} E_{m,x(n)}
    if (osp.dim() > 0) {
      const SuperEndo& x =
          osp.vecs[static_cast<size_t>(rng.uniform(0, osp.dim() - 1))];
      Parity dx = x.degree();
      SuperEndo lhs = super_bracket(x, Emn);
      SuperEndo rhs2 = add(make_E(*q, x.apply(m), n),
                           scale(Rat(koszul(dx, dm)),
                                 make_E(*q, m, x.apply(n))));
      if (!(lhs.mat == rhs2.mat)) {
        fail("[osp,E] identity failed at sample " + std::to_string(s));
        break;
      }
    }
  }
  // eosp is an ideal of osp: bracket closure into span(eosp).
  for (int i = 0; i < osp.dim() && rep.ok; ++i)
    for (int j = 0; j < eosp.dim() && rep.ok; ++j) {
      SuperEndo br = super_bracket(osp.vecs[i], eosp.vecs[j]);
      if (!eosp_span.contains(br.flatten()))
        fail("[osp, eosp] escaped span(eosp) at pair (" + std::to_string(i) +
             "," + std::to_string(j) + ")");
    }
  return rep;
}

}  // namespace superosp

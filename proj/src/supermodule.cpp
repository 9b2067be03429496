#include "superosp/supermodule.hpp"

#include <algorithm>

namespace superosp {

ModulePtr make_module(TablePtr alg, std::vector<Parity> degrees) {
  if (degrees.empty())
    throw std::invalid_argument("module rank must be >= 1");
  auto m = std::make_shared<FreeSuperModule>();
  m->alg = std::move(alg);
  m->rank = static_cast<int>(degrees.size());
  m->degrees = std::move(degrees);
  return m;
}

ModuleElement ModuleElement::zero(const ModulePtr& m) {
  return {m, RatVec(m->qdim(), Rat(0))};
}

ModuleElement ModuleElement::qbasis(const ModulePtr& m, int f) {
  ModuleElement e = zero(m);
  e.c[f] = 1;
  return e;
}

ModuleElement ModuleElement::component(Parity p) const {
  ModuleElement r = *this;
  for (int f = 0; f < mod->qdim(); ++f)
    if (mod->qdeg(f) != p) r.c[f] = 0;
  return r;
}

bool ModuleElement::is_homogeneous() const {
  return component(Parity::even).is_zero() || component(Parity::odd).is_zero();
}

Parity ModuleElement::degree() const {
  bool ev = !component(Parity::even).is_zero();
  bool od = !component(Parity::odd).is_zero();
  if (ev && od) throw NonHomogeneousError("module element has mixed degree");
  return od ? Parity::odd : Parity::even;
}

AlgebraElement ModuleElement::coord(int i) const {
  RatVec v(mod->alg->dim);
  for (int k = 0; k < mod->alg->dim; ++k) v[k] = c[mod->flat(i, k)];
  return {mod->alg, v};
}

namespace {
void check_same_module(const ModuleElement& a, const ModuleElement& b) {
  if (a.mod != b.mod)
    throw std::invalid_argument("module elements from different modules");
}
}  // namespace

ModuleElement add(const ModuleElement& a, const ModuleElement& b) {
  check_same_module(a, b);
  return {a.mod, vec_add(a.c, b.c)};
}

ModuleElement sub(const ModuleElement& a, const ModuleElement& b) {
  check_same_module(a, b);
  return {a.mod, vec_sub(a.c, b.c)};
}

ModuleElement scale(const Rat& r, const ModuleElement& m) {
  return {m.mod, vec_scale(r, m.c)};
}

ModuleElement right_mult(const ModuleElement& m, const AlgebraElement& a) {
  if (m.mod->alg != a.tab)
    throw std::invalid_argument("module/algebra table mismatch");
  ModuleElement r = ModuleElement::zero(m.mod);
  const int dA = a.tab->dim;
  for (int i = 0; i < m.mod->rank; ++i)
    for (int k = 0; k < dA; ++k) {
      const Rat& x = m.c[m.mod->flat(i, k)];
      if (x == 0) continue;
      for (int l = 0; l < dA; ++l) {
        if (a.c[l] == 0) continue;
        const RatVec& p = a.tab->prod(k, l);
        Rat f = x * a.c[l];
        for (int s = 0; s < dA; ++s)
          if (p[s] != 0) r.c[m.mod->flat(i, s)] += f * p[s];
      }
    }
  return r;
}

ModuleElement left_mult(const AlgebraElement& a, const ModuleElement& m) {
  // a.(b_i e_k) = (-1)^{|a|(beta_i + delta_k)} b_i (e_k a) per homogeneous a.
  if (m.mod->alg != a.tab)
    throw std::invalid_argument("module/algebra table mismatch");
  ModuleElement r = ModuleElement::zero(m.mod);
  const int dA = a.tab->dim;
  for (int l = 0; l < dA; ++l) {
    if (a.c[l] == 0) continue;
    Parity da = a.tab->deg(l);
    for (int i = 0; i < m.mod->rank; ++i)
      for (int k = 0; k < dA; ++k) {
        const Rat& x = m.c[m.mod->flat(i, k)];
        if (x == 0) continue;
        int sgn = koszul(da, m.mod->degrees[i] + a.tab->deg(k));
        const RatVec& p = a.tab->prod(k, l);
        Rat f = Rat(sgn) * x * a.c[l];
        for (int s = 0; s < dA; ++s)
          if (p[s] != 0) r.c[m.mod->flat(i, s)] += f * p[s];
      }
  }
  return r;
}

QuadraticForm::QuadraticForm(ModulePtr mod,
                             std::vector<std::vector<AlgebraElement>> gram)
    : mod_(std::move(mod)), gram_(std::move(gram)) {
  const int r = mod_->rank;
  if (static_cast<int>(gram_.size()) != r)
    throw std::invalid_argument("gram matrix has wrong shape");
  for (const auto& row : gram_) {
    if (static_cast<int>(row.size()) != r)
      throw std::invalid_argument("gram matrix has wrong shape");
    for (const auto& e : row)
      if (e.tab != mod_->alg)
        throw std::invalid_argument("gram entry from a different algebra");
  }
  // Precompute q on Q-basis pairs.
  const int n = mod_->qdim();
  const int dA = mod_->alg->dim;
  qtab_.assign(n, std::vector<AlgebraElement>(
                      n, AlgebraElement::zero(mod_->alg)));
  for (int u = 0; u < n; ++u) {
    int i = mod_->mod_index(u), k = mod_->alg_index(u);
    AlgebraElement ek = AlgebraElement::basis(mod_->alg, k);
    for (int v = 0; v < n; ++v) {
      int j = mod_->mod_index(v), l = mod_->alg_index(v);
      int sgn = koszul(mod_->alg->deg(k), mod_->degrees[j]);
      AlgebraElement el = AlgebraElement::basis(mod_->alg, l);
      qtab_[u][v] =
          scale(Rat(sgn), mul(mul(gram_[i][j], ek), el));
    }
    (void)dA;
  }
}

ValidationReport QuadraticForm::validate() const {
  ValidationReport rep;
  const int r = mod_->rank;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const AlgebraElement& g = gram_[i][j];
      Parity want = mod_->degrees[i] + mod_->degrees[j];
      if (!g.component(want + Parity::odd).is_zero()) {
        rep.ok = false;
        rep.violations.push_back(
            {"form_degree", {i, j}, "gram entry has the wrong Z2 degree"});
      }
      AlgebraElement sym = scale(
          Rat(koszul(mod_->degrees[i], mod_->degrees[j])), gram_[i][j]);
      if (!(gram_[j][i] == sym)) {
        rep.ok = false;
        rep.violations.push_back(
            {"supersymmetry", {i, j}, "G_ji != (-1)^{ij} G_ij"});
      }
    }
  return rep;
}

bool QuadraticForm::is_zero_form() const {
  for (const auto& row : gram_)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

FormPtr make_form(ModulePtr mod,
                  std::vector<std::vector<AlgebraElement>> gram) {
  return std::make_shared<QuadraticForm>(std::move(mod), std::move(gram));
}

FormPtr make_form_coeffs(ModulePtr mod,
                         const std::vector<std::vector<RatVec>>& entries) {
  std::vector<std::vector<AlgebraElement>> gram;
  for (const auto& row : entries) {
    std::vector<AlgebraElement> grow;
    for (const auto& v : row) {
      if (static_cast<int>(v.size()) != mod->alg->dim)
        throw std::invalid_argument("gram coefficient vector has wrong length");
      grow.push_back({mod->alg, v});
    }
    gram.push_back(std::move(grow));
  }
  return make_form(std::move(mod), std::move(gram));
}

FormPtr diagonal_form(const TablePtr& alg, const std::vector<Rat>& diag) {
  ModulePtr mod = make_module(
      alg, std::vector<Parity>(diag.size(), Parity::even));
  std::vector<std::vector<AlgebraElement>> gram(
      diag.size(),
      std::vector<AlgebraElement>(diag.size(), AlgebraElement::zero(alg)));
  for (size_t i = 0; i < diag.size(); ++i)
    gram[i][i] = scale(diag[i], AlgebraElement::one(alg));
  return make_form(mod, gram);
}

AlgebraElement eval_q(const QuadraticForm& q, const ModuleElement& m,
                      const ModuleElement& n) {
  if (m.mod != q.mod() || n.mod != q.mod())
    throw std::invalid_argument("eval_q: module mismatch");
  AlgebraElement r = AlgebraElement::zero(q.alg());
  for (int u = 0; u < q.qdim(); ++u) {
    if (m.c[u] == 0) continue;
    for (int v = 0; v < q.qdim(); ++v) {
      if (n.c[v] == 0) continue;
      const AlgebraElement& t = q.qtab(u, v);
      if (t.is_zero()) continue;
      Rat f = m.c[u] * n.c[v];
      for (int s = 0; s < q.alg()->dim; ++s)
        if (t.c[s] != 0) r.c[s] += f * t.c[s];
    }
  }
  return r;
}

FormPtr orthogonal_sum(const QuadraticForm& q1, const QuadraticForm& q2) {
  if (q1.alg() != q2.alg())
    throw std::invalid_argument("orthogonal_sum: coefficient algebra mismatch");
  std::vector<Parity> degs = q1.mod()->degrees;
  degs.insert(degs.end(), q2.mod()->degrees.begin(), q2.mod()->degrees.end());
  ModulePtr mod = make_module(q1.alg(), degs);
  const int r1 = q1.mod()->rank, r2 = q2.mod()->rank;
  std::vector<std::vector<AlgebraElement>> gram(
      r1 + r2, std::vector<AlgebraElement>(r1 + r2,
                                           AlgebraElement::zero(q1.alg())));
  for (int i = 0; i < r1; ++i)
    for (int j = 0; j < r1; ++j) gram[i][j] = q1.gram(i, j);
  for (int i = 0; i < r2; ++i)
    for (int j = 0; j < r2; ++j) gram[r1 + i][r1 + j] = q2.gram(i, j);
  return make_form(mod, gram);
}

FormPtr hyperbolic(int n_pairs, const TablePtr& alg) {
  if (n_pairs < 1) throw std::invalid_argument("hyperbolic: n_pairs >= 1");
  // Basis order: h_1, h_{-1}, h_2, h_{-2}, ...
  ModulePtr mod =
      make_module(alg, std::vector<Parity>(2 * n_pairs, Parity::even));
  std::vector<std::vector<AlgebraElement>> gram(
      2 * n_pairs, std::vector<AlgebraElement>(2 * n_pairs,
                                               AlgebraElement::zero(alg)));
  for (int i = 0; i < n_pairs; ++i) {
    gram[2 * i][2 * i + 1] = AlgebraElement::one(alg);
    gram[2 * i + 1][2 * i] = AlgebraElement::one(alg);
  }
  return make_form(mod, gram);
}

GradedSubspace radical(const QuadraticForm& q) {
  const int n = q.qdim();
  const int dA = q.alg()->dim;
  RatMatrix m(n * dA, n);
  for (int v = 0; v < n; ++v)
    for (int s = 0; s < dA; ++s)
      for (int u = 0; u < n; ++u) m.at(v * dA + s, u) = q.qtab(u, v).c[s];
  Subspace rad = nullspace(m);
  // The radical is graded (q is even); split by degree.
  std::vector<RatVec> ev, od;
  for (const auto& w : rad.basis()) {
    RatVec we(n, Rat(0)), wo(n, Rat(0));
    for (int u = 0; u < n; ++u)
      (is_odd(q.mod()->qdeg(u)) ? wo[u] : we[u]) = w[u];
    if (!vec_is_zero(we)) ev.push_back(we);
    if (!vec_is_zero(wo)) od.push_back(wo);
  }
  GradedSubspace out(n);
  out.even = Subspace::from_spanning(n, ev);
  out.odd = Subspace::from_spanning(n, od);
  if (out.dim() != rad.dim())
    throw std::logic_error("radical is not graded; form is invalid");
  return out;
}

std::vector<int> detect_paired_indices(const QuadraticForm& q) {
  const int r = q.mod()->rank;
  std::vector<int> partner(r, -1);
  for (int i = 0; i < r; ++i) {
    int nz = -1;
    bool clean = true;
    for (int j = 0; j < r; ++j) {
      if (q.gram(i, j).is_zero()) continue;
      if (nz >= 0) {
        clean = false;
        break;
      }
      nz = j;
    }
    if (!clean || nz < 0) continue;
    const AlgebraElement& g = q.gram(i, nz);
    if (!g.is_homogeneous() || !try_invert(g).has_value()) continue;
    if (q.mod()->degrees[i] != q.mod()->degrees[nz]) continue;
    partner[i] = nz;
  }
  std::vector<int> paired;
  for (int i = 0; i < r; ++i)
    if (partner[i] >= 0 && partner[partner[i]] == i) paired.push_back(i);
  return paired;
}

DiagClassification classify_diagonalizability(const QuadraticForm& q) {
  std::vector<int> paired = detect_paired_indices(q);
  DiagClassification out;
  if (static_cast<int>(paired.size()) != q.mod()->rank) return out;
  std::vector<int> pairing(q.mod()->rank);
  bool identity = true;
  for (int i = 0; i < q.mod()->rank; ++i) {
    int j = 0;
    while (q.gram(i, j).is_zero()) ++j;
    pairing[i] = j;
    if (j != i) identity = false;
  }
  out.kind = identity ? DiagKind::invertibly_diagonalizable
                      : DiagKind::almost_diagonalizable;
  out.pairing = pairing;
  return out;
}

}  // namespace superosp

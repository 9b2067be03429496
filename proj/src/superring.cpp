#include "superosp/superring.hpp"

#include <json.hpp>

#include <sstream>

namespace superosp {

using nlohmann::json;

AlgebraElement AlgebraElement::zero(const TablePtr& t) {
  return {t, RatVec(t->dim, Rat(0))};
}

AlgebraElement AlgebraElement::one(const TablePtr& t) {
  return basis(t, t->unit);
}

AlgebraElement AlgebraElement::basis(const TablePtr& t, int k) {
  AlgebraElement e = zero(t);
  e.c[k] = 1;
  return e;
}

AlgebraElement AlgebraElement::component(Parity p) const {
  AlgebraElement r = *this;
  for (int k = 0; k < tab->dim; ++k)
    if (tab->deg(k) != p) r.c[k] = 0;
  return r;
}

bool AlgebraElement::is_homogeneous() const {
  return component(Parity::even).is_zero() || component(Parity::odd).is_zero();
}

Parity AlgebraElement::degree() const {
  bool ev = !component(Parity::even).is_zero();
  bool od = !component(Parity::odd).is_zero();
  if (ev && od) throw NonHomogeneousError("element has mixed degree");
  return od ? Parity::odd : Parity::even;
}

bool AlgebraElement::operator==(const AlgebraElement& o) const {
  return tab == o.tab && c == o.c;
}

namespace {
void check_same_table(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.tab != b.tab)
    throw std::invalid_argument("algebra elements from different tables");
}
}  // namespace

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_table(a, b);
  return {a.tab, vec_add(a.c, b.c)};
}

AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_table(a, b);
  return {a.tab, vec_sub(a.c, b.c)};
}

AlgebraElement scale(const Rat& r, const AlgebraElement& a) {
  return {a.tab, vec_scale(r, a.c)};
}

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_table(a, b);
  AlgebraElement r = AlgebraElement::zero(a.tab);
  const int n = a.tab->dim;
  for (int k = 0; k < n; ++k) {
    if (a.c[k] == 0) continue;
    for (int l = 0; l < n; ++l) {
      if (b.c[l] == 0) continue;
      Rat f = a.c[k] * b.c[l];
      const RatVec& p = a.tab->prod(k, l);
      for (int m = 0; m < n; ++m)
        if (p[m] != 0) r.c[m] += f * p[m];
    }
  }
  return r;
}

std::optional<AlgebraElement> try_invert(const AlgebraElement& a) {
  if (!a.is_homogeneous()) throw NonHomogeneousError("invert: mixed degree");
  if (a.is_zero() || a.degree() == Parity::odd) return std::nullopt;
  // Solve a*x = 1 over the underlying Q-space: columns are a*e_l.
  const int n = a.tab->dim;
  RatMatrix m(n, n);
  for (int l = 0; l < n; ++l) {
    AlgebraElement col = mul(a, AlgebraElement::basis(a.tab, l));
    for (int r = 0; r < n; ++r) m.at(r, l) = col.c[r];
  }
  // Augment with the unit and reduce.
  RatMatrix aug(n, n + 1);
  for (int r = 0; r < n; ++r) {
    for (int l = 0; l < n; ++l) aug.at(r, l) = m.at(r, l);
    aug.at(r, n) = (r == a.tab->unit) ? 1 : 0;
  }
  // Gaussian elimination.
  int rank = 0;
  std::vector<int> pivots;
  for (int c = 0; c < n && rank < n; ++c) {
    int sel = -1;
    for (int i = rank; i < n; ++i)
      if (aug.at(i, c) != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    for (int j = 0; j <= n; ++j) std::swap(aug.at(rank, j), aug.at(sel, j));
    Rat inv = 1 / aug.at(rank, c);
    for (int j = 0; j <= n; ++j) aug.at(rank, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == rank || aug.at(i, c) == 0) continue;
      Rat f = aug.at(i, c);
      for (int j = 0; j <= n; ++j) aug.at(i, j) -= f * aug.at(rank, j);
    }
    pivots.push_back(c);
    ++rank;
  }
  RatVec x(n, Rat(0));
  for (int i = 0; i < rank; ++i) x[pivots[i]] = aug.at(i, n);
  // Consistency: rows beyond the rank must have zero rhs.
  for (int i = rank; i < n; ++i)
    if (aug.at(i, n) != 0) return std::nullopt;
  AlgebraElement cand{a.tab, x};
  if (!(mul(a, cand) == AlgebraElement::one(a.tab))) return std::nullopt;
  return cand;
}

AlgebraElement invert(const AlgebraElement& a) {
  auto r = try_invert(a);
  if (!r) throw NotInvertibleError("element is not invertible");
  return *r;
}

ValidationReport validate_table(const SuperAlgebraTable& t) {
  if (t.dim < 1) throw std::invalid_argument("table dim must be >= 1");
  if (static_cast<int>(t.degrees.size()) != t.dim)
    throw std::invalid_argument("degrees array has wrong length");
  if (t.unit < 0 || t.unit >= t.dim)
    throw std::invalid_argument("unit index out of range");
  if (static_cast<int>(t.sc.size()) != t.dim)
    throw std::invalid_argument("structure constant array has wrong shape");
  for (const auto& row : t.sc) {
    if (static_cast<int>(row.size()) != t.dim)
      throw std::invalid_argument("structure constant array has wrong shape");
    for (const auto& v : row)
      if (static_cast<int>(v.size()) != t.dim)
        throw std::invalid_argument("structure constant array has wrong shape");
  }

  ValidationReport rep;
  auto fail = [&rep](std::string axiom, std::vector<int> w,
                     std::string detail) {
    rep.ok = false;
    rep.violations.push_back({std::move(axiom), std::move(w),
                              std::move(detail)});
  };

  const int n = t.dim;
  // degree of 1 is even
  if (t.deg(t.unit) != Parity::even)
    fail("unit_degree", {t.unit}, "basis element 1 must be even");
  // two-sided unit
  for (int k = 0; k < n; ++k) {
    RatVec want(n, Rat(0));
    want[k] = 1;
    if (t.prod(t.unit, k) != want) {
      fail("unit", {t.unit, k}, "1*e_k != e_k");
      break;
    }
    if (t.prod(k, t.unit) != want) {
      fail("unit", {k, t.unit}, "e_k*1 != e_k");
      break;
    }
  }
  // supercommutativity: e_k e_l = (-1)^{|k||l|} e_l e_k
  for (int k = 0; k < n && rep.ok; ++k)
    for (int l = k; l < n; ++l) {
      int s = koszul(t.deg(k), t.deg(l));
      bool bad = false;
      for (int m = 0; m < n; ++m)
        if (t.prod(k, l)[m] != s * t.prod(l, k)[m]) bad = true;
      if (bad) {
        fail("supercommutativity", {k, l}, "e_k e_l != (-1)^{kl} e_l e_k");
        break;
      }
    }
  // grading closure
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        if (t.prod(k, l)[m] != 0 && t.deg(m) != t.deg(k) + t.deg(l)) {
          fail("grading", {k, l, m}, "product leaves the graded component");
          k = l = n - 1;
          m = n;
          break;
        }
  // associativity on basis triples
  bool assoc_ok = true;
  for (int k = 0; k < n && assoc_ok; ++k)
    for (int l = 0; l < n && assoc_ok; ++l)
      for (int m = 0; m < n && assoc_ok; ++m) {
        RatVec lhs(n, Rat(0)), rhs(n, Rat(0));
        const RatVec& kl = t.prod(k, l);
        for (int s = 0; s < n; ++s)
          if (kl[s] != 0)
            for (int u = 0; u < n; ++u) lhs[u] += kl[s] * t.prod(s, m)[u];
        const RatVec& lm = t.prod(l, m);
        for (int s = 0; s < n; ++s)
          if (lm[s] != 0)
            for (int u = 0; u < n; ++u) rhs[u] += lm[s] * t.prod(k, s)[u];
        if (lhs != rhs) {
          fail("associativity", {k, l, m}, "(e_k e_l)e_m != e_k(e_l e_m)");
          assoc_ok = false;
        }
      }
  return rep;
}

GradedSubspace algebra_derivations(const TablePtr& t) {
  const int n = t->dim;
  const int ambient = n * n;  // entry (r, k) at r*n + k
  GradedSubspace out(ambient);
  for (Parity alpha : {Parity::even, Parity::odd}) {
    // Unknowns: entries D[r][k] with |r| = |k| + alpha.
    std::vector<int> unk;  // ambient index per unknown
    std::vector<int> unk_of(ambient, -1);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k)
        if (t->deg(r) == t->deg(k) + alpha) {
          unk_of[r * n + k] = static_cast<int>(unk.size());
          unk.push_back(r * n + k);
        }
    NullspaceAccumulator acc(static_cast<int>(unk.size()));
    // d(e_k e_l) = d(e_k) e_l + (-1)^{alpha |e_k|} e_k d(e_l)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        int sgn = is_odd(alpha) && is_odd(t->deg(k)) ? -1 : 1;
        for (int out_s = 0; out_s < n; ++out_s) {
          SparseRow row;
          const RatVec& kl = t->prod(k, l);
          for (int m = 0; m < n; ++m) {
            if (kl[m] == 0) continue;
            int u = unk_of[out_s * n + m];
            if (u >= 0) row.add(u, kl[m]);
          }
          for (int r = 0; r < n; ++r) {
            int u = unk_of[r * n + k];
            if (u >= 0 && t->prod(r, l)[out_s] != 0)
              row.add(u, -t->prod(r, l)[out_s]);
            u = unk_of[r * n + l];
            if (u >= 0 && t->prod(k, r)[out_s] != 0)
              row.add(u, Rat(-sgn) * t->prod(k, r)[out_s]);
          }
          acc.add_row(row);
        }
      }
    Subspace sol = acc.result();
    std::vector<RatVec> vecs;
    for (const auto& w : sol.basis()) {
      RatVec v(ambient, Rat(0));
      for (size_t j = 0; j < unk.size(); ++j) v[unk[j]] = w[j];
      vecs.push_back(std::move(v));
    }
    Subspace sp = Subspace::from_spanning(ambient, vecs);
    if (alpha == Parity::even)
      out.even = sp;
    else
      out.odd = sp;
  }
  return out;
}

TablePtr grassmann_table(int ngen) {
  // Basis: subsets of {1..n} in bit order; e_S = product of xi_i, i in S,
  // in increasing index order.
  if (ngen < 0 || ngen > 6)
    throw std::invalid_argument("grassmann_table: 0 <= n <= 6");
  const int dim = 1 << ngen;
  auto t = std::make_shared<SuperAlgebraTable>();
  t->dim = dim;
  t->unit = 0;
  t->name = "G" + std::to_string(ngen);
  t->degrees.resize(dim);
  for (int s = 0; s < dim; ++s)
    t->degrees[s] =
        (__builtin_popcount(static_cast<unsigned>(s)) % 2) ? Parity::odd
                                                           : Parity::even;
  t->sc.assign(dim, std::vector<RatVec>(dim, RatVec(dim, Rat(0))));
  for (int sa = 0; sa < dim; ++sa)
    for (int sb = 0; sb < dim; ++sb) {
      if (sa & sb) continue;  // repeated generator squares to zero
      // Sign: move each generator of sb past the higher-index part of sa.
      int sign = 1;
      for (int i = 0; i < ngen; ++i) {
        if (!(sb & (1 << i))) continue;
        int higher = sa >> (i + 1);
        if (__builtin_popcount(static_cast<unsigned>(higher)) % 2) sign = -sign;
      }
      t->sc[sa][sb][sa | sb] = sign;
    }
  return t;
}

TablePtr preset_table(const std::string& name) {
  if (name == "Q") {
    auto t = std::make_shared<SuperAlgebraTable>();
    t->dim = 1;
    t->unit = 0;
    t->degrees = {Parity::even};
    t->sc.assign(1, std::vector<RatVec>(1, RatVec(1, Rat(1))));
    t->name = "Q";
    return t;
  }
  if (name == "Geps") {
    auto t = std::make_shared<SuperAlgebraTable>();
    t->dim = 2;
    t->unit = 0;
    t->degrees = {Parity::even, Parity::even};
    t->sc.assign(2, std::vector<RatVec>(2, RatVec(2, Rat(0))));
    t->sc[0][0][0] = 1;
    t->sc[0][1][1] = 1;
    t->sc[1][0][1] = 1;  // eps^2 = 0
    t->name = "Geps";
    return t;
  }
  if (name == "G1") return grassmann_table(1);
  if (name == "G2") return grassmann_table(2);
  if (name.rfind("Qtmod", 0) == 0) {
    int m = std::stoi(name.substr(5));
    if (m < 1 || m > 16) throw std::invalid_argument("Qtmod<m>: 1 <= m <= 16");
    auto t = std::make_shared<SuperAlgebraTable>();
    t->dim = m;
    t->unit = 0;
    t->degrees.assign(m, Parity::even);
    t->sc.assign(m, std::vector<RatVec>(m, RatVec(m, Rat(0))));
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) t->sc[k][l][(k + l) % m] = 1;
    t->name = name;
    return t;
  }
  throw std::invalid_argument("unknown algebra preset: " + name);
}

TablePtr table_from_json_text(const std::string& text) {
  json j = json::parse(text);
  auto t = std::make_shared<SuperAlgebraTable>();
  t->dim = j.at("dim").get<int>();
  if (t->dim < 1) throw std::invalid_argument("table dim must be >= 1");
  for (int d : j.at("degrees").get<std::vector<int>>()) {
    if (d != 0 && d != 1) throw std::invalid_argument("degrees must be 0/1");
    t->degrees.push_back(d ? Parity::odd : Parity::even);
  }
  if (static_cast<int>(t->degrees.size()) != t->dim)
    throw std::invalid_argument("degrees array has wrong length");
  t->unit = j.at("unit").get<int>();
  t->sc.assign(t->dim, std::vector<RatVec>(t->dim, RatVec(t->dim, Rat(0))));
  for (const auto& trip : j.at("sc")) {
    if (!trip.is_array() || trip.size() != 4)
      throw std::invalid_argument("sc triplet must be [k,l,m,\"p/q\"]");
    int k = trip[0].get<int>(), l = trip[1].get<int>(), m = trip[2].get<int>();
    if (k < 0 || k >= t->dim || l < 0 || l >= t->dim || m < 0 || m >= t->dim)
      throw std::invalid_argument("sc index out of range");
    Rat v = trip[3].is_string() ? parse_rat(trip[3].get<std::string>())
                                : Rat(trip[3].get<long>());
    t->sc[k][l][m] = v;
  }
  if (j.contains("name")) t->name = j["name"].get<std::string>();
  return t;
}

std::string table_to_json_text(const SuperAlgebraTable& t) {
  json j;
  j["dim"] = t.dim;
  std::vector<int> degs;
  for (Parity p : t.degrees) degs.push_back(is_odd(p) ? 1 : 0);
  j["degrees"] = degs;
  j["unit"] = t.unit;
  json sc = json::array();
  for (int k = 0; k < t.dim; ++k)
    for (int l = 0; l < t.dim; ++l)
      for (int m = 0; m < t.dim; ++m)
        if (t.sc[k][l][m] != 0)
          sc.push_back({k, l, m, rat_str(t.sc[k][l][m])});
  j["sc"] = sc;
  if (!t.name.empty()) j["name"] = t.name;
  return j.dump();
}

}  // namespace superosp

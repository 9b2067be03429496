#include "superosp/solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace superosp {

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  for (char ch : s) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' ||
          ch == '+' || ch == '/'))
      throw std::invalid_argument("bad rational literal: " + s);
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

bool vec_is_zero(const RatVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

RatVec vec_add(const RatVec& a, const RatVec& b) {
  RatVec r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

RatVec vec_sub(const RatVec& a, const RatVec& b) {
  RatVec r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

RatVec vec_scale(const Rat& c, const RatVec& v) {
  RatVec r(v);
  for (Rat& x : r) x *= c;
  return r;
}

void vec_axpy(RatVec& acc, const Rat& c, const RatVec& v) {
  if (c == 0) return;
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += c * v[i];
}

void SparseRow::add(int col, const Rat& v) {
  if (v == 0) return;
  auto it = std::lower_bound(
      ents.begin(), ents.end(), col,
      [](const std::pair<int, Rat>& e, int c) { return e.first < c; });
  if (it != ents.end() && it->first == col)
    it->second += v;
  else
    ents.insert(it, {col, v});
}

void SparseRow::compress() {
  ents.erase(std::remove_if(ents.begin(), ents.end(),
                            [](const std::pair<int, Rat>& e) {
                              return e.second == 0;
                            }),
             ents.end());
}

Rat SparseRow::dot(const RatVec& v) const {
  Rat s = 0;
  for (const auto& [c, val] : ents) s += val * v[c];
  return s;
}

RatMatrix RatMatrix::identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatVec RatMatrix::apply(const RatVec& v) const {
  RatVec r(rows, Rat(0));
  for (int i = 0; i < rows; ++i) {
    Rat s = 0;
    const Rat* row = &a[static_cast<size_t>(i) * cols];
    for (int j = 0; j < cols; ++j)
      if (row[j] != 0) s += row[j] * v[j];
    r[i] = s;
  }
  return r;
}

RatMatrix RatMatrix::mul(const RatMatrix& o) const {
  RatMatrix r(rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (int j = 0; j < o.cols; ++j)
        if (o.at(k, j) != 0) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

RatMatrix RatMatrix::add(const RatMatrix& o) const {
  RatMatrix r(*this);
  for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
  return r;
}

RatMatrix RatMatrix::sub(const RatMatrix& o) const {
  RatMatrix r(*this);
  for (size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
  return r;
}

RatMatrix RatMatrix::scaled(const Rat& c) const {
  RatMatrix r(*this);
  for (Rat& x : r.a) x *= c;
  return r;
}

bool RatMatrix::is_zero() const {
  for (const Rat& x : a)
    if (x != 0) return false;
  return true;
}

bool RatMatrix::operator==(const RatMatrix& o) const {
  return rows == o.rows && cols == o.cols && a == o.a;
}

RatMatrix RatMatrix::from_flat(int r, int c, RatVec v) {
  RatMatrix m;
  m.rows = r;
  m.cols = c;
  m.a = std::move(v);
  return m;
}

namespace {

// In-place Gauss-Jordan to RREF with first-nonzero pivoting in column order.
// Returns pivot columns.  Zero rows are removed.
std::vector<int> rref_inplace(std::vector<RatVec>& rows, int ambient) {
  std::vector<int> pivots;
  size_t r = 0;
  for (int c = 0; c < ambient && r < rows.size(); ++c) {
    size_t sel = r;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    Rat inv = 1 / rows[r][c];
    for (int j = c; j < ambient; ++j) rows[r][j] *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (int j = c; j < ambient; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

void make_primitive(std::vector<Int>& v) {
  Int g = 0;
  for (const Int& x : v) {
    if (x == 0) continue;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) return;
  }
  if (g == 0 || g == 1) return;
  for (Int& x : v)
    if (x != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

}  // namespace

Subspace Subspace::from_spanning(int ambient,
                                 const std::vector<RatVec>& vecs) {
  for (const auto& v : vecs)
    if (static_cast<int>(v.size()) != ambient)
      throw std::invalid_argument("spanning vector has wrong length");
  Subspace s(ambient);
  s.rows_ = vecs;
  s.pivots_ = rref_inplace(s.rows_, ambient);
  return s;
}

RatVec Subspace::reduce(RatVec v) const {
  for (size_t j = 0; j < rows_.size(); ++j) {
    const Rat& f = v[pivots_[j]];
    if (f == 0) continue;
    Rat c = f;  // pivot entries are 1
    for (int k = 0; k < ambient_; ++k)
      if (rows_[j][k] != 0) v[k] -= c * rows_[j][k];
  }
  return v;
}

bool Subspace::contains(const RatVec& v) const {
  return vec_is_zero(reduce(v));
}

bool Subspace::contains(const Subspace& other) const {
  for (const auto& r : other.rows_)
    if (!contains(r)) return false;
  return true;
}

bool Subspace::equals(const Subspace& other) const {
  return ambient_ == other.ambient_ && pivots_ == other.pivots_ &&
         rows_ == other.rows_;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (ambient_ != other.ambient_)
    throw std::invalid_argument("subspace ambient mismatch");
  std::vector<RatVec> all = rows_;
  all.insert(all.end(), other.rows_.begin(), other.rows_.end());
  return from_spanning(ambient_, all);
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (ambient_ != other.ambient_)
    throw std::invalid_argument("subspace ambient mismatch");
  // Kernel-of-concatenation: alpha with sum_i alpha_i U_i = sum_j beta_j V_j.
  int k = dim(), l = other.dim();
  if (k == 0 || l == 0) return Subspace(ambient_);
  RatMatrix m(ambient_, k + l);
  for (int i = 0; i < k; ++i)
    for (int r = 0; r < ambient_; ++r) m.at(r, i) = rows_[i][r];
  for (int j = 0; j < l; ++j)
    for (int r = 0; r < ambient_; ++r) m.at(r, k + j) = -other.rows_[j][r];
  Subspace ker = nullspace(m);
  std::vector<RatVec> gens;
  for (const auto& w : ker.basis()) {
    RatVec v(ambient_, Rat(0));
    for (int i = 0; i < k; ++i) vec_axpy(v, w[i], rows_[i]);
    gens.push_back(std::move(v));
  }
  return from_spanning(ambient_, gens);
}

bool Subspace::is_direct_with(const Subspace& other) const {
  return sum(other).dim() == dim() + other.dim();
}

std::vector<SparseRow> Subspace::complement_functionals() const {
  std::vector<bool> is_pivot(ambient_, false);
  for (int p : pivots_) is_pivot[p] = true;
  std::vector<SparseRow> out;
  for (int c = 0; c < ambient_; ++c) {
    if (is_pivot[c]) continue;
    SparseRow f;
    f.add(c, 1);
    for (size_t j = 0; j < rows_.size(); ++j)
      if (rows_[j][c] != 0) f.add(pivots_[j], -rows_[j][c]);
    out.push_back(std::move(f));
  }
  return out;
}

Subspace nullspace(const RatMatrix& m) {
  std::vector<RatVec> rows;
  rows.reserve(m.rows);
  for (int i = 0; i < m.rows; ++i)
    rows.emplace_back(m.a.begin() + static_cast<size_t>(i) * m.cols,
                      m.a.begin() + static_cast<size_t>(i + 1) * m.cols);
  std::vector<int> pivots = rref_inplace(rows, m.cols);
  std::vector<bool> is_pivot(m.cols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<RatVec> basis;
  for (int f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    RatVec v(m.cols, Rat(0));
    v[f] = 1;
    for (size_t j = 0; j < rows.size(); ++j) v[pivots[j]] = -rows[j][f];
    basis.push_back(std::move(v));
  }
  return Subspace::from_spanning(m.cols, basis);
}

NullspaceAccumulator::NullspaceAccumulator(int unknowns)
    : unknowns_(unknowns) {
  basis_.resize(unknowns);
  for (int i = 0; i < unknowns; ++i) {
    basis_[i].assign(unknowns, Int(0));
    basis_[i][i] = 1;
  }
}

void NullspaceAccumulator::add_row(const SparseRow& row) {
  if (row.empty() || basis_.empty()) return;
  // Scale the row to integers.
  Int den(1);
  for (const auto& [c, v] : row.ents)
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den().get_mpz_t());
  std::vector<std::pair<int, Int>> irow;
  irow.reserve(row.ents.size());
  for (const auto& [c, v] : row.ents) {
    Rat scaled = v * den;
    irow.emplace_back(c, Int(scaled.get_num()));
  }
  // Dots of the row against the current solution basis.
  std::vector<Int> dots(basis_.size(), Int(0));
  size_t pivot = basis_.size();
  for (size_t i = 0; i < basis_.size(); ++i) {
    Int& d = dots[i];
    for (const auto& [c, val] : irow)
      mpz_addmul(d.get_mpz_t(), val.get_mpz_t(), basis_[i][c].get_mpz_t());
    if (d != 0 && pivot == basis_.size()) pivot = i;
  }
  if (pivot == basis_.size()) return;  // row already satisfied
  const std::vector<Int> vp = std::move(basis_[pivot]);
  const Int dp = dots[pivot];
  for (size_t i = 0; i < basis_.size(); ++i) {
    if (i == pivot || dots[i] == 0) continue;
    std::vector<Int>& vi = basis_[i];
    const Int& di = dots[i];
    for (int c = 0; c < unknowns_; ++c) {
      mpz_mul(vi[c].get_mpz_t(), vi[c].get_mpz_t(), dp.get_mpz_t());
      mpz_submul(vi[c].get_mpz_t(), di.get_mpz_t(), vp[c].get_mpz_t());
    }
    make_primitive(vi);
  }
  basis_.erase(basis_.begin() + pivot);
}

Subspace NullspaceAccumulator::result() const {
  std::vector<RatVec> vecs;
  vecs.reserve(basis_.size());
  for (const auto& iv : basis_) {
    RatVec v(unknowns_);
    for (int c = 0; c < unknowns_; ++c) v[c] = Rat(iv[c]);
    vecs.push_back(std::move(v));
  }
  return Subspace::from_spanning(unknowns_, vecs);
}

SpanSolver::SpanSolver(int ambient, const std::vector<RatVec>& gens)
    : ambient_(ambient), ngens_(static_cast<int>(gens.size())),
      span_(ambient) {
  // Echelonize [gens | I] so each echelon row carries its expression in the
  // original generators.
  std::vector<RatVec> aug;
  for (int i = 0; i < ngens_; ++i) {
    RatVec r(ambient_ + ngens_, Rat(0));
    std::copy(gens[i].begin(), gens[i].end(), r.begin());
    r[ambient_ + i] = 1;
    aug.push_back(std::move(r));
  }
  size_t rk = 0;
  for (int c = 0; c < ambient_ && rk < aug.size(); ++c) {
    size_t sel = rk;
    while (sel < aug.size() && aug[sel][c] == 0) ++sel;
    if (sel == aug.size()) continue;
    std::swap(aug[rk], aug[sel]);
    Rat inv = 1 / aug[rk][c];
    for (size_t j = 0; j < aug[rk].size(); ++j) aug[rk][j] *= inv;
    for (size_t i = 0; i < aug.size(); ++i) {
      if (i == rk || aug[i][c] == 0) continue;
      Rat f = aug[i][c];
      for (size_t j = 0; j < aug[i].size(); ++j) aug[i][j] -= f * aug[rk][j];
    }
    pivots_.push_back(c);
    ++rk;
  }
  for (size_t i = 0; i < rk; ++i) {
    rref_.emplace_back(aug[i].begin(), aug[i].begin() + ambient_);
    expr_.emplace_back(aug[i].begin() + ambient_, aug[i].end());
  }
  span_ = Subspace::from_spanning(ambient_, rref_);
}

std::optional<RatVec> SpanSolver::coords(const RatVec& v) const {
  RatVec residual = v;
  RatVec c(ngens_, Rat(0));
  for (size_t j = 0; j < rref_.size(); ++j) {
    const Rat f = residual[pivots_[j]];
    if (f == 0) continue;
    for (int k = 0; k < ambient_; ++k)
      if (rref_[j][k] != 0) residual[k] -= f * rref_[j][k];
    vec_axpy(c, f, expr_[j]);
  }
  if (!vec_is_zero(residual)) return std::nullopt;
  return c;
}

Subspace cut(const Subspace& space, const std::vector<SparseRow>& functionals) {
  int d = space.dim();
  if (d == 0) return space;
  NullspaceAccumulator acc(d);
  for (const auto& f : functionals) {
    SparseRow row;
    for (int j = 0; j < d; ++j) {
      Rat val = f.dot(space.basis()[j]);
      if (val != 0) row.add(j, val);
    }
    acc.add_row(row);
  }
  Subspace combos = acc.result();
  std::vector<RatVec> gens;
  for (const auto& w : combos.basis()) {
    RatVec v(space.ambient(), Rat(0));
    for (int j = 0; j < d; ++j) vec_axpy(v, w[j], space.basis()[j]);
    gens.push_back(std::move(v));
  }
  return Subspace::from_spanning(space.ambient(), gens);
}

}  // namespace superosp

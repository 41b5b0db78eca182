#include "vertexkit/lattice.hpp"

#include <algorithm>
#include <functional>

namespace vertexkit::lattice {

void LatticeSpec::validate() const {
  if (rank == 0) throw std::invalid_argument("lattice rank must be >= 1");
  if (gram.size() != rank) throw std::invalid_argument("gram: wrong number of rows");
  for (std::size_t i = 0; i < rank; ++i) {
    if (gram[i].size() != rank) throw std::invalid_argument("gram: wrong row length");
    for (std::size_t j = 0; j < rank; ++j) {
      if (gram[i][j] != gram[j][i]) throw std::invalid_argument("gram: not symmetric");
      if (gram[i][j] % 2 != 0)
        throw std::invalid_argument("gram: entry not even (odd lattices need a cocycle twist)");
    }
  }
  if (weight_cap < 0 || series_cap < 0) throw std::invalid_argument("caps must be >= 0");
}

std::int64_t LatticeSpec::pairing(const std::vector<std::int64_t>& a,
                                  const std::vector<std::int64_t>& b) const {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < rank; ++j) acc += a[i] * gram[i][j] * b[j];
  return acc;
}

std::int64_t LatticeSpec::basis_pairing(std::uint32_t k,
                                        const std::vector<std::int64_t>& a) const {
  std::int64_t acc = 0;
  for (std::size_t j = 0; j < rank; ++j) acc += gram[k][j] * a[j];
  return acc;
}

std::string LatticeState::to_string() const {
  std::string s = "e^(";
  for (std::size_t k = 0; k < group.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(group[k]);
  }
  s += ")";
  for (const auto& [kn, e] : heis) {
    s += "*g" + std::to_string(kn.first + 1) + "(-" + std::to_string(kn.second) + ")";
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

std::string StateVector::to_string() const {
  std::string s;
  for (const auto& [st, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += rat_to_string(c) + "*" + st.to_string();
  }
  return s.empty() ? "0" : s;
}

LatticeAlgebra::LatticeAlgebra(LatticeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  // mode truncation rests on weights being bounded below, so the Gram matrix
  // must be positive definite (Sylvester minors)
  for (std::uint32_t k = 1; k <= spec_.rank; ++k) {
    std::vector<std::vector<Rat>> m(k, std::vector<Rat>(k));
    for (std::uint32_t i = 0; i < k; ++i)
      for (std::uint32_t j = 0; j < k; ++j) m[i][j] = Rat(static_cast<long>(spec_.gram[i][j]));
    Rat det(1);
    for (std::uint32_t c = 0; c < k; ++c) {
      std::uint32_t pivot = c;
      while (pivot < k && rat_is_zero(m[pivot][c])) ++pivot;
      if (pivot == k) {
        det = Rat(0);
        break;
      }
      if (pivot != c) {
        std::swap(m[pivot], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (std::uint32_t r = c + 1; r < k; ++r) {
        Rat f = m[r][c] / m[c][c];
        for (std::uint32_t cc = c; cc < k; ++cc) m[r][cc] -= f * m[c][cc];
      }
    }
    if (sgn(det) <= 0)
      throw std::invalid_argument("gram: not positive definite (grading unbounded below)");
  }
}

std::int64_t LatticeAlgebra::weight(const LatticeState& s) const {
  return s.heis_weight() + spec_.pairing(s.group, s.group) / 2;
}

std::int64_t LatticeAlgebra::weight_bound(const StateVector& v) const {
  std::int64_t w = 0;
  for (const auto& [s, c] : v.terms()) w = std::max(w, weight(s));
  return w;
}

std::vector<LatticeState> LatticeAlgebra::basis_up_to_weight(std::int64_t cap) const {
  std::vector<LatticeState> out;
  // group parts with (a,a)/2 <= cap, enumerated within a coordinate box
  std::vector<std::vector<std::int64_t>> groups;
  std::vector<std::int64_t> cur(spec_.rank, 0);
  std::int64_t box = cap + 1;
  std::function<void(std::size_t)> rec_group = [&](std::size_t pos) {
    if (pos == spec_.rank) {
      if (spec_.pairing(cur, cur) / 2 <= cap) groups.push_back(cur);
      return;
    }
    for (std::int64_t v = -box; v <= box; ++v) {
      cur[pos] = v;
      rec_group(pos + 1);
    }
    cur[pos] = 0;
  };
  rec_group(0);

  // Heisenberg monomials of weight <= budget
  std::function<void(LatticeState&, std::uint32_t, std::uint32_t, std::int64_t)> rec_heis =
      [&](LatticeState& st, std::uint32_t k, std::uint32_t n, std::int64_t budget) {
        out.push_back(st);
        for (std::uint32_t kk = k; kk < spec_.rank; ++kk)
          for (std::uint32_t nn = (kk == k ? n : 1);
               static_cast<std::int64_t>(nn) <= budget; ++nn) {
            st.heis[{kk, nn}] += 1;
            rec_heis(st, kk, nn, budget - nn);
            auto it = st.heis.find({kk, nn});
            if (it->second == 1)
              st.heis.erase(it);
            else
              --(it->second);
          }
      };
  for (const auto& g : groups) {
    LatticeState st;
    st.group = g;
    std::int64_t budget = cap - spec_.pairing(g, g) / 2;
    rec_heis(st, 0, 1, budget);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StateVector LatticeAlgebra::derivation_basis(const LatticeState& s) const {
  StateVector r;
  // alpha(-1) term
  for (std::uint32_t k = 0; k < spec_.rank; ++k) {
    if (s.group[k] == 0) continue;
    LatticeState t = s;
    t.heis[{k, 1}] += 1;
    r.add_term(t, Rat(static_cast<long>(s.group[k])));
  }
  // Leibniz over the monomial factors
  for (const auto& [kn, e] : s.heis) {
    LatticeState t = s;
    auto it = t.heis.find(kn);
    if (it->second == 1)
      t.heis.erase(it);
    else
      --(it->second);
    t.heis[{kn.first, kn.second + 1}] += 1;
    r.add_term(t, Rat(static_cast<long>(e)) * static_cast<long>(kn.second));
  }
  return r;
}

StateVector LatticeAlgebra::derivation(const StateVector& v) const {
  StateVector r;
  for (const auto& [s, c] : v.terms()) r = r + derivation_basis(s).scaled(c);
  return r;
}

StateVector LatticeAlgebra::divided_derivation(const StateVector& v, std::uint32_t order) const {
  StateVector r = v;
  for (std::uint32_t t = 0; t < order; ++t) r = derivation(r);
  return r.scaled(Rat(1) / factorial(order));
}

StateVector LatticeAlgebra::heis_mul(const std::vector<std::int64_t>& alpha, std::uint32_t depth,
                                     const StateVector& v) const {
  StateVector r;
  for (std::uint32_t k = 0; k < spec_.rank; ++k) {
    if (alpha[k] == 0) continue;
    for (const auto& [s, c] : v.terms()) {
      LatticeState t = s;
      t.heis[{k, depth}] += 1;
      r.add_term(t, c * static_cast<long>(alpha[k]));
    }
  }
  return r;
}

StateVector LatticeAlgebra::heis_annihilate(std::uint32_t k, std::uint32_t m,
                                            const StateVector& v) const {
  StateVector r;
  if (m == 0) {
    for (const auto& [s, c] : v.terms())
      r.add_term(s, c * static_cast<long>(spec_.basis_pairing(k, s.group)));
    return r;
  }
  for (const auto& [s, c] : v.terms()) {
    for (const auto& [kn, e] : s.heis) {
      if (kn.second != m) continue;
      std::int64_t pair = spec_.gram[k][kn.first];
      if (pair == 0) continue;
      LatticeState t = s;
      auto it = t.heis.find(kn);
      if (it->second == 1)
        t.heis.erase(it);
      else
        --(it->second);
      r.add_term(t, c * static_cast<long>(e) * static_cast<long>(m) * static_cast<long>(pair));
    }
  }
  return r;
}

StateVector LatticeAlgebra::creation_coefficient(const std::vector<std::int64_t>& alpha,
                                                 std::int64_t order) const {
  if (order < 0) return StateVector();
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = creation_cache_.find({alpha, order});
    if (it != creation_cache_.end()) return it->second;
  }
  StateVector h;
  if (order == 0) {
    LatticeState ground;
    ground.group = alpha;
    h = StateVector::basis(std::move(ground));
  } else {
    // Newton recursion i h_i = sum_{n=1..i} alpha(-n) h_{i-n}
    StateVector acc;
    for (std::int64_t n = 1; n <= order; ++n)
      acc = acc + heis_mul(alpha, static_cast<std::uint32_t>(n),
                           creation_coefficient(alpha, order - n));
    h = acc.scaled(Rat(1) / Rat(static_cast<long>(order)));
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = creation_cache_.emplace(std::make_pair(alpha, order), std::move(h));
  return it->second;
}

namespace {
void mode_add_theta(ModeSeries& m, std::int64_t e, const StateVector& v, const Rat& c) {
  if (v.is_zero() || rat_is_zero(c)) return;
  auto it = m.find(e);
  if (it == m.end()) it = m.emplace(e, StateVector()).first;
  it->second.add_scaled(v, c);
  if (it->second.is_zero()) m.erase(it);
}
}  // namespace

ModeSeries LatticeAlgebra::theta(const std::vector<std::int64_t>& alpha,
                                 const LatticeState& s) const {
  ModeSeries out;
  std::int64_t base = spec_.pairing(alpha, s.group);
  LatticeState ground;
  ground.group = s.group;
  out[base] = StateVector::basis(std::move(ground));
  // multiply in (gamma_k(-n) - (e_k,alpha) z^{-n})^e factor by factor
  for (const auto& [kn, e] : s.heis) {
    std::int64_t c = spec_.basis_pairing(kn.first, alpha);
    for (std::uint32_t t = 0; t < e; ++t) {
      ModeSeries next;
      for (const auto& [ze, sv] : out) {
        StateVector bumped;
        for (const auto& [st, sc] : sv.terms()) {
          LatticeState b = st;
          b.heis[kn] += 1;
          bumped.add_term(b, sc);
        }
        mode_add_theta(next, ze, bumped, Rat(1));
        if (c != 0) mode_add_theta(next, ze - kn.second, sv, Rat(-static_cast<long>(c)));
      }
      out = std::move(next);
    }
  }
  return out;
}

namespace {
void mode_add(ModeSeries& m, std::int64_t e, const StateVector& v, const Rat& c = Rat(1)) {
  if (v.is_zero() || rat_is_zero(c)) return;
  auto it = m.find(e);
  if (it == m.end()) it = m.emplace(e, StateVector()).first;
  it->second.add_scaled(v, c);
  if (it->second.is_zero()) m.erase(it);
}
}  // namespace

ModeSeries LatticeAlgebra::y_expand_uncached_(const LatticeState& u, const LatticeState& w,
                                              std::int64_t zhi) const {
  // factor list of the normally ordered field: one derivative field per
  // gamma_k(-n) factor of u, counted with multiplicity
  std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
  for (const auto& [kn, e] : u.heis)
    for (std::uint32_t t = 0; t < e; ++t) factors.push_back(kn);
  const std::size_t nf = factors.size();
  const auto& alpha = u.group;

  ModeSeries result;
  for (std::size_t mask = 0; mask < (std::size_t{1} << nf); ++mask) {
    // annihilation side: theta, then the annihilation halves of the
    // unselected factors (all commute)
    ModeSeries cur = theta(alpha, w);
    for (std::size_t j = 0; j < nf; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      auto [k, n] = factors[j];
      ModeSeries next;
      for (const auto& [ze, sv] : cur) {
        // mode m >= 0 of d^(n-1) gamma_k(z): binom(-m-1, n-1) gamma_k(m) z^{-m-n}
        std::int64_t max_depth = 0;
        for (const auto& [st, sc] : sv.terms())
          for (const auto& [kn2, e2] : st.heis)
            max_depth = std::max<std::int64_t>(max_depth, kn2.second);
        for (std::int64_t m = 0; m <= max_depth; ++m) {
          StateVector hit = heis_annihilate(k, static_cast<std::uint32_t>(m), sv);
          if (hit.is_zero()) continue;
          mode_add(next, ze - m - n, hit, binomial(-m - 1, n - 1));
        }
      }
      cur = std::move(next);
    }
    // creation side: selected factors, then the exponential of alpha
    for (std::size_t j = 0; j < nf; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      auto [k, n] = factors[j];
      ModeSeries next;
      std::vector<std::int64_t> ek(spec_.rank, 0);
      ek[k] = 1;
      for (const auto& [ze, sv] : cur) {
        // mode -l (l >= 1): binom(l-1, n-1) gamma_k(-l) z^{l-n}
        for (std::int64_t l = 1; ze + l - n <= zhi; ++l) {
          Rat coeff = binomial(l - 1, n - 1);
          if (rat_is_zero(coeff)) continue;
          mode_add(next, ze + l - n, heis_mul(ek, static_cast<std::uint32_t>(l), sv), coeff);
        }
      }
      cur = std::move(next);
    }
    for (const auto& [ze, sv] : cur)
      for (std::int64_t i = 0; ze + i <= zhi; ++i) {
        StateVector ci = creation_coefficient(alpha, i);
        if (ci.is_zero()) continue;
        mode_add(result, ze + i, ci * sv);
      }
  }
  // grading floor: nothing below -(wt u + wt w) survives
  return result;
}

const ModeSeries& LatticeAlgebra::y_expand(const LatticeState& u, const LatticeState& w,
                                           std::int64_t zhi) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = y_cache_.find({u, w, zhi});
    if (it != y_cache_.end()) return it->second;
  }
  ModeSeries r = y_expand_uncached_(u, w, zhi);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = y_cache_.emplace(std::make_tuple(u, w, zhi), std::move(r));
  return it->second;
}

ModeSeries LatticeAlgebra::y_expand(const StateVector& u, const StateVector& w,
                                    std::int64_t zhi) const {
  ModeSeries out;
  for (const auto& [us, uc] : u.terms())
    for (const auto& [ws, wc] : w.terms()) {
      const ModeSeries& part = y_expand(us, ws, zhi);
      for (const auto& [ze, sv] : part) mode_add(out, ze, sv, uc * wc);
    }
  return out;
}

StateVector LatticeAlgebra::mode_extract(const StateVector& u, std::int64_t n,
                                         const StateVector& w) const {
  const std::int64_t ze = -n - 1;
  if (ze > spec_.series_cap)
    throw CapError("mode_extract: requested mode outside the truncation window");
  // below the grading floor the mode vanishes identically
  std::int64_t floor = 0;
  for (const auto& [us, uc] : u.terms())
    for (const auto& [ws, wc] : w.terms()) floor = std::min(floor, support_floor(us, ws));
  if (ze < floor) return StateVector();
  StateVector out;
  for (const auto& [us, uc] : u.terms())
    for (const auto& [ws, wc] : w.terms()) {
      const ModeSeries& part = y_expand(us, ws, spec_.series_cap);
      auto it = part.find(ze);
      if (it != part.end()) out.add_scaled(it->second, uc * wc);
    }
  return out;
}

namespace {
LaurentTable<StateVector> one_var_table(const ModeSeries& m, std::int64_t zhi,
                                        std::int64_t tlo) {
  VarGroup vars{1, 1};
  LaurentTable<StateVector> t(vars, {zhi}, tlo, kCapInf);
  for (const auto& [ze, sv] : m) {
    if (ze > zhi) continue;
    ExpVec e{static_cast<std::int32_t>(ze)};
    t.insert(e, sv);
  }
  return t;
}
}  // namespace

VertexExpansion LatticeAlgebra::creation_op(const std::vector<std::int64_t>& alpha,
                                            const StateVector& state) const {
  if (alpha.size() != spec_.rank) throw std::invalid_argument("alpha has wrong rank");
  ModeSeries m;
  for (std::int64_t i = 0; i <= spec_.series_cap; ++i) {
    StateVector ci = creation_coefficient(alpha, i);
    if (ci.is_zero()) continue;
    mode_add(m, i, ci * state);
  }
  VertexExpansion out{one_var_table(m, spec_.series_cap, 0), std::nullopt};
  // nonsingular by construction: also expose the power-series rational form
  VarGroup vars{1, 1};
  LocalizedSeries<StateVector> rat(vars, spec_.series_cap);
  for (const auto& [ze, sv] : m) rat.raw_insert(ExpVec{static_cast<std::int32_t>(ze)}, sv);
  rat.renormalize();
  out.rational = std::move(rat);
  return out;
}

VertexExpansion LatticeAlgebra::annihilation_op(const std::vector<std::int64_t>& alpha,
                                                const StateVector& state) const {
  if (alpha.size() != spec_.rank) throw std::invalid_argument("alpha has wrong rank");
  ModeSeries m;
  for (const auto& [s, c] : state.terms()) {
    ModeSeries th = theta(alpha, s);
    for (const auto& [ze, sv] : th) mode_add(m, ze, sv, c);
  }
  std::int64_t tlo = 0;
  for (const auto& [ze, sv] : m) tlo = std::min(tlo, ze);
  return VertexExpansion{one_var_table(m, spec_.series_cap, tlo), std::nullopt};
}

VertexExpansion LatticeAlgebra::y_product(const std::vector<std::vector<std::int64_t>>& alphas,
                                          const StateVector& state,
                                          const sieves::Sieve& order) const {
  const std::uint32_t m = static_cast<std::uint32_t>(alphas.size());
  if (order.width != m) throw std::invalid_argument("y_product: order width mismatch");
  for (const auto& a : alphas)
    if (a.size() != spec_.rank) throw std::invalid_argument("alpha has wrong rank");
  sieves::ExpansionOrder ord = sieves::sieve_expansion_order(order);

  VarGroup vars{m, 1};
  std::int64_t tlo = -weight_bound(state);
  for (const auto& a : alphas) tlo -= spec_.pairing(a, a) / 2;
  std::vector<Cap> hi(m, spec_.series_cap);
  LaurentTable<StateVector> table(vars, hi, tlo, kCapInf);
  {
    ExpVec zeroe(m, 0);
    table.insert(zeroe, state);
  }
  // apply the operator with the innermost variable first
  for (auto it = ord.ranking.rbegin(); it != ord.ranking.rend(); ++it) {
    std::uint32_t p = *it;
    LaurentTable<StateVector> next(vars, hi, tlo, kCapInf);
    LatticeState op;
    op.group = alphas[p];
    for (const auto& [e, sv] : table.terms()) {
      for (const auto& [s, c] : sv.terms()) {
        const ModeSeries& ys = y_expand(op, s, spec_.series_cap);
        for (const auto& [ze, out_sv] : ys) {
          ExpVec ne = e;
          ne[p] += static_cast<std::int32_t>(ze);
          next.insert(std::move(ne), out_sv.scaled(c));
        }
      }
    }
    table = std::move(next);
  }
  return VertexExpansion{std::move(table), std::nullopt};
}

ModeSeries LatticeAlgebra::intertwining_defect(const std::vector<std::int64_t>& alpha,
                                               const LatticeState& s) const {
  // theta(D s) - (D - d/dz) theta(s)
  ModeSeries lhs;
  StateVector ds = derivation_basis(s);
  for (const auto& [st, c] : ds.terms()) {
    ModeSeries th = theta(alpha, st);
    for (const auto& [ze, sv] : th) mode_add(lhs, ze, sv, c);
  }
  ModeSeries rhs;
  ModeSeries th = theta(alpha, s);
  for (const auto& [ze, sv] : th) {
    mode_add(rhs, ze, derivation(sv));
    if (ze != 0) mode_add(rhs, ze - 1, sv, Rat(-static_cast<long>(ze)));
  }
  ModeSeries defect = lhs;
  for (const auto& [ze, sv] : rhs) mode_add(defect, ze, sv, Rat(-1));
  return defect;
}

}  // namespace vertexkit::lattice

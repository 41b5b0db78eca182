#include "vertexkit/freefield.hpp"

#include <algorithm>
#include <functional>

namespace vertexkit::freefield {

std::string WickMonomial::to_string(const std::vector<std::string>& names) const {
  if (factors.empty()) return "1";
  std::string s = ":";
  for (const auto& [k, e] : factors) {
    std::string base = (k.first < names.size()) ? names[k.first] : ("f" + std::to_string(k.first));
    if (!k.second.is_zero()) base = "D^" + k.second.to_string() + base;
    s += base;
    if (e != 1) s += "^" + std::to_string(e);
    s += " ";
  }
  s.back() = ':';
  return s;
}

template <class S>
std::string FieldState<S>::to_string(const std::vector<std::string>& names) const {
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += "[" + ScalarTraits<S>::to_string(c) + "]*" + m.to_string(names);
  }
  return s.empty() ? "0" : s;
}

template class FieldState<Rat>;
template class FieldState<DualScalar>;

using detail::PoolFactor;

template <class S>
LocalizedSeries<S> FieldAlgebra<S>::pair_value(const VarGroup& target, std::uint32_t field_a,
                                               const MultiIndex& ia, std::uint32_t pa,
                                               std::uint32_t field_b, const MultiIndex& ib,
                                               std::uint32_t pb) const {
  // combined divided derivative with the state-side antipode sign
  const LocalizedSeries<S>& prop = propagator(field_a, field_b);
  LocalizedSeries<S> d = prop.divided_derivative_point(0, ia.plus(ib));
  Rat coeff = index_binomial(ia, ib);
  if (pb == kStatePoint) {
    if (ib.total() % 2 == 1) coeff = -coeff;
    LocalizedSeries<S> moved = d.remap_points(target, {pa});
    return moved.scaled_rat(coeff);
  }
  if (ib.total() % 2 == 1) coeff = -coeff;  // D^(ib) acts through -d/du at the second slot
  LocalizedSeries<S> moved = d.substitute_difference(target, pa, pb);
  return moved.scaled_rat(coeff);
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::apply_annihilator(
    const VarGroup& target, std::uint32_t point, std::uint32_t field,
    const FieldState<S>& state) const {
  using Out = LocalizedSeries<FieldState<S>>;
  Out acc = Out::zero(target, spec_.cap);
  for (const auto& [mono, c] : state.terms()) {
    for (const auto& [gen, e] : mono.factors) {
      if (!has_propagator(field, gen.first)) continue;
      // e * (-1)^{|j|} (D^(j) Delta)(x) * (mono / gen)
      LocalizedSeries<S> val = propagator(field, gen.first).divided_derivative_point(0, gen.second);
      Rat sign = (gen.second.total() % 2 == 0) ? Rat(e) : Rat(-static_cast<long>(e));
      val = val.remap_points(target, {point}).scaled_rat(sign);
      WickMonomial rest = mono.without(gen);
      FieldState<S> restv;
      restv.add_term(rest, c);
      acc = acc + val.template map_coefficients<FieldState<S>>(
                      target, [&](const S& s) { return restv.scaled(s); });
    }
  }
  return acc;
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::apply_creator(const VarGroup& target,
                                                              std::uint32_t point,
                                                              std::uint32_t field,
                                                              const FieldState<S>& state,
                                                              std::int64_t order) const {
  using Out = LocalizedSeries<FieldState<S>>;
  if (order < 0) order = spec_.cap;
  Out acc = Out::zero(target, spec_.cap);
  for (const auto& i : indices_up_to(spec_.dim, order)) {
    WickMonomial gen = WickMonomial::field(field, i);
    ExpVec e(target.total_vars(), 0);
    for (std::uint32_t mu = 0; mu < spec_.dim; ++mu)
      e[target.flat(point, mu)] = static_cast<std::int32_t>(i[mu]);
    FieldState<S> coeff;
    for (const auto& [mono, c] : state.terms()) coeff.add_term(mono.times(gen), c);
    if (!coeff.is_zero()) acc.raw_insert(std::move(e), std::move(coeff));
  }
  acc.renormalize();
  return acc;
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::apply_annihilator(
    std::uint32_t point, std::uint32_t field, const LocalizedSeries<FieldState<S>>& f) const {
  using Out = LocalizedSeries<FieldState<S>>;
  Out acc = Out::zero(f.vars(), f.cap());
  for (const auto& [e, st] : f.numerator()) {
    LocalizedSeries<FieldState<S>> part = apply_annihilator(f.vars(), point, field, st);
    std::map<ExpVec, Rat> mono;
    mono.emplace(e, Rat(1));
    part = part.mul_poly(mono);
    for (const auto& [loc, de] : f.denom()) part.raw_denom(loc, de);
    part.renormalize();
    acc = acc + part;
  }
  return acc;
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::apply_creator(
    std::uint32_t point, std::uint32_t field, const LocalizedSeries<FieldState<S>>& f,
    std::int64_t order) const {
  using Out = LocalizedSeries<FieldState<S>>;
  Out acc = Out::zero(f.vars(), f.cap());
  for (const auto& [e, st] : f.numerator()) {
    LocalizedSeries<FieldState<S>> part = apply_creator(f.vars(), point, field, st, order);
    std::map<ExpVec, Rat> mono;
    mono.emplace(e, Rat(1));
    part = part.mul_poly(mono);
    for (const auto& [loc, de] : f.denom()) part.raw_denom(loc, de);
    part.renormalize();
    acc = acc + part;
  }
  return acc;
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::apply_field(
    std::uint32_t point, std::uint32_t field, const LocalizedSeries<FieldState<S>>& f,
    std::int64_t order) const {
  return apply_annihilator(point, field, f) + apply_creator(point, field, f, order);
}

template <class S>
LocalizedSeries<FieldState<S>> FieldAlgebra<S>::field_product(
    std::uint32_t points, const std::vector<Insertion<S>>& insertions,
    const FieldState<S>& state) const {
  using Out = LocalizedSeries<FieldState<S>>;
  VarGroup target{points, spec_.dim};
  for (const auto& ins : insertions)
    if (ins.point >= points) throw std::invalid_argument("insertion point outside group");

  Out total = Out::zero(target, spec_.cap);

  // distribute multilinearly over the monomials of every insertion and the state
  std::function<void(std::size_t, std::vector<std::pair<WickMonomial, std::uint32_t>>&, S)>
      over_monomials = [&](std::size_t slot,
                           std::vector<std::pair<WickMonomial, std::uint32_t>>& chosen, S coeff) {
        if (slot < insertions.size()) {
          for (const auto& [mono, c] : insertions[slot].state.terms()) {
            chosen.push_back({mono, insertions[slot].point});
            over_monomials(slot + 1, chosen, coeff * c);
            chosen.pop_back();
          }
          return;
        }
        for (const auto& [mono, c] : state.terms()) {
          // flatten the factor pool
          std::vector<PoolFactor> pool;
          for (std::size_t g = 0; g < chosen.size(); ++g) {
            for (const auto& [k, e] : chosen[g].first.factors)
              for (std::uint32_t t = 0; t < e; ++t)
                pool.push_back({static_cast<std::uint32_t>(g), chosen[g].second, k.first, k.second,
                                false});
          }
          const std::uint32_t state_group = static_cast<std::uint32_t>(chosen.size());
          for (const auto& [k, e] : mono.factors)
            for (std::uint32_t t = 0; t < e; ++t)
              pool.push_back({state_group, kStatePoint, k.first, k.second, true});

          S total_coeff = coeff * c;
          contract_pool_(target, pool, total_coeff, total);
        }
      };

  std::vector<std::pair<WickMonomial, std::uint32_t>> chosen;
  over_monomials(0, chosen, ScalarTraits<S>::one());
  return total;
}

/// Enumerate generalized contraction structures over the pool and accumulate
/// each structure's value into `total`.
template <class S>
void FieldAlgebra<S>::contract_pool_(const VarGroup& target,
                                     const std::vector<detail::PoolFactor>& pool,
                                     const S& coeff, LocalizedSeries<FieldState<S>>& total) const {
  using Out = LocalizedSeries<FieldState<S>>;
  const std::size_t n = pool.size();
  std::vector<int> assign(n, -1);  // -1 unassigned; block ids from 0
  // value accumulated per structure
  std::function<void(std::size_t, std::vector<std::vector<std::size_t>>&)> rec =
      [&](std::size_t i, std::vector<std::vector<std::size_t>>& blocks) {
        if (i == n) {
          // validate blocks: size >= 2, at least two groups, arity support
          LocalizedSeries<S> scalar =
              LocalizedSeries<S>::constant(target, ScalarTraits<S>::one(), spec_.cap);
          for (const auto& b : blocks) {
            if (b.size() < 2) return;
            bool multi_group = false;
            for (std::size_t t = 1; t < b.size(); ++t)
              if (pool[b[t]].group != pool[b[0]].group) multi_group = true;
            if (!multi_group) return;
            LocalizedSeries<S> v = block_value_(target, pool, b);
            if (v.is_zero()) return;
            scalar = scalar * v;
          }
          // normal-ordered remainder: creation expansions for insertion
          // factors, plain monomial for state factors
          Out rest = Out::constant(target, FieldState<S>::unit().scaled(coeff), spec_.cap);
          for (std::size_t t = 0; t < n; ++t) {
            if (assign[t] != -1) continue;
            const PoolFactor& f = pool[t];
            if (f.from_state) {
              FieldState<S> g = FieldState<S>::basis(WickMonomial::field(f.field, f.idx));
              rest = rest * Out::constant(target, std::move(g), spec_.cap);
            } else {
              // sum_k x^k binom(k+i, i) D^(k+i) phi
              Out creation = Out::zero(target, spec_.cap);
              for (const auto& k : indices_up_to(spec_.dim, spec_.cap)) {
                ExpVec e(target.total_vars(), 0);
                for (std::uint32_t mu = 0; mu < spec_.dim; ++mu)
                  e[target.flat(f.point, mu)] = static_cast<std::int32_t>(k[mu]);
                MultiIndex full = k.plus(f.idx);
                Rat ck = index_binomial(k, f.idx);
                creation.raw_insert(std::move(e),
                                    FieldState<S>::basis(WickMonomial::field(f.field, full))
                                        .scaled(ScalarTraits<S>::from_rat(ck)));
              }
              creation.renormalize();
              rest = rest * creation;
            }
          }
          Out piece = rest * scalar.template map_coefficients<FieldState<S>>(
                                 target, [](const S& s) { return FieldState<S>::unit().scaled(s); });
          total = total + piece;
          return;
        }
        if (assign[i] != -1) {
          rec(i + 1, blocks);
          return;
        }
        // leave factor i uncontracted
        rec(i + 1, blocks);
        // open a new block seeded by i with any later factors
        std::uint32_t max_arity = 2;
        for (const auto& [a, dn] : spec_.irreducible) max_arity = std::max(max_arity, a);
        std::vector<std::size_t> members{i};
        std::function<void(std::size_t)> grow = [&](std::size_t next) {
          if (members.size() >= 2 &&
              (members.size() == 2 || spec_.irreducible.count(
                                          static_cast<std::uint32_t>(members.size())))) {
            for (auto m : members) assign[m] = static_cast<int>(blocks.size());
            blocks.push_back(members);
            rec(i + 1, blocks);
            blocks.pop_back();
            for (auto m : members) assign[m] = -1;
          }
          if (members.size() == max_arity) return;
          for (std::size_t j = next; j < n; ++j) {
            if (assign[j] != -1) continue;
            members.push_back(j);
            grow(j + 1);
            members.pop_back();
          }
        };
        grow(i + 1);
      };
  std::vector<std::vector<std::size_t>> blocks;
  rec(0, blocks);
}

template <class S>
LocalizedSeries<S> FieldAlgebra<S>::block_value_(const VarGroup& target,
                                                 const std::vector<detail::PoolFactor>& pool,
                                                 const std::vector<std::size_t>& block) const {
  if (block.size() == 2) {
    const PoolFactor& a = pool[block[0]];
    const PoolFactor& b = pool[block[1]];
    if (!has_propagator(a.field, b.field)) return LocalizedSeries<S>::zero(target, spec_.cap);
    // orient: state factors always on the second slot
    if (a.from_state && b.from_state)
      throw std::logic_error("state-state contraction cannot arise");
    if (a.from_state) return pair_value(target, b.field, b.idx, b.point, a.field, a.idx, kStatePoint);
    return pair_value(target, a.field, a.idx, a.point, b.field, b.idx,
                      b.from_state ? kStatePoint : b.point);
  }
  auto itd = spec_.irreducible.find(static_cast<std::uint32_t>(block.size()));
  if (itd == spec_.irreducible.end()) return LocalizedSeries<S>::zero(target, spec_.cap);
  // derivative per slot, state-side antipode sign, then move slots onto the
  // target points (state slots collapse to the origin)
  LocalizedSeries<S> v = itd->second;
  for (std::size_t t = 0; t < block.size(); ++t) {
    const PoolFactor& f = pool[block[t]];
    v = v.divided_derivative_point(static_cast<std::uint32_t>(t), f.idx);
    if (f.from_state && f.idx.total() % 2 == 1) v = v.scaled_rat(Rat(-1));
  }
  return move_slots_(target, v, pool, block);
}

template <class S>
LocalizedSeries<S> FieldAlgebra<S>::move_slots_(const VarGroup& target,
                                                const LocalizedSeries<S>& v,
                                                const std::vector<detail::PoolFactor>& pool,
                                                const std::vector<std::size_t>& block) const {
  // nonsingular by construction, so this is a plain monomial substitution
  LocalizedSeries<S> out = LocalizedSeries<S>::zero(target, v.cap());
  const VarGroup& src = v.vars();
  for (const auto& [e, c] : v.numerator()) {
    ExpVec ne(target.total_vars(), 0);
    bool drop = false;
    for (std::uint32_t p = 0; p < src.count && !drop; ++p) {
      const PoolFactor& f = pool[block[p]];
      for (std::uint32_t mu = 0; mu < src.dim_per_point; ++mu) {
        std::int32_t exp = e[src.flat(p, mu)];
        if (exp == 0) continue;
        if (f.from_state) {
          drop = true;  // evaluated at the origin
          break;
        }
        ne[target.flat(f.point, mu)] += exp;
      }
    }
    if (!drop) out.raw_insert(std::move(ne), c);
  }
  out.renormalize();
  return out;
}

template <class S>
LocalizedSeries<S> FieldAlgebra<S>::n_point(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& field_at_point) const {
  std::uint32_t points = 0;
  std::vector<Insertion<S>> ins;
  for (const auto& [f, p] : field_at_point) {
    points = std::max(points, p + 1);
    ins.push_back({FieldState<S>::basis(WickMonomial::field(f, MultiIndex(spec_.dim))), p});
  }
  LocalizedSeries<FieldState<S>> prod = field_product(points, ins, FieldState<S>::unit());
  LocalizedSeries<S> out = LocalizedSeries<S>::zero(VarGroup{points, spec_.dim}, prod.cap());
  for (const auto& [e, st] : prod.numerator()) {
    auto it = st.terms().find(WickMonomial::unit());
    if (it != st.terms().end()) out.raw_insert(e, it->second);
  }
  for (const auto& [loc, de] : prod.denom()) out.raw_denom(loc, de);
  out.renormalize();
  return out;
}

template <class S>
bool FieldAlgebra<S>::propagator_satisfies(const hopf::HopfElement& op, std::uint32_t f,
                                           std::uint32_t g) const {
  return hopf::hopf_act(op, propagator(f, g)).is_zero();
}

template <class S>
FieldState<S> FieldAlgebra<S>::reduce_by_field_equation(const hopf::HopfElement& op,
                                                        const FieldState<S>& state) const {
  if (op.is_zero()) return state;
  // lex-leading index of the relation
  MultiIndex lead = op.terms().rbegin()->first;
  Rat lead_c = op.terms().rbegin()->second;
  if (rat_is_zero(lead_c)) throw std::invalid_argument("leading coefficient not invertible");

  FieldState<S> work = state;
  FieldState<S> done;
  while (!work.is_zero()) {
    auto [mono, c] = *work.terms().begin();
    work.add_term(mono, -c);
    // find a factor whose index dominates the leading index
    std::optional<std::pair<std::uint32_t, MultiIndex>> hit;
    for (const auto& [k, e] : mono.factors)
      if (lead.leq(k.second)) {
        hit = k;
        break;
      }
    if (!hit) {
      done.add_term(mono, c);
      continue;
    }
    MultiIndex r = hit->second.minus(lead);
    // D^(r) of the relation: sum_i c_i binom(r+i, r)... solve for D^(r+lead)
    Rat pivot = lead_c * index_binomial(r, lead);
    WickMonomial rest = mono.without(*hit);
    for (const auto& [i, ci] : op.terms()) {
      if (i == lead) continue;
      Rat coeff = -ci * index_binomial(r, i) / pivot;
      WickMonomial repl = rest.times(WickMonomial::field(hit->first, r.plus(i)));
      work.add_term(repl, c * ScalarTraits<S>::from_rat(coeff));
    }
  }
  return done;
}

template class FieldAlgebra<Rat>;
template class FieldAlgebra<DualScalar>;

FieldAlgebra1D::FieldAlgebra1D(Rat delta_coefficient, std::int64_t series_cap)
    : delta_c_(std::move(delta_coefficient)), series_cap_(series_cap) {
  if (series_cap < 0) throw std::invalid_argument("series cap must be >= 0");
}

std::int64_t FieldAlgebra1D::weight_bound(const State& v) const {
  std::int64_t w = 0;
  for (const auto& [m, c] : v.terms()) w = std::max(w, weight(m));
  return w;
}

std::vector<WickMonomial> FieldAlgebra1D::basis_up_to_weight(std::int64_t cap) const {
  std::vector<WickMonomial> out;
  WickMonomial cur;
  std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t min_wt,
                                                            std::int64_t budget) {
    out.push_back(cur);
    for (std::int64_t w = min_wt; w <= budget; ++w) {
      MultiIndex idx{static_cast<std::uint32_t>(w - 1)};
      auto key = std::make_pair(0u, idx);
      cur.factors[key] += 1;
      rec(w, budget - w);
      auto it = cur.factors.find(key);
      if (it->second == 1)
        cur.factors.erase(it);
      else
        --(it->second);
    }
  };
  rec(1, cap);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<std::int64_t, FieldAlgebra1D::State> FieldAlgebra1D::y_expand_uncached_(
    const WickMonomial& u, const WickMonomial& w, std::int64_t yhi) const {
  using Mode = std::map<std::int64_t, State>;
  auto mode_add = [](Mode& m, std::int64_t e, const State& v, const Rat& c) {
    if (v.is_zero() || rat_is_zero(c)) return;
    auto it = m.find(e);
    if (it == m.end()) it = m.emplace(e, State()).first;
    it->second.add_scaled(v, c);
    if (it->second.is_zero()) m.erase(it);
  };

  std::vector<std::uint32_t> factors;  // derivative orders mu of d^(mu) phi
  for (const auto& [k, e] : u.factors)
    for (std::uint32_t t = 0; t < e; ++t) factors.push_back(k.second[0]);

  Mode result;
  const std::size_t nf = factors.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << nf); ++mask) {
    Mode cur;
    cur.emplace(0, State::basis(w));
    // annihilation halves: derivation with value
    // c * (-1)^mu binom(mu+j, mu) (mu+j+1) y^{-2-mu-j} on generator D^(j) phi
    for (std::size_t t = 0; t < nf; ++t) {
      if (mask & (std::size_t{1} << t)) continue;
      std::uint32_t mu = factors[t];
      Mode next;
      for (const auto& [ye, sv] : cur) {
        for (const auto& [mono, mc] : sv.terms()) {
          for (const auto& [gen, e] : mono.factors) {
            std::uint32_t j = gen.second[0];
            Rat val = delta_c_ * binomial(mu + j, mu) * static_cast<long>(mu + j + 1) *
                      static_cast<long>(e);
            if (mu % 2 == 1) val = -val;
            State rest;
            rest.add_term(mono.without(gen), mc);
            mode_add(next, ye - 2 - mu - j, rest, val);
          }
        }
      }
      cur = std::move(next);
    }
    // creation halves: multiply by sum_k y^k binom(k+mu, mu) D^(k+mu) phi
    for (std::size_t t = 0; t < nf; ++t) {
      if (!(mask & (std::size_t{1} << t))) continue;
      std::uint32_t mu = factors[t];
      Mode next;
      for (const auto& [ye, sv] : cur)
        for (std::int64_t k = 0; ye + k <= yhi; ++k) {
          WickMonomial gen =
              WickMonomial::field(0, MultiIndex{static_cast<std::uint32_t>(k + mu)});
          State bumped;
          for (const auto& [mono, mc] : sv.terms()) bumped.add_term(mono.times(gen), mc);
          mode_add(next, ye + k, bumped, binomial(k + mu, mu));
        }
      cur = std::move(next);
    }
    for (const auto& [ye, sv] : cur) mode_add(result, ye, sv, Rat(1));
  }
  return result;
}

const std::map<std::int64_t, FieldAlgebra1D::State>& FieldAlgebra1D::y_expand(
    const WickMonomial& u, const WickMonomial& w, std::int64_t yhi) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find({u, w, yhi});
    if (it != cache_.end()) return it->second;
  }
  auto r = y_expand_uncached_(u, w, yhi);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(std::make_tuple(u, w, yhi), std::move(r));
  return it->second;
}

std::map<std::int64_t, FieldAlgebra1D::State> FieldAlgebra1D::y_expand(const State& u,
                                                                       const State& w,
                                                                       std::int64_t yhi) const {
  std::map<std::int64_t, State> out;
  for (const auto& [um, uc] : u.terms())
    for (const auto& [wm, wc] : w.terms()) {
      const auto& part = y_expand(um, wm, yhi);
      for (const auto& [ye, sv] : part) {
        auto it = out.find(ye);
        if (it == out.end()) it = out.emplace(ye, State()).first;
        it->second.add_scaled(sv, uc * wc);
        if (it->second.is_zero()) out.erase(it);
      }
    }
  return out;
}

FieldAlgebra1D::State FieldAlgebra1D::mode_extract(const State& u, std::int64_t n,
                                                   const State& w) const {
  const std::int64_t ye = -n - 1;
  if (ye > series_cap_)
    throw CapError("mode_extract: requested mode outside the truncation window");
  std::int64_t floor = 0;
  for (const auto& [um, uc] : u.terms())
    for (const auto& [wm, wc] : w.terms())
      floor = std::min(floor, -(weight(um) + weight(wm)));
  if (ye < floor) return State();
  State out;
  for (const auto& [um, uc] : u.terms())
    for (const auto& [wm, wc] : w.terms()) {
      const auto& part = y_expand(um, wm, series_cap_);
      auto it = part.find(ye);
      if (it != part.end()) out.add_scaled(it->second, uc * wc);
    }
  return out;
}

}  // namespace vertexkit::freefield

#ifndef VERTEXKIT_LAURENT_HPP
#define VERTEXKIT_LAURENT_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertexkit/series.hpp"
#include "vertexkit/sieve.hpp"

namespace vertexkit {

/// Region-directed iterated Laurent expansion: a sparse table of signed
/// exponent vectors. Knowledge window: every true term t with
/// t_v <= hi[v] for all v and tlo <= total(t) <= thi is stored exactly;
/// nothing is stored outside that box.
template <class M>
class LaurentTable {
 public:
  using Traits = CoeffTraits<M>;

  LaurentTable() = default;
  LaurentTable(VarGroup vars, std::vector<Cap> hi, std::int64_t tlo, Cap thi)
      : vars_(vars), hi_(std::move(hi)), tlo_(tlo), thi_(thi) {
    if (hi_.size() != vars_.total_vars()) throw std::invalid_argument("window size mismatch");
  }

  const VarGroup& vars() const { return vars_; }
  const std::map<ExpVec, M>& terms() const { return terms_; }
  const std::vector<Cap>& hi() const { return hi_; }
  std::int64_t tlo() const { return tlo_; }
  Cap thi() const { return thi_; }
  bool is_zero() const { return terms_.empty(); }

  bool in_window(const ExpVec& e) const {
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > hi_[v]) return false;
    std::int64_t t = exp_total(e);
    return t >= tlo_ && (cap_is_inf(thi_) || t <= thi_);
  }

  void insert(ExpVec e, M c) {
    if (Traits::is_zero(c) || !in_window(e)) return;
    auto it = terms_.find(e);
    if (it == terms_.end())
      terms_.emplace(std::move(e), std::move(c));
    else {
      Traits::add_into(it->second, c);
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  M coefficient(const ExpVec& e) const {
    if (!in_window(e))
      throw CapError("requested coefficient outside the knowledge window");
    auto it = terms_.find(e);
    return it == terms_.end() ? Traits::zero() : it->second;
  }

  LaurentTable operator+(const LaurentTable& o) const {
    if (!(vars_ == o.vars_)) throw std::invalid_argument("incompatible variable groups");
    std::vector<Cap> hi(hi_.size());
    for (std::size_t v = 0; v < hi.size(); ++v) hi[v] = cap_min(hi_[v], o.hi_[v]);
    LaurentTable r(vars_, hi, std::min(tlo_, o.tlo_), cap_min(thi_, o.thi_));
    for (const auto& [e, c] : terms_) r.insert(e, c);
    for (const auto& [e, c] : o.terms_) r.insert(e, c);
    return r;
  }

  LaurentTable operator-() const {
    LaurentTable r(*this);
    for (auto& [e, c] : r.terms_) c = Traits::neg(c);
    return r;
  }
  LaurentTable operator-(const LaurentTable& o) const { return *this + (-o); }

  LaurentTable scaled_rat(const Rat& s) const {
    LaurentTable r(vars_, hi_, tlo_, thi_);
    for (const auto& [e, c] : terms_) r.insert(e, Traits::scale(c, Traits::scalar_from_rat(s)));
    return r;
  }

  /// Multiply by an exact sparse polynomial (all terms known). Window: a
  /// product term is known when every split against a polynomial monomial
  /// lands inside this table's window.
  LaurentTable mul_exact_poly(const std::map<ExpVec, Rat>& poly) const {
    if (poly.empty()) return LaurentTable(vars_, hi_, tlo_, thi_);
    std::vector<Cap> hi(hi_.size());
    std::vector<std::int32_t> minexp(hi_.size(), 0);
    std::int64_t mindeg = std::numeric_limits<std::int64_t>::max();
    for (std::size_t v = 0; v < hi_.size(); ++v) {
      std::int32_t m = std::numeric_limits<std::int32_t>::max();
      for (const auto& [pe, pc] : poly) m = std::min(m, pe[v]);
      minexp[v] = m;
    }
    for (const auto& [pe, pc] : poly) mindeg = std::min(mindeg, exp_total(pe));
    for (std::size_t v = 0; v < hi_.size(); ++v) hi[v] = cap_minus(hi_[v], -minexp[v]);
    LaurentTable r(vars_, hi, tlo_ + mindeg, cap_is_inf(thi_) ? thi_ : thi_ + mindeg);
    for (const auto& [e, c] : terms_)
      for (const auto& [pe, pc] : poly)
        r.insert(exp_add(e, pe), Traits::scale(c, Traits::scalar_from_rat(pc)));
    return r;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "[" + Traits::to_string(c) + "]*" + exp_to_string(e, vars_);
    }
    return s.empty() ? "0" : s;
  }

 private:
  VarGroup vars_;
  std::map<ExpVec, M> terms_;
  std::vector<Cap> hi_;
  std::int64_t tlo_ = 0;
  Cap thi_ = kCapInf;
};

struct CompareResult {
  bool equal = true;
  std::optional<ExpVec> witness;
};

/// Multiply both tables by the cleared denominator polynomial and compare on
/// the shared knowledge window. Throws CapError when the windows leave no
/// comparable region at all.
template <class M>
CompareResult clear_and_compare(const LaurentTable<M>& a, const LaurentTable<M>& b,
                                const DenomMap& denom) {
  if (!(a.vars() == b.vars())) throw std::invalid_argument("incompatible variable groups");
  std::map<ExpVec, Rat> poly;
  poly.emplace(ExpVec(a.vars().total_vars(), 0), Rat(1));
  for (const auto& [loc, e] : denom) {
    auto lp = loc.polynomial(a.vars());
    for (std::uint32_t t = 0; t < e; ++t) {
      std::map<ExpVec, Rat> next;
      for (const auto& [e1, c1] : poly)
        for (const auto& [e2, c2] : lp) {
          ExpVec sum = exp_add(e1, e2);
          auto it = next.find(sum);
          if (it == next.end())
            next.emplace(std::move(sum), c1 * c2);
          else {
            it->second += c1 * c2;
            if (rat_is_zero(it->second)) next.erase(it);
          }
        }
      poly = std::move(next);
    }
  }
  LaurentTable<M> ca = a.mul_exact_poly(poly);
  LaurentTable<M> cb = b.mul_exact_poly(poly);

  std::vector<Cap> hi(ca.hi().size());
  for (std::size_t v = 0; v < hi.size(); ++v) hi[v] = cap_min(ca.hi()[v], cb.hi()[v]);
  Cap thi = cap_min(ca.thi(), cb.thi());
  std::int64_t tlo = std::min(ca.tlo(), cb.tlo());
  if (!cap_is_inf(thi) && thi < tlo) throw CapError("caps too small to compare any window");

  auto known = [&](const ExpVec& e) {
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > hi[v]) return false;
    return cap_is_inf(thi) || exp_total(e) <= thi;
  };
  CompareResult res;
  for (const auto& [e, c] : ca.terms()) {
    if (!known(e)) continue;
    auto it = cb.terms().find(e);
    const M other = (it == cb.terms().end()) ? CoeffTraits<M>::zero() : it->second;
    M diff = c;
    CoeffTraits<M>::add_into(diff, CoeffTraits<M>::neg(other));
    if (!CoeffTraits<M>::is_zero(diff)) {
      res.equal = false;
      if (!res.witness || e < *res.witness) res.witness = e;
    }
  }
  for (const auto& [e, c] : cb.terms()) {
    if (!known(e) || ca.terms().count(e)) continue;
    if (!CoeffTraits<M>::is_zero(c)) {
      res.equal = false;
      if (!res.witness || e < *res.witness) res.witness = e;
    }
  }
  return res;
}

/// Expand every inverted localizer of f as a geometric/binomial series in the
/// direction the order dictates: the variable ranked further out is treated
/// as large. Requires one-dimensional points; quadratic localizers stay in
/// rational form and are rejected here.
template <class M>
LaurentTable<M> iota_expand(const LocalizedSeries<M>& f, const sieves::ExpansionOrder& order,
                            std::optional<std::vector<Cap>> hi_request = std::nullopt) {
  const VarGroup& vars = f.vars();
  if (vars.dim_per_point != 1)
    throw std::invalid_argument("iota_expand: expansion orders act on 1-d points");
  if (order.width != vars.count)
    throw std::invalid_argument("iota_expand: order width does not match variable group");

  std::vector<Cap> hi;
  if (hi_request) {
    hi = *hi_request;
    if (hi.size() != vars.total_vars()) throw std::invalid_argument("window size mismatch");
  } else {
    Cap def = cap_is_inf(f.cap()) ? 8 : f.cap();
    hi.assign(vars.total_vars(), def);
  }

  struct Factor {
    std::uint32_t outer;
    std::uint32_t inner;  // == outer for Point localizers (no geometric sum)
    std::uint32_t e;
    bool point;
    int sign;  // absorbed sign when reorienting a canonical difference
  };
  std::vector<Factor> factors;
  std::int64_t denom_deg = 0;
  for (const auto& [loc, e] : f.denom()) {
    denom_deg += loc.degree() * e;
    switch (loc.kind) {
      case Localizer::Kind::Point:
        factors.push_back({loc.i, loc.i, e, true, +1});
        break;
      case Localizer::Kind::Difference: {
        bool i_outer = order.outer_than(loc.i, loc.j);
        std::uint32_t o = i_outer ? loc.i : loc.j;
        std::uint32_t in = i_outer ? loc.j : loc.i;
        int sign = i_outer ? +1 : ((e % 2 == 0) ? +1 : -1);
        factors.push_back({o, in, e, false, sign});
        break;
      }
      default:
        throw std::invalid_argument("iota_expand: quadratic localizers are not expanded");
    }
  }

  // Per-factor bound on the geometric index k, swept innermost-first: the
  // inner exponent of a factor can be pushed up by other factors whose outer
  // variable coincides with it.
  std::vector<std::int64_t> kbound(factors.size(), 0);
  std::vector<std::uint32_t> by_rank(order.ranking.rbegin(), order.ranking.rend());
  std::vector<std::int64_t> push(vars.total_vars(), 0);
  for (std::uint32_t v : by_rank) {  // innermost first
    for (std::size_t fi = 0; fi < factors.size(); ++fi) {
      if (factors[fi].point || factors[fi].inner != v) continue;
      std::int64_t b = hi[v] + push[v];
      kbound[fi] = std::max<std::int64_t>(b, -1);
      if (kbound[fi] >= 0) push[factors[fi].outer] += factors[fi].e + kbound[fi];
    }
  }

  LaurentTable<M> out(vars, hi, -denom_deg, cap_is_inf(f.cap()) ? kCapInf : f.cap() - denom_deg);
  std::function<void(std::size_t, ExpVec, Rat)> rec = [&](std::size_t fi, ExpVec shift, Rat coeff) {
    if (fi == factors.size()) {
      for (const auto& [ne, nc] : f.numerator())
        out.insert(exp_add(ne, shift), CoeffTraits<M>::scale(
                                           nc, CoeffTraits<M>::scalar_from_rat(coeff)));
      return;
    }
    const Factor& fac = factors[fi];
    if (fac.point) {
      ExpVec s = shift;
      s[vars.flat(fac.outer, 0)] -= static_cast<std::int32_t>(fac.e);
      rec(fi + 1, std::move(s), coeff);
      return;
    }
    for (std::int64_t k = 0; k <= kbound[fi]; ++k) {
      // (x_o - x_in)^(-e) = sum_k binom(-e,k) (-1)^k x_in^k x_o^(-e-k)
      Rat c = binomial(-static_cast<std::int64_t>(fac.e), k) * ((k % 2 == 0) ? 1 : -1);
      c *= fac.sign;
      ExpVec s = shift;
      s[vars.flat(fac.inner, 0)] += static_cast<std::int32_t>(k);
      s[vars.flat(fac.outer, 0)] -= static_cast<std::int32_t>(fac.e + k);
      rec(fi + 1, std::move(s), coeff * c);
    }
  };
  rec(0, ExpVec(vars.total_vars(), 0), Rat(1));
  return out;
}

}  // namespace vertexkit

#endif

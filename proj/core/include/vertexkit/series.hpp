#ifndef VERTEXKIT_SERIES_HPP
#define VERTEXKIT_SERIES_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vertexkit/localizer.hpp"
#include "vertexkit/multiindex.hpp"
#include "vertexkit/rational.hpp"
#include "vertexkit/vargroup.hpp"

namespace vertexkit {

/// Numerator total-degree truncation bound. kCapInf marks exact polynomial
/// data (no truncation anywhere in its history).
using Cap = std::int64_t;
inline constexpr Cap kCapInf = std::numeric_limits<Cap>::max() / 4;

inline bool cap_is_inf(Cap c) { return c >= kCapInf; }
inline Cap cap_min(Cap a, Cap b) { return a < b ? a : b; }
inline Cap cap_minus(Cap a, std::int64_t d) { return cap_is_inf(a) ? a : a - d; }

struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Coefficient ring plugged into the series engine. Scalar is the ground
/// scalar (Rat, or DualScalar for first-order deformations); the module
/// itself must be a commutative ring so products of series stay closed.
template <class M>
struct CoeffTraits;

template <>
struct CoeffTraits<Rat> {
  using Scalar = Rat;
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static bool is_zero(const Rat& m) { return rat_is_zero(m); }
  static Rat neg(const Rat& m) { return -m; }
  static void add_into(Rat& m, const Rat& o) { m += o; }
  static Rat mul(const Rat& a, const Rat& b) { return a * b; }
  static Rat scale(const Rat& m, const Scalar& s) { return m * s; }
  static Scalar scalar_from_rat(const Rat& r) { return r; }
  static Rat from_scalar(const Scalar& s) { return s; }
  static std::string to_string(const Rat& m) { return rat_to_string(m); }
};

template <>
struct CoeffTraits<DualScalar> {
  using Scalar = DualScalar;
  static DualScalar zero() { return DualScalar(); }
  static DualScalar one() { return DualScalar(Rat(1)); }
  static bool is_zero(const DualScalar& m) { return ScalarTraits<DualScalar>::is_zero(m); }
  static DualScalar neg(const DualScalar& m) { return -m; }
  static void add_into(DualScalar& m, const DualScalar& o) { m += o; }
  static DualScalar mul(const DualScalar& a, const DualScalar& b) { return a * b; }
  static DualScalar scale(const DualScalar& m, const Scalar& s) { return m * s; }
  static Scalar scalar_from_rat(const Rat& r) { return DualScalar(r); }
  static DualScalar from_scalar(const Scalar& s) { return s; }
  static std::string to_string(const DualScalar& m) {
    return ScalarTraits<DualScalar>::to_string(m);
  }
};

/// Truncated multivariate power series numerator over a monomial of inverted
/// localizers. Normal form: no stored zero coefficients, no numerator term
/// above the cap, denominator exponents > 0, every cancellable localizer
/// factor cancelled (cancelling a factor of degree k costs k cap units on
/// truncated data; exact data stays exact).
template <class M>
class LocalizedSeries {
 public:
  using Traits = CoeffTraits<M>;
  using Scalar = typename Traits::Scalar;
  using TermMap = std::map<ExpVec, M>;

  LocalizedSeries() = default;
  explicit LocalizedSeries(VarGroup vars, Cap cap = kCapInf) : vars_(vars), cap_(cap) {}

  static LocalizedSeries zero(VarGroup vars, Cap cap = kCapInf) {
    return LocalizedSeries(vars, cap);
  }
  static LocalizedSeries constant(VarGroup vars, M value, Cap cap = kCapInf) {
    LocalizedSeries s(vars, cap);
    if (!Traits::is_zero(value)) s.num_.emplace(ExpVec(vars.total_vars(), 0), std::move(value));
    return s;
  }
  static LocalizedSeries monomial(VarGroup vars, ExpVec e, M value, Cap cap = kCapInf) {
    LocalizedSeries s(vars, cap);
    for (auto x : e)
      if (x < 0) throw std::invalid_argument("numerator exponents must be >= 0");
    if (!Traits::is_zero(value)) s.num_.emplace(std::move(e), std::move(value));
    s.truncate_();
    return s;
  }
  /// loc^k for any integer k: positive powers expand into the numerator,
  /// negative powers go to the denominator.
  static LocalizedSeries localizer_power(VarGroup vars, const Localizer& loc, std::int64_t k,
                                         Cap cap = kCapInf) {
    LocalizedSeries s = constant(vars, Traits::one(), cap);
    if (k > 0) {
      for (std::int64_t t = 0; t < k; ++t) s = s.mul_poly(loc.polynomial(vars));
    } else if (k < 0) {
      s.denom_[loc] = static_cast<std::uint32_t>(-k);
    }
    return s;
  }

  const VarGroup& vars() const { return vars_; }
  const TermMap& numerator() const { return num_; }
  const DenomMap& denom() const { return denom_; }
  Cap cap() const { return cap_; }
  bool is_zero() const { return num_.empty(); }

  void set_cap(Cap c) {
    cap_ = c;
    truncate_();
  }

  /// Structural equality of the normal form (vars, numerator, denominator).
  /// Caps track precision and are compared separately where it matters.
  bool same_form(const LocalizedSeries& o) const {
    return vars_ == o.vars_ && denom_ == o.denom_ && num_ == o.num_;
  }

  LocalizedSeries operator-() const {
    LocalizedSeries r(*this);
    for (auto& [e, c] : r.num_) c = Traits::neg(c);
    return r;
  }

  LocalizedSeries scaled(const Scalar& s) const {
    LocalizedSeries r(vars_, cap_);
    r.denom_ = denom_;
    if (Traits::is_zero(Traits::scale(Traits::one(), s))) return zero(vars_, cap_);
    for (const auto& [e, c] : num_) {
      M v = Traits::scale(c, s);
      if (!Traits::is_zero(v)) r.num_.emplace(e, std::move(v));
    }
    r.normalize_();
    return r;
  }
  LocalizedSeries scaled_rat(const Rat& r) const { return scaled(Traits::scalar_from_rat(r)); }

  LocalizedSeries operator+(const LocalizedSeries& o) const {
    check_vars_(o);
    DenomMap common = denom_;
    for (const auto& [loc, e] : o.denom_) {
      auto it = common.find(loc);
      if (it == common.end())
        common.emplace(loc, e);
      else
        it->second = std::max(it->second, e);
    }
    LocalizedSeries a = cleared_to_(common);
    LocalizedSeries b = o.cleared_to_(common);
    LocalizedSeries r(vars_, cap_min(a.cap_, b.cap_));
    r.denom_ = common;
    r.num_ = std::move(a.num_);
    for (auto& [e, c] : b.num_) {
      auto it = r.num_.find(e);
      if (it == r.num_.end())
        r.num_.emplace(e, std::move(c));
      else {
        Traits::add_into(it->second, c);
        if (Traits::is_zero(it->second)) r.num_.erase(it);
      }
    }
    r.normalize_();
    return r;
  }
  LocalizedSeries operator-(const LocalizedSeries& o) const { return *this + (-o); }

  LocalizedSeries operator*(const LocalizedSeries& o) const {
    check_vars_(o);
    LocalizedSeries r(vars_, cap_min(cap_, o.cap_));
    r.denom_ = denom_;
    for (const auto& [loc, e] : o.denom_) r.denom_[loc] += e;
    for (const auto& [e1, c1] : num_) {
      const std::int64_t d1 = exp_total(e1);
      for (const auto& [e2, c2] : o.num_) {
        if (!cap_is_inf(r.cap_) && d1 + exp_total(e2) > r.cap_) continue;
        M v = Traits::mul(c1, c2);
        if (Traits::is_zero(v)) continue;
        ExpVec e = exp_add(e1, e2);
        auto it = r.num_.find(e);
        if (it == r.num_.end())
          r.num_.emplace(std::move(e), std::move(v));
        else {
          Traits::add_into(it->second, v);
          if (Traits::is_zero(it->second)) r.num_.erase(it);
        }
      }
    }
    r.normalize_();
    return r;
  }

  /// Multiply by an exact sparse polynomial with Rat coefficients. Keeps the
  /// cap: unknown tail terms only feed degrees above it.
  LocalizedSeries mul_poly(const std::map<ExpVec, Rat>& poly) const {
    LocalizedSeries r(vars_, cap_);
    r.denom_ = denom_;
    r.num_ = poly_mul_(num_, poly, cap_);
    r.normalize_();
    return r;
  }

  /// (1/k!) d^k/dv^k along one flat variable. Truncated data loses one cap
  /// unit per derivative order; exact data stays exact.
  LocalizedSeries divided_derivative(std::size_t flat_var, std::uint32_t order) const {
    LocalizedSeries cur(*this);
    for (std::uint32_t t = 0; t < order; ++t) cur = cur.derivative_once_(flat_var);
    return cur.scaled_rat(Rat(1) / factorial(order));
  }

  /// Divided derivative D^(i) of the point `p`: componentwise iterated.
  LocalizedSeries divided_derivative_point(std::uint32_t p, const MultiIndex& idx) const {
    if (idx.dim() != vars_.dim_per_point)
      throw std::invalid_argument("derivative index dimension mismatch");
    LocalizedSeries cur(*this);
    for (std::uint32_t mu = 0; mu < vars_.dim_per_point; ++mu)
      cur = cur.divided_derivative(vars_.flat(p, mu), idx[mu]);
    return cur;
  }

  /// The substitution x -> -x on every variable; an involutive ring map.
  LocalizedSeries antipode() const {
    LocalizedSeries r(vars_, cap_);
    std::int64_t sign_from_denom = 0;
    for (const auto& [loc, e] : denom_) {
      r.denom_.emplace(loc, e);
      if (loc.kind == Localizer::Kind::Point || loc.kind == Localizer::Kind::Difference)
        sign_from_denom += e;  // q(-u) = q(u) for the quadratic kinds
    }
    for (const auto& [e, c] : num_) {
      std::int64_t s = exp_total(e) + sign_from_denom;
      r.num_.emplace(e, (s % 2 == 0) ? c : Traits::neg(c));
    }
    r.normalize_();
    return r;
  }

  /// Re-attach this series to a different variable group, sending point p of
  /// the source to point `point_map[p]` of `target`.
  LocalizedSeries remap_points(const VarGroup& target,
                               const std::vector<std::uint32_t>& point_map) const {
    if (point_map.size() != vars_.count) throw std::invalid_argument("point map size mismatch");
    if (target.dim_per_point != vars_.dim_per_point)
      throw std::invalid_argument("point dimension mismatch");
    LocalizedSeries r(target, cap_);
    for (const auto& [e, c] : num_) {
      ExpVec ne(target.total_vars(), 0);
      for (std::uint32_t p = 0; p < vars_.count; ++p)
        for (std::uint32_t mu = 0; mu < vars_.dim_per_point; ++mu)
          ne[target.flat(point_map[p], mu)] += e[vars_.flat(p, mu)];
      r.num_.emplace(std::move(ne), c);
    }
    for (const auto& [loc, e] : denom_) {
      Localizer nl = loc;
      int sign = 1;
      switch (loc.kind) {
        case Localizer::Kind::Point:
          nl.i = point_map[loc.i];
          break;
        case Localizer::Kind::QuadraticPoint:
          nl.i = point_map[loc.i];
          break;
        case Localizer::Kind::Difference: {
          auto [canon, s] = Localizer::difference(point_map[loc.i], point_map[loc.j]);
          nl = canon;
          sign = (e % 2 == 0) ? 1 : s;
          break;
        }
        case Localizer::Kind::QuadraticPair:
          nl = Localizer::quadratic_pair(point_map[loc.i], point_map[loc.j], loc.form);
          break;
      }
      r.denom_[nl] += e;
      if (sign < 0)
        for (auto& [me, mc] : r.num_) mc = Traits::neg(mc);
    }
    r.normalize_();
    return r;
  }

  /// Substitute the single point of a one-point series by the difference
  /// x_a - x_b of a two-or-more-point group. Point localizers turn into
  /// difference localizers, quadratic-point into quadratic-pair.
  LocalizedSeries substitute_difference(const VarGroup& target, std::uint32_t a,
                                        std::uint32_t b) const {
    if (vars_.count != 1) throw std::invalid_argument("difference substitution needs 1 point");
    if (target.dim_per_point != vars_.dim_per_point)
      throw std::invalid_argument("point dimension mismatch");
    // numerator: expand each u_mu^k as (x_a_mu - x_b_mu)^k
    LocalizedSeries acc = zero(target, cap_);
    for (const auto& [e, c] : num_) {
      LocalizedSeries term = constant(target, c, cap_);
      for (std::uint32_t mu = 0; mu < vars_.dim_per_point; ++mu) {
        std::int32_t k = e[vars_.flat(0, mu)];
        if (k == 0) continue;
        std::map<ExpVec, Rat> lin;
        ExpVec ea(target.total_vars(), 0), eb(target.total_vars(), 0);
        ea[target.flat(a, mu)] = 1;
        eb[target.flat(b, mu)] = 1;
        lin.emplace(std::move(ea), Rat(1));
        lin.emplace(std::move(eb), Rat(-1));
        for (std::int32_t t = 0; t < k; ++t) term = term.mul_poly(lin);
      }
      acc = acc + term;
    }
    for (const auto& [loc, e] : denom_) {
      switch (loc.kind) {
        case Localizer::Kind::Point: {
          auto [canon, s] = Localizer::difference(a, b);
          acc.denom_[canon] += e;
          if (s < 0 && e % 2 == 1) acc = -acc;
          break;
        }
        case Localizer::Kind::QuadraticPoint:
          acc.denom_[Localizer::quadratic_pair(a, b, loc.form)] += e;
          break;
        default:
          throw std::invalid_argument("pair localizer in one-point series");
      }
    }
    acc.cap_ = cap_;
    acc.normalize_();
    return acc;
  }

  /// Map the coefficients through a function M -> M2 (e.g. lift a scalar
  /// series into a module-valued one).
  template <class M2, class F>
  LocalizedSeries<M2> map_coefficients(const VarGroup& vars_out, F&& f) const {
    LocalizedSeries<M2> r(vars_out, cap_);
    for (const auto& [e, c] : num_) {
      M2 v = f(c);
      if (!CoeffTraits<M2>::is_zero(v)) r.raw_insert(e, std::move(v));
    }
    for (const auto& [loc, e] : denom_) r.raw_denom(loc, e);
    r.renormalize();
    return r;
  }

  // raw mutation hooks used by map_coefficients and the expansion code
  void raw_insert(ExpVec e, M v) {
    auto it = num_.find(e);
    if (it == num_.end())
      num_.emplace(std::move(e), std::move(v));
    else {
      Traits::add_into(it->second, v);
      if (Traits::is_zero(it->second)) num_.erase(it);
    }
  }
  void raw_denom(const Localizer& loc, std::uint32_t e) { denom_[loc] += e; }
  void renormalize() { normalize_(); }

  std::string to_string() const {
    std::string s;
    for (const auto& [e, c] : num_) {
      if (!s.empty()) s += " + ";
      s += "[" + Traits::to_string(c) + "]*" + exp_to_string(e, vars_);
    }
    if (s.empty()) s = "0";
    if (!denom_.empty()) {
      s = "(" + s + ") / ";
      for (const auto& [loc, e] : denom_) {
        s += loc.to_string(vars_);
        if (e != 1) s += "^" + std::to_string(e);
      }
    }
    return s;
  }

 private:
  template <class>
  friend class LocalizedSeries;

  void check_vars_(const LocalizedSeries& o) const {
    if (!(vars_ == o.vars_)) throw std::invalid_argument("incompatible variable groups");
  }

  void truncate_() {
    if (cap_is_inf(cap_)) return;
    if (cap_ < 0) throw CapError("cap underflow: result below zero precision");
    for (auto it = num_.begin(); it != num_.end();)
      it = (exp_total(it->first) > cap_) ? num_.erase(it) : std::next(it);
  }

  static TermMap poly_mul_(const TermMap& num, const std::map<ExpVec, Rat>& poly, Cap cap) {
    TermMap out;
    for (const auto& [e1, c1] : num)
      for (const auto& [e2, c2] : poly) {
        if (!cap_is_inf(cap) && exp_total(e1) + exp_total(e2) > cap) continue;
        M v = Traits::scale(c1, Traits::scalar_from_rat(c2));
        if (Traits::is_zero(v)) continue;
        ExpVec e = exp_add(e1, e2);
        auto it = out.find(e);
        if (it == out.end())
          out.emplace(std::move(e), std::move(v));
        else {
          Traits::add_into(it->second, v);
          if (Traits::is_zero(it->second)) out.erase(it);
        }
      }
    return out;
  }

  /// Clear to the given (finer) denominator by multiplying the numerator by
  /// the complementary localizer polynomials. No normalization here: the
  /// caller owns the combined normal form.
  LocalizedSeries cleared_to_(const DenomMap& target) const {
    LocalizedSeries r(*this);
    for (const auto& [loc, e] : target) {
      auto it = denom_.find(loc);
      std::uint32_t have = (it == denom_.end()) ? 0 : it->second;
      for (std::uint32_t t = have; t < e; ++t)
        r.num_ = poly_mul_(r.num_, loc.polynomial(vars_), r.cap_);
    }
    r.denom_ = target;
    return r;
  }

  LocalizedSeries derivative_once_(std::size_t flat_var) const {
    LocalizedSeries acc(vars_, cap_minus(cap_, 1));
    acc.denom_ = denom_;
    for (const auto& [e, c] : num_) {
      if (e[flat_var] == 0) continue;
      ExpVec ne = e;
      ne[flat_var] -= 1;
      M v = Traits::scale(c, Traits::scalar_from_rat(Rat(e[flat_var])));
      acc.raw_insert(std::move(ne), std::move(v));
    }
    acc.truncate_();
    // quotient-rule terms: -e_i * (d loc_i) * N / (D * loc_i)
    for (const auto& [loc, e] : denom_) {
      std::map<ExpVec, Rat> dloc;
      for (const auto& [le, lc] : loc.polynomial(vars_)) {
        if (le[flat_var] == 0) continue;
        ExpVec ne = le;
        ne[flat_var] -= 1;
        Rat v = lc * le[flat_var];
        auto it = dloc.find(ne);
        if (it == dloc.end())
          dloc.emplace(std::move(ne), std::move(v));
        else {
          it->second += v;
          if (rat_is_zero(it->second)) dloc.erase(it);
        }
      }
      if (dloc.empty()) continue;
      LocalizedSeries term(vars_, cap_);
      term.num_ = num_;
      term.denom_ = denom_;
      term.denom_[loc] += 1;
      term = term.mul_poly(dloc).scaled_rat(Rat(-static_cast<long>(e)));
      acc = acc + term;
    }
    acc.normalize_();
    return acc;
  }

  /// Cancel localizer factors dividing the numerator on the stored window.
  /// Each cancelled factor of degree k costs k cap units on truncated data.
  void normalize_() {
    truncate_();
    if (num_.empty()) {
      denom_.clear();
      return;
    }
    bool progress = true;
    while (progress && !denom_.empty() && !num_.empty()) {
      progress = false;
      for (auto it = denom_.begin(); it != denom_.end(); ++it) {
        auto quotient = try_divide_(it->first);
        if (!quotient) continue;
        num_ = std::move(*quotient);
        cap_ = cap_minus(cap_, it->first.degree());
        if (it->second == 1)
          denom_.erase(it);
        else
          --(it->second);
        progress = true;
        break;
      }
      if (num_.empty()) {
        denom_.clear();
        return;
      }
    }
  }

  /// Exact division of the numerator window by the (homogeneous) localizer
  /// polynomial; nullopt when a remainder survives.
  std::optional<TermMap> try_divide_(const Localizer& loc) const {
    const auto poly = loc.polynomial(vars_);
    if (poly.empty()) return std::nullopt;
    const ExpVec& lead = poly.rbegin()->first;
    const Rat& lead_c = poly.rbegin()->second;
    TermMap work = num_;
    TermMap quot;
    while (!work.empty()) {
      auto top = std::prev(work.end());
      const ExpVec& t = top->first;
      ExpVec qe(t.size());
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < lead[k]) return std::nullopt;
        qe[k] = t[k] - lead[k];
      }
      M qc = Traits::scale(top->second, Traits::scalar_from_rat(Rat(1) / lead_c));
      for (const auto& [le, lc] : poly) {
        ExpVec e = exp_add(qe, le);
        M v = Traits::scale(qc, Traits::scalar_from_rat(-lc));
        auto wit = work.find(e);
        if (wit == work.end()) {
          if (!Traits::is_zero(v)) work.emplace(std::move(e), std::move(v));
        } else {
          Traits::add_into(wit->second, v);
          if (Traits::is_zero(wit->second)) work.erase(wit);
        }
      }
      quot.emplace(std::move(qe), std::move(qc));
    }
    return quot;
  }

  VarGroup vars_;
  TermMap num_;
  DenomMap denom_;
  Cap cap_ = kCapInf;
};

/// Compare two series over a common denominator; returns the first differing
/// numerator exponent when unequal. The difference already carries the shared
/// precision window, so any surviving term is a genuine discrepancy.
template <class M>
std::optional<ExpVec> series_difference_witness(const LocalizedSeries<M>& a,
                                                const LocalizedSeries<M>& b) {
  LocalizedSeries<M> d = a - b;
  if (d.is_zero()) return std::nullopt;
  return d.numerator().begin()->first;
}

/// Largest expansion order K such that all Taylor terms of f around point i
/// survive a total-degree cap once brought to the common denominator: each
/// derivative can raise the denominator degree by the largest localizer
/// degree g at that point, and cleared terms sit at num0 + g*K.
template <class M>
std::int64_t taylor_order_for_cap(const LocalizedSeries<M>& f, std::uint32_t point_i, Cap cap) {
  if (cap_is_inf(cap)) return cap;  // callers must bound themselves
  std::int64_t g = 0;
  for (const auto& [loc, e] : f.denom())
    if (loc.involves_point(point_i)) g = std::max(g, loc.degree());
  if (g == 0) return cap;  // polynomial in x_i: degrees only fall
  std::int64_t num0 = 0;
  for (const auto& [e, c] : f.numerator()) num0 = std::max(num0, exp_total(e));
  return (cap - num0) / g;
}

/// Taylor re-expansion around a fresh point: f(..., x_i, ...) viewed as a
/// function of x_i - x_j, i.e. sum_k (-x_j)^k D^(k) f evaluated at x_i. The
/// expansion order is chosen so that every kept term is exact at the cap.
template <class M>
LocalizedSeries<M> taylor_shift(const LocalizedSeries<M>& f, std::uint32_t point_i,
                                std::uint32_t point_j, Cap cap) {
  const VarGroup& vars = f.vars();
  if (point_i >= vars.count || point_j >= vars.count)
    throw std::invalid_argument("taylor_shift: point outside group");
  if (point_i == point_j) throw std::invalid_argument("taylor_shift: points must differ");
  for (const auto& [e, c] : f.numerator())
    for (std::uint32_t mu = 0; mu < vars.dim_per_point; ++mu)
      if (e[vars.flat(point_j, mu)] != 0)
        throw std::invalid_argument("taylor_shift: target point not fresh in f");
  for (const auto& [loc, e] : f.denom())
    if (loc.involves_point(point_j))
      throw std::invalid_argument("taylor_shift: target point not fresh in f");
  const std::int64_t order = taylor_order_for_cap(f, point_i, cap);
  if (cap < 0 || order < 0) throw CapError("taylor_shift: cap exhausted");

  LocalizedSeries<M> acc = LocalizedSeries<M>::zero(vars, cap);
  for (const auto& k : indices_up_to(vars.dim_per_point, order)) {
    LocalizedSeries<M> dk = f.divided_derivative_point(point_i, k);
    if (dk.is_zero()) continue;
    std::map<ExpVec, Rat> mono;
    ExpVec e(vars.total_vars(), 0);
    for (std::uint32_t mu = 0; mu < vars.dim_per_point; ++mu)
      e[vars.flat(point_j, mu)] = static_cast<std::int32_t>(k[mu]);
    mono.emplace(std::move(e), (k.total() % 2 == 0) ? Rat(1) : Rat(-1));
    LocalizedSeries<M> term = dk.mul_poly(mono);
    term.set_cap(cap_min(term.cap(), cap));
    acc = acc + term;
  }
  acc.set_cap(cap);
  return acc;
}

/// Coefficient of the given monomial of one point, as a series over the same
/// group with that point's variables cleared. Requires the point to be
/// denominator-free.
template <class M>
LocalizedSeries<M> coefficient_at_point(const LocalizedSeries<M>& f, std::uint32_t point,
                                        const MultiIndex& mono) {
  const VarGroup& vars = f.vars();
  for (const auto& [loc, e] : f.denom())
    if (loc.involves_point(point))
      throw std::invalid_argument("coefficient_at_point: point occurs in a denominator");
  LocalizedSeries<M> out = LocalizedSeries<M>::zero(vars, f.cap());
  for (const auto& [e, c] : f.numerator()) {
    bool match = true;
    for (std::uint32_t mu = 0; mu < vars.dim_per_point && match; ++mu)
      if (e[vars.flat(point, mu)] != static_cast<std::int32_t>(mono[mu])) match = false;
    if (!match) continue;
    ExpVec ne = e;
    for (std::uint32_t mu = 0; mu < vars.dim_per_point; ++mu) ne[vars.flat(point, mu)] = 0;
    out.raw_insert(std::move(ne), c);
  }
  for (const auto& [loc, e] : f.denom()) out.raw_denom(loc, e);
  out.renormalize();
  return out;
}

/// The three-point re-expansion of (x1-x2)^(-k) in the variables
/// (x1-y1), (y1-y2)^(-1), (y2-x2): coefficient table C(i,j) plus a renderer
/// into a four-point localized series on points (x1, y1, y2, x2).
struct ThreePointReexpansion {
  std::int64_t k = 1;
  std::int64_t cap_i = 0;
  std::int64_t cap_j = 0;
  /// C(i,j) = binom(-k, i+j) * binom(i+j, i)
  std::map<std::pair<std::int64_t, std::int64_t>, Rat> coeff;

  Rat at(std::int64_t i, std::int64_t j) const {
    auto it = coeff.find({i, j});
    return it == coeff.end() ? Rat(0) : it->second;
  }
};

inline ThreePointReexpansion reexpand_three_point(std::int64_t k, std::int64_t cap_i,
                                                  std::int64_t cap_j) {
  if (k < 1) throw std::invalid_argument("reexpand_three_point needs k >= 1");
  ThreePointReexpansion r;
  r.k = k;
  r.cap_i = cap_i;
  r.cap_j = cap_j;
  for (std::int64_t i = 0; i <= cap_i; ++i)
    for (std::int64_t j = 0; j <= cap_j; ++j) {
      Rat c = binomial(-k, i + j) * binomial(i + j, i);
      if (!rat_is_zero(c)) r.coeff.emplace(std::make_pair(i, j), std::move(c));
    }
  return r;
}

/// One term C(i,j) (x1-y1)^i (y1-y2)^(-k-i-j) (y2-x2)^j as a localized series
/// on the four-point group (points 0..3 = x1, y1, y2, x2).
inline LocalizedSeries<Rat> reexpansion_term(const ThreePointReexpansion& r, std::int64_t i,
                                             std::int64_t j) {
  VarGroup vars{4, 1};
  auto s = LocalizedSeries<Rat>::constant(vars, r.at(i, j));
  auto d1 = LocalizedSeries<Rat>::localizer_power(vars, Localizer::difference(0, 1).first, i);
  auto d3 = LocalizedSeries<Rat>::localizer_power(vars, Localizer::difference(2, 3).first, j);
  auto mid =
      LocalizedSeries<Rat>::localizer_power(vars, Localizer::difference(1, 2).first, -(r.k + i + j));
  return s * d1 * d3 * mid;
}

}  // namespace vertexkit

#endif

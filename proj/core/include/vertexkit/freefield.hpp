#ifndef VERTEXKIT_FREEFIELD_HPP
#define VERTEXKIT_FREEFIELD_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vertexkit/hopf.hpp"
#include "vertexkit/multiindex.hpp"
#include "vertexkit/rational.hpp"
#include "vertexkit/series.hpp"

namespace vertexkit::freefield {

/// Normal-ordered monomial in derivatives of the fields: multiset of
/// (field id, derivative multi-index) with positive multiplicities.
struct WickMonomial {
  std::map<std::pair<std::uint32_t, MultiIndex>, std::uint32_t> factors;

  static WickMonomial unit() { return {}; }
  static WickMonomial field(std::uint32_t f, MultiIndex idx) {
    WickMonomial m;
    m.factors.emplace(std::make_pair(f, std::move(idx)), 1);
    return m;
  }
  std::int64_t degree() const {
    std::int64_t d = 0;
    for (const auto& [k, e] : factors) d += e;
    return d;
  }
  std::int64_t derivative_weight() const {
    std::int64_t d = 0;
    for (const auto& [k, e] : factors) d += (k.second.total() + 1) * e;
    return d;
  }
  WickMonomial times(const WickMonomial& o) const {
    WickMonomial r(*this);
    for (const auto& [k, e] : o.factors) r.factors[k] += e;
    return r;
  }
  /// Remove one occurrence of the given factor; throws if absent.
  WickMonomial without(const std::pair<std::uint32_t, MultiIndex>& k) const {
    WickMonomial r(*this);
    auto it = r.factors.find(k);
    if (it == r.factors.end()) throw std::logic_error("factor not present");
    if (it->second == 1)
      r.factors.erase(it);
    else
      --(it->second);
    return r;
  }
  auto operator<=>(const WickMonomial& o) const = default;
  std::string to_string(const std::vector<std::string>& names) const;
};

/// Finite combination of Wick monomials over the scalar S (Rat, or
/// DualScalar for first-order deformations).
template <class S>
class FieldState {
 public:
  using Traits = ScalarTraits<S>;

  FieldState() = default;
  static FieldState unit() { return basis(WickMonomial::unit()); }
  static FieldState basis(WickMonomial m) {
    FieldState v;
    v.terms_.emplace(std::move(m), Traits::one());
    return v;
  }

  const std::map<WickMonomial, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const WickMonomial& m, const S& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!Traits::is_zero(c)) terms_.emplace(m, c);
    } else {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }
  void add_scaled(const FieldState& o, const S& c) {
    if (Traits::is_zero(c)) return;
    for (const auto& [m, oc] : o.terms_) add_term(m, oc * c);
  }

  FieldState operator+(const FieldState& o) const {
    FieldState r(*this);
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  FieldState operator-() const {
    FieldState r(*this);
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  FieldState operator-(const FieldState& o) const { return *this + (-o); }
  FieldState scaled(const S& x) const {
    FieldState r;
    r.add_scaled(*this, x);
    return r;
  }
  FieldState operator*(const FieldState& o) const {
    FieldState r;
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) r.add_term(m1.times(m2), c1 * c2);
    return r;
  }
  bool operator==(const FieldState& o) const = default;
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::map<WickMonomial, S> terms_;
};

extern template class FieldState<Rat>;
extern template class FieldState<DualScalar>;

}  // namespace vertexkit::freefield

namespace vertexkit {
template <class S>
struct CoeffTraits<freefield::FieldState<S>> {
  using M = freefield::FieldState<S>;
  using Scalar = S;
  static M zero() { return M(); }
  static M one() { return M::unit(); }
  static bool is_zero(const M& m) { return m.is_zero(); }
  static M neg(const M& m) { return -m; }
  static void add_into(M& m, const M& o) { m.add_scaled(o, ScalarTraits<S>::one()); }
  static M mul(const M& a, const M& b) { return a * b; }
  static M scale(const M& m, const Scalar& s) { return m.scaled(s); }
  static Scalar scalar_from_rat(const Rat& r) { return ScalarTraits<S>::from_rat(r); }
  static M from_scalar(const Scalar& s) { return M::unit().scaled(s); }
  static std::string to_string(const M& m) { return m.to_string({}); }
};
}  // namespace vertexkit

namespace vertexkit::freefield {

/// Spacetime data, field symbols, propagators and optional irreducible
/// n-point functions. Propagators are one-point localized series in the d
/// coordinates; each must be even under x -> -x. Irreducible Delta_n for
/// n >= 3 must be nonsingular (no denominators).
template <class S>
struct FieldTheorySpec {
  std::uint32_t dim = 4;
  QuadForm form = QuadForm::minkowski(4);
  std::vector<std::string> fields = {"phi"};
  std::map<std::pair<std::uint32_t, std::uint32_t>, LocalizedSeries<S>> propagators;
  std::map<std::uint32_t, LocalizedSeries<S>> irreducible;  // arity -> Delta_n
  Cap cap = 6;

  VarGroup point_group() const { return VarGroup{1, dim}; }

  void validate() const {
    if (dim == 0) throw std::invalid_argument("field theory dimension must be >= 1");
    if (fields.empty()) throw std::invalid_argument("at least one field symbol required");
    if (!form.symmetric() || form.dim() != dim)
      throw std::invalid_argument("quadratic form must be symmetric of the spacetime dimension");
    for (const auto& [pair, prop] : propagators) {
      if (pair.first > pair.second || pair.second >= fields.size())
        throw std::invalid_argument("propagator indexed by an unknown field pair");
      if (!(prop.vars() == point_group()))
        throw std::invalid_argument("propagator must live on one point of dimension d");
      if (!prop.antipode().same_form(prop))
        throw std::invalid_argument("propagator must be even: Delta(-x) = Delta(x)");
    }
    for (const auto& [n, dn] : irreducible) {
      if (n < 3) throw std::invalid_argument("irreducible functions start at arity 3");
      if (!dn.denom().empty())
        throw std::invalid_argument("irreducible n-point functions must be nonsingular");
      if (!(dn.vars() == VarGroup{n, dim}))
        throw std::invalid_argument("Delta_n must live on n points of dimension d");
    }
  }

  /// Gaussian scalar theory: one field, Delta = 1 / q(x).
  static FieldTheorySpec scalar_minkowski(std::uint32_t d, Cap cap) {
    FieldTheorySpec s;
    s.dim = d;
    s.form = QuadForm::minkowski(d);
    s.cap = cap;
    LocalizedSeries<S> delta = LocalizedSeries<S>::localizer_power(
        VarGroup{1, d}, Localizer::quadratic_point(0, s.form), -1);
    s.propagators.emplace(std::make_pair(0u, 0u), std::move(delta));
    return s;
  }
};

/// One insertion of the product: a state placed at a point of the output
/// variable group.
template <class S>
struct Insertion {
  FieldState<S> state;
  std::uint32_t point;
};

inline constexpr std::uint32_t kStatePoint = 0xffffffffu;

namespace detail {
/// flattened factor of the contraction pool
struct PoolFactor {
  std::uint32_t group;  // insertion index; the state is the last group
  std::uint32_t point;  // kStatePoint for state factors
  std::uint32_t field;
  MultiIndex idx;
  bool from_state;
};
}  // namespace detail

/// The free-field commutative vertex algebra engine: creation/annihilation
/// derivations, generalized Wick products with irreducible n-point blocks,
/// correlation functions and field-equation reduction.
template <class S>
class FieldAlgebra {
 public:
  explicit FieldAlgebra(FieldTheorySpec<S> spec) : spec_(std::move(spec)) { spec_.validate(); }

  const FieldTheorySpec<S>& spec() const { return spec_; }

  /// Delta_{fg} as stored (unordered pair; evenness makes the order moot).
  const LocalizedSeries<S>& propagator(std::uint32_t f, std::uint32_t g) const {
    auto it = spec_.propagators.find({std::min(f, g), std::max(f, g)});
    if (it == spec_.propagators.end())
      throw std::invalid_argument("no propagator declared for this field pair");
    return it->second;
  }
  bool has_propagator(std::uint32_t f, std::uint32_t g) const {
    return spec_.propagators.count({std::min(f, g), std::max(f, g)}) > 0;
  }

  /// phi^-(x): the derivation with phi^-(x)(D^(j) psi) = (-1)^{|j|}
  /// (D^(j) Delta_{phi psi})(x), extended by Leibniz; vanishes on the unit.
  LocalizedSeries<FieldState<S>> apply_annihilator(const VarGroup& target, std::uint32_t point,
                                                   std::uint32_t field,
                                                   const FieldState<S>& state) const;

  /// phi^+(x): multiplication by sum_i x^i D^(i)(phi). The expansion order
  /// defaults to the cap; passing a smaller order keeps later singular
  /// compositions exact at the cap (cleared degrees grow with the order).
  LocalizedSeries<FieldState<S>> apply_creator(const VarGroup& target, std::uint32_t point,
                                               std::uint32_t field, const FieldState<S>& state,
                                               std::int64_t order = -1) const;

  /// Coefficientwise extensions, for composing operators.
  LocalizedSeries<FieldState<S>> apply_annihilator(std::uint32_t point, std::uint32_t field,
                                                   const LocalizedSeries<FieldState<S>>& f) const;
  LocalizedSeries<FieldState<S>> apply_creator(std::uint32_t point, std::uint32_t field,
                                               const LocalizedSeries<FieldState<S>>& f,
                                               std::int64_t order = -1) const;
  /// phi(x) = phi^-(x) + phi^+(x), coefficientwise.
  LocalizedSeries<FieldState<S>> apply_field(std::uint32_t point, std::uint32_t field,
                                             const LocalizedSeries<FieldState<S>>& f,
                                             std::int64_t order = -1) const;

  /// Generalized Wick product of normal-ordered insertions applied to a
  /// state: sum over partitions of a subset of the factor pool into blocks of
  /// size >= 2 spanning at least two groups (size-2 blocks contract through
  /// the propagators, larger blocks through Delta_n), the rest normally
  /// ordered with their creation expansions.
  LocalizedSeries<FieldState<S>> field_product(std::uint32_t points,
                                               const std::vector<Insertion<S>>& insertions,
                                               const FieldState<S>& state) const;

  /// Correlation function: unit-monomial coefficient of the product applied
  /// to the unit state.
  LocalizedSeries<S> n_point(const std::vector<std::pair<std::uint32_t, std::uint32_t>>&
                                 field_at_point) const;

  /// Check D(Delta) = 0 as a localized-series identity.
  bool propagator_satisfies(const hopf::HopfElement& op, std::uint32_t f, std::uint32_t g) const;

  /// Rewrite derivative indices modulo the relation op(phi) = 0, eliminating
  /// the lex-leading index of op. Throws when the leading coefficient is not
  /// invertible or the input is zero.
  FieldState<S> reduce_by_field_equation(const hopf::HopfElement& op,
                                         const FieldState<S>& state) const;

 private:
  /// Contraction value of a pairwise block between decorated factors at two
  /// points (b may be kStatePoint for a factor of the target state).
  LocalizedSeries<S> pair_value(const VarGroup& target, std::uint32_t field_a,
                                const MultiIndex& ia, std::uint32_t pa, std::uint32_t field_b,
                                const MultiIndex& ib, std::uint32_t pb) const;

  void contract_pool_(const VarGroup& target, const std::vector<detail::PoolFactor>& pool,
                      const S& coeff, LocalizedSeries<FieldState<S>>& total) const;
  LocalizedSeries<S> block_value_(const VarGroup& target,
                                  const std::vector<detail::PoolFactor>& pool,
                                  const std::vector<std::size_t>& block) const;
  LocalizedSeries<S> move_slots_(const VarGroup& target, const LocalizedSeries<S>& v,
                                 const std::vector<detail::PoolFactor>& pool,
                                 const std::vector<std::size_t>& block) const;

  FieldTheorySpec<S> spec_;
};

extern template class FieldAlgebra<Rat>;
extern template class FieldAlgebra<DualScalar>;

/// The 1-d free field with homogeneous propagator c * x^(-2): weights are
/// graded, so modes truncate a priori like the lattice case. This is the
/// second algebra the identity suites run on.
class FieldAlgebra1D {
 public:
  using State = FieldState<Rat>;

  FieldAlgebra1D(Rat delta_coefficient, std::int64_t series_cap);

  std::int64_t series_cap() const { return series_cap_; }
  std::int64_t weight(const WickMonomial& m) const { return m.derivative_weight(); }
  std::int64_t weight_bound(const State& v) const;

  std::vector<WickMonomial> basis_up_to_weight(std::int64_t cap) const;

  /// Y(u, y) w, exact for all exponents <= yhi.
  const std::map<std::int64_t, State>& y_expand(const WickMonomial& u, const WickMonomial& w,
                                                std::int64_t yhi) const;
  std::map<std::int64_t, State> y_expand(const State& u, const State& w, std::int64_t yhi) const;
  State mode_extract(const State& u, std::int64_t n, const State& w) const;

 private:
  std::map<std::int64_t, State> y_expand_uncached_(const WickMonomial& u, const WickMonomial& w,
                                                   std::int64_t yhi) const;

  Rat delta_c_;
  std::int64_t series_cap_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<WickMonomial, WickMonomial, std::int64_t>,
                   std::map<std::int64_t, State>>
      cache_;
};

}  // namespace vertexkit::freefield

#endif

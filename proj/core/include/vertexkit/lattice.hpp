#ifndef VERTEXKIT_LATTICE_HPP
#define VERTEXKIT_LATTICE_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vertexkit/laurent.hpp"
#include "vertexkit/rational.hpp"
#include "vertexkit/series.hpp"
#include "vertexkit/sieve.hpp"

namespace vertexkit::lattice {

/// Even lattice data plus the truncation policy of the instance. Every Gram
/// entry must be even; odd lattices (which need a cocycle twist) are rejected
/// at construction.
struct LatticeSpec {
  std::uint32_t rank = 1;
  std::vector<std::vector<std::int64_t>> gram;
  std::int64_t weight_cap = 3;
  std::int64_t series_cap = 8;

  void validate() const;
  std::int64_t pairing(const std::vector<std::int64_t>& a,
                       const std::vector<std::int64_t>& b) const;
  /// (e_k, alpha)
  std::int64_t basis_pairing(std::uint32_t k, const std::vector<std::int64_t>& a) const;

  static LatticeSpec a1(std::int64_t weight_cap = 3, std::int64_t series_cap = 8) {
    LatticeSpec s;
    s.rank = 1;
    s.gram = {{2}};
    s.weight_cap = weight_cap;
    s.series_cap = series_cap;
    return s;
  }
};

/// Basis element e^alpha * prod gamma_k(-n)^e of the lattice vertex algebra.
/// heis maps (k, n) with k a lattice coordinate (0-based) and depth n >= 1 to
/// a positive exponent.
struct LatticeState {
  std::vector<std::int64_t> group;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> heis;

  std::int64_t heis_weight() const {
    std::int64_t w = 0;
    for (const auto& [kn, e] : heis) w += static_cast<std::int64_t>(kn.second) * e;
    return w;
  }
  bool is_vacuum() const {
    if (!heis.empty()) return false;
    for (auto g : group)
      if (g != 0) return false;
    return true;
  }
  auto operator<=>(const LatticeState& o) const = default;
  std::string to_string() const;
};

/// Finite rational combination of basis states.
class StateVector {
 public:
  StateVector() = default;
  static StateVector basis(LatticeState s) {
    StateVector v;
    v.terms_.emplace(std::move(s), Rat(1));
    return v;
  }
  static StateVector vacuum(std::uint32_t rank) {
    LatticeState s;
    s.group.assign(rank, 0);
    return basis(std::move(s));
  }

  const std::map<LatticeState, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const LatticeState& s, const Rat& c) {
    auto it = terms_.find(s);
    if (it == terms_.end()) {
      if (!rat_is_zero(c)) terms_.emplace(s, c);
    } else {
      it->second += c;
      if (rat_is_zero(it->second)) terms_.erase(it);
    }
  }

  StateVector operator+(const StateVector& o) const {
    StateVector r(*this);
    for (const auto& [s, c] : o.terms_) r.add_term(s, c);
    return r;
  }
  StateVector operator-() const {
    StateVector r(*this);
    for (auto& [s, c] : r.terms_) c = -c;
    return r;
  }
  StateVector operator-(const StateVector& o) const { return *this + (-o); }
  /// in-place this += c * o
  void add_scaled(const StateVector& o, const Rat& c) {
    if (rat_is_zero(c)) return;
    for (const auto& [s, oc] : o.terms_) add_term(s, oc * c);
  }
  StateVector scaled(const Rat& x) const {
    StateVector r;
    if (rat_is_zero(x)) return r;
    for (const auto& [s, c] : terms_) r.terms_.emplace(s, c * x);
    return r;
  }
  /// Product in the commutative algebra V: add group parts, merge monomials.
  StateVector operator*(const StateVector& o) const {
    StateVector r;
    for (const auto& [s1, c1] : terms_)
      for (const auto& [s2, c2] : o.terms_) {
        LatticeState s;
        s.group = s1.group;
        for (std::size_t k = 0; k < s.group.size(); ++k) s.group[k] += s2.group[k];
        s.heis = s1.heis;
        for (const auto& [kn, e] : s2.heis) s.heis[kn] += e;
        r.add_term(s, c1 * c2);
      }
    return r;
  }
  bool operator==(const StateVector& o) const = default;
  std::string to_string() const;

 private:
  std::map<LatticeState, Rat> terms_;
};

}  // namespace vertexkit::lattice

namespace vertexkit {
template <>
struct CoeffTraits<lattice::StateVector> {
  using M = lattice::StateVector;
  using Scalar = Rat;
  static M zero() { return M(); }
  static M one() { throw std::logic_error("no canonical unit without rank"); }
  static bool is_zero(const M& m) { return m.is_zero(); }
  static M neg(const M& m) { return -m; }
  static void add_into(M& m, const M& o) { m = m + o; }
  static M mul(const M& a, const M& b) { return a * b; }
  static M scale(const M& m, const Scalar& s) { return m.scaled(s); }
  static Scalar scalar_from_rat(const Rat& r) { return r; }
  static M from_scalar(const Scalar&) { throw std::logic_error("no canonical unit without rank"); }
  static std::string to_string(const M& m) { return m.to_string(); }
};
}  // namespace vertexkit

namespace vertexkit::lattice {

/// Laurent polynomial in one formal variable with StateVector coefficients;
/// the workhorse of mode arithmetic.
using ModeSeries = std::map<std::int64_t, StateVector>;

struct VertexExpansion {
  LaurentTable<StateVector> expanded;
  std::optional<LocalizedSeries<StateVector>> rational;
};

/// The lattice vertex algebra instance: state arithmetic, the translation
/// derivation, creation/annihilation operators, the full state-field map and
/// mode extraction.
class LatticeAlgebra {
 public:
  using State = StateVector;

  explicit LatticeAlgebra(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  std::int64_t series_cap() const { return spec_.series_cap; }

  std::int64_t weight(const LatticeState& s) const;
  std::int64_t weight_bound(const StateVector& v) const;  // max over terms

  /// Basis states of conformal weight <= cap (group part bounded by the
  /// grading (alpha,alpha)/2 <= cap).
  std::vector<LatticeState> basis_up_to_weight(std::int64_t cap) const;

  /// Translation derivation: D(e^a) = a(-1) e^a, D(gamma_k(-n)) = n gamma_k(-n-1).
  StateVector derivation(const StateVector& v) const;
  StateVector derivation_basis(const LatticeState& s) const;
  /// D^(i) = D^i / i!
  StateVector divided_derivation(const StateVector& v, std::uint32_t order) const;

  /// alpha(-n) * v, the Heisenberg creation multiplication.
  StateVector heis_mul(const std::vector<std::int64_t>& alpha, std::uint32_t depth,
                       const StateVector& v) const;
  /// gamma_k(m) for m > 0 acting as the annihilation derivation; m = 0 acts
  /// by the pairing with the group part.
  StateVector heis_annihilate(std::uint32_t k, std::uint32_t m, const StateVector& v) const;

  /// D^(i)(e^alpha), computed by the Newton recursion on the exponential of
  /// creation modes. The direct D-iteration oracle lives in the tests.
  StateVector creation_coefficient(const std::vector<std::int64_t>& alpha,
                                   std::int64_t order) const;

  /// theta_z: the annihilation ring endomorphism with theta(e^b) =
  /// z^{(a,b)} e^b and theta(gamma_k(-n)) = gamma_k(-n) - (e_k,a) z^{-n},
  /// i.e. the intertwining theta o D = (D - d/dz) o theta.
  ModeSeries theta(const std::vector<std::int64_t>& alpha, const LatticeState& s) const;

  /// Full vertex operator Y(u, z) w as a z-window table, exact for all
  /// exponents <= zhi (grading bounds the support below). The reference
  /// points into the memo table (node-stable, read-mostly).
  const ModeSeries& y_expand(const LatticeState& u, const LatticeState& w,
                             std::int64_t zhi) const;
  ModeSeries y_expand(const StateVector& u, const StateVector& w, std::int64_t zhi) const;

  /// z-exponent below which Y(u, z) w vanishes by grading.
  std::int64_t support_floor(const LatticeState& u, const LatticeState& w) const {
    return -(weight(u) + weight(w));
  }

  /// u_n w = coefficient of z^{-n-1} in Y(u, z) w. Throws CapError when the
  /// requested mode lies above the truncation window.
  StateVector mode_extract(const StateVector& u, std::int64_t n, const StateVector& w) const;

  /// Multiplication by sum_i z^i D^(i)(e^alpha): nonsingular, constant term
  /// e^alpha * state.
  VertexExpansion creation_op(const std::vector<std::int64_t>& alpha,
                              const StateVector& state) const;
  /// theta as a vertex operator (finitely many modes on any fixed state).
  VertexExpansion annihilation_op(const std::vector<std::int64_t>& alpha,
                                  const StateVector& state) const;

  /// Compose e^{alpha_i}(z_i) over the given sieve: operators are applied
  /// innermost-variable first, per the sieve's expansion order.
  VertexExpansion y_product(const std::vector<std::vector<std::int64_t>>& alphas,
                            const StateVector& state, const sieves::Sieve& order) const;

  /// Verification helper: theta o D - (D - d/dz) o theta applied to a state,
  /// which must vanish identically.
  ModeSeries intertwining_defect(const std::vector<std::int64_t>& alpha,
                                 const LatticeState& s) const;

 private:
  ModeSeries y_expand_uncached_(const LatticeState& u, const LatticeState& w,
                                std::int64_t zhi) const;

  LatticeSpec spec_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::vector<std::int64_t>, std::int64_t>, StateVector>
      creation_cache_;
  mutable std::map<std::tuple<LatticeState, LatticeState, std::int64_t>, ModeSeries>
      y_cache_;
};

}  // namespace vertexkit::lattice

#endif

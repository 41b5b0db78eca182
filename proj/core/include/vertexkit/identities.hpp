#ifndef VERTEXKIT_IDENTITIES_HPP
#define VERTEXKIT_IDENTITIES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "vertexkit/rational.hpp"
#include "vertexkit/series.hpp"

namespace vertexkit::identities {

/// Any graded algebra exposing modes u_n = Res_z z^n Y(u,z) with weights
/// bounding the mode support plugs in here (the lattice instance and the 1-d
/// free field both do).
template <class Alg>
using StateOf = typename Alg::State;

template <class State>
struct CheckResult {
  bool pass = true;
  std::optional<State> witness;  // difference when a check fails
};

/// Mode sums of the main identity are finite by grading; this computes the
/// inclusive upper bound on i for which u_{k0+i} x can be nonzero.
template <class Alg>
std::int64_t mode_cutoff(const Alg& alg, const StateOf<Alg>& u, const StateOf<Alg>& x,
                         std::int64_t k0) {
  return alg.weight_bound(u) + alg.weight_bound(x) - 1 - k0;
}

/// sum_i binom(m,i) (u_{q+i} v)_{m+n-i} w
///   = sum_i (-1)^i binom(q,i) ( u_{m+q-i}(v_{n+i} w) - (-1)^q v_{n+q-i}(u_{m+i} w) ).
/// Caps are checked a priori: a pass is an exact identity on the graded
/// components involved, never a truncated one.
template <class Alg>
CheckResult<StateOf<Alg>> borcherds_check(const Alg& alg, const StateOf<Alg>& u,
                                          const StateOf<Alg>& v, const StateOf<Alg>& w,
                                          std::int64_t m, std::int64_t n, std::int64_t q) {
  using State = StateOf<Alg>;
  const std::int64_t cap = alg.series_cap();

  const std::int64_t i_lhs = mode_cutoff(alg, u, v, q);
  const std::int64_t i_v = mode_cutoff(alg, v, w, n);
  const std::int64_t i_u = mode_cutoff(alg, u, w, m);

  // every z-exponent -k-1 touched must sit inside the window
  auto need = [&](std::int64_t k) {
    if (-k - 1 > cap)
      throw CapError("borcherds_check: mode z^" + std::to_string(-k - 1) +
                     " outside the series cap " + std::to_string(cap));
  };
  for (std::int64_t i = 0; i <= i_lhs; ++i) {
    need(q + i);
    need(m + n - i);
  }
  for (std::int64_t i = 0; i <= i_v; ++i) {
    need(n + i);
    need(m + q - i);
  }
  for (std::int64_t i = 0; i <= i_u; ++i) {
    need(m + i);
    need(n + q - i);
  }

  State lhs{};
  for (std::int64_t i = 0; i <= i_lhs; ++i) {
    Rat c = binomial(m, i);
    if (rat_is_zero(c)) continue;
    State inner = alg.mode_extract(u, q + i, v);
    if (inner.is_zero()) continue;
    lhs = lhs + alg.mode_extract(inner, m + n - i, w).scaled(c);
  }

  State rhs{};
  for (std::int64_t i = 0; i <= std::max(i_v, i_u); ++i) {
    Rat c = binomial(q, i);
    if (rat_is_zero(c)) continue;
    if (i % 2 == 1) c = -c;
    if (i <= i_v) {
      State t = alg.mode_extract(v, n + i, w);
      if (!t.is_zero()) rhs = rhs + alg.mode_extract(u, m + q - i, t).scaled(c);
    }
    if (i <= i_u) {
      State t = alg.mode_extract(u, m + i, w);
      if (!t.is_zero()) {
        // the second term carries -(-1)^q; parity of q decides the sign
        Rat c2 = ((((q % 2) + 2) % 2) == 0) ? -c : c;
        rhs = rhs + alg.mode_extract(v, n + q - i, t).scaled(c2);
      }
    }
  }

  State diff = lhs - rhs;
  if (diff.is_zero()) return {true, std::nullopt};
  return {false, std::move(diff)};
}

/// Order-<=-1 property of the zero mode: [u_0, v(y)] w = (u_0 v)(y) w,
/// compared coefficientwise across the whole shared window.
template <class Alg>
CheckResult<StateOf<Alg>> zero_mode_order_check(const Alg& alg, const StateOf<Alg>& u,
                                                const StateOf<Alg>& v, const StateOf<Alg>& w) {
  using State = StateOf<Alg>;
  const std::int64_t cap = alg.series_cap();

  auto vw = alg.y_expand(v, w, cap);
  std::map<std::int64_t, State> lhs;
  for (const auto& [ye, sv] : vw) {
    State t = alg.mode_extract(u, 0, sv);
    if (!t.is_zero()) lhs[ye] = t;
  }
  // v(y) u_0 w
  State u0w = alg.mode_extract(u, 0, w);
  if (!u0w.is_zero()) {
    for (const auto& [ye, sv] : alg.y_expand(v, u0w, cap)) {
      auto it = lhs.find(ye);
      if (it == lhs.end())
        lhs.emplace(ye, -sv);
      else {
        it->second = it->second - sv;
        if (it->second.is_zero()) lhs.erase(it);
      }
    }
  }
  // (u_0 v)(y) w
  State u0v = alg.mode_extract(u, 0, v);
  std::map<std::int64_t, State> rhs;
  if (!u0v.is_zero()) rhs = alg.y_expand(u0v, w, cap);

  for (const auto& [ye, sv] : rhs) {
    auto it = lhs.find(ye);
    if (it == lhs.end()) {
      if (!sv.is_zero()) return {false, sv};
    } else {
      State d = it->second - sv;
      if (!d.is_zero()) return {false, std::move(d)};
      lhs.erase(it);
    }
  }
  for (const auto& [ye, sv] : lhs)
    if (!sv.is_zero()) return {false, sv};
  return {true, std::nullopt};
}

}  // namespace vertexkit::identities

#endif

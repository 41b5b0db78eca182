#ifndef VERTEXKIT_LOCALIZER_HPP
#define VERTEXKIT_LOCALIZER_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertexkit/rational.hpp"
#include "vertexkit/vargroup.hpp"

namespace vertexkit {

/// Symmetric integer matrix of a quadratic form q(u) = sum Q_{mu nu} u_mu u_nu.
struct QuadForm {
  std::vector<std::vector<std::int64_t>> q;

  std::size_t dim() const { return q.size(); }
  bool symmetric() const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i].size() != q.size()) return false;
      for (std::size_t j = 0; j < q.size(); ++j)
        if (q[i][j] != q[j][i]) return false;
    }
    return true;
  }
  /// Minkowski-type default -u_1^2 + u_2^2 + ... + u_d^2.
  static QuadForm minkowski(std::size_t d) {
    QuadForm f;
    f.q.assign(d, std::vector<std::int64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) f.q[i][i] = (i == 0) ? -1 : 1;
    return f;
  }
  static QuadForm euclidean(std::size_t d) {
    QuadForm f;
    f.q.assign(d, std::vector<std::int64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) f.q[i][i] = 1;
    return f;
  }
  auto operator<=>(const QuadForm& o) const = default;
};

/// One inverted element of the ring: a point variable, a pairwise difference,
/// or a quadratic form evaluated at a point or a difference. Differences and
/// two-point quadratics store i < j canonically; (x_j - x_i) is rewritten as
/// -(x_i - x_j) with the sign absorbed into the numerator.
struct Localizer {
  enum class Kind : std::uint8_t { Point, Difference, QuadraticPoint, QuadraticPair };

  Kind kind = Kind::Point;
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // used by Difference / QuadraticPair
  QuadForm form;        // used by the quadratic kinds

  static Localizer point(std::uint32_t i) {
    Localizer l;
    l.kind = Kind::Point;
    l.i = i;
    return l;
  }
  /// Returns the canonical localizer for (x_a - x_b) together with the sign
  /// (+1 if a < b, -1 if swapped).
  static std::pair<Localizer, int> difference(std::uint32_t a, std::uint32_t b) {
    if (a == b) throw std::invalid_argument("difference localizer needs distinct points");
    Localizer l;
    l.kind = Kind::Difference;
    l.i = std::min(a, b);
    l.j = std::max(a, b);
    return {l, a < b ? +1 : -1};
  }
  static Localizer quadratic_point(std::uint32_t i, QuadForm f) {
    Localizer l;
    l.kind = Kind::QuadraticPoint;
    l.i = i;
    l.form = std::move(f);
    return l;
  }
  static Localizer quadratic_pair(std::uint32_t a, std::uint32_t b, QuadForm f) {
    if (a == b) throw std::invalid_argument("quadratic pair needs distinct points");
    Localizer l;
    l.kind = Kind::QuadraticPair;
    l.i = std::min(a, b);
    l.j = std::max(a, b);
    l.form = std::move(f);  // q(-u) = q(u), no sign to absorb
    return l;
  }

  /// Total degree of the underlying homogeneous polynomial.
  std::int64_t degree() const {
    return (kind == Kind::Point || kind == Kind::Difference) ? 1 : 2;
  }

  bool involves_point(std::uint32_t p) const {
    if (kind == Kind::Point || kind == Kind::QuadraticPoint) return i == p;
    return i == p || j == p;
  }

  /// Expanded sparse polynomial over the flat variables of `vars`.
  std::map<ExpVec, Rat> polynomial(const VarGroup& vars) const {
    std::map<ExpVec, Rat> poly;
    const std::size_t nv = vars.total_vars();
    auto mono = [&](std::size_t v1, int e1, std::size_t v2, int e2) {
      ExpVec e(nv, 0);
      e[v1] += e1;
      if (e2) e[v2] += e2;
      return e;
    };
    switch (kind) {
      case Kind::Point: {
        if (vars.dim_per_point != 1)
          throw std::invalid_argument("point localizer needs 1-d points");
        poly[mono(vars.flat(i, 0), 1, 0, 0)] = Rat(1);
        break;
      }
      case Kind::Difference: {
        if (vars.dim_per_point != 1)
          throw std::invalid_argument("difference localizer needs 1-d points");
        poly[mono(vars.flat(i, 0), 1, 0, 0)] = Rat(1);
        poly[mono(vars.flat(j, 0), 1, 0, 0)] = Rat(-1);
        break;
      }
      case Kind::QuadraticPoint:
      case Kind::QuadraticPair: {
        const std::size_t d = vars.dim_per_point;
        if (form.dim() != d) throw std::invalid_argument("quadratic form dimension mismatch");
        for (std::size_t mu = 0; mu < d; ++mu)
          for (std::size_t nu = 0; nu < d; ++nu) {
            Rat c(static_cast<long>(form.q[mu][nu]));
            if (rat_is_zero(c)) continue;
            // u = x_i or x_i - x_j componentwise
            struct Part {
              std::size_t var;
              int sign;
            };
            std::vector<Part> us{{vars.flat(i, static_cast<std::uint32_t>(mu)), +1}};
            std::vector<Part> vs{{vars.flat(i, static_cast<std::uint32_t>(nu)), +1}};
            if (kind == Kind::QuadraticPair) {
              us.push_back({vars.flat(j, static_cast<std::uint32_t>(mu)), -1});
              vs.push_back({vars.flat(j, static_cast<std::uint32_t>(nu)), -1});
            }
            for (const auto& a : us)
              for (const auto& b : vs) {
                ExpVec e(nv, 0);
                e[a.var] += 1;
                e[b.var] += 1;
                Rat term = c * a.sign * b.sign;
                auto it = poly.find(e);
                if (it == poly.end())
                  poly.emplace(std::move(e), term);
                else {
                  it->second += term;
                  if (rat_is_zero(it->second)) poly.erase(it);
                }
              }
          }
        break;
      }
    }
    return poly;
  }

  std::string to_string(const VarGroup& vars) const {
    switch (kind) {
      case Kind::Point:
        return vars.var_name(vars.flat(i, 0));
      case Kind::Difference:
        return "(" + vars.var_name(vars.flat(i, 0)) + "-" + vars.var_name(vars.flat(j, 0)) + ")";
      case Kind::QuadraticPoint:
        return "q(x" + std::to_string(i + 1) + ")";
      case Kind::QuadraticPair:
        return "q(x" + std::to_string(i + 1) + "-x" + std::to_string(j + 1) + ")";
    }
    return "?";
  }

  auto operator<=>(const Localizer& o) const = default;
};

/// denominator monomial: localizer -> positive exponent
using DenomMap = std::map<Localizer, std::uint32_t>;

inline std::int64_t denom_degree(const DenomMap& d) {
  std::int64_t acc = 0;
  for (const auto& [loc, e] : d) acc += loc.degree() * e;
  return acc;
}

}  // namespace vertexkit

#endif

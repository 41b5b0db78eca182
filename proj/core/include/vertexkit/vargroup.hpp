#ifndef VERTEXKIT_VARGROUP_HPP
#define VERTEXKIT_VARGROUP_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertexkit {

/// n points on the group, each carrying d scalar coordinates. Flat variable
/// layout is point-major: variable (p, mu) sits at index p*d + mu.
struct VarGroup {
  std::uint32_t count = 1;          // number of points n
  std::uint32_t dim_per_point = 1;  // d

  std::size_t total_vars() const {
    return static_cast<std::size_t>(count) * dim_per_point;
  }
  std::size_t flat(std::uint32_t point, std::uint32_t mu) const {
    if (point >= count || mu >= dim_per_point)
      throw std::out_of_range("variable index outside group");
    return static_cast<std::size_t>(point) * dim_per_point + mu;
  }
  std::string var_name(std::size_t flat_index) const {
    std::uint32_t p = static_cast<std::uint32_t>(flat_index / dim_per_point);
    std::uint32_t mu = static_cast<std::uint32_t>(flat_index % dim_per_point);
    std::string s = "x" + std::to_string(p + 1);
    if (dim_per_point > 1) s += "_" + std::to_string(mu + 1);
    return s;
  }
  bool operator==(const VarGroup& o) const = default;
};

/// Signed exponent vector over the flat variables of a VarGroup. Numerators
/// of localized series keep all entries >= 0; iterated Laurent tables allow
/// negative entries.
using ExpVec = std::vector<std::int32_t>;

inline std::int64_t exp_total(const ExpVec& e) {
  return std::accumulate(e.begin(), e.end(), std::int64_t{0});
}

inline ExpVec exp_add(const ExpVec& a, const ExpVec& b) {
  ExpVec r(a);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

inline std::string exp_to_string(const ExpVec& e, const VarGroup& vars) {
  std::string s;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars.var_name(k);
    if (e[k] != 1) s += "^" + std::to_string(e[k]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace vertexkit

#endif

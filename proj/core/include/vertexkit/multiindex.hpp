#ifndef VERTEXKIT_MULTIINDEX_HPP
#define VERTEXKIT_MULTIINDEX_HPP

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertexkit/rational.hpp"

namespace vertexkit {

/// Dense multi-index i = (i_1, ..., i_d) of non-negative entries.
struct MultiIndex {
  std::vector<std::uint32_t> entries;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : entries(dim, 0) {}
  MultiIndex(std::initializer_list<std::uint32_t> init) : entries(init) {}

  std::size_t dim() const { return entries.size(); }
  std::uint32_t operator[](std::size_t k) const { return entries[k]; }
  std::uint32_t& operator[](std::size_t k) { return entries[k]; }

  std::int64_t total() const {
    return std::accumulate(entries.begin(), entries.end(), std::int64_t{0});
  }
  bool is_zero() const { return total() == 0; }

  MultiIndex plus(const MultiIndex& o) const {
    check_dim(o);
    MultiIndex r(*this);
    for (std::size_t k = 0; k < entries.size(); ++k) r.entries[k] += o.entries[k];
    return r;
  }

  /// Componentwise difference; requires o <= *this componentwise.
  MultiIndex minus(const MultiIndex& o) const {
    check_dim(o);
    MultiIndex r(*this);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (o.entries[k] > r.entries[k]) throw std::domain_error("multi-index underflow");
      r.entries[k] -= o.entries[k];
    }
    return r;
  }

  bool leq(const MultiIndex& o) const {
    check_dim(o);
    for (std::size_t k = 0; k < entries.size(); ++k)
      if (entries[k] > o.entries[k]) return false;
    return true;
  }

  auto operator<=>(const MultiIndex& o) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(entries[k]);
    }
    return s + ")";
  }

 private:
  void check_dim(const MultiIndex& o) const {
    if (o.entries.size() != entries.size())
      throw std::invalid_argument("multi-index dimension mismatch");
  }
};

/// Product of componentwise binomials binom(i_k + j_k, i_k); this is the
/// structure constant of the divided-power product D^(i) D^(j).
inline Rat index_binomial(const MultiIndex& i, const MultiIndex& j) {
  Rat acc(1);
  for (std::size_t k = 0; k < i.dim(); ++k)
    acc *= binomial(static_cast<std::int64_t>(i[k]) + j[k], i[k]);
  return acc;
}

/// i! = prod_k (i_k)!
inline Rat index_factorial(const MultiIndex& i) {
  Rat acc(1);
  for (std::size_t k = 0; k < i.dim(); ++k) acc *= factorial(i[k]);
  return acc;
}

/// All multi-indices of dimension dim with total degree <= cap, in
/// lexicographic order.
inline std::vector<MultiIndex> indices_up_to(std::size_t dim, std::int64_t cap) {
  std::vector<MultiIndex> out;
  MultiIndex cur(dim);
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t pos,
                                                           std::int64_t left) {
    if (pos == dim) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      cur[pos] = static_cast<std::uint32_t>(v);
      rec(pos + 1, left - v);
    }
    cur[pos] = 0;
  };
  rec(0, cap);
  return out;
}

}  // namespace vertexkit

#endif

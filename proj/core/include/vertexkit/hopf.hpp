#ifndef VERTEXKIT_HOPF_HPP
#define VERTEXKIT_HOPF_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "vertexkit/multiindex.hpp"
#include "vertexkit/rational.hpp"
#include "vertexkit/series.hpp"

namespace vertexkit::hopf {

/// Basis operator D^(i) of the divided-power algebra H_d.
struct DividedPower {
  MultiIndex index;
  std::uint32_t dim() const { return static_cast<std::uint32_t>(index.dim()); }
};

/// Finite rational combination of divided-power basis operators, all sharing
/// one dimension d. No zero coefficients stored.
class HopfElement {
 public:
  explicit HopfElement(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  }
  static HopfElement basis(const MultiIndex& i) {
    HopfElement h(static_cast<std::uint32_t>(i.dim()));
    h.terms_.emplace(i, Rat(1));
    return h;
  }
  static HopfElement unit(std::uint32_t dim) { return basis(MultiIndex(dim)); }

  std::uint32_t dim() const { return dim_; }
  const std::map<MultiIndex, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& i, const Rat& c) {
    if (i.dim() != dim_) throw std::invalid_argument("index dimension mismatch");
    auto it = terms_.find(i);
    if (it == terms_.end()) {
      if (!rat_is_zero(c)) terms_.emplace(i, c);
    } else {
      it->second += c;
      if (rat_is_zero(it->second)) terms_.erase(it);
    }
  }

  HopfElement operator+(const HopfElement& o) const {
    check(o);
    HopfElement r(*this);
    for (const auto& [i, c] : o.terms_) r.add_term(i, c);
    return r;
  }
  HopfElement operator-() const {
    HopfElement r(*this);
    for (auto& [i, c] : r.terms_) c = -c;
    return r;
  }
  HopfElement operator-(const HopfElement& o) const { return *this + (-o); }
  HopfElement scaled(const Rat& s) const {
    HopfElement r(dim_);
    if (rat_is_zero(s)) return r;
    for (const auto& [i, c] : terms_) r.terms_.emplace(i, c * s);
    return r;
  }
  bool operator==(const HopfElement& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  std::string to_string() const {
    std::string s;
    for (const auto& [i, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += rat_to_string(c) + "*D^" + i.to_string();
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check(const HopfElement& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Hopf dimension mismatch");
  }
  std::uint32_t dim_;
  std::map<MultiIndex, Rat> terms_;
};

/// Element of H (x) H, the comultiplication target.
class TensorElement {
 public:
  using Key = std::pair<MultiIndex, MultiIndex>;

  explicit TensorElement(std::uint32_t dim) : dim_(dim) {}
  std::uint32_t dim() const { return dim_; }
  const std::map<Key, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndex& a, const MultiIndex& b, const Rat& c) {
    auto it = terms_.find({a, b});
    if (it == terms_.end()) {
      if (!rat_is_zero(c)) terms_.emplace(Key{a, b}, c);
    } else {
      it->second += c;
      if (rat_is_zero(it->second)) terms_.erase(it);
    }
  }

  TensorElement operator+(const TensorElement& o) const {
    TensorElement r(*this);
    for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, c);
    return r;
  }
  TensorElement operator-(const TensorElement& o) const {
    TensorElement r(*this);
    for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, -c);
    return r;
  }
  TensorElement swapped() const {
    TensorElement r(dim_);
    for (const auto& [k, c] : terms_) r.add_term(k.second, k.first, c);
    return r;
  }
  bool operator==(const TensorElement& o) const = default;

 private:
  std::uint32_t dim_;
  std::map<Key, Rat> terms_;
};

/// D^(i) D^(j) = prod_k binom(i_k + j_k, i_k) D^(i+j), extended bilinearly.
HopfElement hopf_mul(const HopfElement& a, const HopfElement& b);

/// Delta(D^(i)) = sum_{j<=i} D^(j) (x) D^(i-j).
TensorElement hopf_comul(const HopfElement& a);

/// S(D^(i)) = (-1)^{|i|} D^(i).
HopfElement hopf_antipode(const HopfElement& a);

/// eps: coefficient of D^(0).
Rat hopf_counit(const HopfElement& a);

/// mu(S (x) 1)(Delta(h)) — the antipode axiom contraction.
HopfElement antipode_contraction(const HopfElement& h);

/// Tensor-side products and partial counits used by the axiom checks.
TensorElement tensor_mul(const TensorElement& a, const TensorElement& b);
HopfElement counit_left(const TensorElement& t);   // (eps (x) 1)
HopfElement counit_right(const TensorElement& t);  // (1 (x) eps)

/// Triple tensor for the coassociativity check, keyed by three indices.
using TripleTensor = std::map<std::tuple<MultiIndex, MultiIndex, MultiIndex>, Rat>;
TripleTensor comul_left(const HopfElement& a);   // (Delta (x) 1) Delta
TripleTensor comul_right(const HopfElement& a);  // (1 (x) Delta) Delta

enum class ActionSide { Left, Right };

/// Module action of H on localized series: D^(i) acts as the divided
/// derivative of one point; the right action is left composed with the
/// antipode. Satisfies the divided Leibniz rule.
template <class M>
LocalizedSeries<M> hopf_act(const HopfElement& h, const LocalizedSeries<M>& f,
                            ActionSide side = ActionSide::Left, std::uint32_t point = 0) {
  if (h.dim() != f.vars().dim_per_point)
    throw std::invalid_argument("hopf_act: dimension mismatch with variable group");
  const HopfElement& eff = (side == ActionSide::Right) ? hopf_antipode(h) : h;
  LocalizedSeries<M> acc = LocalizedSeries<M>::zero(f.vars(), f.cap());
  for (const auto& [i, c] : eff.terms())
    acc = acc + f.divided_derivative_point(point, i).scaled_rat(c);
  return acc;
}

}  // namespace vertexkit::hopf

#endif

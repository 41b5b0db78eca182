#include "vertexkit/hopf.hpp"

namespace vertexkit::hopf {

HopfElement hopf_mul(const HopfElement& a, const HopfElement& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Hopf dimension mismatch");
  HopfElement r(a.dim());
  for (const auto& [i, ci] : a.terms())
    for (const auto& [j, cj] : b.terms()) r.add_term(i.plus(j), ci * cj * index_binomial(i, j));
  return r;
}

TensorElement hopf_comul(const HopfElement& a) {
  TensorElement r(a.dim());
  for (const auto& [i, c] : a.terms()) {
    for (const auto& j : indices_up_to(i.dim(), i.total())) {
      if (!j.leq(i)) continue;
      r.add_term(j, i.minus(j), c);
    }
  }
  return r;
}

HopfElement hopf_antipode(const HopfElement& a) {
  HopfElement r(a.dim());
  for (const auto& [i, c] : a.terms()) r.add_term(i, (i.total() % 2 == 0) ? c : -c);
  return r;
}

Rat hopf_counit(const HopfElement& a) {
  auto it = a.terms().find(MultiIndex(a.dim()));
  return it == a.terms().end() ? Rat(0) : it->second;
}

HopfElement antipode_contraction(const HopfElement& h) {
  HopfElement r(h.dim());
  TensorElement d = hopf_comul(h);
  for (const auto& [k, c] : d.terms()) {
    HopfElement left = hopf_antipode(HopfElement::basis(k.first));
    HopfElement prod = hopf_mul(left, HopfElement::basis(k.second));
    r = r + prod.scaled(c);
  }
  return r;
}

TensorElement tensor_mul(const TensorElement& a, const TensorElement& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Hopf dimension mismatch");
  TensorElement r(a.dim());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      HopfElement left = hopf_mul(HopfElement::basis(ka.first), HopfElement::basis(kb.first));
      HopfElement right = hopf_mul(HopfElement::basis(ka.second), HopfElement::basis(kb.second));
      for (const auto& [il, cl] : left.terms())
        for (const auto& [ir, cr] : right.terms()) r.add_term(il, ir, ca * cb * cl * cr);
    }
  return r;
}

HopfElement counit_left(const TensorElement& t) {
  HopfElement r(t.dim());
  for (const auto& [k, c] : t.terms())
    if (k.first.is_zero()) r.add_term(k.second, c);
  return r;
}

HopfElement counit_right(const TensorElement& t) {
  HopfElement r(t.dim());
  for (const auto& [k, c] : t.terms())
    if (k.second.is_zero()) r.add_term(k.first, c);
  return r;
}

namespace {
void triple_add(TripleTensor& t, const MultiIndex& a, const MultiIndex& b, const MultiIndex& c,
                const Rat& v) {
  auto key = std::make_tuple(a, b, c);
  auto it = t.find(key);
  if (it == t.end()) {
    if (!rat_is_zero(v)) t.emplace(std::move(key), v);
  } else {
    it->second += v;
    if (rat_is_zero(it->second)) t.erase(it);
  }
}
}  // namespace

TripleTensor comul_left(const HopfElement& a) {
  TripleTensor out;
  const TensorElement outer = hopf_comul(a);
  for (const auto& [k, c] : outer.terms()) {
    TensorElement inner = hopf_comul(HopfElement::basis(k.first));
    for (const auto& [ki, ci] : inner.terms()) triple_add(out, ki.first, ki.second, k.second, c * ci);
  }
  return out;
}

TripleTensor comul_right(const HopfElement& a) {
  TripleTensor out;
  const TensorElement outer = hopf_comul(a);
  for (const auto& [k, c] : outer.terms()) {
    TensorElement inner = hopf_comul(HopfElement::basis(k.second));
    for (const auto& [ki, ci] : inner.terms()) triple_add(out, k.first, ki.first, ki.second, c * ci);
  }
  return out;
}

}  // namespace vertexkit::hopf

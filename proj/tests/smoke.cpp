#include <cassert>
#include <iostream>
#include "vertexkit/lattice.hpp"
#include "vertexkit/identities.hpp"
using namespace vertexkit;
using namespace vertexkit::lattice;

int main() {
  LatticeAlgebra alg(LatticeSpec::a1(3, 8));
  StateVector vac = StateVector::vacuum(1);
  LatticeState ea; ea.group = {1};
  LatticeState eminus; eminus.group = {-1};

  // Y(e^a, z) e^{-a} = z^{-2}(1 + a(-1) z + ...)
  ModeSeries ys = alg.y_expand(ea, eminus, 8);
  for (auto& [ze, sv] : ys) {
    if (ze > 2) continue;
    std::cout << "z^" << ze << ": " << sv.to_string() << "\n";
  }
  // (e^a)_1 e^{-a} = 1
  StateVector m1 = alg.mode_extract(StateVector::basis(ea), 1, StateVector::basis(eminus));
  std::cout << "(e^a)_1 e^-a = " << m1.to_string() << "\n";
  assert(m1 == vac);
  // (e^a)_0 e^{-a} = a(-1)
  StateVector m0 = alg.mode_extract(StateVector::basis(ea), 0, StateVector::basis(eminus));
  std::cout << "(e^a)_0 e^-a = " << m0.to_string() << "\n";
  // vacuum: Y(v, z) 1 nonsingular with constant term v, for some states
  for (auto& st : alg.basis_up_to_weight(2)) {
    ModeSeries y1 = alg.y_expand(st, LatticeState{std::vector<std::int64_t>{0}, {}}, 6);
    for (auto& [ze, sv] : y1) assert(ze >= 0);
    auto it = y1.find(0);
    StateVector c0 = (it == y1.end()) ? StateVector() : it->second;
    if (!(c0 == StateVector::basis(st))) {
      std::cout << "VACUUM FAIL for " << st.to_string() << ": got " << c0.to_string() << "\n";
      return 1;
    }
  }
  std::cout << "vacuum ok\n";
  // translation covariance on a couple of states
  for (auto& st : alg.basis_up_to_weight(2)) {
    StateVector dv = alg.derivation_basis(st);
    ModeSeries lhs = alg.y_expand(dv, StateVector::basis(eminus), 6);
    ModeSeries rhs;
    for (auto& [ze, sv] : alg.y_expand(StateVector::basis(st), StateVector::basis(eminus), 7))
      if (ze != 0 && ze - 1 <= 6) {
        auto scaled = sv.scaled(Rat(static_cast<long>(ze)));
        auto itr = rhs.find(ze - 1);
        if (itr == rhs.end()) rhs.emplace(ze - 1, scaled); else itr->second = itr->second + scaled;
      }
    for (auto& [ze, sv] : lhs) {
      auto itr = rhs.find(ze);
      StateVector other = (itr == rhs.end()) ? StateVector() : itr->second;
      if (!((sv - other).is_zero())) {
        std::cout << "TRANSLATION FAIL " << st.to_string() << " at z^" << ze << "\n";
        std::cout << " lhs " << sv.to_string() << "\n rhs " << other.to_string() << "\n";
        return 1;
      }
    }
  }
  std::cout << "translation ok\n";
  // Jacobi m=n=q=0 on a sample triple
  auto res = identities::borcherds_check(alg, StateVector::basis(ea), StateVector::basis(eminus),
                                         StateVector::basis(ea), 0, 0, 0);
  std::cout << "jacobi(e^a, e^-a, e^a): " << (res.pass ? "pass" : "FAIL") << "\n";
  if (!res.pass) { std::cout << "witness " << res.witness->to_string() << "\n"; return 1; }
  // intertwining defect must vanish
  for (auto& st : alg.basis_up_to_weight(3)) {
    auto defect = alg.intertwining_defect({1}, st);
    if (!defect.empty()) {
      std::cout << "INTERTWINING FAIL " << st.to_string() << "\n";
      return 1;
    }
  }
  std::cout << "intertwining ok\n";
  std::cout << "SMOKE OK\n";
  return 0;
}

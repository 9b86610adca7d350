#pragma once

// Independent reference computations shared by several test files.

#include <vector>

#include "qmoney/encoding.hpp"
#include "qmoney/rng.hpp"

namespace qm::oracle {

// J = I x for some x: such x lies in I^-1 J and has nrd(x) = nrd(J) / nrd(I).
inline bool equivalent(const LeftIdeal& I, const LeftIdeal& J) {
    const Rational target = J.norm() / I.norm();
    const IdealLattice L = ideal_product(ideal_inverse(I), J);
    for (const auto& x : elements_up_to(L, target))
        if (nrd(x) == target && I.lattice().right_scaled(x).same_set(J.lattice())) return true;
    return false;
}

inline Quaternion random_element(const MaximalOrder& O, Rng& rng, long span) {
    for (;;) {
        IntVec4 c;
        for (auto& x : c) x = static_cast<long>(rng.below(2 * span + 1)) - span;
        Quaternion q = O.element(c);
        if (!q.is_zero()) return q;
    }
}

// An ideal in a pseudo-random class: the left ideal O g1 + O g2.
inline LeftIdeal random_ideal(const OrderPtr& O, Rng& rng) {
    return LeftIdeal::generated_by(O, {random_element(*O, rng, 4), random_element(*O, rng, 4)});
}

// q-expansion coefficients of eta(q)^2 eta(q^11)^2 = q prod (1 - q^n)^2 (1 - q^{11n})^2.
inline std::vector<long> eta_11_coefficients(int terms) {
    std::vector<long> c(terms + 1, 0);
    c[1] = 1;
    auto times = [&](int step) {
        // multiply by (1 - q^step)
        for (int k = terms; k >= step; --k) c[k] -= c[k - step];
    };
    for (int n = 1; n <= terms; ++n) {
        times(n);
        times(n);
        if (11 * n <= terms) {
            times(11 * n);
            times(11 * n);
        }
    }
    return c;
}

}  // namespace qm::oracle

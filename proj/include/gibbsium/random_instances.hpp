#pragma once

#include <vector>

#include "lattice.hpp"
#include "potential.hpp"
#include "rng.hpp"

namespace gibbsium {

// Random spin potential: 1-3 terms, shapes of 1-3 sites within range <= 2,
// i.i.d. table coefficients uniform in [-cmax, cmax].
inline FiniteRangePotential random_finite_range_potential(Rng& rng, int d, int max_range = 2,
                                                          double cmax = 2.0) {
    FiniteRangePotential phi;
    phi.dim = d;
    phi.alphabet = spin_alphabet();
    phi.plus_state = 1;
    int nterms = 1 + (int)rng.below(3);
    for (int t = 0; t < nterms; ++t) {
        int r = 1 + (int)rng.below((uint64_t)max_range);
        int k = 1 + (int)rng.below(3);
        std::vector<Site> shape;
        for (int j = 0; j < k; ++j) {
            Site s(d);
            for (int c = 0; c < d; ++c) s[c] = (int)rng.below(2 * r + 1) - r;
            shape.push_back(s);
        }
        shape = FiniteRangePotential::canonical_shape(std::move(shape));
        uint64_t n = pow_u(2, (int)shape.size());
        std::vector<double> tab(n);
        for (uint64_t i = 0; i < n; ++i) tab[i] = cmax * (2.0 * rng.uniform() - 1.0);
        phi.add_term(shape, [&tab, &phi](const std::vector<int>& vals) {
            std::vector<int> digits(vals.size());
            for (size_t j = 0; j < vals.size(); ++j) digits[j] = phi.aidx(vals[j]);
            return tab[digits_to_idx(digits, 2)];
        });
    }
    return phi;
}

// Random nonempty sub-box of Lambda_2^d with at most max_sites sites.
inline BoxPtr random_box(Rng& rng, int d, int max_sites) {
    BoxPtr amb = Box::cube(2, d);
    int want = 1 + (int)rng.below((uint64_t)max_sites);
    std::vector<Site> sites;
    for (int t = 0; t < want; ++t) sites.push_back(amb->sites[rng.below((uint64_t)amb->size())]);
    return Box::make(d, std::move(sites));  // dedup may shrink; stays nonempty
}

inline Config random_spin_config(Rng& rng, const BoxPtr& box) {
    std::vector<int> v(box->size());
    for (auto& x : v) x = rng.pm_one();
    return Config(box, std::move(v));
}

}  // namespace gibbsium

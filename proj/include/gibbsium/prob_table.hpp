#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "enumerate.hpp"
#include "lattice.hpp"

namespace gibbsium {

// +infinity is a legitimate result value (relative entropy of singular pairs),
// never an exception.
inline double infinite() { return std::numeric_limits<double>::infinity(); }

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Exact probability table over all configurations of a small box. Entry i
// corresponds to the mixed-radix digit string of i over the box sites in lex
// order (site 0 fastest), digits indexing the alphabet.
struct ProbTable {
    BoxPtr box;
    std::vector<int> alphabet;
    std::vector<double> p;

    uint64_t nconf() const { return p.size(); }
    int nsites() const { return box->size(); }

    static ProbTable zero(BoxPtr box, std::vector<int> alphabet) {
        ProbTable t;
        uint64_t n = table_size_checked((int)alphabet.size(), box->size());
        t.box = std::move(box);
        t.alphabet = std::move(alphabet);
        t.p.assign(n, 0.0);
        return t;
    }

    void values_of(uint64_t idx, std::vector<int>& vals) const {
        std::vector<int> digits;
        idx_to_digits(idx, nsites(), (int)alphabet.size(), digits);
        vals.resize(digits.size());
        for (size_t i = 0; i < digits.size(); ++i) vals[i] = alphabet[digits[i]];
    }

    uint64_t index_of_values(const std::vector<int>& vals) const {
        std::vector<int> digits(vals.size());
        for (size_t i = 0; i < vals.size(); ++i) {
            int d = -1;
            for (int a = 0; a < (int)alphabet.size(); ++a)
                if (alphabet[a] == vals[i]) d = a;
            if (d < 0) throw std::invalid_argument("value not in alphabet");
            digits[i] = d;
        }
        return digits_to_idx(digits, (int)alphabet.size());
    }

    double prob_of(const Config& c) const { return p[index_of_values(c.vals)]; }

    void normalize() {
        double s = 0.0;
        for (double x : p) s += x;
        if (s <= 0.0) throw std::runtime_error("ProbTable::normalize: total mass is zero");
        for (double& x : p) x /= s;
    }
};

// Normalize log-weights into probabilities via log-sum-exp.
inline std::vector<double> probs_from_logweights(const std::vector<double>& lw) {
    double m = -infinite();
    for (double x : lw) m = std::max(m, x);
    double z = 0.0;
    for (double x : lw) z += std::exp(x - m);
    std::vector<double> p(lw.size());
    for (size_t i = 0; i < lw.size(); ++i) p[i] = std::exp(lw[i] - m) / z;
    return p;
}

// Exact marginal onto a sub-box.
inline ProbTable marginal(const ProbTable& mu, const BoxPtr& sub) {
    std::vector<int> pos;  // index of each sub site inside mu.box
    for (const auto& s : sub->sites) pos.push_back(mu.box->idx(s));
    ProbTable out = ProbTable::zero(sub, mu.alphabet);
    int m = (int)mu.alphabet.size();
    std::vector<int> digits, subd(pos.size());
    for (uint64_t i = 0; i < mu.nconf(); ++i) {
        idx_to_digits(i, mu.nsites(), m, digits);
        for (size_t j = 0; j < pos.size(); ++j) subd[j] = digits[pos[j]];
        out.p[digits_to_idx(subd, m)] += mu.p[i];
    }
    return out;
}

// Exact conditional law on sub given the values of fixed_outside on
// box \ sub. Throws on a zero-probability conditioning event.
inline ProbTable conditional(const ProbTable& mu, const BoxPtr& sub, const Config& fixed_outside) {
    std::vector<int> pos;
    for (const auto& s : sub->sites) pos.push_back(mu.box->idx(s));
    ProbTable out = ProbTable::zero(sub, mu.alphabet);
    int m = (int)mu.alphabet.size();
    // digit template with conditioning values filled in
    std::vector<int> templ(mu.nsites(), -1);
    for (int i = 0; i < fixed_outside.box->size(); ++i) {
        const Site& s = fixed_outside.box->sites[i];
        if (!mu.box->contains(s) || sub->contains(s)) continue;
        int d = -1;
        for (int a = 0; a < m; ++a)
            if (mu.alphabet[a] == fixed_outside.vals[i]) d = a;
        if (d < 0) throw std::invalid_argument("conditional: value not in alphabet");
        templ[mu.box->idx(s)] = d;
    }
    for (int i = 0; i < mu.nsites(); ++i)
        if (templ[i] < 0 && !sub->contains(mu.box->sites[i]))
            throw std::invalid_argument("conditional: outside values incomplete");
    double tot = 0.0;
    std::vector<int> digits(mu.nsites()), subd;
    for (uint64_t k = 0; k < out.nconf(); ++k) {
        idx_to_digits(k, (int)pos.size(), m, subd);
        for (int i = 0; i < mu.nsites(); ++i) digits[i] = templ[i];
        for (size_t j = 0; j < pos.size(); ++j) digits[pos[j]] = subd[j];
        double v = mu.p[digits_to_idx(digits, m)];
        out.p[k] = v;
        tot += v;
    }
    if (tot <= 0.0) throw std::runtime_error("conditional: zero-probability conditioning event");
    for (double& x : out.p) x /= tot;
    return out;
}

// Per-site Shannon entropy of the table (0 log 0 := 0).
inline double entropy_per_site(const ProbTable& mu) {
    double s = 0.0;
    for (double x : mu.p) s -= xlogx(x);
    return s / mu.nsites();
}

// Finite-volume relative entropy h_Lambda(mu|nu) (not normalized); +inf when
// mu charges a nu-null configuration.
inline double relative_entropy(const ProbTable& mu, const ProbTable& nu) {
    if (mu.p.size() != nu.p.size()) throw std::invalid_argument("relative_entropy: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < mu.p.size(); ++i) {
        if (mu.p[i] <= 0.0) continue;
        if (nu.p[i] <= 0.0) return infinite();
        s += mu.p[i] * std::log(mu.p[i] / nu.p[i]);
    }
    return std::max(s, 0.0);
}

// Total variation distance = max over events of |mu(A) - nu(A)|.
inline double total_variation(const ProbTable& mu, const ProbTable& nu) {
    double s = 0.0;
    for (size_t i = 0; i < mu.p.size(); ++i) s += std::abs(mu.p[i] - nu.p[i]);
    return 0.5 * s;
}

// Stochastic domination mu <= nu via exhaustive up-set enumeration on the
// configuration poset of a binary ordered alphabet. Boxes above 4 sites are
// rejected (2^(2^n) up-set candidates).
inline bool check_domination(const ProbTable& mu, const ProbTable& nu) {
    if (mu.alphabet.size() != 2 || nu.alphabet.size() != 2)
        throw std::invalid_argument("check_domination: binary alphabet required");
    if (mu.nsites() > 4) throw std::invalid_argument("check_domination: box too large (max 4 sites)");
    if (mu.p.size() != nu.p.size()) throw std::invalid_argument("check_domination: shape mismatch");
    int n = mu.nsites();
    uint32_t nconf = (uint32_t)mu.nconf();
    // config i <= config j iff digit-wise (alphabet assumed ordered ascending)
    auto leq = [&](uint32_t a, uint32_t b) {
        for (int k = 0; k < n; ++k) {
            if (a % 2 > b % 2) return false;
            a /= 2;
            b /= 2;
        }
        return true;
    };
    for (uint64_t mask = 0; mask < (uint64_t(1) << nconf); ++mask) {
        // keep only up-sets
        bool upset = true;
        for (uint32_t a = 0; a < nconf && upset; ++a) {
            if (!(mask >> a & 1)) continue;
            for (uint32_t b = 0; b < nconf; ++b)
                if (leq(a, b) && !(mask >> b & 1)) {
                    upset = false;
                    break;
                }
        }
        if (!upset) continue;
        double pm = 0.0, pn = 0.0;
        for (uint32_t a = 0; a < nconf; ++a)
            if (mask >> a & 1) {
                pm += mu.p[a];
                pn += nu.p[a];
            }
        if (pm > pn + 1e-12) return false;
    }
    return true;
}

}  // namespace gibbsium

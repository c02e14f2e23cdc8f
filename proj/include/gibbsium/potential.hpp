#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "enumerate.hpp"
#include "lattice.hpp"

namespace gibbsium {

// Joint (spin, disorder) single-site states are packed into one code so the
// same potential/kernel machinery handles quenched and annealed systems.
// code bit 0: spin (+1 if set), bit 1: disorder (+1 if set).
inline int joint_code(int spin, int eta) { return (spin > 0 ? 1 : 0) | (eta > 0 ? 2 : 0); }
inline int joint_spin(int code) { return (code & 1) ? 1 : -1; }
inline int joint_eta(int code) { return (code & 2) ? 1 : -1; }
inline const std::vector<int>& joint_alphabet() {
    static const std::vector<int> a{0, 1, 2, 3};
    return a;
}
inline const std::vector<int>& spin_alphabet() {
    static const std::vector<int> a{-1, 1};
    return a;
}

// One translation class of interaction terms. shape is sorted lex with its
// lex-minimum at the origin; table holds the term value for every pattern of
// alphabet indices over the shape sites (site 0 cycling fastest).
struct PotTerm {
    std::vector<Site> shape;
    std::vector<double> table;
};

struct FiniteRangePotential {
    int dim = 1;
    std::vector<int> alphabet;
    int plus_state = 1;  // distinguished vacuum state (a value in alphabet)
    std::vector<PotTerm> terms;

    int aidx(int value) const {
        for (int i = 0; i < (int)alphabet.size(); ++i)
            if (alphabet[i] == value) return i;
        throw std::invalid_argument("value not in alphabet");
    }

    int range() const {
        int r = 0;
        for (const auto& t : terms)
            for (const auto& a : t.shape)
                for (const auto& b : t.shape) r = std::max(r, sup_dist(a, b));
        return r;
    }

    static std::vector<Site> canonical_shape(std::vector<Site> s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (s.empty()) throw std::invalid_argument("empty shape");
        Site base = s.front();
        for (auto& x : s) x = site_sub(x, base);
        return s;
    }

    // Build a term from a function of the site values (in sorted shape order).
    void add_term(std::vector<Site> shape_in, const std::function<double(const std::vector<int>&)>& f) {
        PotTerm t;
        t.shape = canonical_shape(std::move(shape_in));
        int k = (int)t.shape.size();
        int m = (int)alphabet.size();
        uint64_t n = pow_u(m, k);
        t.table.resize(n);
        std::vector<int> digits, vals(k);
        for (uint64_t i = 0; i < n; ++i) {
            idx_to_digits(i, k, m, digits);
            for (int j = 0; j < k; ++j) vals[j] = alphabet[digits[j]];
            t.table[i] = f(vals);
        }
        terms.push_back(std::move(t));
    }
};

// ---- builtin potentials ----------------------------------------------------

// Nearest-neighbor Ising: Phi_{x,y} = -beta s_x s_y, Phi_{x} = -h s_x.
inline FiniteRangePotential ising_potential(int d, double beta, double h) {
    FiniteRangePotential phi;
    phi.dim = d;
    phi.alphabet = spin_alphabet();
    phi.plus_state = 1;
    if (h != 0.0)
        phi.add_term({site_origin(d)}, [h](const std::vector<int>& v) { return -h * v[0]; });
    for (int k = 0; k < d; ++k) {
        Site e = site_origin(d);
        e[k] = 1;
        if (beta != 0.0)
            phi.add_term({site_origin(d), e},
                         [beta](const std::vector<int>& v) { return -beta * v[0] * v[1]; });
    }
    return phi;
}

// Random field Ising on joint codes: Phi_{x,y} = -beta s_x s_y, Phi_{x} = -h eta_x s_x.
inline FiniteRangePotential rfim_potential(int d, double beta, double h) {
    FiniteRangePotential phi;
    phi.dim = d;
    phi.alphabet = joint_alphabet();
    phi.plus_state = joint_code(1, 1);
    phi.add_term({site_origin(d)},
                 [h](const std::vector<int>& v) { return -h * joint_eta(v[0]) * joint_spin(v[0]); });
    for (int k = 0; k < d; ++k) {
        Site e = site_origin(d);
        e[k] = 1;
        phi.add_term({site_origin(d), e}, [beta](const std::vector<int>& v) {
            return -beta * joint_spin(v[0]) * joint_spin(v[1]);
        });
    }
    return phi;
}

// Trivial annealed potential U^triv = Phi - 1_{A={x}} log P0(eta_x).
// p0_plus is the probability of eta = +1 under the single-site disorder law.
inline FiniteRangePotential triv_annealed_potential(int d, double beta, double h, double p0_plus) {
    FiniteRangePotential phi = rfim_potential(d, beta, h);
    // replace the single-site term (index 0) by the augmented one
    FiniteRangePotential aug;
    aug.dim = d;
    aug.alphabet = joint_alphabet();
    aug.plus_state = joint_code(1, 1);
    aug.add_term({site_origin(d)}, [h, p0_plus](const std::vector<int>& v) {
        double lp = joint_eta(v[0]) > 0 ? std::log(p0_plus) : std::log(1.0 - p0_plus);
        return -h * joint_eta(v[0]) * joint_spin(v[0]) - lp;
    });
    for (size_t i = 1; i < phi.terms.size(); ++i) aug.terms.push_back(phi.terms[i]);
    return aug;
}

// ---- Hamiltonian evaluation ------------------------------------------------

// Pre-resolved sum over all translated terms intersecting a box: each part
// knows, for every shape site, whether the value comes from the interior
// config or from the boundary shell, and at which dense index.
struct CompiledHamiltonian {
    const FiniteRangePotential* phi = nullptr;
    struct Part {
        const std::vector<double>* table;
        std::vector<int> slot;
        std::vector<uint8_t> inner;
        std::vector<uint64_t> mult;
    };
    std::vector<Part> parts;

    // inner/outer are alphabet-index ("digit") arrays over box/shell sites.
    double energy(const int* inner_digits, const int* outer_digits) const {
        double e = 0.0;
        for (const auto& p : parts) {
            uint64_t pat = 0;
            for (size_t j = 0; j < p.slot.size(); ++j) {
                int d = p.inner[j] ? inner_digits[p.slot[j]] : outer_digits[p.slot[j]];
                pat += p.mult[j] * (uint64_t)d;
            }
            e += (*p.table)[pat];
        }
        return e;
    }
};

inline CompiledHamiltonian compile_hamiltonian(const FiniteRangePotential& phi, const Box& box,
                                               const Box& shell) {
    CompiledHamiltonian ch;
    ch.phi = &phi;
    int m = (int)phi.alphabet.size();
    for (const auto& term : phi.terms) {
        std::set<Site> translates;
        for (const auto& y : box.sites)
            for (const auto& s : term.shape) translates.insert(site_sub(y, s));
        for (const auto& x : translates) {
            // keep translates that intersect the box
            bool touches = false;
            for (const auto& s : term.shape)
                if (box.contains(site_add(x, s))) {
                    touches = true;
                    break;
                }
            if (!touches) continue;
            CompiledHamiltonian::Part p;
            p.table = &term.table;
            uint64_t mult = 1;
            for (const auto& s : term.shape) {
                Site site = site_add(x, s);
                if (box.contains(site)) {
                    p.slot.push_back(box.idx(site));
                    p.inner.push_back(1);
                } else if (shell.contains(site)) {
                    p.slot.push_back(shell.idx(site));
                    p.inner.push_back(0);
                } else {
                    throw std::invalid_argument("hamiltonian: boundary shell too thin for range");
                }
                p.mult.push_back(mult);
                mult *= (uint64_t)m;
            }
            ch.parts.push_back(std::move(p));
        }
    }
    return ch;
}

inline std::vector<int> to_digits(const FiniteRangePotential& phi, const std::vector<int>& vals) {
    std::vector<int> d(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) d[i] = phi.aidx(vals[i]);
    return d;
}

// H_Lambda(sigma | omega): exact finite sum over all terms meeting the box.
// omega must cover the full range-r shell of the box.
inline double hamiltonian(const FiniteRangePotential& phi, const Config& sigma, const Config& omega) {
    auto ch = compile_hamiltonian(phi, *sigma.box, *omega.box);
    auto di = to_digits(phi, sigma.vals);
    auto dout = to_digits(phi, omega.vals);
    return ch.energy(di.data(), dout.data());
}

// ---- transforms on potentials ----------------------------------------------

inline int shape_diameter(const std::vector<Site>& shape) {
    int r = 0;
    for (const auto& a : shape)
        for (const auto& b : shape) r = std::max(r, sup_dist(a, b));
    return r;
}

// Phi^(R): drop terms with shape diameter > R.
inline FiniteRangePotential truncate(const FiniteRangePotential& phi, int R) {
    FiniteRangePotential out = phi;
    out.terms.clear();
    for (const auto& t : phi.terms)
        if (shape_diameter(t.shape) <= R) out.terms.push_back(t);
    return out;
}

// sup_sigma | sum_{A ni 0, A not subset of Lambda_n} Phi_A(sigma) |
// (absolute value outside the sum). Exact: only sites within the range of the
// origin are involved.
inline double tail_seminorm(const FiniteRangePotential& phi, int n) {
    // translated terms containing the origin and sticking out of Lambda_n
    struct Inst {
        const PotTerm* term;
        std::vector<Site> sites;
    };
    std::vector<Inst> insts;
    std::set<Site> involved;
    for (const auto& term : phi.terms) {
        std::set<Site> xs;
        for (const auto& s : term.shape) xs.insert(site_sub(site_origin(phi.dim), s));
        for (const auto& x : xs) {
            bool outside = false;
            std::vector<Site> sites;
            for (const auto& s : term.shape) {
                Site p = site_add(x, s);
                sites.push_back(p);
                int m = 0;
                for (int c : p) m = std::max(m, std::abs(c));
                if (m > n) outside = true;
            }
            if (!outside) continue;
            for (const auto& p : sites) involved.insert(p);
            insts.push_back({&term, std::move(sites)});
        }
    }
    if (insts.empty()) return 0.0;
    std::vector<Site> sitelist(involved.begin(), involved.end());
    std::map<Site, int> sidx;
    for (int i = 0; i < (int)sitelist.size(); ++i) sidx[sitelist[i]] = i;
    int m = (int)phi.alphabet.size();
    uint64_t nconf = table_size_checked(m, (int)sitelist.size());
    double best = 0.0;
    std::vector<int> digits;
    for (uint64_t c = 0; c < nconf; ++c) {
        idx_to_digits(c, (int)sitelist.size(), m, digits);
        double sum = 0.0;
        for (const auto& inst : insts) {
            uint64_t pat = 0, mult = 1;
            for (const auto& p : inst.sites) {
                pat += mult * (uint64_t)digits[sidx[p]];
                mult *= (uint64_t)m;
            }
            sum += inst.term->table[pat];
        }
        best = std::max(best, std::abs(sum));
    }
    return best;
}

// ---- vacuum transform ------------------------------------------------------

namespace detail {

// E_B(sigma) = H_B(sigma_B +_{B^c}) - H_B(+_B +_{B^c}), tabulated over
// patterns of the canonical shape B.
inline const std::vector<double>& relative_hamiltonian_table(
    const FiniteRangePotential& phi, const std::vector<Site>& canon,
    std::map<std::vector<Site>, std::vector<double>>& cache) {
    auto it = cache.find(canon);
    if (it != cache.end()) return it->second;
    BoxPtr box = Box::make(phi.dim, canon);
    BoxPtr shell = Box::make(phi.dim, boundary_shell(*box, std::max(1, phi.range())));
    auto ch = compile_hamiltonian(phi, *box, *shell);
    int m = (int)phi.alphabet.size();
    int plus_digit = phi.aidx(phi.plus_state);
    int k = box->size();
    std::vector<int> outer(shell->size(), plus_digit);
    std::vector<int> allplus(k, plus_digit);
    double href = ch.energy(allplus.data(), outer.data());
    uint64_t n = pow_u(m, k);
    std::vector<double> tab(n);
    std::vector<int> digits;
    for (uint64_t i = 0; i < n; ++i) {
        idx_to_digits(i, k, m, digits);
        tab[i] = ch.energy(digits.data(), outer.data()) - href;
    }
    return cache.emplace(canon, std::move(tab)).first->second;
}

}  // namespace detail

// Vacuum potential with vacuum state plus_state: Phi~_A = 0 whenever some
// site of A carries the vacuum state, gamma^{Phi~} = gamma^{Phi}, and the
// range does not grow. Construction: Moebius inversion of the relative
// Hamiltonians E_B over subsets of each shape window.
inline FiniteRangePotential vacuum_transform(const FiniteRangePotential& phi) {
    FiniteRangePotential out;
    out.dim = phi.dim;
    out.alphabet = phi.alphabet;
    out.plus_state = phi.plus_state;

    // candidate supports: canonical representatives of all nonempty subsets
    // of the original shapes
    std::set<std::vector<Site>> candidates;
    for (const auto& term : phi.terms) {
        int k = (int)term.shape.size();
        for (uint32_t mask = 1; mask < (1u << k); ++mask) {
            std::vector<Site> sub;
            for (int j = 0; j < k; ++j)
                if (mask & (1u << j)) sub.push_back(term.shape[j]);
            candidates.insert(FiniteRangePotential::canonical_shape(std::move(sub)));
        }
    }

    std::map<std::vector<Site>, std::vector<double>> cache;
    int m = (int)phi.alphabet.size();
    int plus_digit = phi.aidx(phi.plus_state);
    for (const auto& A : candidates) {
        int k = (int)A.size();
        uint64_t n = pow_u(m, k);
        std::vector<double> tab(n, 0.0);
        std::vector<int> digits;
        bool nonzero = false;
        for (uint64_t i = 0; i < n; ++i) {
            idx_to_digits(i, k, m, digits);
            bool has_plus = false;
            for (int d : digits)
                if (d == plus_digit) has_plus = true;
            // The Moebius sum cancels pairwise (B vs B u {x}) whenever site x
            // carries the vacuum state; zero is the exact-arithmetic value.
            if (has_plus) continue;
            double v = 0.0;
            for (uint32_t mask = 1; mask < (1u << k); ++mask) {
                std::vector<Site> sub;
                std::vector<int> subdig;
                for (int j = 0; j < k; ++j)
                    if (mask & (1u << j)) {
                        sub.push_back(A[j]);
                        subdig.push_back(digits[j]);
                    }
                int drop = k - (int)subdig.size();
                double sign = (drop % 2 == 0) ? 1.0 : -1.0;
                auto canon = FiniteRangePotential::canonical_shape(sub);  // order preserved
                const auto& etab = detail::relative_hamiltonian_table(phi, canon, cache);
                v += sign * etab[digits_to_idx(subdig, m)];
            }
            tab[i] = v;
            if (v != 0.0) nonzero = true;
        }
        if (!nonzero) continue;
        PotTerm t;
        t.shape = A;
        t.table = std::move(tab);
        out.terms.push_back(std::move(t));
    }
    return out;
}

}  // namespace gibbsium

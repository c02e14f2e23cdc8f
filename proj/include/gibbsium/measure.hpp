#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "prob_table.hpp"
#include "rng.hpp"
#include "specification.hpp"

namespace gibbsium {

// ---- exact finite-volume Gibbs measures ------------------------------------

inline ProbTable exact_gibbs(const FiniteRangePotential& phi, const BoxPtr& box, const Config& omega) {
    return kernel(phi, box, omega);  // same table, viewed as a measure
}

// ---- entropies on tables ----------------------------------------------------

// h_n(mu) = -(1/|Lambda_n|) sum mu log mu over the marginal on Lambda_n
// (the table's own box when sub is null).
inline double ks_entropy_rate(const ProbTable& mu) { return entropy_per_site(mu); }

inline double ks_entropy_rate(const ProbTable& mu, const BoxPtr& sub) {
    return entropy_per_site(marginal(mu, sub));
}

// h_Lambda(mu|nu)/|Lambda|; INFINITE when mu charges a nu-null configuration.
inline double relative_entropy_rate(const ProbTable& mu, const ProbTable& nu) {
    double h = relative_entropy(mu, nu);
    return std::isinf(h) ? h : h / mu.nsites();
}

// ---- d=1 transfer chain (exact infinite-volume oracle) ----------------------

// Stationary Markov chain induced by a d=1 nearest-neighbor potential via its
// transfer matrix. Exposes exact cylinder probabilities, entropy rate and
// specific energies of the unique infinite-volume Gibbs measure.
struct TransferChain {
    std::vector<int> alphabet;
    int m = 0;                      // alphabet size
    std::vector<double> T;          // transfer matrix, T[a*m+b]
    double lambda = 0.0;            // Perron eigenvalue
    std::vector<double> u, v;       // left/right Perron vectors, sum(u_a v_a)=1
    std::vector<double> pi;         // stationary law, pi_a = u_a v_a
    std::vector<double> P;          // transition matrix P[a*m+b]

    int aidx(int value) const {
        for (int i = 0; i < m; ++i)
            if (alphabet[i] == value) return i;
        throw std::invalid_argument("TransferChain: value not in alphabet");
    }

    // Window probability of Lambda_n = [-n, n]: pi(s_0) prod P(s_i, s_{i+1}).
    double log_window_prob(const std::vector<int>& vals) const {
        double lp = std::log(pi[aidx(vals[0])]);
        for (size_t i = 0; i + 1 < vals.size(); ++i)
            lp += std::log(P[aidx(vals[i]) * m + aidx(vals[i + 1])]);
        return lp;
    }

    // Entropy rate h = -sum_a pi_a sum_b P_ab log P_ab.
    double entropy_rate() const {
        double h = 0.0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double pab = P[a * m + b];
                if (pab > 0.0 && pi[a] > 0.0) h -= pi[a] * pab * std::log(pab);
            }
        return h;
    }

    // Windowed per-site entropy over Lambda_n: [H(pi) + 2n E(-log P)] / (2n+1).
    double windowed_entropy(int n) const {
        double hpi = 0.0;
        for (int a = 0; a < m; ++a) hpi -= xlogx(pi[a]);
        return (hpi + 2.0 * n * entropy_rate()) / (2.0 * n + 1.0);
    }
};

// Build the stationary chain for a d=1 potential with single-site and
// nearest-neighbor terms (range <= 1).
inline TransferChain transfer_chain(const FiniteRangePotential& phi) {
    if (phi.dim != 1) throw std::invalid_argument("transfer_chain: d=1 only");
    if (phi.range() > 1) throw std::invalid_argument("transfer_chain: range must be <= 1");
    TransferChain c;
    c.alphabet = phi.alphabet;
    c.m = (int)phi.alphabet.size();
    // split single-site terms half-half over the two bond ends
    std::vector<double> single(c.m, 0.0);
    std::vector<double> pair(c.m * c.m, 0.0);
    for (const auto& t : phi.terms) {
        if (t.shape.size() == 1) {
            for (int a = 0; a < c.m; ++a) single[a] += t.table[a];
        } else if (t.shape.size() == 2) {
            // table digits: shape site 0 cycles fastest, so entry (a, b) sits
            // at index a + b*m
            for (int a = 0; a < c.m; ++a)
                for (int b = 0; b < c.m; ++b)
                    pair[a * c.m + b] += t.table[(uint64_t)a + (uint64_t)b * c.m];
        } else {
            throw std::invalid_argument("transfer_chain: term arity > 2");
        }
    }
    c.T.resize(c.m * c.m);
    for (int a = 0; a < c.m; ++a)
        for (int b = 0; b < c.m; ++b)
            c.T[a * c.m + b] = std::exp(-(pair[a * c.m + b] + 0.5 * single[a] + 0.5 * single[b]));
    // Perron data by power iteration (strictly positive matrix)
    std::vector<double> r(c.m, 1.0), l(c.m, 1.0);
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> nr(c.m, 0.0), nl(c.m, 0.0);
        for (int a = 0; a < c.m; ++a)
            for (int b = 0; b < c.m; ++b) {
                nr[a] += c.T[a * c.m + b] * r[b];
                nl[b] += l[a] * c.T[a * c.m + b];
            }
        double s = 0.0;
        for (double x : nr) s += x;
        lam = 0.0;
        for (int a = 0; a < c.m; ++a) lam += nr[a] * r[a];
        double rr = 0.0;
        for (int a = 0; a < c.m; ++a) rr += r[a] * r[a];
        lam /= rr;
        for (int a = 0; a < c.m; ++a) r[a] = nr[a] / s;
        double s2 = 0.0;
        for (double x : nl) s2 += x;
        for (int a = 0; a < c.m; ++a) l[a] = nl[a] / s2;
    }
    c.lambda = lam;
    double norm = 0.0;
    for (int a = 0; a < c.m; ++a) norm += l[a] * r[a];
    c.u.resize(c.m);
    c.v.resize(c.m);
    c.pi.resize(c.m);
    c.P.resize(c.m * c.m);
    for (int a = 0; a < c.m; ++a) {
        c.u[a] = l[a] / norm;
        c.v[a] = r[a];
        c.pi[a] = c.u[a] * c.v[a];
    }
    for (int a = 0; a < c.m; ++a)
        for (int b = 0; b < c.m; ++b) c.P[a * c.m + b] = c.T[a * c.m + b] * c.v[b] / (c.lambda * c.v[a]);
    return c;
}

// ---- specific energies -------------------------------------------------------

// Plain windowed specific energy of the plus state over Lambda_n (d=1 chain):
// -(1/|Lambda_n|) log nu(+_{Lambda_n}).
inline double specific_energy_windowed(const TransferChain& nu, int plus_state, int n) {
    int L = 2 * n + 1;
    std::vector<int> vals(L, plus_state);
    return -nu.log_window_prob(vals) / L;
}

// Volume-increment estimator of the same limit (exact for Markov chains):
// -[log nu(+_{Lambda_n}) - log nu(+_{Lambda_{n-1}})] / (|Lambda_n|-|Lambda_{n-1}|).
inline double specific_energy_increment(const TransferChain& nu, int plus_state, int n) {
    if (n < 1) return specific_energy_windowed(nu, plus_state, 0);
    std::vector<int> a(2 * n + 1, plus_state), b(2 * n - 1, plus_state);
    return -(nu.log_window_prob(a) - nu.log_window_prob(b)) / 2.0;
}

// Table version: -(1/|box|) int log nu(xi_box) lambda(dxi); INFINITE when
// lambda charges a nu-null configuration.
inline double specific_energy(const ProbTable& nu, const ProbTable& lambda_ref) {
    double s = 0.0;
    for (uint64_t i = 0; i < nu.nconf(); ++i) {
        if (lambda_ref.p[i] <= 0.0) continue;
        if (nu.p[i] <= 0.0) return infinite();
        s -= lambda_ref.p[i] * std::log(nu.p[i]);
    }
    return s / nu.nsites();
}

inline double specific_energy_plus(const ProbTable& nu, int plus_state) {
    Config plus = Config::constant(nu.box, plus_state);
    double p = nu.prob_of(plus);
    if (p <= 0.0) return infinite();
    return -std::log(p) / nu.nsites();
}

// ---- finite-n decompositions (Eq. 3.10 / 3.11) -------------------------------

// Residuals of the algebraic identities on exact tables; both are zero up to
// rounding for every (mu, nu, n).
inline double decomposition_310_residual(const ProbTable& mu, const ProbTable& nu, int plus_state) {
    double L = mu.nsites();
    double lhs = relative_entropy(mu, nu) / L;
    double hn = entropy_per_site(mu);
    Config plus = Config::constant(nu.box, plus_state);
    double lnu_plus = std::log(nu.prob_of(plus));
    double mid = 0.0;
    for (uint64_t i = 0; i < mu.nconf(); ++i)
        if (mu.p[i] > 0.0) mid += mu.p[i] * (std::log(nu.p[i]) - lnu_plus);
    double rhs = -hn - mid / L - lnu_plus / L;
    return std::abs(lhs - rhs);
}

inline double decomposition_311_residual(const ProbTable& mu, const ProbTable& nu, int plus_state) {
    double L = mu.nsites();
    double lhs = relative_entropy(mu, nu) / L;
    Config plus = Config::constant(nu.box, plus_state);
    double lmu_plus = std::log(mu.prob_of(plus));
    double lnu_plus = std::log(nu.prob_of(plus));
    double t1 = 0.0, t2 = 0.0;
    for (uint64_t i = 0; i < mu.nconf(); ++i) {
        if (mu.p[i] <= 0.0) continue;
        t1 += mu.p[i] * (std::log(mu.p[i]) - lmu_plus);
        t2 += mu.p[i] * (std::log(nu.p[i]) - lnu_plus);
    }
    double rhs = t1 / L - t2 / L + (lmu_plus - lnu_plus) / L;
    return std::abs(lhs - rhs);
}

// ---- Eq. 3.4 / 3.15 right-hand side (d=1 chains) ----------------------------

// Exact d=1 evaluation of
//   -h(mu) + e_nu^+ - int mu(dsigma) [log gamma_0(sigma^+|sigma^+) - log gamma_0(+|sigma^+)]
// with the entropy and specific-energy terms taken from the transfer-chain
// increment estimators (exact rates for Markov chains) and the D-integral
// summed exactly over the range-r window of the origin.
inline double entropy_formula_rhs(const FiniteRangePotential& phi, const TransferChain& mu,
                                  const TransferChain& nu, int n) {
    if (phi.dim != 1) throw std::invalid_argument("entropy_formula_rhs: d=1 only");
    int r = std::max(1, phi.range());
    // window sites -r..r; mu-marginal on -r..0, plus state beyond
    int L = r + 1;  // sites -r..0 drawn from mu
    int m = mu.m;
    BoxPtr wbox = Box::cube(r, 1);
    double dint = 0.0;
    std::vector<int> digits, wvals(2 * r + 1);
    uint64_t nconf = pow_u(m, L);
    for (uint64_t c = 0; c < nconf; ++c) {
        idx_to_digits(c, L, m, digits);
        std::vector<int> vals(L);
        for (int i = 0; i < L; ++i) vals[i] = mu.alphabet[digits[i]];
        double w = std::exp(mu.log_window_prob(vals));
        if (w <= 0.0) continue;
        for (int i = 0; i < L; ++i) wvals[i] = vals[i];
        for (int i = L; i < 2 * r + 1; ++i) wvals[i] = phi.plus_state;
        Config window(wbox, wvals);
        dint += w * relative_energy_D(phi, window);
    }
    double h = mu.entropy_rate();
    double e = specific_energy_increment(nu, phi.plus_state, std::max(1, n));
    (void)n;
    return -h + e - dint;
}

// Direct windowed h_{Lambda_n}(mu|nu)/|Lambda_n| for two d=1 chains, in closed
// form via the stationary pair marginals (no enumeration).
inline double chain_relative_entropy_rate(const TransferChain& mu, const TransferChain& nu, int n) {
    int m = mu.m;
    double first = 0.0;
    for (int a = 0; a < m; ++a)
        if (mu.pi[a] > 0.0) first += mu.pi[a] * (std::log(mu.pi[a]) - std::log(nu.pi[a]));
    double step = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double pm = mu.pi[a] * mu.P[a * m + b];
            if (pm > 0.0) step += pm * (std::log(mu.P[a * m + b]) - std::log(nu.P[a * m + b]));
        }
    return (first + 2.0 * n * step) / (2.0 * n + 1.0);
}

// ---- sampling ----------------------------------------------------------------

struct EmpiricalSample {
    BoxPtr box;
    std::vector<std::vector<int>> configs;
    uint64_t seed = 0;
    int sweeps = 0;
    std::string sampler;
};

// Single-site heat-bath sampler targeting exact_gibbs(phi, box, omega).
// Deterministic given the seed.
inline EmpiricalSample heatbath_sample(const FiniteRangePotential& phi, const BoxPtr& box,
                                       const Config& omega, int sweeps, uint64_t seed,
                                       int nsamples = 1) {
    if (sweeps < 1) throw std::invalid_argument("heatbath_sample: sweeps >= 1 required");
    auto ch = compile_hamiltonian(phi, *box, *omega.box);
    auto od = to_digits(phi, omega.vals);
    int m = (int)phi.alphabet.size();
    int L = box->size();
    EmpiricalSample out;
    out.box = box;
    out.seed = seed;
    out.sweeps = sweeps;
    out.sampler = "heatbath";
    Rng rng(seed, 0x68626174);  // "hbat"
    std::vector<int> state(L);
    std::vector<double> lw(m);
    for (int s = 0; s < nsamples; ++s) {
        for (int i = 0; i < L; ++i) state[i] = (int)rng.below(m);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            for (int i = 0; i < L; ++i) {
                for (int a = 0; a < m; ++a) {
                    state[i] = a;
                    lw[a] = -ch.energy(state.data(), od.data());
                }
                auto p = probs_from_logweights(lw);
                double uvar = rng.uniform(), acc = 0.0;
                int pick = m - 1;
                for (int a = 0; a < m; ++a) {
                    acc += p[a];
                    if (uvar < acc) {
                        pick = a;
                        break;
                    }
                }
                state[i] = pick;
            }
        }
        std::vector<int> vals(L);
        for (int i = 0; i < L; ++i) vals[i] = phi.alphabet[state[i]];
        out.configs.push_back(std::move(vals));
    }
    return out;
}

}  // namespace gibbsium

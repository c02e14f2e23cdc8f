#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "measure.hpp"
#include "potential.hpp"
#include "prob_table.hpp"
#include "specification.hpp"

namespace gibbsium {

// Single-site disorder law P0 on a finite support, product structure over
// sites. Default: uniform on {-1, +1} (symmetric, as in the RFIM).
struct DisorderLaw {
    std::vector<int> support{-1, 1};
    std::vector<double> prob{0.5, 0.5};

    double p_of(int eta) const {
        for (size_t i = 0; i < support.size(); ++i)
            if (support[i] == eta) return prob[i];
        throw std::invalid_argument("DisorderLaw: value not in support");
    }
    double log_prob(const std::vector<int>& etas) const {
        double lp = 0.0;
        for (int e : etas) lp += std::log(p_of(e));
        return lp;
    }
};

// ---- quenched kernels and joint tables (generic, exact enumeration) ---------

// mu_Lambda^{sigmaBar}[eta]: spins on box, disorder eta given on box and shell,
// spin boundary condition sigmaBar on the shell. phi acts on joint codes.
inline ProbTable quenched_kernel(const FiniteRangePotential& phi, const BoxPtr& box,
                                 const Config& eta_in, const Config& eta_shell,
                                 const Config& sigma_bar) {
    auto ch = compile_hamiltonian(phi, *box, *sigma_bar.box);
    int L = box->size();
    std::vector<int> outer(sigma_bar.box->size());
    for (int j = 0; j < sigma_bar.box->size(); ++j)
        outer[j] = phi.aidx(joint_code(sigma_bar.vals[j], eta_shell.at(sigma_bar.box->sites[j])));
    ProbTable out = ProbTable::zero(box, spin_alphabet());
    std::vector<double> lw(out.nconf());
    std::vector<int> digits, inner(L);
    for (uint64_t i = 0; i < out.nconf(); ++i) {
        idx_to_digits(i, L, 2, digits);
        for (int j = 0; j < L; ++j)
            inner[j] = phi.aidx(joint_code(digits[j] ? 1 : -1, eta_in.vals[j]));
        lw[i] = -ch.energy(inner.data(), outer.data());
    }
    out.p = probs_from_logweights(lw);
    return out;
}

// Finite-volume joint measure K_Lambda(sigma, eta) = P(eta) mu[eta etaBar](sigma)
// over joint codes.
inline ProbTable joint_table(const FiniteRangePotential& phi, const DisorderLaw& P,
                             const BoxPtr& box, const Config& sigma_bar, const Config& eta_bar) {
    int L = box->size();
    ProbTable out = ProbTable::zero(box, joint_alphabet());
    uint64_t neta = pow_u(P.support.size(), L);
    std::vector<int> ed, evals(L);
    for (uint64_t e = 0; e < neta; ++e) {
        idx_to_digits(e, L, (int)P.support.size(), ed);
        for (int j = 0; j < L; ++j) evals[j] = P.support[ed[j]];
        double pw = std::exp(P.log_prob(evals));
        ProbTable mu = quenched_kernel(phi, box, Config(box, evals), eta_bar, sigma_bar);
        std::vector<int> sd, jointd(L);
        for (uint64_t s = 0; s < mu.nconf(); ++s) {
            idx_to_digits(s, L, 2, sd);
            for (int j = 0; j < L; ++j) jointd[j] = joint_code(sd[j] ? 1 : -1, evals[j]);
            out.p[digits_to_idx(jointd, 4)] += pw * mu.p[s];
        }
    }
    return out;
}

// Disorder marginal of a joint-code table.
inline ProbTable eta_marginal(const ProbTable& K) {
    ProbTable out = ProbTable::zero(K.box, {-1, 1});
    std::vector<int> digits, ed(K.nsites());
    for (uint64_t i = 0; i < K.nconf(); ++i) {
        idx_to_digits(i, K.nsites(), 4, digits);
        for (int j = 0; j < K.nsites(); ++j) ed[j] = (digits[j] & 2) ? 1 : 0;
        out.p[digits_to_idx(ed, 2)] += K.p[i];
    }
    return out;
}

inline ProbTable spin_marginal(const ProbTable& K) {
    ProbTable out = ProbTable::zero(K.box, {-1, 1});
    std::vector<int> digits, sd(K.nsites());
    for (uint64_t i = 0; i < K.nconf(); ++i) {
        idx_to_digits(i, K.nsites(), 4, digits);
        for (int j = 0; j < K.nsites(); ++j) sd[j] = digits[j] & 1;
        out.p[digits_to_idx(sd, 2)] += K.p[i];
    }
    return out;
}

// Consistency (Def 2.1) of the quenched specification at fixed disorder:
// total variation between gamma_outer[eta] and gamma_outer[eta] gamma_inner[eta].
inline double check_consistency_quenched(const FiniteRangePotential& phi, const BoxPtr& inner,
                                         const BoxPtr& outer, const Config& eta_all,
                                         const Config& sigma_bar) {
    for (const auto& s : inner->sites)
        if (!outer->contains(s))
            throw std::invalid_argument("check_consistency_quenched: nesting violated");
    int r = std::max(1, phi.range());
    std::vector<int> eo(outer->size());
    for (int j = 0; j < outer->size(); ++j) eo[j] = eta_all.at(outer->sites[j]);
    Config eta_outer(outer, eo);
    BoxPtr oshell = Box::make(phi.dim, boundary_shell(*outer, r));
    std::vector<int> es(oshell->size());
    for (int j = 0; j < oshell->size(); ++j) es[j] = eta_all.at(oshell->sites[j]);
    ProbTable gouter = quenched_kernel(phi, outer, eta_outer, Config(oshell, es), sigma_bar);

    BoxPtr ishell = Box::make(phi.dim, boundary_shell(*inner, r));
    std::vector<int> ei(inner->size());
    for (int j = 0; j < inner->size(); ++j) ei[j] = eta_all.at(inner->sites[j]);
    Config eta_inner(inner, ei);
    std::vector<int> eis(ishell->size()), sis(ishell->size());
    for (int j = 0; j < ishell->size(); ++j) eis[j] = eta_all.at(ishell->sites[j]);
    Config eta_ishell(ishell, eis);

    ProbTable composed = ProbTable::zero(outer, spin_alphabet());
    std::vector<int> odig, idig, cdig(outer->size());
    for (uint64_t i = 0; i < gouter.nconf(); ++i) {
        if (gouter.p[i] == 0.0) continue;
        idx_to_digits(i, outer->size(), 2, odig);
        for (int j = 0; j < ishell->size(); ++j) {
            const Site& s = ishell->sites[j];
            sis[j] = outer->contains(s) ? (odig[outer->idx(s)] ? 1 : -1) : sigma_bar.at(s);
        }
        ProbTable ginner = quenched_kernel(phi, inner, eta_inner, eta_ishell, Config(ishell, sis));
        for (uint64_t k = 0; k < ginner.nconf(); ++k) {
            idx_to_digits(k, inner->size(), 2, idig);
            cdig = odig;
            for (int j = 0; j < inner->size(); ++j) cdig[outer->idx(inner->sites[j])] = idig[j];
            composed.p[digits_to_idx(cdig, 2)] += gouter.p[i] * ginner.p[k];
        }
    }
    return total_variation(composed, gouter);
}

// ---- Delta H, Q factor, annealed kernel, Eq. 6.7 -----------------------------

// DeltaH_Lambda(eta1, eta2, eta_out)(sigma) = sum_{A meets Lambda}
// [Phi_A(sigma, eta1 eta_out) - Phi_A(sigma, eta2 eta_out)].
// sigma_all supplies spin values on Lambda and everywhere within range
// (lookup by site); eta1/eta2 live on Lambda, eta_out everywhere else needed.
inline double delta_H(const FiniteRangePotential& phi, const BoxPtr& lambda,
                      const std::function<int(const Site&)>& sigma_all,
                      const Config& eta1, const Config& eta2,
                      const std::function<int(const Site&)>& eta_out) {
    BoxPtr shell = Box::make(phi.dim, boundary_shell(*lambda, std::max(1, phi.range())));
    auto ch = compile_hamiltonian(phi, *lambda, *shell);
    int L = lambda->size();
    std::vector<int> in1(L), in2(L), outer(shell->size());
    for (int j = 0; j < L; ++j) {
        int s = sigma_all(lambda->sites[j]);
        in1[j] = phi.aidx(joint_code(s, eta1.vals[j]));
        in2[j] = phi.aidx(joint_code(s, eta2.vals[j]));
    }
    for (int j = 0; j < shell->size(); ++j) {
        const Site& site = shell->sites[j];
        outer[j] = phi.aidx(joint_code(sigma_all(site), eta_out(site)));
    }
    return ch.energy(in1.data(), outer.data()) - ch.energy(in2.data(), outer.data());
}

// Q_Lambda^mu(eta1, eta2, eta_out) = E_{mu[eta2 eta_out]} [ exp(-DeltaH_Lambda) ].
// mu is an exact spin table on a surrogate box S containing Lambda with margin
// >= range; sigma_bar_S supplies spins outside S.
inline double q_factor(const ProbTable& mu_spins, const FiniteRangePotential& phi,
                       const BoxPtr& lambda, const Config& eta1, const Config& eta2,
                       const std::function<int(const Site&)>& eta_out,
                       const std::function<int(const Site&)>& sigma_bar_S) {
    double q = 0.0;
    std::vector<int> vals;
    for (uint64_t i = 0; i < mu_spins.nconf(); ++i) {
        if (mu_spins.p[i] == 0.0) continue;
        mu_spins.values_of(i, vals);
        auto sigma_all = [&](const Site& s) -> int {
            if (mu_spins.box->contains(s)) return vals[mu_spins.box->idx(s)];
            return sigma_bar_S(s);
        };
        double dH = delta_H(phi, lambda, sigma_all, eta1, eta2, eta_out);
        q += mu_spins.p[i] * std::exp(-dH);
    }
    return q;
}

// Trivial annealed kernel on joint codes with boundary condition xi on the
// shell of the box.
inline ProbTable annealed_kernel(int d, double beta, double h, double p0_plus, const BoxPtr& box,
                                 const Config& xi_boundary) {
    FiniteRangePotential u = triv_annealed_potential(d, beta, h, p0_plus);
    return kernel(u, box, xi_boundary);
}

// Eq. 6.7 with finite-volume quenched surrogates: the quenched measures
// mu[eta~ eta_out] are realized on the surrogate box (plus spin boundary
// condition at its edge), and the surrogate radius is part of the result.
struct JointConditionalResult {
    ProbTable table;       // normalized law of xi_Lambda
    int surrogate_radius;  // radius of the box carrying mu[.]
    double norm_defect;    // |1 - raw mass| before normalization
};

inline JointConditionalResult joint_conditional(
    const FiniteRangePotential& phi, const DisorderLaw& P, double beta, double h,
    const BoxPtr& lambda, const std::function<int(const Site&)>& sigma_out,
    const std::function<int(const Site&)>& eta_out, int surrogate_radius) {
    int d = phi.dim;
    int r = std::max(1, phi.range());
    double p0p = P.p_of(1);
    // numerator: annealed kernel with boundary xi on the shell of Lambda
    BoxPtr lshell = Box::make(d, boundary_shell(*lambda, r));
    std::vector<int> bvals(lshell->size());
    for (int j = 0; j < lshell->size(); ++j)
        bvals[j] = joint_code(sigma_out(lshell->sites[j]), eta_out(lshell->sites[j]));
    ProbTable ann = annealed_kernel(d, beta, h, p0p, lambda, Config(lshell, bvals));

    // eta-marginal of the annealed kernel (integration weight for eta~)
    ProbTable ann_eta = eta_marginal(ann);

    // quenched surrogate box S = Lambda_R and its boundary data
    BoxPtr S = Box::cube(surrogate_radius, d);
    for (const auto& s : lambda->sites)
        if (!S->contains(s)) throw std::invalid_argument("joint_conditional: surrogate box too small");
    BoxPtr sshell = Box::make(d, boundary_shell(*S, r));
    std::vector<int> eshell(sshell->size());
    for (int j = 0; j < sshell->size(); ++j) eshell[j] = eta_out(sshell->sites[j]);
    Config eta_shell_S(sshell, eshell);
    Config plus_bar = Config::constant(sshell, 1);
    auto sigma_bar_S = [](const Site&) { return 1; };

    int L = lambda->size();
    // actual eta_Lambda values enter through DeltaH; enumerate all of them
    uint64_t neta = pow_u(2, L);
    std::vector<double> denom(neta, 0.0);
    std::vector<int> ed, evals(L), e2d, e2vals(L);
    for (uint64_t e2 = 0; e2 < neta; ++e2) {
        idx_to_digits(e2, L, 2, e2d);
        for (int j = 0; j < L; ++j) e2vals[j] = e2d[j] ? 1 : -1;
        Config eta2(lambda, e2vals);
        // field on S: eta~ on Lambda, eta_out elsewhere
        std::vector<int> etaS(S->size());
        for (int j = 0; j < S->size(); ++j) {
            const Site& s = S->sites[j];
            etaS[j] = lambda->contains(s) ? e2vals[lambda->idx(s)] : eta_out(s);
        }
        ProbTable mu = quenched_kernel(phi, S, Config(S, etaS), eta_shell_S, plus_bar);
        double w = ann_eta.p[digits_to_idx(e2d, 2)];
        if (w == 0.0) continue;
        for (uint64_t e1 = 0; e1 < neta; ++e1) {
            idx_to_digits(e1, L, 2, ed);
            for (int j = 0; j < L; ++j) evals[j] = ed[j] ? 1 : -1;
            Config eta1(lambda, evals);
            denom[e1] += w * q_factor(mu, phi, lambda, eta1, eta2, eta_out, sigma_bar_S);
        }
    }

    JointConditionalResult res;
    res.surrogate_radius = surrogate_radius;
    res.table = ProbTable::zero(lambda, joint_alphabet());
    std::vector<int> jd, etad(L);
    double mass = 0.0;
    for (uint64_t i = 0; i < res.table.nconf(); ++i) {
        idx_to_digits(i, L, 4, jd);
        for (int j = 0; j < L; ++j) etad[j] = (jd[j] & 2) ? 1 : 0;
        double v = ann.p[i] / denom[digits_to_idx(etad, 2)];
        res.table.p[i] = v;
        mass += v;
    }
    res.norm_defect = std::abs(1.0 - mass);
    for (double& x : res.table.p) x /= mass;
    return res;
}

// Direct-conditioning oracle: the conditional law of xi_Lambda under the
// finite-volume joint measure on big_box (boundary sigma_bar/eta_bar beyond),
// given xi = (sigma_out, eta_out) on big_box \ Lambda. Exact; avoids building
// the full joint table by evaluating quenched probabilities per candidate.
inline ProbTable joint_conditional_direct(const FiniteRangePotential& phi, const DisorderLaw& P,
                                          const BoxPtr& big_box, const Config& sigma_bar,
                                          const Config& eta_bar, const BoxPtr& lambda,
                                          const std::function<int(const Site&)>& sigma_out,
                                          const std::function<int(const Site&)>& eta_out) {
    int L = lambda->size();
    ProbTable out = ProbTable::zero(lambda, joint_alphabet());
    std::vector<int> jd;
    for (uint64_t i = 0; i < out.nconf(); ++i) {
        idx_to_digits(i, L, 4, jd);
        std::vector<int> etaM(big_box->size()), sigM(big_box->size());
        std::vector<int> etaL(L);
        for (int j = 0; j < big_box->size(); ++j) {
            const Site& s = big_box->sites[j];
            if (lambda->contains(s)) {
                int c = jd[lambda->idx(s)];
                etaM[j] = (c & 2) ? 1 : -1;
                sigM[j] = (c & 1) ? 1 : -1;
            } else {
                etaM[j] = eta_out(s);
                sigM[j] = sigma_out(s);
            }
        }
        for (int j = 0; j < L; ++j) etaL[j] = (jd[j] & 2) ? 1 : -1;
        ProbTable mu = quenched_kernel(phi, big_box, Config(big_box, etaM), eta_bar, sigma_bar);
        out.p[i] = std::exp(P.log_prob(etaL)) * mu.p[mu.index_of_values(sigM)];
    }
    out.normalize();
    return out;
}

// ---- boundary constants and order-of-boundary bounds ------------------------

// C1hat = (max oscillation over joint configurations of
// sum_{A meets Lambda, A not in Lambda} Phi_A) / |boundary|.
inline double boundary_constant_c1(const FiniteRangePotential& phi, const BoxPtr& box) {
    int r = std::max(1, phi.range());
    auto shell_sites = boundary_shell(*box, r);
    struct Inst {
        const PotTerm* term;
        std::vector<Site> sites;
    };
    std::vector<Inst> insts;
    std::set<Site> involved;
    for (const auto& term : phi.terms) {
        std::set<Site> xs;
        for (const auto& y : box->sites)
            for (const auto& s : term.shape) xs.insert(site_sub(y, s));
        for (const auto& x : xs) {
            bool meets = false, inside = true;
            std::vector<Site> sites;
            for (const auto& s : term.shape) {
                Site p = site_add(x, s);
                sites.push_back(p);
                if (box->contains(p))
                    meets = true;
                else
                    inside = false;
            }
            if (!meets || inside) continue;
            for (const auto& p : sites) involved.insert(p);
            insts.push_back({&term, std::move(sites)});
        }
    }
    if (insts.empty()) return 0.0;
    std::vector<Site> sl(involved.begin(), involved.end());
    std::map<Site, int> sidx;
    for (int i = 0; i < (int)sl.size(); ++i) sidx[sl[i]] = i;
    int m = (int)phi.alphabet.size();
    uint64_t nconf = table_size_checked(m, (int)sl.size());
    double lo = infinite(), hi = -infinite();
    std::vector<int> digits;
    for (uint64_t c = 0; c < nconf; ++c) {
        idx_to_digits(c, (int)sl.size(), m, digits);
        double sum = 0.0;
        for (const auto& inst : insts) {
            uint64_t pat = 0, mult = 1;
            for (const auto& p : inst.sites) {
                pat += mult * (uint64_t)digits[sidx[p]];
                mult *= (uint64_t)m;
            }
            sum += inst.term->table[pat];
        }
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    return (hi - lo) / (double)shell_sites.size();
}

// sup over window configurations of |log K1(xi_W)/K2(xi_W)|.
inline double sup_log_ratio(const ProbTable& K1, const ProbTable& K2, const BoxPtr& window) {
    ProbTable m1 = marginal(K1, window), m2 = marginal(K2, window);
    double worst = 0.0;
    for (uint64_t i = 0; i < m1.nconf(); ++i) {
        if (m1.p[i] <= 0.0 && m2.p[i] <= 0.0) continue;
        if (m1.p[i] <= 0.0 || m2.p[i] <= 0.0) return infinite();
        worst = std::max(worst, std::abs(std::log(m1.p[i] / m2.p[i])));
    }
    return worst;
}

// Asymptotic-decoupling ratio K(A and B) / (K(A) K(B)) for cylinder events
// given as (site, joint-code) constraints. Exact on tables.
struct CylinderEvent {
    std::vector<std::pair<Site, int>> fixed;  // joint code per site
};

inline double cylinder_prob(const ProbTable& K, const CylinderEvent& ev) {
    double s = 0.0;
    std::vector<int> digits;
    int m = (int)K.alphabet.size();
    for (uint64_t i = 0; i < K.nconf(); ++i) {
        idx_to_digits(i, K.nsites(), m, digits);
        bool ok = true;
        for (const auto& f : ev.fixed)
            if (K.alphabet[digits[K.box->idx(f.first)]] != f.second) {
                ok = false;
                break;
            }
        if (ok) s += K.p[i];
    }
    return s;
}

inline double ad_ratio(const ProbTable& K, const CylinderEvent& a, const CylinderEvent& b) {
    CylinderEvent ab;
    ab.fixed = a.fixed;
    ab.fixed.insert(ab.fixed.end(), b.fixed.begin(), b.fixed.end());
    double pa = cylinder_prob(K, a), pb = cylinder_prob(K, b), pab = cylinder_prob(K, ab);
    if (pa <= 0.0 || pb <= 0.0)
        throw std::runtime_error("ad_ratio: zero-probability event (P(A)P(B) != 0 required)");
    return pab / (pa * pb);
}

// ---- d=1 quenched chains (exact, avoids 4^L tables) -------------------------

// Inhomogeneous two-state chain: weight exp(sum_i f_i s_i + beta sum s_i s_{i+1})
// with s_i in {-1, +1}. Boundary spin conditions are folded into the edge
// fields by the callers.
struct Chain1D {
    double beta = 0.0;
    std::vector<double> f;  // site fields

    int L() const { return (int)f.size(); }

    // forward vectors a_i(s) (log-scaled), backward b_i(s)
    void sweep(std::vector<std::array<double, 2>>& fwd, std::vector<std::array<double, 2>>& bwd,
               double& logscale_f, double& logscale_b) const {
        int n = L();
        fwd.resize(n);
        bwd.resize(n);
        logscale_f = 0.0;
        logscale_b = 0.0;
        fwd[0] = {std::exp(-f[0]), std::exp(f[0])};
        for (int i = 1; i < n; ++i) {
            for (int s = 0; s < 2; ++s) {
                double ss = s ? 1.0 : -1.0;
                fwd[i][s] = std::exp(f[i] * ss) *
                            (fwd[i - 1][0] * std::exp(-beta * ss) + fwd[i - 1][1] * std::exp(beta * ss));
            }
            double sc = fwd[i][0] + fwd[i][1];
            fwd[i][0] /= sc;
            fwd[i][1] /= sc;
            logscale_f += std::log(sc);
        }
        bwd[n - 1] = {1.0, 1.0};
        for (int i = n - 2; i >= 0; --i) {
            for (int s = 0; s < 2; ++s) {
                double ss = s ? 1.0 : -1.0;
                bwd[i][s] = bwd[i + 1][0] * std::exp(-f[i + 1] - beta * ss) +
                            bwd[i + 1][1] * std::exp(f[i + 1] + beta * ss);
            }
            double sc = bwd[i][0] + bwd[i][1];
            bwd[i][0] /= sc;
            bwd[i][1] /= sc;
            logscale_b += std::log(sc);
        }
    }

    double log_Z() const {
        std::vector<std::array<double, 2>> fwd, bwd;
        double lf, lb;
        sweep(fwd, bwd, lf, lb);
        int n = L();
        return std::log(fwd[n - 1][0] + fwd[n - 1][1]) + lf;
    }

    // E[s_i] for all i and E[s_i s_{i+1}] for all bonds.
    void moments(std::vector<double>& mag, std::vector<double>& corr) const {
        int n = L();
        std::vector<std::array<double, 2>> fwd, bwd;
        double lf, lb;
        sweep(fwd, bwd, lf, lb);
        mag.assign(n, 0.0);
        corr.assign(std::max(0, n - 1), 0.0);
        for (int i = 0; i < n; ++i) {
            double w0 = fwd[i][0] * bwd[i][0], w1 = fwd[i][1] * bwd[i][1];
            mag[i] = (w1 - w0) / (w1 + w0);
        }
        for (int i = 0; i + 1 < n; ++i) {
            double tot = 0.0, val = 0.0;
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) {
                    double ss = s ? 1.0 : -1.0, tt = t ? 1.0 : -1.0;
                    double w = fwd[i][s] * std::exp(beta * ss * tt + f[i + 1] * tt) * bwd[i + 1][t];
                    tot += w;
                    val += w * ss * tt;
                }
            corr[i] = val / tot;
        }
    }

    // log of the constrained partition sum with some spins pinned
    // (pin[i] in {-1, 0, +1}; 0 = free).
    double log_Z_constrained(const std::vector<int>& pin) const {
        int n = L();
        std::array<double, 2> cur{0.0, 0.0};
        double logscale = 0.0;
        for (int s = 0; s < 2; ++s) {
            double ss = s ? 1.0 : -1.0;
            if (pin[0] == 0 || (pin[0] > 0) == (s == 1)) cur[s] = std::exp(f[0] * ss);
        }
        for (int i = 1; i < n; ++i) {
            std::array<double, 2> nxt{0.0, 0.0};
            for (int s = 0; s < 2; ++s) {
                if (!(pin[i] == 0 || (pin[i] > 0) == (s == 1))) continue;
                double ss = s ? 1.0 : -1.0;
                nxt[s] = std::exp(f[i] * ss) *
                         (cur[0] * std::exp(-beta * ss) + cur[1] * std::exp(beta * ss));
            }
            double sc = nxt[0] + nxt[1];
            if (sc <= 0.0) return -infinite();
            nxt[0] /= sc;
            nxt[1] /= sc;
            logscale += std::log(sc);
            cur = nxt;
        }
        return std::log(cur[0] + cur[1]) + logscale;
    }

    // Shannon entropy of the chain measure.
    double entropy() const {
        std::vector<double> mag, corr;
        moments(mag, corr);
        double emean = 0.0;  // E[energy], energy = -(sum f s + beta sum s s')
        for (int i = 0; i < L(); ++i) emean -= f[i] * mag[i];
        for (size_t i = 0; i < corr.size(); ++i) emean -= beta * corr[i];
        return emean + log_Z();
    }

    // mean energy E_mu[-(sum f s + beta sum ss')] -- the chain Hamiltonian
    double mean_energy() const {
        std::vector<double> mag, corr;
        moments(mag, corr);
        double emean = 0.0;
        for (int i = 0; i < L(); ++i) emean -= f[i] * mag[i];
        for (size_t i = 0; i < corr.size(); ++i) emean -= beta * corr[i];
        return emean;
    }
};

// RFIM chain on Lambda_n = [-n, n] with fields h*eta and spin boundary
// condition bc (each end; 0 = free) folded into the edge fields.
inline Chain1D rfim_chain(const std::vector<int>& eta, double beta, double h, int bcL, int bcR) {
    Chain1D c;
    c.beta = beta;
    int n = (int)eta.size();
    c.f.resize(n);
    for (int i = 0; i < n; ++i) c.f[i] = h * eta[i];
    c.f[0] += beta * bcL;
    c.f[n - 1] += beta * bcR;
    return c;
}

// h(mu+[eta] | mu-[eta]) for one disorder realization: the Hamiltonians differ
// only through the boundary bonds, so
//   h = 2 beta (m+_left + m+_right) + log Z- - log Z+.
inline double quenched_relent_pm(const std::vector<int>& eta, double beta, double h) {
    Chain1D cp = rfim_chain(eta, beta, h, +1, +1);
    Chain1D cm = rfim_chain(eta, beta, h, -1, -1);
    std::vector<double> mag, corr;
    cp.moments(mag, corr);
    return 2.0 * beta * (mag.front() + mag.back()) + cm.log_Z() - cp.log_Z();
}

struct EntropyBoundRow {
    int n = 0;
    double h_rel = 0.0;     // h_{Lambda_n}(K+ | K-), exact
    double bound = 0.0;     // 4 C1hat |dLambda_n|
    double per_site = 0.0;  // h_rel / |Lambda_n|
    bool pass = false;
};

// Theorem 6.1 finite bound for the d=1 RFIM: h_{Lambda_n}(K+|K-) summed
// exactly over disorder (both joints share the eta-marginal P).
inline std::vector<EntropyBoundRow> joint_entropy_bound_1d(double beta, double h,
                                                           const std::vector<int>& ns) {
    FiniteRangePotential phi = rfim_potential(1, beta, h);
    std::vector<EntropyBoundRow> rows;
    for (int n : ns) {
        int L = 2 * n + 1;
        BoxPtr box = Box::cube(n, 1);
        double c1 = boundary_constant_c1(phi, box);
        double hsum = 0.0;
        uint64_t neta = uint64_t(1) << L;
        std::vector<int> eta(L);
        for (uint64_t e = 0; e < neta; ++e) {
            for (int j = 0; j < L; ++j) eta[j] = (e >> j & 1) ? 1 : -1;
            hsum += quenched_relent_pm(eta, beta, h) / (double)neta;
        }
        EntropyBoundRow row;
        row.n = n;
        row.h_rel = hsum;
        row.bound = 4.0 * c1 * (double)boundary_shell(*box, std::max(1, phi.range())).size();
        row.per_site = hsum / L;
        row.pass = hsum <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

struct EntropyDecomposition {
    int n = 0;
    double h_rel = 0.0;      // h_n(K | K^sigmaBar) per site, exact
    double t_hKd_P = 0.0;    // h_n(K_d | P) per site
    double t_hK = 0.0;       // h_n(K) per site (enters with minus sign)
    double t_hKd = 0.0;      // h_n(K_d) per site (enters with plus sign; see notes)
    double t_energy = 0.0;   // (1/|Lambda|) E_K[H_Lambda]
    double t_pressure = 0.0; // (1/|Lambda|) E_P[log Z^sigmaBar]
    double residual = 0.0;   // h_rel - (t_hKd_P - t_hK + t_hKd + t_energy + t_pressure)
};

// Theorem 6.7 at finite n for the d=1 RFIM, with K = K^+ (plus boundary) and
// reference K^sigmaBar = K^- (minus boundary), both on Lambda_n. All terms are
// exact sums over the 2^|Lambda_n| disorder realizations via chain recursions.
inline EntropyDecomposition entropy_decomposition_1d(double beta, double h, int n) {
    int L = 2 * n + 1;
    uint64_t neta = uint64_t(1) << L;
    double w = 1.0 / (double)neta;
    double h_rel = 0.0, hK_spin = 0.0, energy = 0.0, pressure = 0.0;
    std::vector<int> eta(L);
    for (uint64_t e = 0; e < neta; ++e) {
        for (int j = 0; j < L; ++j) eta[j] = (e >> j & 1) ? 1 : -1;
        Chain1D cp = rfim_chain(eta, beta, h, +1, +1);
        Chain1D cm = rfim_chain(eta, beta, h, -1, -1);
        std::vector<double> mag, corr;
        cp.moments(mag, corr);
        double lzp = cp.log_Z(), lzm = cm.log_Z();
        h_rel += w * (2.0 * beta * (mag.front() + mag.back()) + lzm - lzp);
        double emean = cp.mean_energy();
        hK_spin += w * (emean + lzp);  // H(mu+[eta])
        energy += w * emean;           // E_K[H_Lambda] given eta (chain energy = H_Lambda)
        pressure += w * lzm;           // reference pressure, minus boundary
    }
    EntropyDecomposition out;
    out.n = n;
    out.h_rel = h_rel / L;
    out.t_hKd_P = 0.0;  // K_d = P exactly by construction
    out.t_hKd = std::log(2.0);
    out.t_hK = (L * std::log(2.0) + hK_spin) / L;  // H(K) = H(P_Lambda) + E_P H(mu[eta])
    out.t_energy = energy / L;
    out.t_pressure = pressure / L;
    out.residual = out.h_rel - (out.t_hKd_P - out.t_hK + out.t_hKd + out.t_energy + out.t_pressure);
    return out;
}

struct JointSpecificEnergy {
    int n = 0;
    double lhs = 0.0;        // e^lambda at finite n (surrogate-box joint measure)
    double t_hP = 0.0;       // h_n(P) (enters with plus sign; see notes)
    double t_energy = 0.0;   // (1/|Lambda|) E_P[H_Lambda(sigma0, eta)]
    double t_pressure = 0.0; // (1/|Lambda|) E_P[log Z^sigmaBar]
    double residual = 0.0;
};

// Prop 6.12 at finite n for the d=1 RFIM with lambda = P (x) delta_{sigma0},
// sigma0 translation invariant (+1 or -1 everywhere). The LHS evaluates
// -(1/|Lambda_n|) E_P log K(sigma0_Lambda, eta_Lambda) with K the joint
// surrogate on the larger box Lambda_{n+pad} (plus spin boundary), so the
// residual measures the finite-volume boundary mismatch and shrinks with n.
inline JointSpecificEnergy joint_specific_energy_1d(double beta, double h, int sigma0, int n,
                                                    int pad) {
    int L = 2 * n + 1;
    int M = 2 * (n + pad) + 1;
    int off = pad;  // Lambda_n sits at positions off .. off+L-1 inside Lambda_{n+pad}
    uint64_t nwin = uint64_t(1) << L;
    uint64_t nrest = uint64_t(1) << (M - L);
    double lhs = 0.0, energy = 0.0, pressure = 0.0;
    std::vector<int> etaW(L), etaM(M), pin(M, 0);
    for (int i = 0; i < L; ++i) pin[off + i] = sigma0;
    for (uint64_t ew = 0; ew < nwin; ++ew) {
        for (int j = 0; j < L; ++j) etaW[j] = (ew >> j & 1) ? 1 : -1;
        // K(sigma0_Lambda, eta_Lambda) under the surrogate on Lambda_{n+pad}
        double kprob = 0.0;
        for (uint64_t er = 0; er < nrest; ++er) {
            uint64_t bits = er;
            for (int j = 0; j < M; ++j) {
                if (j >= off && j < off + L)
                    etaM[j] = etaW[j - off];
                else {
                    etaM[j] = (bits & 1) ? 1 : -1;
                    bits >>= 1;
                }
            }
            Chain1D c = rfim_chain(etaM, beta, h, +1, +1);
            kprob += std::exp(c.log_Z_constrained(pin) - c.log_Z()) / (double)(nrest * nwin);
        }
        lhs -= std::log(kprob) / (double)(L * nwin);
        // RHS energy and pressure on Lambda_n itself (plus boundary)
        Chain1D cw = rfim_chain(etaW, beta, h, +1, +1);
        double hval = 0.0;  // H_Lambda(sigma0 | eta) with plus bc
        for (int i = 0; i < L; ++i) hval -= cw.f[i] * sigma0;
        for (int i = 0; i + 1 < L; ++i) hval -= beta * sigma0 * sigma0;
        energy += hval / (double)(L * nwin);
        pressure += cw.log_Z() / (double)(L * nwin);
    }
    JointSpecificEnergy out;
    out.n = n;
    out.lhs = lhs;
    out.t_hP = std::log(2.0);
    out.t_energy = energy;
    out.t_pressure = pressure;
    out.residual = lhs - (out.t_hP + out.t_energy + out.t_pressure);
    return out;
}

// ---- Prop 6.15: r+ vs r- ----------------------------------------------------

// r^{+/-} = (1 + E_{mu^{+/-}[eta_0 = -1, eta rest]}[exp(2 h sigma_0)])^{-1}
// with mu^{+/-} the finite-volume measures on the surrogate box with all-plus /
// all-minus spin boundary conditions. Exact enumeration.
inline std::pair<double, double> r_plus_minus(double beta, double h, const BoxPtr& box,
                                              Config eta) {
    int d = box->dim;
    Site o = site_origin(d);
    eta.vals[box->idx(o)] = -1;  // the defining conditioning eta_x = -1
    FiniteRangePotential phi = rfim_potential(d, beta, h);
    BoxPtr shell = Box::make(d, boundary_shell(*box, 1));
    Config eta_shell = Config::constant(shell, 1);  // disorder beyond the box: +1 (fixed surrogate)
    double r[2];
    for (int which = 0; which < 2; ++which) {
        Config bar = Config::constant(shell, which == 0 ? 1 : -1);
        ProbTable mu = quenched_kernel(phi, box, eta, eta_shell, bar);
        double ex = 0.0;
        std::vector<int> vals;
        int oi = box->idx(o);
        for (uint64_t i = 0; i < mu.nconf(); ++i) {
            mu.values_of(i, vals);
            ex += mu.p[i] * std::exp(2.0 * h * vals[oi]);
        }
        r[which] = 1.0 / (1.0 + ex);
    }
    return {r[0], r[1]};
}

}  // namespace gibbsium

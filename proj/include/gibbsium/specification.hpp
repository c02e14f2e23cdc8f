#pragma once

#include <functional>
#include <utility>

#include "potential.hpp"
#include "prob_table.hpp"

namespace gibbsium {

// Gibbs kernel gamma_Lambda(.|omega) = exp(-H_Lambda(.|omega)) / Z as an
// exact table. omega must cover the range-r shell of the box.
inline ProbTable kernel(const FiniteRangePotential& phi, const BoxPtr& box, const Config& omega) {
    ProbTable out = ProbTable::zero(box, phi.alphabet);
    auto ch = compile_hamiltonian(phi, *box, *omega.box);
    auto od = to_digits(phi, omega.vals);
    int m = (int)phi.alphabet.size();
    std::vector<double> lw(out.nconf());
    std::vector<int> digits;
    for (uint64_t i = 0; i < out.nconf(); ++i) {
        idx_to_digits(i, box->size(), m, digits);
        lw[i] = -ch.energy(digits.data(), od.data());
    }
    out.p = probs_from_logweights(lw);
    return out;
}

// Max deviation (total variation, i.e. max over events) between the composed
// kernel gamma_{outer} gamma_{inner} and gamma_{outer} itself (Def 2.1).
inline double check_consistency(const FiniteRangePotential& phi, const BoxPtr& inner,
                                const BoxPtr& outer, const Config& omega) {
    for (const auto& s : inner->sites)
        if (!outer->contains(s)) throw std::invalid_argument("check_consistency: nesting violated");
    ProbTable gouter = kernel(phi, outer, omega);
    // boundary sites the inner kernel needs: shell(inner) split between outer
    // box and omega
    BoxPtr ishell = Box::make(phi.dim, boundary_shell(*inner, std::max(1, phi.range())));
    ProbTable composed = ProbTable::zero(outer, phi.alphabet);
    int m = (int)phi.alphabet.size();
    std::vector<int> odig, idig, cdig(outer->size());
    std::vector<int> shellvals(ishell->size());
    for (uint64_t i = 0; i < gouter.nconf(); ++i) {
        if (gouter.p[i] == 0.0) continue;
        idx_to_digits(i, outer->size(), m, odig);
        // inner-kernel boundary: from the outer configuration where available,
        // else from omega
        for (int j = 0; j < ishell->size(); ++j) {
            const Site& s = ishell->sites[j];
            if (outer->contains(s))
                shellvals[j] = phi.alphabet[odig[outer->idx(s)]];
            else
                shellvals[j] = omega.at(s);
        }
        Config sconf(ishell, shellvals);
        ProbTable ginner = kernel(phi, inner, sconf);
        for (uint64_t k = 0; k < ginner.nconf(); ++k) {
            idx_to_digits(k, inner->size(), m, idig);
            cdig = odig;
            for (int j = 0; j < inner->size(); ++j) cdig[outer->idx(inner->sites[j])] = idig[j];
            composed.p[digits_to_idx(cdig, m)] += gouter.p[i] * ginner.p[k];
        }
    }
    return total_variation(composed, gouter);
}

// Quasilocality oscillation: with g(fill) = gamma_box f(fill), returns
// sup over fillings fixed on Lambda_n of (sup - inf over the rest of the
// shell). f(innerVals, shellVals) is any local function on box u shell.
inline double oscillation(const FiniteRangePotential& phi, const BoxPtr& box,
                          const std::function<double(const std::vector<int>&, const std::vector<int>&)>& f,
                          int n) {
    BoxPtr shell = Box::make(phi.dim, boundary_shell(*box, std::max(1, phi.range())));
    int m = (int)phi.alphabet.size();
    // split shell sites into those inside Lambda_n (held fixed) and outside
    std::vector<int> fixed_pos, free_pos;
    for (int j = 0; j < shell->size(); ++j) {
        int sup = 0;
        for (int c : shell->sites[j]) sup = std::max(sup, std::abs(c));
        (sup <= n ? fixed_pos : free_pos).push_back(j);
    }
    uint64_t nfix = pow_u(m, (int)fixed_pos.size());
    uint64_t nfree = pow_u(m, (int)free_pos.size());
    std::vector<int> shellvals(shell->size()), fd, fr, innervals;
    double worst = 0.0;
    for (uint64_t a = 0; a < nfix; ++a) {
        idx_to_digits(a, (int)fixed_pos.size(), m, fd);
        double lo = infinite(), hi = -infinite();
        for (uint64_t b = 0; b < nfree; ++b) {
            idx_to_digits(b, (int)free_pos.size(), m, fr);
            for (size_t j = 0; j < fixed_pos.size(); ++j) shellvals[fixed_pos[j]] = phi.alphabet[fd[j]];
            for (size_t j = 0; j < free_pos.size(); ++j) shellvals[free_pos[j]] = phi.alphabet[fr[j]];
            Config w(shell, shellvals);
            ProbTable g = kernel(phi, box, w);
            double val = 0.0;
            for (uint64_t i = 0; i < g.nconf(); ++i) {
                g.values_of(i, innervals);
                val += g.p[i] * f(innervals, shellvals);
            }
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

// D(sigma) = E^+_{{0}}(sigma|sigma) = log gamma_0(sigma|sigma)/gamma_0(+|sigma),
// evaluated from a window configuration around the origin (window radius >=
// range).
inline double relative_energy_D(const FiniteRangePotential& phi, const Config& window) {
    Site o = site_origin(phi.dim);
    if (!window.box->contains(o)) throw std::invalid_argument("relative_energy_D: window misses origin");
    BoxPtr site0 = Box::make(phi.dim, {o});
    BoxPtr shell = Box::make(phi.dim, boundary_shell(*site0, std::max(1, phi.range())));
    std::vector<int> sv(shell->size());
    for (int j = 0; j < shell->size(); ++j) sv[j] = window.at(shell->sites[j]);  // throws if too small
    ProbTable g = kernel(phi, site0, Config(shell, sv));
    double ps = g.p[g.index_of_values({window.at(o)})];
    double pp = g.p[g.index_of_values({phi.plus_state})];
    return std::log(ps) - std::log(pp);
}

// Telescoping configuration T_Lambda^omega[x, sigma, +]: sigma at sites <= x
// inside Lambda, + above x inside Lambda, omega outside.
inline Config telescoping_config(const FiniteRangePotential& phi, const Config& sigma,
                                 const Config& omega, const Site& x) {
    // combined carrier: Lambda u shell
    std::vector<Site> all = sigma.box->sites;
    for (const auto& s : omega.box->sites) all.push_back(s);
    BoxPtr carrier = Box::make(phi.dim, std::move(all));
    std::vector<int> v(carrier->size());
    for (int i = 0; i < carrier->size(); ++i) {
        const Site& s = carrier->sites[i];
        if (sigma.box->contains(s))
            v[i] = lex_leq(s, x) ? sigma.at(s) : phi.plus_state;
        else
            v[i] = omega.at(s);
    }
    return Config(carrier, std::move(v));
}

// Both sides of the telescoping identity (Eq. 3.7):
//   direct     = log gamma_Lambda(sigma|omega) / gamma_Lambda(+|omega)
//   telescoped = sum_{x in Lambda, lex order} E_x^+(sigma | T[x, sigma, +])
inline std::pair<double, double> telescope_E(const FiniteRangePotential& phi, const Config& sigma,
                                             const Config& omega) {
    ProbTable g = kernel(phi, sigma.box, omega);
    Config allplus = Config::constant(sigma.box, phi.plus_state);
    double direct = std::log(g.prob_of(sigma)) - std::log(g.prob_of(allplus));

    double tele = 0.0;
    int r = std::max(1, phi.range());
    for (const auto& x : sigma.box->sites) {  // box sites are lex-sorted
        Config T = telescoping_config(phi, sigma, omega, x);
        BoxPtr sx = Box::make(phi.dim, {x});
        BoxPtr shx = Box::make(phi.dim, boundary_shell(*sx, r));
        std::vector<int> sv(shx->size());
        for (int j = 0; j < shx->size(); ++j) sv[j] = T.at(shx->sites[j]);
        ProbTable gx = kernel(phi, sx, Config(shx, sv));
        double ps = gx.p[gx.index_of_values({sigma.at(x)})];
        double pp = gx.p[gx.index_of_values({phi.plus_state})];
        tele += std::log(ps) - std::log(pp);
    }
    return {direct, tele};
}

// Continuity profile for a finite-volume surrogate table: osc_n(omega) =
// sup over exterior fillings agreeing with omega on Lambda_n of
// |E[f | ext] - E[f | omega]|. Nonincreasing in n by construction.
inline std::vector<double> continuity_profile(
    const ProbTable& joint, const BoxPtr& inner, const Config& omega_ext,
    const std::function<double(const std::vector<int>&)>& f, int n_max) {
    // exterior sites (inside the table's box, outside inner)
    std::vector<int> ext_pos;
    for (int i = 0; i < joint.nsites(); ++i)
        if (!inner->contains(joint.box->sites[i])) ext_pos.push_back(i);
    int m = (int)joint.alphabet.size();
    uint64_t next = pow_u(m, (int)ext_pos.size());
    // E[f | each exterior filling]
    std::vector<double> num(next, 0.0), den(next, 0.0);
    std::vector<int> digits, vals;
    std::vector<int> extd(ext_pos.size());
    for (uint64_t i = 0; i < joint.nconf(); ++i) {
        if (joint.p[i] == 0.0) continue;
        idx_to_digits(i, joint.nsites(), m, digits);
        for (size_t j = 0; j < ext_pos.size(); ++j) extd[j] = digits[ext_pos[j]];
        uint64_t e = digits_to_idx(extd, m);
        joint.values_of(i, vals);
        num[e] += joint.p[i] * f(vals);
        den[e] += joint.p[i];
    }
    // reference filling
    for (size_t j = 0; j < ext_pos.size(); ++j) {
        const Site& s = joint.box->sites[ext_pos[j]];
        int d = -1;
        for (int a = 0; a < m; ++a)
            if (joint.alphabet[a] == omega_ext.at(s)) d = a;
        extd[j] = d;
    }
    uint64_t ref = digits_to_idx(extd, m);
    if (den[ref] <= 0.0) throw std::runtime_error("continuity_profile: reference has zero probability");
    double gref = num[ref] / den[ref];
    std::vector<int> refd(extd);

    std::vector<double> profile;
    std::vector<int> ed;
    for (int n = 0; n <= n_max; ++n) {
        double worst = 0.0;
        for (uint64_t e = 0; e < next; ++e) {
            if (den[e] <= 0.0) continue;
            idx_to_digits(e, (int)ext_pos.size(), m, ed);
            bool agrees = true;
            for (size_t j = 0; j < ext_pos.size() && agrees; ++j) {
                int sup = 0;
                for (int c : joint.box->sites[ext_pos[j]]) sup = std::max(sup, std::abs(c));
                if (sup <= n && ed[j] != refd[j]) agrees = false;
            }
            if (!agrees) continue;
            worst = std::max(worst, std::abs(num[e] / den[e] - gref));
        }
        profile.push_back(worst);
    }
    return profile;
}

}  // namespace gibbsium

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "measure.hpp"
#include "prob_table.hpp"
#include "rng.hpp"

namespace gibbsium {

// ---- connected components of occupied sites (union-find) --------------------

struct ClusterLabeling {
    std::vector<int> label;                 // per box-site index; -1 = empty
    std::vector<std::vector<int>> clusters; // cluster id -> site indices
    std::vector<bool> open;                 // cluster touches the box edge
};

struct DisjointSet {
    std::vector<int> parent, rank_;
    explicit DisjointSet(int n) : parent(n), rank_(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }
};

// occ: 0/1 values on its box. Nearest-neighbor components inside the box.
inline ClusterLabeling cluster_find(const Config& occ) {
    const Box& box = *occ.box;
    int n = box.size(), d = box.dim;
    DisjointSet ds(n);
    for (int i = 0; i < n; ++i) {
        if (!occ.vals[i]) continue;
        for (int k = 0; k < d; ++k) {
            Site nb = box.sites[i];
            nb[k] += 1;
            if (box.contains(nb)) {
                int j = box.idx(nb);
                if (occ.vals[j]) ds.unite(i, j);
            }
        }
    }
    ClusterLabeling out;
    out.label.assign(n, -1);
    std::vector<int> root_to_id(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!occ.vals[i]) continue;
        int r = ds.find(i);
        if (root_to_id[r] < 0) {
            root_to_id[r] = (int)out.clusters.size();
            out.clusters.emplace_back();
            out.open.push_back(false);
        }
        int id = root_to_id[r];
        out.label[i] = id;
        out.clusters[id].push_back(i);
        for (int k = 0; k < d; ++k)
            for (int s : {-1, 1}) {
                Site nb = box.sites[i];
                nb[k] += s;
                if (!box.contains(nb)) out.open[id] = true;
            }
    }
    return out;
}

// ---- GriSing field -----------------------------------------------------------

// Free-boundary Ising weight of a spin assignment on one cluster:
// exp(beta * sum over nn bonds inside the cluster).
inline double cluster_bond_sum(const Box& box, const std::vector<int>& sites,
                               const std::vector<int>& spins, const std::vector<int>& pos_in_cluster) {
    double s = 0.0;
    int d = box.dim;
    for (size_t a = 0; a < sites.size(); ++a)
        for (int k = 0; k < d; ++k) {
            Site nb = box.sites[sites[a]];
            nb[k] += 1;
            if (!box.contains(nb)) continue;
            int j = box.idx(nb);
            if (pos_in_cluster[j] >= 0 && pos_in_cluster[sites[a]] >= 0)
                s += spins[pos_in_cluster[sites[a]]] * spins[pos_in_cluster[j]];
        }
    return s;
}

struct GrisingSample {
    Config xi;                    // values in {-1, 0, +1}
    std::vector<bool> open_cluster;
    std::string method;           // "exact" or "heatbath"
};

// xi(x) = sigma(x) eta(x): Bernoulli(p) occupancies, independent free-bc
// Ising spins per occupied cluster. Exact per-cluster sampling when
// 2^|C| <= 2^20, heat-bath otherwise (method recorded).
inline GrisingSample grising_sample(double p, double beta, const BoxPtr& box, uint64_t seed,
                                    int heatbath_sweeps = 64) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("grising_sample: need 0 <= p < 1");
    Rng rng(seed, 0x67726973);  // "gris"
    int n = box->size();
    std::vector<int> occ(n);
    for (int i = 0; i < n; ++i) occ[i] = rng.bernoulli(p) ? 1 : 0;
    Config occ_cfg(box, occ);
    ClusterLabeling cl = cluster_find(occ_cfg);

    std::vector<int> xi(n, 0);
    std::vector<int> pos(n, -1);
    GrisingSample out;
    out.method = "exact";
    for (size_t c = 0; c < cl.clusters.size(); ++c) {
        const auto& sites = cl.clusters[c];
        int k = (int)sites.size();
        std::fill(pos.begin(), pos.end(), -1);
        for (int j = 0; j < k; ++j) pos[sites[j]] = j;
        std::vector<int> spins(k);
        Rng crng = rng.split();
        if (k <= 20) {
            // exact: CDF over all 2^k spin assignments
            uint64_t nc = uint64_t(1) << k;
            std::vector<double> lw(nc);
            std::vector<int> tmp(k);
            for (uint64_t s = 0; s < nc; ++s) {
                for (int j = 0; j < k; ++j) tmp[j] = (s >> j & 1) ? 1 : -1;
                lw[s] = beta * cluster_bond_sum(*box, sites, tmp, pos);
            }
            auto prob = probs_from_logweights(lw);
            double uvar = crng.uniform(), acc = 0.0;
            uint64_t pick = nc - 1;
            for (uint64_t s = 0; s < nc; ++s) {
                acc += prob[s];
                if (uvar < acc) {
                    pick = s;
                    break;
                }
            }
            for (int j = 0; j < k; ++j) spins[j] = (pick >> j & 1) ? 1 : -1;
        } else {
            out.method = "heatbath";
            for (int j = 0; j < k; ++j) spins[j] = crng.pm_one();
            for (int sweep = 0; sweep < heatbath_sweeps; ++sweep)
                for (int j = 0; j < k; ++j) {
                    double field = 0.0;
                    for (int kk = 0; kk < box->dim; ++kk)
                        for (int dir : {-1, 1}) {
                            Site nb = box->sites[sites[j]];
                            nb[kk] += dir;
                            if (box->contains(nb) && pos[box->idx(nb)] >= 0)
                                field += spins[pos[box->idx(nb)]];
                        }
                    double pp = 1.0 / (1.0 + std::exp(-2.0 * beta * field));
                    spins[j] = crng.uniform() < pp ? 1 : -1;
                }
        }
        for (int j = 0; j < k; ++j) xi[sites[j]] = spins[j];
    }
    out.xi = Config(box, std::move(xi));
    out.open_cluster.assign(cl.open.begin(), cl.open.end());
    return out;
}

// Exact finite-volume GriSing table over {-1, 0, +1} on a small box (clusters
// computed inside the box: the honest finite-volume surrogate).
inline ProbTable grising_table(double p, double beta, const BoxPtr& box) {
    ProbTable out = ProbTable::zero(box, {-1, 0, 1});
    int n = box->size();
    std::vector<int> digits, occ(n), pos(n);
    // cache per-occupancy cluster partition functions lazily: recompute per xi
    // (boxes here are tiny, so the direct product formula is fine)
    for (uint64_t i = 0; i < out.nconf(); ++i) {
        idx_to_digits(i, n, 3, digits);
        double logp = 0.0;
        for (int j = 0; j < n; ++j) {
            occ[j] = digits[j] != 1 ? 1 : 0;  // alphabet {-1,0,1}: digit 1 is 0
            logp += occ[j] ? std::log(p) : std::log(1.0 - p);
        }
        Config occ_cfg(box, occ);
        ClusterLabeling cl = cluster_find(occ_cfg);
        std::fill(pos.begin(), pos.end(), -1);
        for (size_t c = 0; c < cl.clusters.size(); ++c)
            for (size_t j = 0; j < cl.clusters[c].size(); ++j) pos[cl.clusters[c][j]] = (int)j;
        for (size_t c = 0; c < cl.clusters.size(); ++c) {
            const auto& sites = cl.clusters[c];
            int k = (int)sites.size();
            std::vector<int> spins(k);
            for (int j = 0; j < k; ++j) spins[j] = out.alphabet[digits[sites[j]]];
            double wnum = beta * cluster_bond_sum(*box, sites, spins, pos);
            // partition function of the cluster
            double z = 0.0;
            std::vector<int> tmp(k);
            for (uint64_t s = 0; s < (uint64_t(1) << k); ++s) {
                for (int j = 0; j < k; ++j) tmp[j] = (s >> j & 1) ? 1 : -1;
                z += std::exp(beta * cluster_bond_sum(*box, sites, tmp, pos));
            }
            logp += wnum - std::log(z);
        }
        out.p[i] = std::exp(logp);
    }
    return out;
}

struct ZeroRateResult {
    double exact;       // log(1 - p)
    double empirical;   // (1/|Lambda|) log Phat
    double lo, hi;      // transformed Wilson bounds (z = 3)
    int hits, samples;
};

// log K_{p,beta}(0_Lambda) / |Lambda| = log(1-p) at every n (xi = 0 on Lambda
// iff eta = 0 there). Empirical estimate from seeded samples with a Wilson
// interval at z = 3.
inline ZeroRateResult grising_zero_rate(double p, double beta, int n, int d, int samples,
                                        uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("grising_zero_rate: need 0 <= p < 1");
    BoxPtr box = Box::cube(n, d);
    int L = box->size();
    ZeroRateResult res{};
    res.exact = std::log1p(-p);
    res.samples = samples;
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
        GrisingSample g = grising_sample(p, beta, box, Rng::mix(seed, (uint64_t)s));
        bool zero = true;
        for (int v : g.xi.vals)
            if (v != 0) zero = false;
        if (zero) ++hits;
    }
    res.hits = hits;
    const double z = 3.0;
    double nn = samples, ph = hits / nn;
    double denom = 1.0 + z * z / nn;
    double center = (ph + z * z / (2 * nn)) / denom;
    double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / denom;
    double plo = std::max(center - half, 0.0), phi_ = std::min(center + half, 1.0);
    res.empirical = hits > 0 ? std::log(ph) / L : -infinite();
    res.lo = plo > 0 ? std::log(plo) / L : -infinite();
    res.hi = phi_ > 0 ? std::log(phi_) / L : -infinite();
    return res;
}

// ---- decimation --------------------------------------------------------------

inline bool divisible(const Site& s, int b) {
    for (int c : s)
        if (c % b != 0) return false;
    return true;
}

inline Site site_div(const Site& s, int b) {
    Site r(s.size());
    for (size_t i = 0; i < s.size(); ++i) r[i] = s[i] / b;
    return r;
}

// Restriction to the sublattice b Z^d through the origin, reindexed by x -> x/b.
inline Config decimate(const Config& c, int b) {
    if (b < 1) throw std::invalid_argument("decimate: b >= 1");
    std::vector<Site> keep;
    std::vector<int> vals;
    for (int i = 0; i < c.box->size(); ++i)
        if (divisible(c.box->sites[i], b)) {
            keep.push_back(site_div(c.box->sites[i], b));
            vals.push_back(c.vals[i]);
        }
    return Config(Box::make(c.box->dim, std::move(keep)), std::move(vals));
}

inline ProbTable decimate(const ProbTable& mu, int b) {
    if (b < 1) throw std::invalid_argument("decimate: b >= 1");
    std::vector<Site> keep;
    for (const auto& s : mu.box->sites)
        if (divisible(s, b)) keep.push_back(s);
    if (keep.empty()) throw std::invalid_argument("decimate: sublattice window does not fit");
    ProbTable marg = marginal(mu, Box::make(mu.box->dim, keep));
    std::vector<Site> re;
    for (const auto& s : keep) re.push_back(site_div(s, b));
    ProbTable out;
    out.box = Box::make(mu.box->dim, std::move(re));
    out.alphabet = marg.alphabet;
    out.p = std::move(marg.p);  // same lex order after division by b
    return out;
}

}  // namespace gibbsium

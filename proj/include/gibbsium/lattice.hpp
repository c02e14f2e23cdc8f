#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace gibbsium {

// A lattice site is an integer d-vector. std::vector's operator< is exactly
// the lexicographic order used throughout (compare coordinates in index
// order), so lex_leq can lean on it directly.
using Site = std::vector<int>;

inline Site site_origin(int d) { return Site(d, 0); }

inline bool lex_leq(const Site& x, const Site& y) {
    if (x.size() != y.size()) throw std::invalid_argument("lex_leq: dimension mismatch");
    return x <= y;
}

inline Site site_add(const Site& a, const Site& b) {
    Site r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Site site_sub(const Site& a, const Site& b) {
    Site r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline int sup_dist(const Site& a, const Site& b) {
    int m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Finite sublattice. Sites are kept sorted in lexicographic order; the index
// map gives each site a dense index used by Config and by the enumeration
// code. Immutable after construction, shared via BoxPtr.
struct Box;
using BoxPtr = std::shared_ptr<const Box>;

struct Box {
    int dim = 0;
    std::vector<Site> sites;     // sorted ascending (lex)
    std::map<Site, int> index;

    static BoxPtr make(int d, std::vector<Site> s) {
        auto b = std::make_shared<Box>();
        b->dim = d;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (const auto& x : s)
            if ((int)x.size() != d) throw std::invalid_argument("Box::make: site dimension mismatch");
        b->sites = std::move(s);
        for (int i = 0; i < (int)b->sites.size(); ++i) b->index[b->sites[i]] = i;
        return b;
    }

    // Centered cube Lambda_n = [-n, n]^d, (2n+1)^d sites.
    static BoxPtr cube(int n, int d) {
        if (n < 0 || d < 1) throw std::invalid_argument("cube: need n >= 0, d >= 1");
        std::vector<Site> s;
        Site cur(d, -n);
        while (true) {
            s.push_back(cur);
            int k = d - 1;
            while (k >= 0 && cur[k] == n) cur[k--] = -n;
            if (k < 0) break;
            ++cur[k];
        }
        return make(d, std::move(s));
    }

    int size() const { return (int)sites.size(); }
    bool contains(const Site& s) const { return index.count(s) != 0; }
    int idx(const Site& s) const {
        auto it = index.find(s);
        if (it == index.end()) throw std::out_of_range("Box::idx: site not in box");
        return it->second;
    }
};

// All sites outside the box within sup-distance <= r of it.
inline std::vector<Site> boundary_shell(const Box& box, int r) {
    if (r < 0) throw std::invalid_argument("boundary_shell: r < 0");
    std::vector<Site> out;
    if (r == 0 || box.sites.empty()) return out;
    std::map<Site, char> seen;
    // Walk the r-neighborhood of every box site and keep exterior points.
    for (const auto& s : box.sites) {
        Site off(box.dim, -r);
        while (true) {
            Site cand = site_add(s, off);
            if (!box.contains(cand)) seen.emplace(cand, 1);
            int k = box.dim - 1;
            while (k >= 0 && off[k] == r) off[k--] = -r;
            if (k < 0) break;
            ++off[k];
        }
    }
    out.reserve(seen.size());
    for (const auto& kv : seen) out.push_back(kv.first);
    return out;  // map iteration is already lex-sorted
}

// Value assignment over a box. vals[i] belongs to box->sites[i].
struct Config {
    BoxPtr box;
    std::vector<int> vals;

    Config() = default;
    Config(BoxPtr b, std::vector<int> v) : box(std::move(b)), vals(std::move(v)) {
        if ((int)vals.size() != box->size())
            throw std::invalid_argument("Config: value count != box size");
    }
    static Config constant(BoxPtr b, int v) { return Config(b, std::vector<int>(b->size(), v)); }

    int at(const Site& s) const { return vals[box->idx(s)]; }
};

// sigma on {x : x <= 0 lexicographically}, xi elsewhere. Both on one box.
inline Config concat(const Config& sigma, const Config& xi) {
    if (sigma.box != xi.box && sigma.box->sites != xi.box->sites)
        throw std::invalid_argument("concat: box mismatch");
    Site o = site_origin(sigma.box->dim);
    std::vector<int> v(sigma.vals.size());
    for (int i = 0; i < sigma.box->size(); ++i)
        v[i] = lex_leq(sigma.box->sites[i], o) ? sigma.vals[i] : xi.vals[i];
    return Config(sigma.box, std::move(v));
}

// (tau_x w)(y) = w(x + y); the carrier box shifts to {s - x : s in box}.
inline Config translate(const Config& w, const Site& x) {
    std::vector<Site> s;
    s.reserve(w.box->size());
    for (const auto& p : w.box->sites) s.push_back(site_sub(p, x));
    return Config(Box::make(w.box->dim, std::move(s)), w.vals);
}

}  // namespace gibbsium

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbsium/measure.hpp"
#include "gibbsium/transform.hpp"

using namespace gibbsium;

TEST_CASE("cluster labeling on a d=2 cross") {
    BoxPtr box = Box::cube(1, 2);
    // occupy the four corners: four singleton clusters, all touching the edge
    std::vector<int> occ(box->size(), 0);
    occ[box->idx({-1, -1})] = occ[box->idx({-1, 1})] = occ[box->idx({1, -1})] = occ[box->idx({1, 1})] = 1;
    ClusterLabeling cl = cluster_find(Config(box, occ));
    CHECK(cl.clusters.size() == 4);
    for (bool o : cl.open) CHECK(o);
    // occupy the middle row: one cluster of 3
    std::fill(occ.begin(), occ.end(), 0);
    occ[box->idx({0, -1})] = occ[box->idx({0, 0})] = occ[box->idx({0, 1})] = 1;
    cl = cluster_find(Config(box, occ));
    CHECK(cl.clusters.size() == 1);
    CHECK(cl.clusters[0].size() == 3);
}

TEST_CASE("grising sample: xi vanishes exactly off clusters, spins pm 1 on them") {
    BoxPtr box = Box::cube(3, 1);
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        GrisingSample g = grising_sample(0.5, 1.0, box, seed);
        CHECK(g.method == "exact");
        for (int v : g.xi.vals) CHECK((v == -1 || v == 0 || v == 1));
    }
}

TEST_CASE("grising sample is seed-deterministic") {
    BoxPtr box = Box::cube(2, 2);
    GrisingSample a = grising_sample(0.4, 0.9, box, 77);
    GrisingSample b = grising_sample(0.4, 0.9, box, 77);
    CHECK(a.xi.vals == b.xi.vals);
    GrisingSample c = grising_sample(0.4, 0.9, box, 78);
    CHECK(a.xi.vals != c.xi.vals);  // overwhelmingly likely for 25 sites
}

TEST_CASE("grising table: exact zero rate and single-site law") {
    for (double p : {0.1, 0.3, 0.5}) {
        BoxPtr box = Box::cube(1, 1);
        ProbTable K = grising_table(p, 1.0, box);
        double tot = 0.0;
        for (double x : K.p) tot += x;
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
        // K(0_Lambda) = (1-p)^|Lambda| exactly
        Config zero = Config::constant(box, 0);
        CHECK(std::log(K.prob_of(zero)) / box->size() ==
              doctest::Approx(std::log(1 - p)).epsilon(1e-12));
        // single-site marginal: P(0) = 1-p, P(+1) = P(-1) = p/2
        ProbTable m = marginal(K, Box::make(1, {site_origin(1)}));
        CHECK(m.p[m.index_of_values({0})] == doctest::Approx(1 - p).epsilon(1e-12));
        CHECK(m.p[m.index_of_values({1})] == doctest::Approx(p / 2).epsilon(1e-12));
        CHECK(m.p[m.index_of_values({-1})] == doctest::Approx(p / 2).epsilon(1e-12));
    }
}

TEST_CASE("grising sampler matches the exact table (chi-square style, 3 sigma)") {
    double p = 0.5, beta = 1.0;
    BoxPtr box = Box::cube(1, 1);
    ProbTable K = grising_table(p, beta, box);
    int N = 20000;
    std::vector<int> counts(K.nconf(), 0);
    for (int s = 0; s < N; ++s) {
        GrisingSample g = grising_sample(p, beta, box, Rng::mix(4242, (uint64_t)s));
        ++counts[K.index_of_values(g.xi.vals)];
    }
    for (uint64_t i = 0; i < K.nconf(); ++i) {
        double expect = N * K.p[i];
        double sd = std::sqrt(N * K.p[i] * (1 - K.p[i]));
        CHECK(std::abs(counts[i] - expect) <= 3.0 * sd + 3.0);
    }
}

TEST_CASE("grising zero rate: exact identity and empirical coverage") {
    for (double p : {0.1, 0.3, 0.5}) {
        ZeroRateResult r = grising_zero_rate(p, 1.0, 2, 1, 5000, 7);
        CHECK(r.exact == doctest::Approx(std::log(1 - p)).epsilon(1e-12));
        CHECK(r.lo <= r.exact);
        CHECK(r.exact <= r.hi);
    }
}

TEST_CASE("decimation of configs picks b-spaced sites") {
    BoxPtr box = Box::cube(2, 1);
    Config c(box, {10, 20, 30, 40, 50});
    Config dec = decimate(c, 2);
    CHECK(dec.box->sites == std::vector<Site>{{-1}, {0}, {1}});
    CHECK(dec.vals == std::vector<int>{10, 30, 50});
    Config same = decimate(c, 1);
    CHECK(same.vals == c.vals);
}

TEST_CASE("decimation of tables commutes with marginalization") {
    FiniteRangePotential phi = ising_potential(1, 0.9, 0.0);
    BoxPtr box = Box::cube(2, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    ProbTable mu = kernel(phi, box, Config::constant(shell, 1));
    ProbTable dec = decimate(mu, 2);
    ProbTable marg = marginal(mu, Box::make(1, {{-2}, {0}, {2}}));
    for (size_t i = 0; i < dec.p.size(); ++i) CHECK(dec.p[i] == doctest::Approx(marg.p[i]).epsilon(1e-14));
}

TEST_CASE("decimated domination surrogate, d=1 beta=1 b=2") {
    FiniteRangePotential phi = ising_potential(1, 1.0, 0.0);
    BoxPtr big = Box::cube(3, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*big, 1));
    ProbTable minus = decimate(kernel(phi, big, Config::constant(shell, -1)), 2);
    ProbTable plus = decimate(kernel(phi, big, Config::constant(shell, 1)), 2);
    CHECK(minus.nsites() == 3);
    CHECK(check_domination(minus, plus));
}

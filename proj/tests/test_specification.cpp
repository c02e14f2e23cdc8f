#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbsium/random_instances.hpp"
#include "gibbsium/specification.hpp"

using namespace gibbsium;

TEST_CASE("single-site Ising kernel closed form") {
    // both neighbors plus: gamma_0(+|w) = 1 / (1 + e^{-4 beta})
    for (double beta : {0.3, 1.0}) {
        FiniteRangePotential phi = ising_potential(1, beta, 0.0);
        BoxPtr box = Box::make(1, {site_origin(1)});
        BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
        ProbTable g = kernel(phi, box, Config(shell, {1, 1}));
        CHECK(g.p[g.index_of_values({1})] ==
              doctest::Approx(1.0 / (1.0 + std::exp(-4.0 * beta))).epsilon(1e-14));
    }
}

TEST_CASE("beta=0 kernel is uniform") {
    FiniteRangePotential phi = ising_potential(2, 0.0, 0.0);
    phi.add_term({site_origin(2)}, [](const std::vector<int>&) { return 0.0; });
    BoxPtr box = Box::cube(1, 2);
    BoxPtr shell = Box::make(2, boundary_shell(*box, 1));
    ProbTable g = kernel(phi, box, Config::constant(shell, 1));
    for (double p : g.p) CHECK(p == doctest::Approx(1.0 / 512.0).epsilon(1e-13));
}

TEST_CASE("consistency for random potentials") {
    Rng rng(3, 0);
    for (int t = 0; t < 15; ++t) {
        FiniteRangePotential phi = random_finite_range_potential(rng, 1, 1);
        BoxPtr outer = Box::make(1, {{0}, {1}, {2}});
        BoxPtr inner = Box::make(1, {{1}});
        BoxPtr shell = Box::make(1, boundary_shell(*outer, std::max(1, phi.range())));
        Config omega = random_spin_config(rng, shell);
        CHECK(check_consistency(phi, inner, outer, omega) <= 1e-12);
    }
}

TEST_CASE("relative energy D, d=1 Ising all-minus window") {
    // D(all-minus) = log gamma_0(-|-) - log gamma_0(+|-) = 4 beta
    for (double beta : {0.4, 1.1}) {
        FiniteRangePotential phi = ising_potential(1, beta, 0.0);
        BoxPtr w = Box::cube(1, 1);
        CHECK(relative_energy_D(phi, Config::constant(w, -1)) ==
              doctest::Approx(4.0 * beta).epsilon(1e-12));
    }
}

TEST_CASE("telescoping identity on random instances") {
    Rng rng(9, 0);
    for (int t = 0; t < 30; ++t) {
        int d = 1 + (int)rng.below(2);
        FiniteRangePotential phi = random_finite_range_potential(rng, d);
        BoxPtr box = random_box(rng, d, 6);
        Config sigma = random_spin_config(rng, box);
        BoxPtr shell = Box::make(d, boundary_shell(*box, std::max(1, phi.range())));
        Config omega = random_spin_config(rng, shell);
        auto [direct, tele] = telescope_E(phi, sigma, omega);
        CHECK(std::abs(direct - tele) <= 1e-9);
    }
}

TEST_CASE("telescoping configuration splits at x") {
    FiniteRangePotential phi = ising_potential(1, 1.0, 0.0);
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    Config sigma(box, {-1, -1, -1});
    Config omega(shell, {-1, -1});
    Config T = telescoping_config(phi, sigma, omega, {0});
    CHECK(T.at({-1}) == -1);  // sigma (below x)
    CHECK(T.at({0}) == -1);   // sigma (at x)
    CHECK(T.at({1}) == 1);    // plus (above x)
    CHECK(T.at({2}) == -1);   // omega (outside)
}

TEST_CASE("oscillation of the origin spin, d=1 Ising") {
    // gamma_0 sigma_0 varies over the two boundary spins by 2 tanh(2 beta)
    double beta = 0.9;
    FiniteRangePotential phi = ising_potential(1, beta, 0.0);
    BoxPtr box = Box::make(1, {site_origin(1)});
    auto f = [](const std::vector<int>& in, const std::vector<int>&) { return (double)in[0]; };
    double osc0 = oscillation(phi, box, f, 0);
    CHECK(osc0 == doctest::Approx(2.0 * std::tanh(2.0 * beta)).epsilon(1e-12));
    // fixing the whole shell leaves nothing free
    CHECK(oscillation(phi, box, f, 1) == 0.0);
}

TEST_CASE("continuity profile is nonincreasing") {
    FiniteRangePotential phi = ising_potential(1, 0.8, 0.0);
    BoxPtr big = Box::cube(3, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*big, 1));
    ProbTable mu = kernel(phi, big, Config::constant(shell, 1));
    BoxPtr inner = Box::make(1, {site_origin(1)});
    Config omega_ext = Config::constant(big, 1);
    auto f = [&](const std::vector<int>& vals) { return (double)vals[3]; };  // spin at origin
    auto prof = continuity_profile(mu, inner, omega_ext, f, 3);
    for (size_t i = 1; i < prof.size(); ++i) CHECK(prof[i] <= prof[i - 1] + 1e-14);
    CHECK(prof.back() == 0.0);
}

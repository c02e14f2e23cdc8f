#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbsium/disordered.hpp"

using namespace gibbsium;

// Brute-force reference for Chain1D quantities.
static double brute_logZ(const Chain1D& c, const std::vector<int>& pin) {
    int n = c.L();
    double z = 0.0;
    for (uint64_t s = 0; s < (uint64_t(1) << n); ++s) {
        std::vector<int> sp(n);
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            sp[i] = (s >> i & 1) ? 1 : -1;
            if (pin[i] != 0 && sp[i] != pin[i]) ok = false;
        }
        if (!ok) continue;
        double e = 0.0;
        for (int i = 0; i < n; ++i) e += c.f[i] * sp[i];
        for (int i = 0; i + 1 < n; ++i) e += c.beta * sp[i] * sp[i + 1];
        z += std::exp(e);
    }
    return std::log(z);
}

TEST_CASE("Chain1D against brute force") {
    Chain1D c;
    c.beta = 0.8;
    c.f = {0.3, -0.5, 0.0, 0.7, -0.2, 0.1, 0.4};
    int n = c.L();
    std::vector<int> free_pin(n, 0);
    CHECK(c.log_Z() == doctest::Approx(brute_logZ(c, free_pin)).epsilon(1e-12));
    // moments
    std::vector<double> mag, corr;
    c.moments(mag, corr);
    double z = std::exp(c.log_Z());
    std::vector<double> bm(n, 0.0), bc(n - 1, 0.0);
    for (uint64_t s = 0; s < (uint64_t(1) << n); ++s) {
        std::vector<int> sp(n);
        for (int i = 0; i < n; ++i) sp[i] = (s >> i & 1) ? 1 : -1;
        double e = 0.0;
        for (int i = 0; i < n; ++i) e += c.f[i] * sp[i];
        for (int i = 0; i + 1 < n; ++i) e += c.beta * sp[i] * sp[i + 1];
        double w = std::exp(e) / z;
        for (int i = 0; i < n; ++i) bm[i] += w * sp[i];
        for (int i = 0; i + 1 < n; ++i) bc[i] += w * sp[i] * sp[i + 1];
    }
    for (int i = 0; i < n; ++i) CHECK(mag[i] == doctest::Approx(bm[i]).epsilon(1e-11));
    for (int i = 0; i + 1 < n; ++i) CHECK(corr[i] == doctest::Approx(bc[i]).epsilon(1e-11));
    // constrained logZ
    std::vector<int> pin(n, 0);
    pin[0] = 1;
    pin[3] = -1;
    pin[6] = 1;
    CHECK(c.log_Z_constrained(pin) == doctest::Approx(brute_logZ(c, pin)).epsilon(1e-12));
}

TEST_CASE("quenched kernel at beta=0 is a product over sites") {
    double h = 0.6;
    FiniteRangePotential phi = rfim_potential(1, 0.0, h);
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    Config eta(box, {1, -1, 1});
    ProbTable mu = quenched_kernel(phi, box, eta, Config::constant(shell, 1),
                                   Config::constant(shell, 1));
    std::vector<int> vals;
    for (uint64_t i = 0; i < mu.nconf(); ++i) {
        mu.values_of(i, vals);
        double expect = 1.0;
        for (int j = 0; j < 3; ++j)
            expect *= std::exp(h * eta.vals[j] * vals[j]) / (2.0 * std::cosh(h));
        CHECK(mu.p[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("quenched kernel matches Chain1D probabilities") {
    double beta = 0.9, h = 0.4;
    FiniteRangePotential phi = rfim_potential(1, beta, h);
    BoxPtr box = Box::cube(2, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    std::vector<int> etav = {1, -1, -1, 1, -1};
    ProbTable mu = quenched_kernel(phi, box, Config(box, etav), Config::constant(shell, 1),
                                   Config::constant(shell, 1));
    Chain1D c = rfim_chain(etav, beta, h, +1, +1);
    double lz = c.log_Z();
    std::vector<int> vals;
    for (uint64_t i = 0; i < mu.nconf(); ++i) {
        mu.values_of(i, vals);
        double e = 0.0;
        for (int j = 0; j < 5; ++j) e += c.f[j] * vals[j];
        for (int j = 0; j + 1 < 5; ++j) e += beta * vals[j] * vals[j + 1];
        CHECK(mu.p[i] == doctest::Approx(std::exp(e - lz)).epsilon(1e-11));
    }
}

TEST_CASE("joint table: eta marginal is the product disorder law") {
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    DisorderLaw P;
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    ProbTable K = joint_table(phi, P, box, Config::constant(shell, 1), Config::constant(shell, 1));
    ProbTable Kd = eta_marginal(K);
    for (double p : Kd.p) CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
    // spin conditional given eta recovers the quenched kernel
    std::vector<int> etav = {1, -1, 1};
    ProbTable mu = quenched_kernel(phi, box, Config(box, etav), Config::constant(shell, 1),
                                   Config::constant(shell, 1));
    std::vector<int> vals;
    for (uint64_t i = 0; i < mu.nconf(); ++i) {
        mu.values_of(i, vals);
        std::vector<int> jv(3);
        for (int j = 0; j < 3; ++j) jv[j] = joint_code(vals[j], etav[j]);
        CHECK(K.p[K.index_of_values(jv)] == doctest::Approx(0.125 * mu.p[i]).epsilon(1e-12));
    }
}

TEST_CASE("quenched consistency at fixed disorder") {
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    BoxPtr outer = Box::make(1, {{0}, {1}, {2}, {3}});
    BoxPtr inner = Box::make(1, {{1}, {2}});
    BoxPtr shell = Box::make(1, boundary_shell(*outer, 1));
    std::vector<Site> all = outer->sites;
    for (const auto& s : shell->sites) all.push_back(s);
    BoxPtr carrier = Box::make(1, std::move(all));
    Config eta_all(carrier, {1, -1, 1, 1, -1, 1});
    Config sigma_bar(shell, {-1, 1});
    CHECK(check_consistency_quenched(phi, inner, outer, eta_all, sigma_bar) <= 1e-12);
}

TEST_CASE("delta_H closed form for the RFIM") {
    double beta = 1.0, h = 0.5;
    FiniteRangePotential phi = rfim_potential(1, beta, h);
    BoxPtr lambda = Box::cube(1, 1);
    Config eta1(lambda, {1, 1, -1}), eta2(lambda, {-1, 1, 1});
    auto sigma_all = [](const Site& s) { return (s[0] % 2 == 0) ? 1 : -1; };
    auto eta_out = [](const Site&) { return 1; };
    double dH = delta_H(phi, lambda, sigma_all, eta1, eta2, eta_out);
    // DeltaH = -h sum (eta1 - eta2) sigma over Lambda
    double expect = 0.0;
    for (int j = 0; j < 3; ++j) {
        int x = lambda->sites[j][0];
        int sig = (x % 2 == 0) ? 1 : -1;
        expect += -h * (eta1.vals[j] - eta2.vals[j]) * sig;
    }
    CHECK(dH == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("q factor is 1 at beta=0") {
    double h = 0.5;
    FiniteRangePotential phi = rfim_potential(1, 0.0, h);
    BoxPtr lambda = Box::cube(1, 1);
    BoxPtr S = Box::cube(2, 1);
    BoxPtr sshell = Box::make(1, boundary_shell(*S, 1));
    Config etaS(S, {1, -1, 1, 1, -1});
    ProbTable mu = quenched_kernel(phi, S, etaS, Config::constant(sshell, 1),
                                   Config::constant(sshell, 1));
    Config eta1(lambda, {1, -1, -1});
    Config eta2(lambda, {-1, 1, 1});
    auto eta_out = [&](const Site& s) { return etaS.box->contains(s) ? etaS.at(s) : 1; };
    auto sigma_bar = [](const Site&) { return 1; };
    CHECK(q_factor(mu, phi, lambda, eta1, eta2, eta_out, sigma_bar) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("joint conditional equals direct conditioning at beta=0") {
    double h = 0.5;
    FiniteRangePotential phi = rfim_potential(1, 0.0, h);
    DisorderLaw P;
    BoxPtr lambda = Box::cube(1, 1);
    auto sig_env = [](const Site& s) { return (s[0] % 2 == 0) ? 1 : -1; };
    auto eta_env = [](const Site& s) { return (s[0] % 3 == 0) ? -1 : 1; };
    JointConditionalResult jc = joint_conditional(phi, P, 0.0, h, lambda, sig_env, eta_env, 3);
    BoxPtr big = Box::cube(5, 1);
    BoxPtr bshell = Box::make(1, boundary_shell(*big, 1));
    std::vector<int> sb(bshell->size()), eb(bshell->size());
    for (int j = 0; j < bshell->size(); ++j) {
        sb[j] = sig_env(bshell->sites[j]);
        eb[j] = eta_env(bshell->sites[j]);
    }
    ProbTable direct = joint_conditional_direct(phi, P, big, Config(bshell, sb), Config(bshell, eb),
                                                lambda, sig_env, eta_env);
    CHECK(total_variation(jc.table, direct) <= 1e-12);
    CHECK(jc.norm_defect <= 1e-12);
}

TEST_CASE("boundary constant for d=1 models") {
    // crossing terms of Lambda_n are the two boundary bonds; oscillation 4 beta
    // over two shell sites gives C1 = 2 beta for Ising and RFIM alike
    double beta = 1.0;
    BoxPtr box = Box::cube(2, 1);
    CHECK(boundary_constant_c1(ising_potential(1, beta, 0.3), box) ==
          doctest::Approx(2.0 * beta).epsilon(1e-12));
    CHECK(boundary_constant_c1(rfim_potential(1, beta, 0.5), box) ==
          doctest::Approx(2.0 * beta).epsilon(1e-12));
}

TEST_CASE("quenched relative entropy pm matches tables at n=1") {
    double beta = 1.0, h = 0.5;
    FiniteRangePotential phi = rfim_potential(1, beta, h);
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    for (int e = 0; e < 8; ++e) {
        std::vector<int> etav(3);
        for (int j = 0; j < 3; ++j) etav[j] = (e >> j & 1) ? 1 : -1;
        Config eta(box, etav);
        ProbTable mp = quenched_kernel(phi, box, eta, Config::constant(shell, 1),
                                       Config::constant(shell, 1));
        ProbTable mm = quenched_kernel(phi, box, eta, Config::constant(shell, 1),
                                       Config::constant(shell, -1));
        CHECK(quenched_relent_pm(etav, beta, h) ==
              doctest::Approx(relative_entropy(mp, mm)).epsilon(1e-10));
    }
}

TEST_CASE("entropy bound rows: exact vs table at n=1 and bound holds") {
    auto rows = joint_entropy_bound_1d(1.0, 0.5, {1, 2});
    for (const auto& r : rows) {
        CHECK(r.h_rel >= 0.0);
        CHECK(r.pass);
    }
}

TEST_CASE("Theorem 6.7 decomposition residual vanishes at beta=h=0") {
    for (int n : {1, 2, 3}) {
        EntropyDecomposition d = entropy_decomposition_1d(0.0, 0.0, n);
        CHECK(std::abs(d.residual) <= 1e-12);
        CHECK(std::abs(d.h_rel) <= 1e-12);
    }
}

TEST_CASE("joint specific energy residual vanishes at beta=h=0") {
    for (int n : {1, 2}) {
        JointSpecificEnergy e = joint_specific_energy_1d(0.0, 0.0, 1, n, 2);
        CHECK(std::abs(e.residual) <= 1e-12);
        // LHS = log 2 + log 2: eta window cost plus sigma0 cost per site
        CHECK(e.lhs == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("r plus minus: symmetric cases and strict ordering") {
    BoxPtr box = Box::cube(1, 2);
    Config eta = Config::constant(box, 1);
    // h = 0: conditioning field vanishes, r = 1/2 exactly
    auto [rp0, rm0] = r_plus_minus(1.5, 0.0, box, eta);
    CHECK(rp0 == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(rm0 == doctest::Approx(0.5).epsilon(1e-13));
    // beta = 0: boundary condition irrelevant, r+ = r-
    auto [rpb, rmb] = r_plus_minus(0.0, 0.3, box, eta);
    CHECK(rpb == doctest::Approx(rmb).epsilon(1e-13));
    // the generic ferromagnetic case orders strictly
    auto [rp, rm] = r_plus_minus(1.5, 0.3, box, eta);
    CHECK(rp < rm);
}

TEST_CASE("ad ratio is exactly 1 on product laws") {
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    DisorderLaw P;
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    ProbTable K = joint_table(phi, P, box, Config::constant(shell, 1), Config::constant(shell, 1));
    ProbTable Kd = eta_marginal(K);
    for (int a : {-1, 1})
        for (int b : {-1, 1}) {
            CylinderEvent A{{{Site{-1}, a}}}, B{{{Site{1}, b}}};
            CHECK(ad_ratio(Kd, A, B) == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("sup log ratio: zero on equal tables, symmetric") {
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    DisorderLaw P;
    BoxPtr box = Box::cube(1, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
    ProbTable Kp = joint_table(phi, P, box, Config::constant(shell, 1), Config::constant(shell, 1));
    ProbTable Km = joint_table(phi, P, box, Config::constant(shell, -1), Config::constant(shell, 1));
    BoxPtr w = Box::make(1, {site_origin(1)});
    CHECK(sup_log_ratio(Kp, Kp, w) == 0.0);
    CHECK(sup_log_ratio(Kp, Km, w) == doctest::Approx(sup_log_ratio(Km, Kp, w)).epsilon(1e-12));
    CHECK(sup_log_ratio(Kp, Km, w) > 0.0);
}

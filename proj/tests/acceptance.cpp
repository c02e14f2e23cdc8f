// Acceptance battery: one pass/fail line per criterion, nonzero exit when any
// criterion fails. All numeric thresholds appear literally next to the checks.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gibbsium/disordered.hpp"
#include "gibbsium/experiments.hpp"
#include "gibbsium/measure.hpp"
#include "gibbsium/random_instances.hpp"
#include "gibbsium/transform.hpp"

using namespace gibbsium;

namespace {

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  [%2d] %s (%s)\n", pass ? "PASS" : "FAIL", idx, name, detail.c_str());
    if (!pass) ++failures;
}

double now_s() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double x) {
    char b[64];
    std::snprintf(b, sizeof(b), "%.3g", x);
    return b;
}

// 1. telescoping identity on 200 random instances
void criterion_1() {
    double t0 = now_s();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        Rng rng(Rng::mix(1001, (uint64_t)i), 1);
        int d = 1 + (int)rng.below(2);
        FiniteRangePotential phi = random_finite_range_potential(rng, d);
        BoxPtr box = random_box(rng, d, 9);
        Config sigma = random_spin_config(rng, box);
        BoxPtr shell = Box::make(d, boundary_shell(*box, std::max(1, phi.range())));
        Config omega = random_spin_config(rng, shell);
        auto [direct, tele] = telescope_E(phi, sigma, omega);
        worst = std::max(worst, std::abs(direct - tele));
    }
    double dt = now_s() - t0;
    report(1, "telescoping identity, 200 random instances", worst <= 1e-9 && dt < 30.0,
           "max |direct-telescoped| = " + fmt(worst) + ", " + fmt(dt) + " s");
}

// 2. specification consistency inside 4-site boxes
void criterion_2() {
    BoxPtr outer = Box::make(1, {{0}, {1}, {2}, {3}});
    std::vector<BoxPtr> inners;
    for (uint32_t mask = 1; mask < 15u; ++mask) {
        std::vector<Site> s;
        for (int j = 0; j < 4; ++j)
            if (mask >> j & 1) s.push_back({j});
        inners.push_back(Box::make(1, std::move(s)));
    }
    BoxPtr shell = Box::make(1, boundary_shell(*outer, 1));
    std::vector<Site> all = outer->sites;
    for (const auto& s : shell->sites) all.push_back(s);
    BoxPtr carrier = Box::make(1, std::move(all));
    FiniteRangePotential ising = ising_potential(1, 1.0, 0.5);
    FiniteRangePotential rfim = rfim_potential(1, 1.0, 0.5);
    double worst = 0.0;
    for (int b = 0; b < 50; ++b) {
        Rng rng(Rng::mix(1002, (uint64_t)b), 2);
        Config omega = random_spin_config(rng, shell);
        Config eta_all = random_spin_config(rng, carrier);
        Config sigma_bar = random_spin_config(rng, shell);
        for (const auto& inner : inners) {
            worst = std::max(worst, check_consistency(ising, inner, outer, omega));
            worst = std::max(worst, check_consistency_quenched(rfim, inner, outer, eta_all, sigma_bar));
        }
    }
    report(2, "specification consistency, Ising + quenched RFIM", worst <= 1e-12,
           "max deviation = " + fmt(worst));
}

// 3. finite-n decompositions as algebraic identities
void criterion_3() {
    double worst = 0.0;
    Rng rng(1003, 3);
    for (int t = 0; t < 30; ++t) {
        int d = 1 + (int)rng.below(2);
        int n = d == 1 ? 1 + (int)rng.below(2) : 1;
        FiniteRangePotential a = random_finite_range_potential(rng, d, 1);
        FiniteRangePotential b = random_finite_range_potential(rng, d, 1);
        BoxPtr box = Box::cube(n, d);
        int r = std::max({1, a.range(), b.range()});
        BoxPtr shell = Box::make(d, boundary_shell(*box, r));
        ProbTable mu = exact_gibbs(a, box, random_spin_config(rng, shell));
        ProbTable nu = exact_gibbs(b, box, random_spin_config(rng, shell));
        worst = std::max(worst, decomposition_310_residual(mu, nu, 1));
        worst = std::max(worst, decomposition_311_residual(mu, nu, 1));
    }
    report(3, "Eq 3.10/3.11 identities on exact tables", worst <= 1e-10,
           "max residual = " + fmt(worst));
}

// 4. d=1 variational check of Eq 3.4
void criterion_4() {
    double t0 = now_s();
    FiniteRangePotential phi07 = ising_potential(1, 0.7, 0.0);
    TransferChain mu07 = transfer_chain(phi07);
    double same = std::abs(entropy_formula_rhs(phi07, mu07, mu07, 12));
    TransferChain mu03 = transfer_chain(ising_potential(1, 0.3, 0.0));
    double rhs = entropy_formula_rhs(phi07, mu03, mu07, 12);
    double direct = chain_relative_entropy_rate(mu03, mu07, 12);
    double diff = std::abs(rhs - direct);
    double dt = now_s() - t0;
    report(4, "Eq 3.4 variational check, d=1", same <= 5e-3 && diff <= 1e-2 && dt < 60.0,
           "|rhs(mu=nu)| = " + fmt(same) + ", |rhs-direct| = " + fmt(diff) + ", " + fmt(dt) + " s");
}

// 5. e+ oracle for d=1 Ising(1)
void criterion_5() {
    TransferChain nu = transfer_chain(ising_potential(1, 1.0, 0.0));
    double limit = std::log(2.0 * std::cosh(1.0)) - 1.0;
    double got = specific_energy_increment(nu, 1, 20);
    report(5, "e+ at n=20 vs log(2cosh 1)-1", std::abs(got - limit) <= 5e-3,
           "|err| = " + fmt(std::abs(got - limit)));
}

// 6. GriSing zero rate
void criterion_6() {
    bool ok = true;
    std::string detail;
    for (double p : {0.1, 0.3, 0.5}) {
        ZeroRateResult r = grising_zero_rate(p, 1.0, 2, 1, 10000, 1006);
        // exact path: per-site log of the table value at the zero configuration
        BoxPtr box = Box::cube(2, 1);
        ProbTable K = grising_table(p, 1.0, box);
        double exact = std::log(K.prob_of(Config::constant(box, 0))) / box->size();
        bool e_ok = std::abs(exact - std::log(1 - p)) <= 1e-12;
        bool cover = r.lo <= r.exact && r.exact <= r.hi;
        ok = ok && e_ok && cover;
        detail += "p=" + fmt(p) + (e_ok && cover ? " ok " : " BAD ");
    }
    report(6, "GriSing zero rate: exact + 3-sigma coverage", ok, detail);
}

// 7. decimation domination surrogate
void criterion_7() {
    FiniteRangePotential phi = ising_potential(1, 1.0, 0.0);
    BoxPtr big = Box::cube(3, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*big, 1));
    ProbTable minus = decimate(exact_gibbs(phi, big, Config::constant(shell, -1)), 2);
    ProbTable plus = decimate(exact_gibbs(phi, big, Config::constant(shell, 1)), 2);
    bool ok = minus.nsites() == 3 && check_domination(minus, plus);
    report(7, "decimated minus-bc <= plus-bc (up-set check)", ok,
           ok ? "exact boolean pass" : "domination violated");
}

// 8. Theorem 6.1 finite bound
void criterion_8() {
    double t0 = now_s();
    auto rows = joint_entropy_bound_1d(1.0, 0.5, {1, 2, 3, 4, 5});
    bool bounds = true, decreasing = true;
    for (size_t i = 0; i < rows.size(); ++i) {
        bounds = bounds && rows[i].pass;
        if (i > 0) decreasing = decreasing && rows[i].per_site < rows[i - 1].per_site;
    }
    double dt = now_s() - t0;
    report(8, "Theorem 6.1 bound + decreasing per-site rate", bounds && decreasing && dt < 120.0,
           std::string(bounds ? "bounds ok" : "bound violated") + ", " +
               (decreasing ? "strictly decreasing" : "not decreasing") + ", " + fmt(dt) + " s");
}

// 9. Eq 6.7 conditional vs direct conditioning
void criterion_9() {
    DisorderLaw P;
    BoxPtr lambda = Box::cube(1, 1);
    auto sig_env = seeded_env(1009, 0x73);
    auto eta_env = seeded_env(1009, 0x65);
    auto direct_at = [&](const FiniteRangePotential& phi, int M) {
        BoxPtr big = Box::cube(M, 1);
        BoxPtr bshell = Box::make(1, boundary_shell(*big, 1));
        std::vector<int> sb(bshell->size()), eb(bshell->size());
        for (int j = 0; j < bshell->size(); ++j) {
            sb[j] = sig_env(bshell->sites[j]);
            eb[j] = eta_env(bshell->sites[j]);
        }
        return joint_conditional_direct(phi, P, big, Config(bshell, sb), Config(bshell, eb), lambda,
                                        sig_env, eta_env);
    };
    FiniteRangePotential free_phi = rfim_potential(1, 0.0, 0.5);
    double dev0 = total_variation(
        joint_conditional(free_phi, P, 0.0, 0.5, lambda, sig_env, eta_env, 3).table,
        direct_at(free_phi, 5));
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    ProbTable direct = direct_at(phi, 8);
    double r2 = total_variation(joint_conditional(phi, P, 1.0, 0.5, lambda, sig_env, eta_env, 2).table, direct);
    double r5 = total_variation(joint_conditional(phi, P, 1.0, 0.5, lambda, sig_env, eta_env, 5).table, direct);
    report(9, "Eq 6.7: exact at beta=0, residual shrinks with radius",
           dev0 <= 1e-12 && r5 < r2,
           "beta=0 dev = " + fmt(dev0) + ", res(2) = " + fmt(r2) + ", res(5) = " + fmt(r5));
}

// 10. Theorem 6.7 decomposition
void criterion_10() {
    bool free_ok = true;
    double worst0 = 0.0;
    for (int n = 1; n <= 6; ++n) {
        double r = std::abs(entropy_decomposition_1d(0.0, 0.0, n).residual);
        worst0 = std::max(worst0, r);
        free_ok = free_ok && r <= 1e-12;
    }
    double r4 = std::abs(entropy_decomposition_1d(1.0, 0.5, 4).residual);
    double r8 = std::abs(entropy_decomposition_1d(1.0, 0.5, 8).residual);
    report(10, "Theorem 6.7 decomposition", free_ok && r8 < r4,
           "beta=0 max = " + fmt(worst0) + ", |res(4)| = " + fmt(r4) + ", |res(8)| = " + fmt(r8));
}

// 11. Prop 6.15 r+ vs r-
void criterion_11() {
    BoxPtr box = Box::cube(1, 2);
    bool strict = true;
    for (int i = 0; i < 100; ++i) {
        Rng rng(Rng::mix(1011, (uint64_t)i), 11);
        std::vector<int> ev(box->size());
        for (auto& e : ev) e = rng.pm_one();
        auto [rp, rm] = r_plus_minus(1.5, 0.3, box, Config(box, ev));
        strict = strict && rp < rm;
    }
    auto [rp0, rm0] = r_plus_minus(1.5, 0.0, box, Config::constant(box, 1));
    bool half = std::abs(rp0 - 0.5) <= 1e-13 && std::abs(rm0 - 0.5) <= 1e-13;
    report(11, "r+ < r- strictly; r = 1/2 at h=0", strict && half,
           std::string(strict ? "100/100 strict" : "ordering violated") +
               ", h=0 dev = " + fmt(std::max(std::abs(rp0 - 0.5), std::abs(rm0 - 0.5))));
}

// 12. vacuum transform
void criterion_12() {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Rng rng(Rng::mix(1012, (uint64_t)i), 12);
        int d = 1 + (int)rng.below(2);
        FiniteRangePotential phi = random_finite_range_potential(rng, d);
        FiniteRangePotential vac = vacuum_transform(phi);
        int plus_digit = vac.aidx(vac.plus_state);
        for (const auto& term : vac.terms) {
            std::vector<int> digits;
            for (uint64_t c = 0; c < term.table.size(); ++c) {
                idx_to_digits(c, (int)term.shape.size(), 2, digits);
                bool has_plus = false;
                for (int dg : digits)
                    if (dg == plus_digit) has_plus = true;
                if (has_plus && term.table[c] != 0.0) ok = false;  // must be bit-exact zero
            }
        }
        BoxPtr box = random_box(rng, d, 5);
        int r = std::max({1, phi.range(), vac.range()});
        BoxPtr shell = Box::make(d, boundary_shell(*box, r));
        Config omega = random_spin_config(rng, shell);
        worst = std::max(worst, total_variation(kernel(phi, box, omega), kernel(vac, box, omega)));
        if (hamiltonian(vac, Config::constant(box, 1), Config::constant(shell, 1)) != 0.0) ok = false;
    }
    report(12, "vacuum transform: zeros bit-exact, kernels equal, H(+)=0",
           ok && worst <= 1e-12, "max kernel dev = " + fmt(worst));
}

// 13. asymptotic decoupling check
void criterion_13() {
    FiniteRangePotential phi = rfim_potential(1, 1.0, 0.5);
    DisorderLaw P;
    bool ok = true;
    std::string detail;
    for (int n : {1, 2}) {
        BoxPtr box = Box::cube(n, 1);
        BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
        ProbTable K = joint_table(phi, P, box, Config::constant(shell, 1), Config::constant(shell, 1));
        double c1 = boundary_constant_c1(phi, box);
        double bound = 8.0 * c1 * (double)shell->size();
        double worst = 0.0;
        for (int i = 0; i < box->size(); ++i)
            for (int j = 0; j < box->size(); ++j) {
                if (i == j) continue;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        CylinderEvent A{{{box->sites[i], a}}}, B{{{box->sites[j], b}}};
                        worst = std::max(worst, std::abs(std::log(ad_ratio(K, A, B))));
                    }
            }
        // the disorder marginal is an exact product law
        ProbTable Kd = eta_marginal(K);
        double pdev = 0.0;
        for (int i = 0; i < box->size(); ++i)
            for (int j = i + 1; j < box->size(); ++j)
                for (int a : {-1, 1})
                    for (int b : {-1, 1}) {
                        CylinderEvent A{{{box->sites[i], a}}}, B{{{box->sites[j], b}}};
                        pdev = std::max(pdev, std::abs(ad_ratio(Kd, A, B) - 1.0));
                    }
        ok = ok && worst <= bound && pdev <= 1e-12;
        detail += "n=" + std::to_string(n) + ": ratio " + fmt(worst) + " <= " + fmt(bound) +
                  ", prod dev " + fmt(pdev) + "; ";
    }
    report(13, "AD: |log ratio| within bound, product ratio = 1", ok, detail);
}

// 14. CLI determinism: rerun with the same seed is byte-identical
void criterion_14() {
#ifndef GIBBSIUM_BIN
    report(14, "CLI determinism", false, "GIBBSIUM_BIN not defined");
#else
    std::string tmp = "acceptance_tmp";
    std::string cfg = tmp + "/det.cfg";
    int rcp = std::system(("rm -rf " + tmp + " && mkdir -p " + tmp).c_str());
    (void)rcp;
    {
        std::ofstream f(cfg);
        f << "[grising]\np = 0.3, 0.5\nsamples = 400\nn = 1\nseed = 99\n"
          << "[telescope-check]\ninstances = 10\nseed = 5\n";
    }
    auto run = [&](const std::string& out) {
        std::string cmd = std::string(GIBBSIUM_BIN) + " run " + cfg + " --out " + tmp + "/" + out +
                          " --jobs 2 > /dev/null";
        return std::system(cmd.c_str());
    };
    int rc1 = run("a"), rc2 = run("b");
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    bool ok = rc1 == 0 && rc2 == 0;
    for (const char* name : {"grising.csv", "telescope-check.csv"}) {
        std::string a = slurp(tmp + "/a/" + name), b = slurp(tmp + "/b/" + name);
        ok = ok && !a.empty() && a == b;
    }
    report(14, "CLI determinism: byte-identical rerun", ok,
           ok ? "grising.csv + telescope-check.csv identical" : "outputs differ or run failed");
#endif
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 14 criteria passed\n");
    return failures ? 1 : 0;
}

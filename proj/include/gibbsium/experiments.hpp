#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "disordered.hpp"
#include "measure.hpp"
#include "random_instances.hpp"
#include "specification.hpp"
#include "transform.hpp"

namespace gibbsium {

// Deterministic fan-out: f(i) for i in [0, n), at most `jobs` workers. Each
// index computes into its own slot, so the result order never depends on
// scheduling.
template <typename F>
inline void parallel_for(int n, int jobs, const F& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mx;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

struct ExperimentOutput {
    std::string filename;  // e.g. "grising.csv"
    CsvTable table;
};

struct RunContext {
    Params params;
    uint64_t seed = 0;
    int jobs = 1;
};

// ---- telescope-check ---------------------------------------------------------

inline std::vector<ExperimentOutput> run_telescope_check(const RunContext& ctx) {
    int instances = (int)ctx.params.get_int("instances", 200);
    CsvTable t;
    t.header = {"instance", "d", "sites", "direct", "telescoped", "abs_diff"};
    std::vector<std::vector<CsvCell>> rows(instances);
    parallel_for(instances, ctx.jobs, [&](int i) {
        Rng rng(Rng::mix(ctx.seed, (uint64_t)i), 0x74656c65);
        int d = 1 + (int)rng.below(2);
        FiniteRangePotential phi = random_finite_range_potential(rng, d);
        BoxPtr box = random_box(rng, d, 9);
        Config sigma = random_spin_config(rng, box);
        BoxPtr shell = Box::make(d, boundary_shell(*box, std::max(1, phi.range())));
        Config omega = random_spin_config(rng, shell);
        auto [direct, tele] = telescope_E(phi, sigma, omega);
        rows[i] = {(long long)i, (long long)d, (long long)box->size(), direct, tele,
                   std::abs(direct - tele)};
    });
    for (auto& r : rows) t.add_row(std::move(r));
    return {{"telescope-check.csv", std::move(t)}};
}

// ---- consistency-check -------------------------------------------------------

inline std::vector<ExperimentOutput> run_consistency_check(const RunContext& ctx) {
    std::string pot = ctx.params.get_str("potential", "ising");
    double beta = ctx.params.get_double("beta", 1.0);
    double h = ctx.params.get_double("h", 0.5);
    int bcs = (int)ctx.params.get_int("bcs", 50);
    // 4-site line box and every nonempty proper sub-box
    BoxPtr outer = Box::make(1, {{0}, {1}, {2}, {3}});
    std::vector<BoxPtr> inners;
    for (uint32_t mask = 1; mask < 15u; ++mask) {
        std::vector<Site> s;
        for (int j = 0; j < 4; ++j)
            if (mask >> j & 1) s.push_back({j});
        inners.push_back(Box::make(1, std::move(s)));
    }
    CsvTable t;
    t.header = {"bc", "potential", "max_deviation"};
    std::vector<std::vector<CsvCell>> rows(bcs);
    parallel_for(bcs, ctx.jobs, [&](int b) {
        Rng rng(Rng::mix(ctx.seed, (uint64_t)b), 0x636f6e73);
        double dev = 0.0;
        if (pot == "ising") {
            FiniteRangePotential phi = ising_potential(1, beta, h);
            BoxPtr shell = Box::make(1, boundary_shell(*outer, 1));
            Config omega = random_spin_config(rng, shell);
            for (const auto& inner : inners)
                dev = std::max(dev, check_consistency(phi, inner, outer, omega));
        } else {
            FiniteRangePotential phi = rfim_potential(1, beta, h);
            BoxPtr shell = Box::make(1, boundary_shell(*outer, 1));
            std::vector<Site> all = outer->sites;
            for (const auto& s : shell->sites) all.push_back(s);
            BoxPtr carrier = Box::make(1, std::move(all));
            Config eta_all = random_spin_config(rng, carrier);
            Config sigma_bar = random_spin_config(rng, shell);
            for (const auto& inner : inners)
                dev = std::max(dev, check_consistency_quenched(phi, inner, outer, eta_all, sigma_bar));
        }
        rows[b] = {(long long)b, pot, dev};
    });
    for (auto& r : rows) t.add_row(std::move(r));
    return {{"consistency-check.csv", std::move(t)}};
}

// ---- vp-1d -------------------------------------------------------------------

inline std::vector<ExperimentOutput> run_vp_1d(const RunContext& ctx) {
    double beta_mu = ctx.params.get_double("beta_mu", 0.7);
    double beta_nu = ctx.params.get_double("beta_nu", 0.7);
    std::vector<int> ns = ctx.params.get_int_list("n", {12});
    FiniteRangePotential phi = ising_potential(1, beta_nu, 0.0);
    TransferChain mu = transfer_chain(ising_potential(1, beta_mu, 0.0));
    TransferChain nu = transfer_chain(phi);
    CsvTable t;
    t.header = {"n", "beta_mu", "beta_nu", "rhs", "direct", "abs_diff"};
    for (int n : ns) {
        double rhs = entropy_formula_rhs(phi, mu, nu, n);
        double direct = chain_relative_entropy_rate(mu, nu, n);
        t.add_row({(long long)n, beta_mu, beta_nu, rhs, direct, std::abs(rhs - direct)});
    }
    return {{"vp-1d.csv", std::move(t)}};
}

// ---- grising -----------------------------------------------------------------

inline std::vector<ExperimentOutput> run_grising(const RunContext& ctx) {
    std::vector<double> ps = ctx.params.get_double_list("p", {0.1, 0.3, 0.5});
    double beta = ctx.params.get_double("beta", 1.0);
    int n = (int)ctx.params.get_int("n", 2);
    int d = (int)ctx.params.get_int("d", 1);
    int samples = (int)ctx.params.get_int("samples", 10000);
    CsvTable t;
    t.header = {"p", "beta", "n", "exact", "empirical", "lo", "hi", "hits", "samples", "covered"};
    std::vector<std::vector<CsvCell>> rows(ps.size());
    parallel_for((int)ps.size(), ctx.jobs, [&](int i) {
        double p = ps[i];
        ZeroRateResult r = grising_zero_rate(p, beta, n, d, samples, Rng::mix(ctx.seed, (uint64_t)i));
        // per-site rates: lo/hi bound log Phat / |Lambda|; the target is
        // log(1-p) directly, so coverage compares at volume scale
        int L = Box::cube(n, d)->size();
        bool covered = r.lo * L <= r.exact * L && r.exact * L <= r.hi * L;
        rows[i] = {p,      beta,  (long long)n,       r.exact,
                   r.empirical, r.lo, r.hi, (long long)r.hits, (long long)r.samples,
                   (long long)(covered ? 1 : 0)};
    });
    for (auto& r : rows) t.add_row(std::move(r));
    return {{"grising.csv", std::move(t)}};
}

// ---- decimate-dominate -------------------------------------------------------

inline std::vector<ExperimentOutput> run_decimate_dominate(const RunContext& ctx) {
    double beta = ctx.params.get_double("beta", 1.0);
    int b = (int)ctx.params.get_int("b", 2);
    int big_n = (int)ctx.params.get_int("big_n", 3);
    FiniteRangePotential phi = ising_potential(1, beta, 0.0);
    BoxPtr big = Box::cube(big_n, 1);
    BoxPtr shell = Box::make(1, boundary_shell(*big, 1));
    ProbTable minus = decimate(exact_gibbs(phi, big, Config::constant(shell, -1)), b);
    ProbTable plus = decimate(exact_gibbs(phi, big, Config::constant(shell, 1)), b);
    Config mixed(shell, {-1, 1});  // one minus end, one plus end: the "middle" surrogate
    ProbTable mid = decimate(exact_gibbs(phi, big, mixed), b);
    CsvTable t;
    t.header = {"beta", "b", "window_sites", "check", "dominated"};
    long long w = minus.nsites();
    t.add_row({beta, (long long)b, w, std::string("minus_le_mid"),
               (long long)(check_domination(minus, mid) ? 1 : 0)});
    t.add_row({beta, (long long)b, w, std::string("mid_le_plus"),
               (long long)(check_domination(mid, plus) ? 1 : 0)});
    t.add_row({beta, (long long)b, w, std::string("minus_le_plus"),
               (long long)(check_domination(minus, plus) ? 1 : 0)});
    return {{"decimate-dominate.csv", std::move(t)}};
}

// ---- rfim-joint --------------------------------------------------------------

// Deterministic environment (sigma, eta) outside the window, derived from the
// seed so reruns match.
inline std::function<int(const Site&)> seeded_env(uint64_t seed, uint64_t stream) {
    return [seed, stream](const Site& s) {
        uint64_t x = stream;
        for (int c : s) x = Rng::mix(x, (uint64_t)(int64_t)c ^ 0x517cc1b727220a95ULL);
        return (Rng::mix(seed, x) & 1) ? 1 : -1;
    };
}

inline std::vector<ExperimentOutput> run_rfim_joint(const RunContext& ctx) {
    double beta = ctx.params.get_double("beta", 1.0);
    double h = ctx.params.get_double("h", 0.5);
    std::vector<int> bound_ns = ctx.params.get_int_list("bound_ns", {1, 2, 3, 4, 5});
    std::vector<int> decomp_ns = ctx.params.get_int_list("decomp_ns", {4, 8});
    std::vector<int> radii = ctx.params.get_int_list("radii", {2, 5});
    int big_n = (int)ctx.params.get_int("big_n", 8);
    int rpm_samples = (int)ctx.params.get_int("rpm_samples", 100);
    double rpm_beta = ctx.params.get_double("rpm_beta", 1.5);
    double rpm_h = ctx.params.get_double("rpm_h", 0.3);
    std::vector<ExperimentOutput> out;

    // Theorem 6.1 bound
    {
        CsvTable t;
        t.header = {"n", "h_rel", "bound", "per_site", "pass"};
        for (const auto& row : joint_entropy_bound_1d(beta, h, bound_ns))
            t.add_row({(long long)row.n, row.h_rel, row.bound, row.per_site,
                       (long long)(row.pass ? 1 : 0)});
        out.push_back({"rfim-joint-bound.csv", std::move(t)});
    }
    // Theorem 6.7 decomposition
    {
        CsvTable t;
        t.header = {"n", "h_rel", "h_Kd_P", "h_K", "h_Kd", "energy", "pressure", "residual"};
        for (int n : decomp_ns) {
            EntropyDecomposition d = entropy_decomposition_1d(beta, h, n);
            t.add_row({(long long)n, d.h_rel, d.t_hKd_P, d.t_hK, d.t_hKd, d.t_energy, d.t_pressure,
                       d.residual});
        }
        out.push_back({"rfim-joint-decomp.csv", std::move(t)});
    }
    // Eq. 6.7 conditional vs direct
    {
        FiniteRangePotential phi = rfim_potential(1, beta, h);
        DisorderLaw P;
        BoxPtr lambda = Box::cube(1, 1);
        auto sig_env = seeded_env(ctx.seed, 0x7369676d);
        auto eta_env = seeded_env(ctx.seed, 0x65746130);
        BoxPtr big = Box::cube(big_n, 1);
        BoxPtr bshell = Box::make(1, boundary_shell(*big, 1));
        std::vector<int> sb(bshell->size()), eb(bshell->size());
        for (int j = 0; j < bshell->size(); ++j) {
            sb[j] = sig_env(bshell->sites[j]);
            eb[j] = eta_env(bshell->sites[j]);
        }
        ProbTable direct = joint_conditional_direct(phi, P, big, Config(bshell, sb),
                                                    Config(bshell, eb), lambda, sig_env, eta_env);
        CsvTable t;
        t.header = {"radius", "residual_tv", "norm_defect"};
        for (int R : radii) {
            JointConditionalResult jc =
                joint_conditional(phi, P, beta, h, lambda, sig_env, eta_env, R);
            t.add_row({(long long)R, total_variation(jc.table, direct), jc.norm_defect});
        }
        out.push_back({"rfim-joint-eq67.csv", std::move(t)});
    }
    // Prop 6.15 r+ vs r-
    {
        BoxPtr box = Box::cube(1, 2);  // 3x3
        CsvTable t;
        t.header = {"sample", "r_plus", "r_minus", "strict"};
        std::vector<std::vector<CsvCell>> rows(rpm_samples);
        parallel_for(rpm_samples, ctx.jobs, [&](int i) {
            Rng rng(Rng::mix(ctx.seed, (uint64_t)i), 0x72706d31);
            std::vector<int> ev(box->size());
            for (auto& e : ev) e = rng.pm_one();
            auto [rp, rm] = r_plus_minus(rpm_beta, rpm_h, box, Config(box, ev));
            rows[i] = {(long long)i, rp, rm, (long long)(rp < rm ? 1 : 0)};
        });
        for (auto& r : rows) t.add_row(std::move(r));
        out.push_back({"rfim-joint-rpm.csv", std::move(t)});
    }
    return out;
}

// ---- ad-check ----------------------------------------------------------------

inline std::vector<ExperimentOutput> run_ad_check(const RunContext& ctx) {
    double beta = ctx.params.get_double("beta", 1.0);
    double h = ctx.params.get_double("h", 0.5);
    std::vector<int> ns = ctx.params.get_int_list("n", {1, 2});
    FiniteRangePotential phi = rfim_potential(1, beta, h);
    DisorderLaw P;
    CsvTable t;
    t.header = {"n", "c1_hat", "boundary", "max_abs_log_ratio", "bound", "product_max_dev", "pass"};
    for (int n : ns) {
        BoxPtr box = Box::cube(n, 1);
        BoxPtr shell = Box::make(1, boundary_shell(*box, 1));
        ProbTable K = joint_table(phi, P, box, Config::constant(shell, 1), Config::constant(shell, 1));
        double c1 = boundary_constant_c1(phi, box);
        double bnd = 8.0 * c1 * (double)shell->size();
        // exhaustive single-site cylinder pairs on distinct sites
        double worst = 0.0;
        for (int i = 0; i < box->size(); ++i)
            for (int j = 0; j < box->size(); ++j) {
                if (i == j) continue;
                for (int a = 0; a < 4; ++a)
                    for (int bcd = 0; bcd < 4; ++bcd) {
                        CylinderEvent A{{{box->sites[i], a}}}, B{{{box->sites[j], bcd}}};
                        worst = std::max(worst, std::abs(std::log(ad_ratio(K, A, B))));
                    }
            }
        // the disorder marginal is an exact product law: its ratio is 1
        ProbTable Kd = eta_marginal(K);
        double pdev = 0.0;
        for (int i = 0; i < box->size(); ++i)
            for (int j = i + 1; j < box->size(); ++j)
                for (int a : {-1, 1})
                    for (int bv : {-1, 1}) {
                        CylinderEvent A{{{box->sites[i], a}}}, B{{{box->sites[j], bv}}};
                        pdev = std::max(pdev, std::abs(ad_ratio(Kd, A, B) - 1.0));
                    }
        t.add_row({(long long)n, c1, (long long)shell->size(), worst, bnd, pdev,
                   (long long)(worst <= bnd ? 1 : 0)});
    }
    return {{"ad-check.csv", std::move(t)}};
}

// ---- vacuum-check ------------------------------------------------------------

inline std::vector<ExperimentOutput> run_vacuum_check(const RunContext& ctx) {
    int instances = (int)ctx.params.get_int("instances", 50);
    CsvTable t;
    t.header = {"instance", "d", "kernel_dev", "vacuum_exact", "h_plus"};
    std::vector<std::vector<CsvCell>> rows(instances);
    parallel_for(instances, ctx.jobs, [&](int i) {
        Rng rng(Rng::mix(ctx.seed, (uint64_t)i), 0x76616375);
        int d = 1 + (int)rng.below(2);
        FiniteRangePotential phi = random_finite_range_potential(rng, d);
        FiniteRangePotential vac = vacuum_transform(phi);
        // vacuum property: bit-exact zero on any pattern containing a plus
        bool exact = true;
        int plus_digit = vac.aidx(vac.plus_state);
        for (const auto& term : vac.terms) {
            int k = (int)term.shape.size();
            std::vector<int> digits;
            for (uint64_t c = 0; c < term.table.size(); ++c) {
                idx_to_digits(c, k, 2, digits);
                bool has_plus = false;
                for (int dg : digits)
                    if (dg == plus_digit) has_plus = true;
                if (has_plus && term.table[c] != 0.0) exact = false;
            }
        }
        // kernel conformance on a random window
        BoxPtr box = random_box(rng, d, 5);
        int r = std::max({1, phi.range(), vac.range()});
        BoxPtr shell = Box::make(d, boundary_shell(*box, r));
        Config omega = random_spin_config(rng, shell);
        double dev = total_variation(kernel(phi, box, omega), kernel(vac, box, omega));
        // H^vac(+|+) = 0 exactly
        Config plus_in = Config::constant(box, vac.plus_state);
        Config plus_out = Config::constant(shell, vac.plus_state);
        double hplus = hamiltonian(vac, plus_in, plus_out);
        rows[i] = {(long long)i, (long long)d, dev, (long long)(exact ? 1 : 0), hplus};
    });
    for (auto& r : rows) t.add_row(std::move(r));
    return {{"vacuum-check.csv", std::move(t)}};
}

// ---- registry ----------------------------------------------------------------

struct ExperimentDef {
    std::string name;
    bool stochastic;  // seed mandatory
    std::function<void(const Params&)> validate;
    std::function<std::vector<ExperimentOutput>(const RunContext&)> run;
};

inline const std::vector<ExperimentDef>& experiment_registry() {
    static const std::vector<ExperimentDef> reg = [] {
        std::vector<ExperimentDef> r;
        r.push_back({"telescope-check", true,
                     [](const Params& p) {
                         long long n = p.get_int("instances", 200);
                         if (n < 1) p.errors->push_back("key 'instances': must be >= 1");
                     },
                     run_telescope_check});
        r.push_back({"consistency-check", true,
                     [](const Params& p) {
                         std::string pot = p.get_str("potential", "ising");
                         if (pot != "ising" && pot != "rfim")
                             p.errors->push_back("key 'potential': must be 'ising' or 'rfim'");
                         if (p.get_int("bcs", 50) < 1) p.errors->push_back("key 'bcs': must be >= 1");
                     },
                     run_consistency_check});
        r.push_back({"vp-1d", false,
                     [](const Params& p) {
                         for (int n : p.get_int_list("n", {12}))
                             if (n < 1) p.errors->push_back("key 'n': entries must be >= 1");
                         p.check_range("beta_mu", p.get_double("beta_mu", 0.7), 0.0, 10.0);
                         p.check_range("beta_nu", p.get_double("beta_nu", 0.7), 0.0, 10.0);
                     },
                     run_vp_1d});
        r.push_back({"grising", true,
                     [](const Params& p) {
                         for (double x : p.get_double_list("p", {0.1, 0.3, 0.5}))
                             p.check_range("p", x, 0.0, 1.0, false, true);
                         if (p.get_int("samples", 10000) < 1)
                             p.errors->push_back("key 'samples': must be >= 1");
                         if (p.get_int("n", 2) < 0) p.errors->push_back("key 'n': must be >= 0");
                     },
                     run_grising});
        r.push_back({"decimate-dominate", false,
                     [](const Params& p) {
                         if (p.get_int("b", 2) < 1) p.errors->push_back("key 'b': must be >= 1");
                         if (p.get_int("big_n", 3) < 1 || p.get_int("big_n", 3) > 10)
                             p.errors->push_back("key 'big_n': must be in [1, 10]");
                     },
                     run_decimate_dominate});
        r.push_back({"rfim-joint", true,
                     [](const Params& p) {
                         for (int n : p.get_int_list("bound_ns", {1, 2, 3, 4, 5}))
                             if (n < 1 || n > 6)
                                 p.errors->push_back("key 'bound_ns': entries must be in [1, 6]");
                         for (int n : p.get_int_list("decomp_ns", {4, 8}))
                             if (n < 1 || n > 10)
                                 p.errors->push_back("key 'decomp_ns': entries must be in [1, 10]");
                         for (int R : p.get_int_list("radii", {2, 5}))
                             if (R < 1 || R > 7)
                                 p.errors->push_back("key 'radii': entries must be in [1, 7]");
                         if (p.get_int("rpm_samples", 100) < 1)
                             p.errors->push_back("key 'rpm_samples': must be >= 1");
                     },
                     run_rfim_joint});
        r.push_back({"ad-check", false,
                     [](const Params& p) {
                         for (int n : p.get_int_list("n", {1, 2}))
                             if (n < 1 || n > 3)
                                 p.errors->push_back("key 'n': entries must be in [1, 3]");
                     },
                     run_ad_check});
        r.push_back({"vacuum-check", true,
                     [](const Params& p) {
                         if (p.get_int("instances", 50) < 1)
                             p.errors->push_back("key 'instances': must be >= 1");
                     },
                     run_vacuum_check});
        return r;
    }();
    return reg;
}

inline const ExperimentDef* find_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace gibbsium

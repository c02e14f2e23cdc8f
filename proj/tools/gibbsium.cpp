// Config-driven experiment runner. See docs/config-format.md for the file
// schema; results are CSV tables, one (or a few) per experiment section.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "gibbsium/config.hpp"
#include "gibbsium/experiments.hpp"

namespace fs = std::filesystem;
using namespace gibbsium;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct SectionPlan {
    const ExperimentDef* def;
    const ConfigFile::Section* section;
    uint64_t seed;
};

// Validate every section; on success return the per-section plans.
int plan_sections(const ConfigFile& cf, bool seed_override, uint64_t seed_value,
                  std::vector<SectionPlan>& plans) {
    bool ok = true;
    if (cf.sections.empty()) {
        std::fprintf(stderr, "config error: no experiment sections\n");
        return kExitConfig;
    }
    for (const auto& sec : cf.sections) {
        const ExperimentDef* def = find_experiment(sec.name);
        if (!def) {
            std::fprintf(stderr, "config error: unknown experiment '%s'\n", sec.name.c_str());
            ok = false;
            continue;
        }
        std::vector<std::string> errors;
        Params p{&sec.kv, &errors};
        long long seed = p.get_int("seed", -1);
        if (def->stochastic && !seed_override && !p.has("seed"))
            errors.push_back("missing required key 'seed' (stochastic experiment)");
        if (p.has("seed") && seed < 0) errors.push_back("key 'seed': must be a nonnegative integer");
        def->validate(p);
        for (const auto& e : errors)
            std::fprintf(stderr, "config error: [%s] %s\n", sec.name.c_str(), e.c_str());
        if (!errors.empty()) {
            ok = false;
            continue;
        }
        plans.push_back({def, &sec, seed_override ? seed_value : (uint64_t)std::max(0LL, seed)});
    }
    return ok ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gibbsium: finite-volume Gibbs-measure experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int jobs = 1;
    long long seed_opt = -1;

    auto* run = app.add_subcommand("run", "run the experiments in a config file");
    run->add_option("config", config_path, "config file path")->required();
    run->add_option("--out", out_dir, "output directory for CSV files");
    run->add_option("--jobs", jobs, "max concurrent workers")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed_opt, "override seed for all sections");

    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("config", config_path, "config file path")->required();

    auto* list = app.add_subcommand("list-experiments", "list available experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (list->parsed()) {
        for (const auto& e : experiment_registry())
            std::printf("%s%s\n", e.name.c_str(), e.stochastic ? " (seed required)" : "");
        return kExitOk;
    }

    ConfigFile cf;
    try {
        cf = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    std::vector<SectionPlan> plans;
    int rc = plan_sections(cf, seed_opt >= 0, (uint64_t)std::max(0LL, seed_opt), plans);
    if (validate->parsed()) {
        if (rc == kExitOk) std::printf("ok: %zu experiment section(s)\n", plans.size());
        return rc;
    }
    if (rc != kExitOk) return rc;  // no partial runs on invalid config

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "io error: cannot create output directory '%s': %s\n", out_dir.c_str(),
                     ec.message().c_str());
        return kExitIo;
    }

    for (const auto& plan : plans) {
        std::vector<std::string> errors;
        RunContext ctx{Params{&plan.section->kv, &errors}, plan.seed, jobs};
        std::vector<ExperimentOutput> outputs;
        try {
            outputs = plan.def->run(ctx);
        } catch (const std::ios_base::failure& e) {
            std::fprintf(stderr, "io error: [%s] %s\n", plan.def->name.c_str(), e.what());
            return kExitIo;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "numeric error: [%s] %s\n", plan.def->name.c_str(), e.what());
            return kExitNumeric;
        }
        uint64_t hash = config_hash(cf.raw, plan.seed);
        for (const auto& o : outputs) {
            fs::path path = fs::path(out_dir) / o.filename;
            try {
                o.table.write(path.string(), hash, plan.seed);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "io error: %s\n", e.what());
                return kExitIo;
            }
            std::printf("%s: %zu rows -> %s\n", plan.def->name.c_str(), o.table.rows.size(),
                        path.string().c_str());
        }
    }
    return kExitOk;
}

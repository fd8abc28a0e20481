#include <CLI11.hpp>
#include <iostream>

#include "nlkg/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nlkg: radial standing-wave laboratory for the nonlinear Klein-Gordon "
                 "equation with an inverse-square potential"};
    app.require_subcommand(1);

    const std::vector<std::string> names{"ground-state", "evolve",       "stability",
                                         "instability",  "scaling-law",  "identities",
                                         "inequalities", "section4"};

    struct Cli {
        std::string config;
        nlkg::ExperimentConfig overrides;
        bool has_d = false, has_p = false, has_gamma = false, has_omega = false;
        bool has_rmax = false, has_n = false, has_tend = false, has_cfl = false;
        bool has_method = false, has_index = false, has_out = false, has_seed = false;
        std::vector<double> lambdas, deltas, omegas, radii;
        std::vector<std::uint64_t> seeds;
    };

    std::vector<std::shared_ptr<Cli>> clis;
    for (const auto& nm : names) {
        auto cli = std::make_shared<Cli>();
        clis.push_back(cli);
        auto* sub = app.add_subcommand(nm, "run the " + nm + " experiment");
        sub->add_option("--config", cli->config, "JSON config; flags override file values");
        sub->add_option("--d", cli->overrides.d)->each([cli](const std::string&) { cli->has_d = true; });
        sub->add_option("--p", cli->overrides.p)->each([cli](const std::string&) { cli->has_p = true; });
        sub->add_option("--gamma", cli->overrides.gamma)
            ->each([cli](const std::string&) { cli->has_gamma = true; });
        sub->add_option("--omega", cli->overrides.omega)
            ->each([cli](const std::string&) { cli->has_omega = true; });
        sub->add_option("--rmax", cli->overrides.r_max)
            ->each([cli](const std::string&) { cli->has_rmax = true; });
        sub->add_option("--n", cli->overrides.n)->each([cli](const std::string&) { cli->has_n = true; });
        sub->add_option("--t-end", cli->overrides.t_end)
            ->each([cli](const std::string&) { cli->has_tend = true; });
        sub->add_option("--cfl", cli->overrides.cfl)
            ->each([cli](const std::string&) { cli->has_cfl = true; });
        sub->add_option("--method", cli->overrides.method)
            ->each([cli](const std::string&) { cli->has_method = true; });
        sub->add_option("--index", cli->overrides.index)
            ->each([cli](const std::string&) { cli->has_index = true; });
        sub->add_option("--out", cli->overrides.out_dir)
            ->each([cli](const std::string&) { cli->has_out = true; });
        sub->add_option("--seed", cli->overrides.rng_seed)
            ->each([cli](const std::string&) { cli->has_seed = true; });
        sub->add_option("--lambdas", cli->lambdas);
        sub->add_option("--deltas", cli->deltas);
        sub->add_option("--omegas", cli->omegas);
        sub->add_option("--radii", cli->radii);
        sub->add_option("--seeds", cli->seeds);
    }

    CLI11_PARSE(app, argc, argv);

    for (size_t i = 0; i < names.size(); ++i) {
        if (!app.got_subcommand(names[i])) continue;
        const auto& cli = *clis[i];
        nlkg::ExperimentConfig cfg;
        try {
            if (!cli.config.empty()) cfg = nlkg::ExperimentConfig::from_json_file(cli.config);
        } catch (const std::exception& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 2;
        }
        cfg.experiment = names[i];
        if (cli.has_d) cfg.d = cli.overrides.d;
        if (cli.has_p) cfg.p = cli.overrides.p;
        if (cli.has_gamma) cfg.gamma = cli.overrides.gamma;
        if (cli.has_omega) cfg.omega = cli.overrides.omega;
        if (cli.has_rmax) cfg.r_max = cli.overrides.r_max;
        if (cli.has_n) cfg.n = cli.overrides.n;
        if (cli.has_tend) cfg.t_end = cli.overrides.t_end;
        if (cli.has_cfl) cfg.cfl = cli.overrides.cfl;
        if (cli.has_method) cfg.method = cli.overrides.method;
        if (cli.has_index) cfg.index = cli.overrides.index;
        if (cli.has_out) cfg.out_dir = cli.overrides.out_dir;
        if (cli.has_seed) cfg.rng_seed = cli.overrides.rng_seed;
        if (!cli.lambdas.empty()) cfg.lambdas = cli.lambdas;
        if (!cli.deltas.empty()) cfg.deltas = cli.deltas;
        if (!cli.omegas.empty()) cfg.omegas = cli.omegas;
        if (!cli.radii.empty()) cfg.radii = cli.radii;
        if (!cli.seeds.empty()) cfg.seeds = cli.seeds;
        return nlkg::run_experiment_cli(cfg);
    }
    return 2;
}

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "archetype/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"archetypal analysis: fits, consistency experiments, verification"};
    app.require_subcommand(1);

    arch::FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "fit archetypes to a CSV dataset");
    fit->add_option("--data", fit_args.data_path, "CSV file, one point per row")
        ->required();
    fit->add_option("--k", fit_args.k, "number of archetypes")->required();
    fit->add_option("--alpha", fit_args.alpha, "variance regularization weight");
    fit->add_option("--tol", fit_args.tol, "outer stopping tolerance");
    fit->add_option("--tau", fit_args.tau, "gradient flow time per inner step");
    fit->add_option("--seed", fit_args.seed, "random seed");
    fit->add_option("--init", fit_args.init,
                    "'random' or a CSV of k initial archetypes (rows)");
    fit->add_option("--out", fit_args.out_dir, "output directory");

    int example_id = 0;
    std::string config_path;
    arch::ExperimentConfig exp_cfg;
    int repeats_flag = -1;
    bool quick = false;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    std::string out_flag;
    CLI::App* example =
        app.add_subcommand("example", "run one of the four study experiments");
    example->add_option("id", example_id, "experiment id")->required()
        ->check(CLI::Range(1, 4));
    example->add_option("--config", config_path, "key=value config file");
    example->add_option("--repeats", repeats_flag, "trials per schedule point");
    example->add_flag("--quick", quick, "cap the growing-N study at N = 3,333");
    example->add_option("--seed", seed_flag, "master seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    example->add_option("--out", out_flag, "output directory root");
    example->add_option("--n", exp_cfg.n, "sample size for the alpha sweeps");

    std::uint64_t verify_seed = 1;
    CLI::App* verify =
        app.add_subcommand("verify", "run the property and oracle checks");
    verify->add_option("--seed", verify_seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (fit->parsed()) return arch::cmd_fit(fit_args);

    if (example->parsed()) {
        if (!config_path.empty()) {
            try {
                exp_cfg = arch::load_experiment_config(exp_cfg, config_path);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
        if (repeats_flag > 0) exp_cfg.repeats = repeats_flag;
        if (quick) exp_cfg.quick = true;
        if (seed_set) exp_cfg.seed = seed_flag;
        if (!out_flag.empty()) exp_cfg.out_dir = out_flag;
        return arch::cmd_example(example_id, exp_cfg);
    }

    return arch::cmd_verify(verify_seed);
}

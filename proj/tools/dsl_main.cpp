#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dsl/cli/recipes.hpp"
#include "dsl/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dissipative critical sensing laboratory"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string recipe_name;
        std::optional<std::uint64_t> seed;
        std::optional<int> workers;
        std::optional<std::string> out;
    } flags;

    std::string picked;
    for (const std::string& name : dsl::cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' command");
        sub->add_option("--config", flags.config, "run configuration file")->required();
        sub->add_option("--seed", flags.seed, "override the [run] seed");
        sub->add_option("--workers", flags.workers, "override the worker count");
        sub->add_option("--out", flags.out, "override the output directory");
        sub->callback([&picked, name] { picked = name; });
    }

    CLI::App* list = app.add_subcommand("recipes", "list the canned figure recipes");
    list->callback([&picked] { picked = "recipes"; });

    CLI::App* recipe = app.add_subcommand("recipe", "run a canned figure recipe");
    recipe->add_option("name", flags.recipe_name, "recipe name, e.g. fig1a")->required();
    recipe->add_option("--seed", flags.seed, "override the recipe seed");
    recipe->add_option("--workers", flags.workers, "override the worker count");
    recipe->add_option("--out", flags.out, "override the output directory");
    recipe->callback([&picked] { picked = "recipe"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (picked == "recipes") {
            for (const dsl::cli::Recipe& r : dsl::cli::figure_recipes())
                std::cout << r.name << "\t" << r.command << "\t" << r.description << "\n";
            return 0;
        }
        dsl::cli::RunOptions opts;
        opts.seed = flags.seed;
        opts.workers = flags.workers;
        opts.out_dir = flags.out;
        if (picked == "recipe") {
            const dsl::cli::Recipe& r = dsl::cli::find_recipe(flags.recipe_name);
            opts.command = r.command;
            opts.config = r.parsed();
            return dsl::cli::run(opts);
        }
        opts.command = picked;
        opts.config_path = flags.config;
        return dsl::cli::run(opts);
    } catch (const dsl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

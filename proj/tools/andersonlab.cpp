#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "anderson/runner.hpp"
#include "anderson/version.hpp"

namespace {

struct CliOptions {
    std::string subcommand;
    std::string config_path;
    std::string out_dir;
    int workers = 0;
};

int dispatch(const CliOptions& options) {
    using namespace anderson;

    const int workers = options.workers > 0 ? options.workers : default_worker_count();

    if (options.subcommand == "verify" && options.config_path.empty()) {
        RunConfig config;
        config.kind = ExperimentKind::Verify;
        run_experiment(config, workers, std::cout);
        std::cout << "verify: all checks passed\n";
        return 0;
    }

    RunConfig config = RunConfig::from_file(options.config_path, options.subcommand);
    if (!options.out_dir.empty()) config.out_dir = options.out_dir;
    run_experiment(config, workers, std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"andersonlab - finite-volume lattice Anderson model laboratory"};
    app.set_version_flag("--version", std::string(anderson::kToolVersion));
    app.require_subcommand(1);

    CliOptions options;
    const std::pair<const char*, const char*> kinds[] = {
        {"ids", "Monte Carlo integrated density of states"},
        {"dos", "Monte Carlo density of states with the upper-bound report"},
        {"free-ids", "finite- and infinite-volume free lattice IDS curves"},
        {"bound-cert", "lower-bound constant certificate"},
        {"spacing", "rescaled level-spacing sample and Poisson test"},
        {"verify", "run the built-in property suites"},
    };
    for (const auto& [name, description] : kinds) {
        CLI::App* sub = app.add_subcommand(name, description);
        auto* config_option =
            sub->add_option("--config", options.config_path, "run configuration (JSON)");
        if (std::string(name) != "verify") config_option->required();
        sub->add_option("--workers", options.workers,
                        "worker threads (default: " + std::string(anderson::kWorkersEnvVar) +
                            " or hardware)");
        sub->add_option("--out", options.out_dir, "output directory (overrides config)");
        sub->callback([&options, name = std::string(name)]() { options.subcommand = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return dispatch(options);
    } catch (const anderson::CheckError& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 4;
    } catch (const anderson::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const anderson::SolverError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

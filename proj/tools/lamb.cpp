// lamb: solve / zeros / compare / appendix / oracle
#include <iostream>

#include <CLI11.hpp>

#include "lamb/cli.hpp"

using namespace lamb;

int main(int argc, char** argv) {
    CLI::App app{"Transient elastic half-plane solver (unified transform) with FDTD and Laplace cross-checks"};
    app.require_subcommand(1);

    std::string config, out;
    std::vector<std::string> overrides;
    double lambda = 2.0, mu = 1.0;

    auto common = [&](CLI::App* s, bool need_config) {
        auto* o = s->add_option("--config", config, "JSON run configuration");
        if (need_config) o->required();
        s->add_option("--out", out, "output directory (overrides 'output')");
        s->add_option("--override", overrides, "key=value, dotted keys, value parsed as JSON")->take_all();
    };
    auto* solve = app.add_subcommand("solve", "field grid from the contour-integral representation");
    common(solve, true);
    auto* zeros = app.add_subcommand("zeros", "determinant zeros and the Rayleigh report");
    common(zeros, false);
    zeros->add_option("--lambda", lambda, "Lame lambda (ignored with --config)");
    zeros->add_option("--mu", mu, "shear modulus (ignored with --config)");
    auto* compare = app.add_subcommand("compare", "main path vs FDTD on the same mollified problem");
    common(compare, true);
    auto* appendix = app.add_subcommand("appendix", "boundary traces: Volterra, inverse Laplace, main path");
    common(appendix, true);
    auto* oracle = app.add_subcommand("oracle", "FDTD field grid");
    common(oracle, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::Usage;
    }

    return cli::guarded(
        [&]() -> int {
            auto load = [&] {
                RunConfig c = config.empty() ? parse_config("", overrides) : load_config(config, overrides);
                if (!out.empty()) c.output = out;
                return c;
            };
            if (*zeros) {
                Material m{lambda, mu};
                if (!config.empty() || !overrides.empty()) m = load().problem.material;
                return cli::cmd_zeros(m, std::cout);
            }
            RunConfig c = load();
            if (*solve) return cli::cmd_solve(c, std::cout);
            if (*compare) return cli::cmd_compare(c, std::cout);
            if (*appendix) return cli::cmd_appendix(c, std::cout);
            return cli::cmd_oracle(c, std::cout);
        },
        std::cerr);
}

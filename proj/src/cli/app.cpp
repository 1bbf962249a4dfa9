#include <CLI11.hpp>

#include <iostream>

#include "corner/cli/commands.hpp"
#include "corner/error.hpp"

namespace corner::cli {

int run_cli(int argc, char **argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Corner-perturbation series expansions and oracles", "cornerseries"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions opt;
    app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opt.out_dir, "Output directory");
    app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--verbose", opt.verbose, "Progress messages on stderr");

    using Command = CommandResult (*)(const RunConfig &, const CommandOptions &, std::ostream &);
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"spectrum", "Eigenvalues mu_j and exponents lambda_j^+-", cmd_spectrum},
        {"monoid", "Exponent monoid up to e_max", cmd_monoid},
        {"expand", "Coefficient tables and per-mode series", cmd_expand},
        {"compare", "Expansion error against an oracle over an eps list", cmd_compare},
        {"oracle", "Direct, exact or limit-problem field dumps", cmd_oracle},
    };
    for (const auto &[name, help, fn] : commands) {
        auto *sub = app.add_subcommand(name, help);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_config(config_path);
        for (const auto &[name, help, fn] : commands) {
            if (!app.got_subcommand(name)) continue;
            const auto res = fn(cfg, opt, err);
            for (const auto &f : res.files) out << f << '\n';
        }
        return 0;
    } catch (const ConfigurationError &e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError &e) {
        err << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError &e) {
        err << "precondition error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace corner::cli

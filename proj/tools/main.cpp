#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "delspec/catalog.hpp"
#include "delspec/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw delspec::ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-spectra: finite reduction and spectra of evolution operators of "
                 "linear delay differential and renewal equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string problem_name;
    std::string out_dir = ".";
    std::uint64_t seed = 20260808ull;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--problem", problem_name,
                   "built-in problem (hayes | ode | re-basic | delayed-mathieu)");
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    app.add_option("--seed", seed, "seed for the check command's random probes");

    for (const char* name : {"eig", "converge", "compare", "oracle", "check"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (config_path.empty() == problem_name.empty()) {
            std::cerr << "error: exactly one of --config or --problem is required\n";
            return 2;
        }
        const std::string doc = config_path.empty() ? delspec::catalog_document(problem_name)
                                                    : read_file(config_path);
        const delspec::RunSpec spec = delspec::parse_config(doc);
        delspec::RunOptions opts;
        opts.out_dir = out_dir;
        opts.seed = seed;
        return delspec::run_command(command, spec, opts);
    } catch (const delspec::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const delspec::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

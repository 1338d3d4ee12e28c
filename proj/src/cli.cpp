#include "tsdyn/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tsdyn/commands.hpp"

namespace tsdyn::io {

namespace {

ProblemConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_problem(text.str());
}

const std::map<std::string, OutputFormat> kFormats{{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
const std::map<std::string, BoundModeChoice> kModes{
    {"auto", BoundModeChoice::Auto}, {"const", BoundModeChoice::Const}, {"var", BoundModeChoice::Var}};

int write(const std::string& text, const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (out_path.empty()) {
        out << text;
        return 0;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        err << "error: cannot write '" << out_path << "'\n";
        return 2;
    }
    file << text;
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Second-order linear dynamic equations on time scales", "tsdyn"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    OutputFormat format = OutputFormat::Csv;
    BoundModeChoice mode = BoundModeChoice::Auto;

    auto* solve = app.add_subcommand("solve", "Solve the initial value problem");
    solve->add_option("config", config_path, "Problem file")->required();
    solve->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));
    solve->add_option("--out", out_path, "Write output to FILE instead of stdout");

    auto* verify = app.add_subcommand("verify", "Run the consistency checks");
    verify->add_option("config", config_path, "Problem file")->required();

    auto* compare = app.add_subcommand("compare", "Compare particular-solution constructions");
    compare->add_option("config", config_path, "Problem file")->required();
    compare->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));

    auto* bound = app.add_subcommand("bound", "Growth bound for the homogeneous solution");
    bound->add_option("config", config_path, "Problem file")->required();
    bound->add_option("--mode", mode, "auto, const or var")->transform(CLI::CheckedTransformer(kModes));
    bound->add_option("--format", format, "csv or json")->transform(CLI::CheckedTransformer(kFormats));

    auto* echo = app.add_subcommand("echo", "Print the canonical form of a problem file");
    echo->add_option("config", config_path, "Problem file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const ProblemConfig cfg = load(config_path);
        if (solve->parsed()) return write(emit(cmd_solve(cfg), format), out_path, out, err);
        if (verify->parsed()) {
            const VerifyReport rep = cmd_verify(cfg);
            out << format_verify(rep);
            return rep.all_passed() ? 0 : 1;
        }
        if (compare->parsed()) {
            const CompareReport rep = cmd_compare(cfg);
            out << emit(rep, format);
            return rep.all_passed() ? 0 : 1;
        }
        if (bound->parsed()) {
            const BoundResult res = cmd_bound(cfg, mode);
            out << emit(res, format);
            return res.report.all_hold() ? 0 : 1;
        }
        out << echo_config(cfg);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace tsdyn::io

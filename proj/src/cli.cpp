#include "sgforge/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sgforge/jobs.hpp"
#include "sgforge/service.hpp"

namespace sgforge::cli {

namespace {

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

DocumentKind dialect(const std::string& name) {
    if (name == "legacy") return DocumentKind::Legacy;
    if (name == "canonical") return DocumentKind::Canonical;
    return DocumentKind::Unknown;
}

int emit(const JobResult& result, OutputFormat format, std::ostream& out, std::ostream& err) {
    out << render(result, format);
    if (result.message) err << "sgforge: " << *result.message << "\n";
    return result.exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Serious-game storyboard toolchain", "sgforge"};
    app.require_subcommand(1);

    std::string format = "text";
    std::string file;
    std::size_t max_paths = PathLimits{}.max_paths;
    std::size_t max_unrolls = PathLimits{}.max_cycle_unrolls;
    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };
    const auto add_limits = [&](CLI::App* cmd) {
        cmd->add_option("--max-paths", max_paths, "Path enumeration cap");
        cmd->add_option("--max-cycle-unrolls", max_unrolls, "Extra visits allowed per scene on a path");
    };

    auto* validate = app.add_subcommand("validate", "Check a storyboard");
    validate->add_option("file", file, "Storyboard document (legacy or canonical)")->required();
    add_format(validate);
    add_limits(validate);

    std::string cohort_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_steps;
    unsigned threads = 1;
    auto* simulate = app.add_subcommand("simulate", "Run a virtual-player cohort");
    simulate->add_option("file", file, "Storyboard document")->required();
    simulate->add_option("cohort", cohort_file, "Cohort file (JSON lines)")->required();
    simulate->add_option("--seed", seed, "Master seed (overrides the cohort file)");
    simulate->add_option("--max-steps", max_steps, "Scene visits per player before truncation");
    simulate->add_option("--threads", threads, "Worker threads, 0 for all cores");
    add_format(simulate);

    auto* paths = app.add_subcommand("paths", "Enumerate start-to-terminal paths");
    paths->add_option("file", file, "Storyboard document")->required();
    add_format(paths);
    add_limits(paths);

    std::string from;
    std::string to;
    std::string output;
    auto* convert = app.add_subcommand("convert", "Translate between the legacy and canonical dialects");
    convert->add_option("file", file, "Input document")->required();
    convert->add_option("--from", from, "Input dialect (sniffed when omitted)")->check(CLI::IsMember({"legacy", "canonical"}));
    convert->add_option("--to", to, "Output dialect")->required()->check(CLI::IsMember({"legacy", "canonical"}));
    convert->add_option("-o,--output", output, "Output file (stdout when omitted)");

    int port = 8080;
    std::string host = "127.0.0.1";
    std::string store = "store";
    std::string ui_dir;
    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    serve->add_option("--port", port, "Listening port");
    serve->add_option("--host", host, "Listening address");
    serve->add_option("--store", store, "Scenario store directory (SGFORGE_STORE wins)");
    serve->add_option("--ui", ui_dir, "Built editor assets served at /");
    serve->add_option("--threads", threads, "Simulation worker threads per request");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_codes::kOk;
    } catch (const CLI::ParseError& e) {
        err << "sgforge: " << e.what() << "\n";
        return exit_codes::kUsage;
    }

    const auto fmt = format == "json" ? OutputFormat::Json : OutputFormat::Text;
    const auto read_or_fail = [&](const std::string& path) {
        auto bytes = slurp(path);
        if (!bytes) err << "sgforge: cannot read " << path << "\n";
        return bytes;
    };

    if (validate->parsed()) {
        auto bytes = read_or_fail(file);
        if (!bytes) return exit_codes::kUsage;
        return emit(run_validate(*bytes, ValidateOptions{PathLimits{max_paths, max_unrolls}}), fmt, out, err);
    }
    if (paths->parsed()) {
        auto bytes = read_or_fail(file);
        if (!bytes) return exit_codes::kUsage;
        return emit(run_paths(*bytes, PathLimits{max_paths, max_unrolls}), fmt, out, err);
    }
    if (simulate->parsed()) {
        auto bytes = read_or_fail(file);
        if (!bytes) return exit_codes::kUsage;
        auto cohort = read_or_fail(cohort_file);
        if (!cohort) return exit_codes::kUsage;
        SimulateOptions options;
        options.seed = seed;
        options.max_steps = max_steps;
        options.threads = threads;
        const auto result = run_simulate(*bytes, *cohort, options);
        if (result.report && !result.diagnostics.empty()) err << diagnostics_to_text(result.diagnostics);
        return emit(result, fmt, out, err);
    }
    if (convert->parsed()) {
        auto bytes = read_or_fail(file);
        if (!bytes) return exit_codes::kUsage;
        const auto result =
            run_convert(*bytes, from.empty() ? std::nullopt : std::optional(dialect(from)), dialect(to));
        if (!result.document) {
            out << render(result, OutputFormat::Text);
            if (result.message) err << "sgforge: " << *result.message << "\n";
            return result.exit_code;
        }
        if (!result.diagnostics.empty()) err << diagnostics_to_text(result.diagnostics);
        if (output.empty()) {
            out << *result.document;
        } else {
            std::ofstream file_out(output, std::ios::binary | std::ios::trunc);
            file_out << *result.document;
            if (!file_out) {
                err << "sgforge: cannot write " << output << "\n";
                return exit_codes::kUsage;
            }
        }
        return result.exit_code;
    }
    if (serve->parsed()) {
        if (const char* env = std::getenv("SGFORGE_STORE"); env != nullptr && *env != '\0') store = env;
        try {
            ServiceOptions options;
            options.store = store;
            if (!ui_dir.empty()) options.ui_dir = ui_dir;
            options.simulation_threads = threads;
            Service service(options);
            err << "sgforge: serving " << store << " on http://" << host << ":" << port << "\n";
            if (!service.listen(host, port)) {
                err << "sgforge: cannot listen on " << host << ":" << port << "\n";
                return exit_codes::kUsage;
            }
        } catch (const std::exception& e) {
            err << "sgforge: " << e.what() << "\n";
            return exit_codes::kUsage;
        }
        return exit_codes::kOk;
    }
    return exit_codes::kUsage;
}

}  // namespace sgforge::cli

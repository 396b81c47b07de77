#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgforge/condition.hpp"
#include "sgforge/jobs.hpp"

namespace py = pybind11;
using namespace sgforge;

namespace {

py::tuple job_tuple(const JobResult& r, OutputFormat format) {
    return py::make_tuple(r.exit_code, render(r, format), r.message ? py::object(py::str(*r.message)) : py::none());
}

DocumentKind dialect(const std::string& name) {
    if (name == "legacy") return DocumentKind::Legacy;
    if (name == "canonical") return DocumentKind::Canonical;
    throw py::value_error("dialect must be 'legacy' or 'canonical'");
}

RangeMap to_ranges(const std::map<std::string, std::pair<std::string, std::string>>& ranges) {
    RangeMap out;
    for (const auto& [name, bounds] : ranges) {
        auto lo = Decimal::parse(bounds.first);
        auto hi = Decimal::parse(bounds.second);
        if (!lo || !hi) throw py::value_error("range bounds of '" + name + "' are not decimals");
        out[name] = Interval{*lo, *hi};
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_sgforge, m) {
    m.doc() = "Native core of the sgforge storyboard toolchain";

    py::register_exception<Error>(m, "Error");

    m.def(
        "validate",
        [](const std::string& document, std::size_t max_paths, std::size_t max_cycle_unrolls) {
            JobResult r;
            {
                py::gil_scoped_release release;
                r = run_validate(document, ValidateOptions{PathLimits{max_paths, max_cycle_unrolls}});
            }
            return job_tuple(r, OutputFormat::Json);
        },
        py::arg("document"), py::arg("max_paths") = PathLimits{}.max_paths,
        py::arg("max_cycle_unrolls") = PathLimits{}.max_cycle_unrolls);

    m.def(
        "paths",
        [](const std::string& document, std::size_t max_paths, std::size_t max_cycle_unrolls) {
            return job_tuple(run_paths(document, PathLimits{max_paths, max_cycle_unrolls}), OutputFormat::Json);
        },
        py::arg("document"), py::arg("max_paths") = PathLimits{}.max_paths,
        py::arg("max_cycle_unrolls") = PathLimits{}.max_cycle_unrolls);

    m.def(
        "simulate",
        [](const std::string& document, const std::string& cohort, std::optional<std::uint64_t> seed,
           std::optional<std::size_t> max_steps, unsigned threads) {
            SimulateOptions options;
            options.seed = seed;
            options.max_steps = max_steps;
            options.threads = threads;
            JobResult r;
            {
                py::gil_scoped_release release;
                r = run_simulate(document, cohort, options);
            }
            return job_tuple(r, OutputFormat::Json);
        },
        py::arg("document"), py::arg("cohort"), py::arg("seed") = py::none(), py::arg("max_steps") = py::none(),
        py::arg("threads") = 1);

    m.def(
        "convert",
        [](const std::string& document, const std::string& to, std::optional<std::string> from) {
            auto r = run_convert(document, from ? std::optional(dialect(*from)) : std::nullopt, dialect(to));
            return job_tuple(r, OutputFormat::Json);
        },
        py::arg("document"), py::arg("to"), py::arg("from_") = py::none());

    m.def(
        "normalize_condition", [](const std::string& text) { return print_condition(parse_condition(text)); },
        py::arg("text"));

    m.def(
        "satisfiable",
        [](const std::string& text, const std::map<std::string, std::pair<std::string, std::string>>& ranges) {
            return std::string(to_string(satisfiable(parse_condition(text), to_ranges(ranges))));
        },
        py::arg("text"), py::arg("ranges"));
}

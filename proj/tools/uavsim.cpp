#include "uavsim/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv)
{
    CLI::App app{"UAV-carried access point serving a sensor field over 802.11 DCF"};

    std::string config;
    std::vector<std::string> overrides;
    int family = 0;
    std::uint32_t replications = uavsim::kDefaultReplications;
    std::string out;
    std::string trace;
    std::string mac_trace;
    std::string flows;
    std::string mobility_trace;
    std::string plot_csv;
    uavsim::PlotOptions plot;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    app.add_option("--config", config, "Scenario file (key = value lines)");
    app.add_option("--set", overrides, "Override one setting, key=value (repeatable)");
    app.add_option("--family", family, "Run sweep family 1, 2 or 3");
    app.add_option("--replications", replications, "Seeds per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "Results CSV (single run) or output directory (family)");
    app.add_option("--trace", trace, "Write the engine event trace to this file");
    app.add_option("--mac-trace", mac_trace, "Write per-exchange MAC outcomes to this file");
    app.add_option("--mobility-trace", mobility_trace, "Write UAV mobility updates to this file");
    app.add_option("--flows", flows, "Write per-flow counters to this CSV");
    app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--plotdata", plot_csv, "Print x/y tables per series from a results CSV");
    app.add_option("--x", plot.x, "Plot x column");
    app.add_option("--series", plot.series, "Plot series column");
    app.add_option("--y", plot.y, "Plot y column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : uavsim::kExitConfig;
    }

    if (!plot_csv.empty()) {
        plot.csv = plot_csv;
        return uavsim::emit_plotdata(plot, std::cout, std::cerr);
    }

    if (app.count("--family") > 0) {
        uavsim::FamilyOptions f;
        f.family = family;
        f.replications = replications;
        f.out_dir = out.empty() ? "." : out;
        if (!config.empty())
            f.config = config;
        f.overrides = overrides;
        f.jobs = jobs;
        return uavsim::run_scenario_family(f, std::cerr, std::cerr);
    }

    uavsim::SingleOptions s;
    if (!config.empty())
        s.config = config;
    s.overrides = overrides;
    if (!out.empty())
        s.out = out;
    if (!trace.empty())
        s.trace = trace;
    if (!mac_trace.empty())
        s.mac_trace = mac_trace;
    if (!flows.empty())
        s.flows = flows;
    if (!mobility_trace.empty())
        s.mobility_trace = mobility_trace;
    return uavsim::run_single(s, std::cerr, std::cerr);
}

#include "uavsim/experiment.hpp"

#include "uavsim/mobility.hpp"
#include "uavsim/network.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace uavsim {

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::pair<std::string_view, std::string_view> split_override(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override '" + std::string(text) + "' is not key=value");
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
            s.remove_suffix(1);
        return s;
    };
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double mean_of(const std::vector<double>& v)
{
    double sum = 0.0;
    for (double x : v)
        sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

} // namespace

Scenario load_scenario(const std::optional<std::filesystem::path>& config,
                       std::span<const std::string> overrides)
{
    Scenario s;
    if (config) {
        std::string text;
        try {
            text = read_file(*config);
        } catch (const IoError& e) {
            throw ConfigError(e.what());
        }
        s = parse_scenario(text);
    }
    for (const auto& o : overrides) {
        const auto [key, value] = split_override(o);
        apply_setting(s, key, value);
    }
    validate(s);
    return s;
}

int run_single(const SingleOptions& options, std::ostream& log, std::ostream& err)
{
    Scenario s;
    try {
        s = load_scenario(options.config, options.overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        std::ofstream trace;
        std::ofstream mac_trace;
        std::ofstream mobility_trace;
        RunHooks hooks;
        if (options.trace) {
            trace.open(*options.trace, std::ios::binary | std::ios::trunc);
            if (!trace)
                throw IoError("cannot open " + options.trace->string() + " for writing");
            hooks.event_trace = &trace;
        }
        if (options.mac_trace) {
            mac_trace.open(*options.mac_trace, std::ios::binary | std::ios::trunc);
            if (!mac_trace)
                throw IoError("cannot open " + options.mac_trace->string() + " for writing");
            hooks.mac_trace = &mac_trace;
        }
        if (options.mobility_trace) {
            mobility_trace.open(*options.mobility_trace, std::ios::binary | std::ios::trunc);
            if (!mobility_trace)
                throw IoError("cannot open " + options.mobility_trace->string() + " for writing");
            hooks.mobility = [&mobility_trace](NodeId, const MobilityState& m) {
                mobility_trace << fmt::format("{:.9f} {:.6f} {:.6f} {:.6f} {:.6f} {:.6f}\n",
                                              to_seconds(m.segment_start), m.position.x, m.position.y,
                                              m.position.z, m.speed, m.direction);
            };
        }

        const RunResult result = run_scenario(s, hooks);
        const RunRow row = make_run_row(s, result);

        std::error_code ec;
        const bool fresh = !std::filesystem::exists(options.out, ec) ||
                           std::filesystem::file_size(options.out, ec) == 0;
        std::ofstream out(options.out, std::ios::binary | std::ios::app);
        if (!out)
            throw IoError("cannot open " + options.out.string() + " for writing");
        if (fresh)
            out << kCsvHeader << '\n';
        out << format_csv_row(row) << '\n';
        out.flush();
        if (!out)
            throw IoError("write failed: " + options.out.string());

        if (options.flows)
            write_text_file(*options.flows, format_flows_csv(result.flows));
        log << row.scenario_id << " seed " << row.seed << " done\n";
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

std::vector<std::uint32_t> family_station_grid()
{
    return {1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
}

std::vector<double> family_speed_grid()
{
    return {1, 5, 10, 20, 30, 40, 50, 60, 70};
}

std::vector<double> family_rate_grid()
{
    return {0.5e6, 3e6, 6e6};
}

std::vector<FamilyPoint> family_points(int family, const Scenario& base, std::uint32_t replications)
{
    if (replications == 0)
        throw ConfigError("replications must be at least 1");
    std::vector<Scenario> grid;
    switch (family) {
    case 1:
        for (std::uint32_t rts : {0u, 65535u}) {
            for (auto n : family_station_grid()) {
                Scenario s = base;
                s.rts_threshold = rts;
                s.n_sta = n;
                grid.push_back(s);
            }
        }
        break;
    case 2:
        for (auto model : {MobilityModelKind::GaussMarkov, MobilityModelKind::RandomDirection2D}) {
            for (auto n : family_station_grid()) {
                Scenario s = base;
                s.rts_threshold = 0;
                s.uav_mobility = model;
                s.n_sta = n;
                grid.push_back(s);
            }
        }
        break;
    case 3:
        for (double rate : family_rate_grid()) {
            for (double v : family_speed_grid()) {
                Scenario s = base;
                s.n_sta = 25;
                s.rts_threshold = 0;
                s.uav_mobility = MobilityModelKind::GaussMarkov;
                s.traffic_rate_per_sta = rate;
                s.uav_mean_speed = v;
                grid.push_back(s);
            }
        }
        break;
    default:
        throw ConfigError("unknown scenario family " + std::to_string(family) + " (expected 1, 2 or 3)");
    }

    std::vector<FamilyPoint> points;
    points.reserve(grid.size() * replications);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::uint32_t r = 0; r < replications; ++r) {
            Scenario s = grid[i];
            s.seed = base.seed + r;
            validate(s);
            points.push_back(FamilyPoint{s, i, r});
        }
    }
    return points;
}

std::vector<RunRow> run_points(std::span<const FamilyPoint> points, unsigned jobs,
                               std::ostream* progress)
{
    std::vector<RunRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                const Scenario& s = points[i].scenario;
                rows[i] = make_run_row(s, run_scenario(s));
                if (progress != nullptr) {
                    std::lock_guard lock(progress_mutex);
                    *progress << fmt::format("[{}/{}] {} seed {}\n", i + 1, points.size(),
                                             rows[i].scenario_id, rows[i].seed);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = points.size();
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return rows;
}

std::vector<RunRow> aggregate_mean(std::span<const FamilyPoint> points, std::span<const RunRow> rows)
{
    std::map<std::size_t, std::vector<std::size_t>> by_point;
    for (std::size_t i = 0; i < points.size(); ++i)
        by_point[points[i].point].push_back(i);

    std::vector<RunRow> out;
    for (const auto& [point, members] : by_point) {
        RunRow m = rows[members.front()];
        m.seed = points[members.front()].scenario.seed;
        std::vector<double> thr;
        std::vector<double> pooled;
        std::vector<double> eq2;
        std::vector<double> tx, rx, drop, coll;
        for (auto i : members) {
            const RunRow& r = rows[i];
            thr.push_back(r.throughput_bps);
            if (r.avg_delay_pooled_s)
                pooled.push_back(*r.avg_delay_pooled_s);
            if (r.avg_delay_eq2_s)
                eq2.push_back(*r.avg_delay_eq2_s);
            tx.push_back(static_cast<double>(r.tx_packets));
            rx.push_back(static_cast<double>(r.rx_packets));
            drop.push_back(static_cast<double>(r.dropped_packets));
            coll.push_back(static_cast<double>(r.collision_events));
        }
        m.throughput_bps = mean_of(thr);
        m.avg_delay_pooled_s = pooled.empty() ? std::nullopt : std::optional<double>(mean_of(pooled));
        m.avg_delay_eq2_s = eq2.empty() ? std::nullopt : std::optional<double>(mean_of(eq2));
        m.tx_packets = static_cast<std::uint64_t>(std::llround(mean_of(tx)));
        m.rx_packets = static_cast<std::uint64_t>(std::llround(mean_of(rx)));
        m.dropped_packets = static_cast<std::uint64_t>(std::llround(mean_of(drop)));
        m.collision_events = static_cast<std::uint64_t>(std::llround(mean_of(coll)));
        out.push_back(m);
    }
    return out;
}

int run_scenario_family(const FamilyOptions& options, std::ostream& log, std::ostream& err)
{
    std::vector<FamilyPoint> points;
    try {
        const Scenario base = load_scenario(options.config, options.overrides);
        points = family_points(options.family, base, options.replications);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        std::error_code ec;
        std::filesystem::create_directories(options.out_dir, ec);
        if (ec)
            throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());
        const auto rows = run_points(points, options.jobs, &log);
        const auto mean = aggregate_mean(points, rows);
        const auto stem = "family" + std::to_string(options.family);
        export_csv(options.out_dir / (stem + "_runs.csv"), rows);
        export_csv(options.out_dir / (stem + "_mean.csv"), mean);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

std::string plotdata(std::string_view csv, std::string_view x, std::string_view series,
                     std::string_view y)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < csv.size()) {
        auto nl = csv.find('\n', start);
        if (nl == std::string_view::npos)
            nl = csv.size();
        auto line = csv.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            lines.push_back(line);
        start = nl + 1;
    }
    if (lines.empty())
        return {};

    const auto header = split_fields(lines.front());
    auto column = [&](std::string_view name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ConfigError("unknown column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cx = column(x);
    const std::size_t cs = column(series);
    const std::size_t cy = column(y);

    std::map<std::string, std::vector<std::pair<double, std::string>>> groups;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != header.size())
            throw ConfigError("row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(header.size()));
        double xv = 0.0;
        try {
            xv = std::stod(std::string(fields[cx]));
        } catch (const std::exception&) {
            throw ConfigError("row " + std::to_string(i + 1) + ": x value '" + std::string(fields[cx]) +
                              "' is not numeric");
        }
        groups[std::string(fields[cs])].emplace_back(xv, std::string(fields[cy]));
    }

    std::string out;
    bool first = true;
    for (auto& [key, pts] : groups) {
        std::stable_sort(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (!first)
            out += '\n';
        first = false;
        out += fmt::format("# {}={}\n", series, key);
        for (const auto& [xv, yv] : pts)
            out += fmt::format("{:g} {}\n", xv, yv);
    }
    return out;
}

int emit_plotdata(const PlotOptions& options, std::ostream& out, std::ostream& err)
{
    std::string text;
    try {
        text = read_file(options.csv);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    try {
        out << plotdata(text, options.x, options.series, options.y);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

} // namespace uavsim

#include "uavsim/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

namespace uavsim {

std::string_view short_name(MobilityModelKind kind)
{
    switch (kind) {
    case MobilityModelKind::ConstantPosition: return "const";
    case MobilityModelKind::GaussMarkov: return "gm";
    case MobilityModelKind::RandomDirection2D: return "rd2d";
    }
    return "?";
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out))
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, value));
    return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value)
{
    std::uint64_t out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, value));
    return out;
}

std::uint32_t parse_u32(std::string_view key, std::string_view value)
{
    const auto v = parse_unsigned(key, value);
    if (v > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError(fmt::format("{}: {} is out of range", key, value));
    return static_cast<std::uint32_t>(v);
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

MobilityModelKind parse_mobility(std::string_view value)
{
    if (value == "constant" || value == "const" || value == "constant_position")
        return MobilityModelKind::ConstantPosition;
    if (value == "gauss_markov" || value == "gm")
        return MobilityModelKind::GaussMarkov;
    if (value == "random_direction_2d" || value == "rd2d")
        return MobilityModelKind::RandomDirection2D;
    throw ConfigError(fmt::format("uav_mobility: unknown model '{}'", value));
}

std::string_view long_name(MobilityModelKind kind)
{
    switch (kind) {
    case MobilityModelKind::ConstantPosition: return "constant";
    case MobilityModelKind::GaussMarkov: return "gauss_markov";
    case MobilityModelKind::RandomDirection2D: return "random_direction_2d";
    }
    return "?";
}

Box parse_area(std::string_view value)
{
    double v[6];
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        const auto part = trim(value.substr(pos, comma == std::string_view::npos ? value.npos
                                                                                 : comma - pos));
        if (count == 6)
            throw ConfigError("area: expected 6 comma-separated values");
        v[count++] = parse_double("area", part);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    if (count != 6)
        throw ConfigError("area: expected x_min,x_max,y_min,y_max,z_min,z_max");
    return Box{v[0], v[1], v[2], v[3], v[4], v[5]};
}

struct Field {
    std::string_view name;
    std::function<void(Scenario&, std::string_view)> set;
    std::function<std::string(const Scenario&)> get;
};

template <class T>
Field double_field(std::string_view name, T Scenario::*member)
{
    return Field{name,
                 [name, member](Scenario& s, std::string_view v) { s.*member = parse_double(name, v); },
                 [member](const Scenario& s) { return fmt::format("{}", s.*member); }};
}

Field u32_field(std::string_view name, std::uint32_t Scenario::*member)
{
    return Field{name,
                 [name, member](Scenario& s, std::string_view v) { s.*member = parse_u32(name, v); },
                 [member](const Scenario& s) { return fmt::format("{}", s.*member); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        u32_field("n_sta", &Scenario::n_sta),
        double_field("sta_grid_spacing", &Scenario::sta_grid_spacing),
        Field{"area", [](Scenario& s, std::string_view v) { s.area = parse_area(v); },
              [](const Scenario& s) {
                  return fmt::format("{},{},{},{},{},{}", s.area.x_min, s.area.x_max, s.area.y_min,
                                     s.area.y_max, s.area.z_min, s.area.z_max);
              }},
        Field{"uav_mobility", [](Scenario& s, std::string_view v) { s.uav_mobility = parse_mobility(v); },
              [](const Scenario& s) { return std::string(long_name(s.uav_mobility)); }},
        double_field("uav_mean_speed", &Scenario::uav_mean_speed),
        double_field("gm_alpha", &Scenario::gm_alpha),
        double_field("gm_timestep", &Scenario::gm_timestep),
        Field{"gm_speed_std",
              [](Scenario& s, std::string_view v) {
                  if (v == "auto")
                      s.gm_speed_std.reset();
                  else
                      s.gm_speed_std = parse_double("gm_speed_std", v);
              },
              [](const Scenario& s) {
                  return s.gm_speed_std ? fmt::format("{}", *s.gm_speed_std) : std::string("auto");
              }},
        double_field("gm_direction_std", &Scenario::gm_direction_std),
        double_field("gm_pitch_std", &Scenario::gm_pitch_std),
        double_field("gm_mean_pitch", &Scenario::gm_mean_pitch),
        double_field("rd_pause", &Scenario::rd_pause),
        double_field("max_range", &Scenario::max_range),
        u32_field("rts_threshold", &Scenario::rts_threshold),
        double_field("data_rate_phy", &Scenario::data_rate_phy),
        Field{"eifs", [](Scenario& s, std::string_view v) { s.eifs = parse_bool("eifs", v); },
              [](const Scenario& s) { return std::string(s.eifs ? "true" : "false"); }},
        u32_field("queue_capacity", &Scenario::queue_capacity),
        double_field("queue_max_delay", &Scenario::queue_max_delay),
        double_field("traffic_rate_per_sta", &Scenario::traffic_rate_per_sta),
        u32_field("payload_size", &Scenario::payload_size),
        double_field("on_duration", &Scenario::on_duration),
        double_field("off_duration", &Scenario::off_duration),
        double_field("app_start", &Scenario::app_start),
        double_field("sim_time", &Scenario::sim_time),
        Field{"seed", [](Scenario& s, std::string_view v) { s.seed = parse_unsigned("seed", v); },
              [](const Scenario& s) { return fmt::format("{}", s.seed); }},
        double_field("beacon_interval", &Scenario::beacon_interval),
    };
    return table;
}

const Field* find_field(std::string_view key)
{
    for (const auto& f : fields())
        if (f.name == key)
            return &f;
    return nullptr;
}

void require(bool ok, std::string_view message)
{
    if (!ok)
        throw ConfigError(std::string(message));
}

std::uint32_t lattice_side(std::uint32_t n)
{
    std::uint32_t k = 0;
    while (static_cast<std::uint64_t>(k) * k < n)
        ++k;
    return k;
}

} // namespace

void apply_setting(Scenario& scenario, std::string_view key, std::string_view value)
{
    const Field* field = find_field(key);
    if (field == nullptr)
        throw ConfigError(fmt::format("unknown key '{}'", key));
    if (value.empty())
        throw ConfigError(fmt::format("{}: missing value", key));
    field->set(scenario, value);
}

Scenario parse_scenario(std::string_view text)
{
    Scenario scenario;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        auto apply = [&](std::string_view key, std::string_view value) {
            if (key.empty() || value.empty())
                throw ConfigError("expected key = value", line_no);
            try {
                apply_setting(scenario, key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), line_no);
            }
        };

        const auto equals = std::count(line.begin(), line.end(), '=');
        if (equals == 0)
            throw ConfigError(fmt::format("expected key = value, got '{}'", line), line_no);
        if (equals == 1) {
            const auto eq = line.find('=');
            apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            continue;
        }
        // Several settings on one line: whitespace-separated key=value tokens.
        std::size_t tpos = 0;
        while (tpos < line.size()) {
            const auto start = line.find_first_not_of(" \t", tpos);
            if (start == std::string_view::npos)
                break;
            const auto stop = line.find_first_of(" \t", start);
            const auto token = line.substr(start, stop == std::string_view::npos ? line.npos : stop - start);
            tpos = stop == std::string_view::npos ? line.size() : stop;
            const auto eq = token.find('=');
            if (eq == std::string_view::npos || token.find('=', eq + 1) != std::string_view::npos)
                throw ConfigError(fmt::format("malformed setting '{}'", token), line_no);
            apply(token.substr(0, eq), token.substr(eq + 1));
        }
    }
    validate(scenario);
    return scenario;
}

void validate(const Scenario& s)
{
    require(s.sim_time > 0.0, "sim_time must be > 0");
    require(s.gm_alpha >= 0.0 && s.gm_alpha <= 1.0, "gm_alpha must lie in [0, 1]");
    require(s.max_range > 0.0, "max_range must be > 0");
    require(s.rts_threshold <= 65535, "rts_threshold must lie in [0, 65535]");
    require(s.data_rate_phy == 12e6, "data_rate_phy is fixed at 12e6 (OFDM 12 Mbps)");
    require(s.area.x_min < s.area.x_max && s.area.y_min < s.area.y_max &&
                s.area.z_min <= s.area.z_max,
            "area bounds must satisfy min < max");
    require(s.sta_grid_spacing > 0.0, "sta_grid_spacing must be > 0");
    require(s.uav_mean_speed >= 0.0, "uav_mean_speed must be >= 0");
    require(s.gm_timestep > 0.0, "gm_timestep must be > 0");
    require(!s.gm_speed_std || *s.gm_speed_std >= 0.0, "gm_speed_std must be >= 0");
    require(s.gm_direction_std >= 0.0 && s.gm_pitch_std >= 0.0, "noise std must be >= 0");
    require(std::abs(s.gm_mean_pitch) < M_PI / 2, "gm_mean_pitch must lie in (-pi/2, pi/2)");
    require(s.rd_pause >= 0.0, "rd_pause must be >= 0");
    require(s.queue_capacity > 0, "queue_capacity must be > 0");
    require(s.queue_max_delay > 0.0, "queue_max_delay must be > 0");
    require(s.traffic_rate_per_sta > 0.0, "traffic_rate_per_sta must be > 0");
    require(s.payload_size > 0, "payload_size must be > 0");
    require(s.on_duration > 0.0, "on_duration must be > 0");
    require(s.off_duration >= 0.0, "off_duration must be >= 0");
    require(s.app_start >= 0.0 && s.app_start < s.sim_time, "app_start must lie in [0, sim_time)");
    require(s.beacon_interval > 0.0, "beacon_interval must be > 0");

    for (const auto& p : sensor_positions(s)) {
        if (p.x < s.area.x_min || p.x > s.area.x_max || p.y < s.area.y_min || p.y > s.area.y_max)
            throw ConfigError(fmt::format("sensor grid ({} sensors, spacing {} m) does not fit the area",
                                          s.n_sta, s.sta_grid_spacing));
    }
}

std::string format_scenario(const Scenario& scenario)
{
    std::string out;
    for (const auto& f : fields())
        out += fmt::format("{} = {}\n", f.name, f.get(scenario));
    return out;
}

std::vector<Vec3> sensor_positions(const Scenario& s)
{
    std::vector<Vec3> out;
    if (s.n_sta == 0)
        return out;
    const std::uint32_t side = lattice_side(s.n_sta);
    const double span = (side - 1) * s.sta_grid_spacing;
    const double x0 = 0.5 * (s.area.x_min + s.area.x_max) - 0.5 * span;
    const double y0 = 0.5 * (s.area.y_min + s.area.y_max) - 0.5 * span;
    out.reserve(s.n_sta);
    for (std::uint32_t i = 0; i < s.n_sta; ++i) {
        const std::uint32_t row = i / side;
        const std::uint32_t col = i % side;
        out.push_back(Vec3{x0 + col * s.sta_grid_spacing, y0 + row * s.sta_grid_spacing, 0.0});
    }
    return out;
}

Vec3 uav_start_position(const Scenario& s)
{
    return Vec3{0.5 * (s.area.x_min + s.area.x_max), 0.5 * (s.area.y_min + s.area.y_max),
                0.5 * (s.area.z_min + s.area.z_max)};
}

bool is_sweepable(std::string_view parameter)
{
    return parameter != "seed" && find_field(parameter) != nullptr;
}

std::vector<SweepPoint> expand_sweep(const Scenario& base, std::string_view parameter,
                                     std::span<const std::string> values, std::uint32_t replications)
{
    if (!is_sweepable(parameter))
        throw ConfigError(fmt::format("'{}' is not a sweepable parameter", parameter));

    std::vector<SweepPoint> out;
    out.reserve(values.size() * replications);
    for (std::size_t i = 0; i < values.size(); ++i) {
        Scenario point = base;
        apply_setting(point, parameter, values[i]);
        validate(point);
        for (std::uint32_t r = 0; r < replications; ++r) {
            SweepPoint sp{point, base.seed + r, i, r};
            sp.scenario.seed = sp.seed;
            out.push_back(std::move(sp));
        }
    }
    return out;
}

} // namespace uavsim

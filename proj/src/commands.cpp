#include "bounce/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bounce/error.hpp"
#include "bounce/parallel.hpp"

namespace bounce {

std::string format_number(double x)
{
    if (std::isnan(x)) {
        return {};
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

void write_row(std::ostream &out, std::size_t index, const CollisionEvent &e, const Impact &impact)
{
    const bool plate_event = e.kind == EventKind::plate_hit || e.kind == EventKind::upper_plate_hit ||
                             (e.kind == EventKind::triple && &impact == &e.first);
    out << index << ',' << to_string(e.kind) << ',' << format_number(e.time) << ',' << to_string(impact.body) << ','
        << format_number(impact.v_pre) << ',' << format_number(impact.v_post) << ','
        << (plate_event ? format_number(e.plate_velocity) : std::string()) << ',' << format_number(impact.z) << '\n';
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

// JSON numbers for finite values, null otherwise.
nlohmann::ordered_json num(double x)
{
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

double max_speed(const TrajectoryRecord &rec)
{
    double m = 0.0;
    for (const PhasePoint &p : rec.section) {
        m = std::max(m, std::abs(p.v));
    }
    for (const CollisionEvent &e : rec.events) {
        if (std::isfinite(e.first.v_post)) {
            m = std::max(m, std::abs(e.first.v_post));
        }
        if (e.second && std::isfinite(e.second->v_post)) {
            m = std::max(m, std::abs(e.second->v_post));
        }
    }
    return m;
}

int outcome_code(const RunResult &result)
{
    for (const TrajectoryRecord &rec : result.records) {
        if (rec.outcome != Outcome::normal) {
            return 3;
        }
    }
    return 0;
}

bool write_file(const std::filesystem::path &path, const std::string &content, std::ostream &log)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        log << "error: cannot write " << path.string() << '\n';
        return false;
    }
    return true;
}

} // namespace

void write_events_csv(std::ostream &out, const TrajectoryRecord &record)
{
    out << "event_index,kind,time,body,v_pre,v_post,plate_velocity,z\n";
    for (std::size_t i = 0; i < record.events.size(); ++i) {
        const CollisionEvent &e = record.events[i];
        write_row(out, i, e, e.first);
        if (e.second) {
            write_row(out, i, e, *e.second);
        }
    }
}

int auto_window(const ScenarioConfig &config, std::size_t n)
{
    if (config.envelope_window > 0) {
        return config.envelope_window;
    }
    return std::max<int>(8, static_cast<int>(n / 16));
}

std::string summary_json(const ScenarioConfig &config, const RunResult &result)
{
    using json = nlohmann::ordered_json;
    json j;
    j["schema_version"] = summary_schema_version;
    j["scenario"] = config.id;
    j["model"] = std::string(to_string(config.model));
    json cfg = json::object();
    for (const auto &[k, v] : config.echo) {
        cfg[k] = v;
    }
    j["config"] = cfg;
    json runs = json::array();
    for (const TrajectoryRecord &rec : result.records) {
        json r;
        r["outcome"] = std::string(to_string(rec.outcome));
        r["outcome_detail"] = rec.outcome_detail;
        r["n_events"] = rec.events.size();
        r["n_section"] = rec.section.size();
        if (!rec.section.empty()) {
            r["initial"] = {{"t", num(rec.section.front().t)}, {"v", num(rec.section.front().v)}};
            r["final"] = {{"t", num(rec.section.back().t)}, {"v", num(rec.section.back().v)}};
        } else {
            r["initial"] = nullptr;
            r["final"] = nullptr;
        }
        r["max_speed"] = num(max_speed(rec));
        try {
            const EnvelopeOptions opts{config.seed == 0 ? EnvelopeOptions{}.seed : config.seed};
            const EnvelopeReport env = envelope(rec, auto_window(config, rec.section.size()), opts);
            r["envelope"] = {{"window", env.window_size},
                             {"verdict", std::string(to_string(env.verdict))},
                             {"trend_slope", num(env.trend_slope)},
                             {"slope_lower", num(env.slope_lower)},
                             {"first_half_sup", num(env.first_half_sup)},
                             {"second_half_sup", num(env.second_half_sup)}};
        } catch (const Error &) {
            r["envelope"] = nullptr;
        }
        runs.push_back(r);
    }
    j["runs"] = runs;
    j["threshold_crossing_time"] = result.threshold_time ? num(*result.threshold_time) : json(nullptr);
    if (result.resonance) {
        const ResonantRun &res = *result.resonance;
        j["resonance"] = {{"variant", config.resonant == ResonantVariant::gamma1 ? "gamma1" : "gamma2"},
                          {"m2", config.m2},
                          {"t0", num(res.record.section.front().t)},
                          {"v0", num(res.record.section.front().v)},
                          {"hops", res.hop_deviation.size()},
                          {"final_v", num(res.record.section.back().v)},
                          {"max_hop_deviation", num(res.max_deviation)},
                          {"free_run_agreement", res.free_run_agreement}};
    }
    if (result.singular) {
        const SingularRun &s = *result.singular;
        j["singular"] = {{"predicted_jump", num(s.predicted_jump)},
                         {"fitted_slope", num(s.fitted_slope)},
                         {"fit_events", s.fit_events},
                         {"increments_positive", s.increments_positive},
                         {"monotone", s.monotone},
                         {"stated_inequality_holds", s.stated_inequality_holds},
                         {"min_effective_speed", num(s.min_effective_speed)},
                         {"stopped_by_criterion", s.stopped_by_criterion}};
    }
    return j.dump(2) + "\n";
}

void write_portrait_csv(std::ostream &out, const std::vector<PortraitRow> &rows)
{
    out << "trajectory_id,event_index,phase,value\n";
    for (const PortraitRow &r : rows) {
        out << r.trajectory_id << ',' << r.event_index << ',' << format_number(r.phase) << ','
            << format_number(r.value) << '\n';
    }
}

double GridAxis::value(long i) const
{
    if (count <= 1) {
        return lo;
    }
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<GridAxis> parse_grid(std::string_view spec)
{
    std::vector<GridAxis> axes;
    auto trimmed = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
            s.remove_suffix(1);
        }
        return s;
    };
    spec = trimmed(spec);
    if (spec.empty()) {
        return axes;
    }
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t end = std::min(spec.find(',', pos), spec.size());
        const std::string_view item = trimmed(spec.substr(pos, end - pos));
        pos = end + 1;
        const auto eq = item.find('=');
        const auto c1 = item.find(':', eq);
        const auto c2 = c1 == std::string_view::npos ? c1 : item.find(':', c1 + 1);
        if (eq == std::string_view::npos || c2 == std::string_view::npos) {
            raise(ErrorKind::ConfigInvalid, "grid axis '" + std::string(item) + "' is not name=lo:hi:count");
        }
        GridAxis axis;
        axis.name = std::string(trimmed(item.substr(0, eq)));
        auto number = [&](std::string_view s, double &out) {
            s = trimmed(s);
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                raise(ErrorKind::ConfigInvalid, "grid axis '" + axis.name + "': bad number '" + std::string(s) + "'");
            }
        };
        number(item.substr(eq + 1, c1 - eq - 1), axis.lo);
        number(item.substr(c1 + 1, c2 - c1 - 1), axis.hi);
        double count = 0.0;
        number(item.substr(c2 + 1), count);
        if (count < 0 || count != std::floor(count) || axis.name.empty()) {
            raise(ErrorKind::ConfigInvalid, "grid axis '" + axis.name + "': count must be a non-negative integer");
        }
        axis.count = static_cast<long>(count);
        axes.push_back(axis);
    }
    return axes;
}

int cmd_simulate(const std::filesystem::path &config_path, const std::filesystem::path &out_dir, int threads,
                 std::ostream &log)
{
    ScenarioConfig config;
    try {
        config = load_config(config_path);
    } catch (const Error &e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    }
    RunResult result;
    try {
        result = run_scenario(config, threads);
    } catch (const Error &e) {
        log << "run failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return 1;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        std::ostringstream csv;
        write_events_csv(csv, result.records[i]);
        const std::string name = i == 0 ? "events.csv" : "events_" + std::to_string(i) + ".csv";
        if (!write_file(out_dir / name, csv.str(), log)) {
            return 1;
        }
    }
    if (!write_file(out_dir / "summary.json", summary_json(config, result), log)) {
        return 1;
    }
    const int code = outcome_code(result);
    if (code == 3) {
        log << "singular outcome: " << result.records.front().outcome_detail << '\n';
    }
    return code;
}

int cmd_sweep(const std::filesystem::path &config_path, std::string_view grid, const std::filesystem::path &out_dir,
              int threads, std::ostream &log)
{
    ConfigText base;
    std::vector<GridAxis> axes;
    try {
        base = ConfigText::load(config_path);
        axes = parse_grid(grid);
        (void)build_config(base);
    } catch (const Error &e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    }
    long cells = axes.empty() ? 0 : 1;
    for (const GridAxis &a : axes) {
        cells *= a.count;
    }

    struct Cell {
        std::vector<double> values;
        std::string status = "ok";
        std::string verdict;
        std::size_t n_events = 0;
        double final_t = std::nan("");
        double final_v = std::nan("");
        double max_speed = std::nan("");
        std::string outcome;
        std::string message;
    };
    std::vector<Cell> results(static_cast<std::size_t>(cells));
    parallel_for(results.size(), threads, [&](std::size_t index) {
        Cell &cell = results[index];
        ConfigText text = base;
        long rest = static_cast<long>(index);
        cell.values.resize(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            const long i = rest % axes[k].count;
            rest /= axes[k].count;
            cell.values[k] = axes[k].value(i);
        }
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const std::string key = axes[k].name == "t0"   ? "initial.t"
                                    : axes[k].name == "v0" ? "initial.v"
                                                           : axes[k].name;
            text.set(key, format_number(cell.values[k]));
        }
        try {
            const ScenarioConfig config = build_config(text);
            RunResult run = run_scenario(config, 1);
            const TrajectoryRecord &rec = run.records.front();
            cell.n_events = rec.events.size();
            if (!rec.section.empty()) {
                cell.final_t = rec.section.back().t;
                cell.final_v = rec.section.back().v;
            }
            cell.max_speed = max_speed(rec);
            cell.outcome = std::string(to_string(rec.outcome));
            try {
                const EnvelopeOptions opts{config.seed == 0 ? EnvelopeOptions{}.seed : config.seed};
                cell.verdict = std::string(
                    to_string(envelope(rec, auto_window(config, rec.section.size()), opts).verdict));
            } catch (const Error &e) {
                cell.verdict = "inconclusive";
                cell.message = e.what();
            }
        } catch (const Error &e) {
            cell.status = "error:" + std::string(to_string(e.kind()));
            cell.message = e.what();
        }
    });

    std::ostringstream csv;
    csv << "cell_index";
    for (const GridAxis &a : axes) {
        csv << ',' << csv_field(a.name);
    }
    csv << ",status,verdict,n_events,final_t,final_v,max_speed,outcome,message\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Cell &c = results[i];
        csv << i;
        for (double v : c.values) {
            csv << ',' << format_number(v);
        }
        csv << ',' << c.status << ',' << c.verdict << ',' << c.n_events << ',' << format_number(c.final_t) << ','
            << format_number(c.final_v) << ',' << format_number(c.max_speed) << ',' << c.outcome << ','
            << csv_field(c.message) << '\n';
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    return write_file(out_dir / "sweep.csv", csv.str(), log) ? 0 : 1;
}

int cmd_portrait(const std::filesystem::path &config_path, PortraitCoords coords,
                 const std::filesystem::path &out_dir, std::ostream &log)
{
    ScenarioConfig config;
    try {
        config = load_config(config_path);
        if (coords == PortraitCoords::ty && !config.l) {
            raise(ErrorKind::ConfigInvalid, "field scenario.l: missing (needed for ty coordinates)");
        }
    } catch (const Error &e) {
        log << "config error: " << e.what() << '\n';
        return 2;
    }
    std::vector<PortraitRow> rows;
    try {
        const RunResult result = run_scenario(config, 1);
        const PlatePair *plates = config.plates ? &*config.plates : nullptr;
        rows = phase_portrait(result.records, coords, config.l.value_or(1.0), plates);
    } catch (const Error &e) {
        log << "run failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.kind() == ErrorKind::InvalidScale ? 2 : 1;
    }
    std::ostringstream csv;
    write_portrait_csv(csv, rows);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    return write_file(out_dir / "portrait.csv", csv.str(), log) ? 0 : 1;
}

} // namespace bounce

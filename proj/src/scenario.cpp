#include "bounce/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bounce/error.hpp"

namespace bounce {

std::string_view to_string(Model model) noexcept
{
    switch (model) {
    case Model::fermi_ulam:
        return "fermi_ulam";
    case Model::fermi_ulam_singular:
        return "fermi_ulam_singular";
    case Model::one_ball:
        return "one_ball";
    case Model::two_ball:
        return "two_ball";
    case Model::restricted_case1:
        return "restricted_case1";
    case Model::restricted_case2:
        return "restricted_case2";
    }
    return "one_ball";
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(int line, const std::string &msg)
{
    raise(ErrorKind::ConfigInvalid, "line " + std::to_string(line) + ": " + msg);
}

} // namespace

ConfigText ConfigText::parse(std::string_view text)
{
    ConfigText out;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                bad_line(line_no, "malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            bad_line(line_no, "expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) {
            bad_line(line_no, "empty key");
        }
        if (section.empty()) {
            bad_line(line_no, "key '" + std::string(key) + "' outside any [section]");
        }
        out.set(section + "." + std::string(key), std::string(trim(line.substr(eq + 1))));
        out.entries_.back().line = line_no;
    }
    return out;
}

ConfigText ConfigText::load(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorKind::ConfigInvalid, "cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ConfigText::set(const std::string &key, const std::string &value)
{
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ConfigEntry &e) { return e.key == key; });
    if (it != entries_.end()) {
        ConfigEntry moved = *it;
        entries_.erase(it);
        moved.value = value;
        entries_.push_back(moved);
        return;
    }
    entries_.push_back({key, value, 0});
}

const ConfigEntry *ConfigText::find(std::string_view key) const
{
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if (it->key == key) {
            return &*it;
        }
    }
    return nullptr;
}

namespace {

class Reader {
public:
    explicit Reader(const ConfigText &text) : text_(text) {}

    [[noreturn]] void fail(std::string_view key, const std::string &msg) const
    {
        const ConfigEntry *e = text_.find(key);
        std::string where = e != nullptr && e->line > 0 ? "line " + std::to_string(e->line) + ": " : "";
        raise(ErrorKind::ConfigInvalid, where + "field " + std::string(key) + ": " + msg);
    }

    [[nodiscard]] bool has(std::string_view key) const { return text_.find(key) != nullptr; }

    [[nodiscard]] std::string str(std::string_view key) const
    {
        used_.insert(std::string(key));
        const ConfigEntry *e = text_.find(key);
        if (e == nullptr) {
            fail(key, "missing");
        }
        return e->value;
    }

    [[nodiscard]] double number(std::string_view key) const { return parse_number(key, str(key)); }

    [[nodiscard]] double number(std::string_view key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] std::optional<double> maybe(std::string_view key) const
    {
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key);
    }

    [[nodiscard]] long integer(std::string_view key) const
    {
        const std::string s = str(key);
        long v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            fail(key, "not an integer: '" + s + "'");
        }
        return v;
    }

    [[nodiscard]] std::vector<double> list(std::string_view key, char sep = ',') const
    {
        std::vector<double> out;
        const std::string s = str(key);
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const std::size_t end = std::min(s.find(sep, pos), s.size());
            out.push_back(parse_number(key, std::string(trim(std::string_view(s).substr(pos, end - pos)))));
            pos = end + 1;
        }
        return out;
    }

    double parse_number(std::string_view key, const std::string &s) const
    {
        double v = 0.0;
        const char *b = s.data();
        const char *e = s.data() + s.size();
        if (b != e && *b == '+') {
            ++b;
        }
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
            fail(key, "not a finite number: '" + s + "'");
        }
        return v;
    }

    void reject_unknown() const
    {
        for (const ConfigEntry &e : text_.entries()) {
            if (used_.count(e.key) == 0) {
                fail(e.key, "unknown or unused for this model");
            }
        }
    }

private:
    const ConfigText &text_;
    mutable std::set<std::string> used_;
};

ForcingProfile read_profile(const Reader &r, const std::string &sec)
{
    const std::string kind = r.str(sec + ".kind");
    try {
        if (kind == "constant") {
            return ForcingProfile::constant(r.number(sec + ".value", 0.0), r.number(sec + ".period", 1.0));
        }
        if (kind == "sinusoid") {
            return ForcingProfile::sinusoid(r.number(sec + ".period", 1.0), r.number(sec + ".amplitude"),
                                            r.number(sec + ".phase", 0.0), r.number(sec + ".offset", 0.0));
        }
        if (kind == "harmonics") {
            std::vector<ForcingProfile::Harmonic> terms;
            const std::string key = sec + ".terms";
            const std::string s = r.str(key);
            std::size_t pos = 0;
            while (pos <= s.size()) {
                const std::size_t end = std::min(s.find(',', pos), s.size());
                const std::string term(trim(std::string_view(s).substr(pos, end - pos)));
                pos = end + 1;
                const auto c1 = term.find(':');
                const auto c2 = c1 == std::string::npos ? c1 : term.find(':', c1 + 1);
                if (c2 == std::string::npos) {
                    r.fail(key, "harmonic terms are multiple:amplitude:phase");
                }
                const double m = r.parse_number(key, term.substr(0, c1));
                if (m != std::floor(m) || m < 1) {
                    r.fail(key, "harmonic multiples must be positive integers");
                }
                terms.push_back({static_cast<int>(m), r.parse_number(key, term.substr(c1 + 1, c2 - c1 - 1)),
                                 r.parse_number(key, term.substr(c2 + 1))});
            }
            return ForcingProfile::harmonics(r.number(sec + ".period", 1.0), std::move(terms),
                                             r.number(sec + ".offset", 0.0));
        }
        if (kind == "polynomial") {
            const std::vector<double> w = r.list(sec + ".window");
            if (w.size() != 2) {
                r.fail(sec + ".window", "expected lo, hi");
            }
            return ForcingProfile::polynomial(r.list(sec + ".coefficients"), w[0], w[1]);
        }
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::ConfigInvalid) {
            throw;
        }
        r.fail(sec + ".kind", e.what());
    }
    r.fail(sec + ".kind", "unknown profile kind '" + kind + "'");
}

Model read_model(const Reader &r)
{
    const std::string m = r.str("scenario.model");
    for (Model model : {Model::fermi_ulam, Model::fermi_ulam_singular, Model::one_ball, Model::two_ball,
                        Model::restricted_case1, Model::restricted_case2}) {
        if (m == to_string(model)) {
            return model;
        }
    }
    r.fail("scenario.model", "unknown model '" + m + "'");
}

std::vector<PhasePoint> read_points(const Reader &r)
{
    if (r.has("initial.points")) {
        std::vector<PhasePoint> pts;
        const std::string key = "initial.points";
        const std::string s = r.str(key);
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const std::size_t end = std::min(s.find(',', pos), s.size());
            const std::string item(trim(std::string_view(s).substr(pos, end - pos)));
            pos = end + 1;
            const auto c = item.find(':');
            if (c == std::string::npos) {
                r.fail(key, "points are t:v pairs separated by commas");
            }
            pts.push_back({r.parse_number(key, item.substr(0, c)), r.parse_number(key, item.substr(c + 1))});
        }
        return pts;
    }
    return {{r.number("initial.t"), r.number("initial.v")}};
}

} // namespace

ScenarioConfig build_config(const ConfigText &text)
{
    const Reader r(text);
    ScenarioConfig c;
    for (const ConfigEntry &e : text.entries()) {
        c.echo.emplace_back(e.key, e.value);
    }
    std::sort(c.echo.begin(), c.echo.end());
    if (r.has("scenario.id")) {
        c.id = r.str("scenario.id");
    }
    c.model = read_model(r);
    c.g = r.number("scenario.g");
    if (r.has("scenario.seed")) {
        c.seed = static_cast<std::uint64_t>(r.integer("scenario.seed"));
    }
    c.l = r.maybe("scenario.l");
    if (r.has("scenario.envelope_window")) {
        c.envelope_window = static_cast<int>(r.integer("scenario.envelope_window"));
        if (c.envelope_window < 8) {
            r.fail("scenario.envelope_window", "must be at least 8");
        }
    }

    c.tolerances.t_tol = r.number("tolerances.t_tol", c.tolerances.t_tol);
    if (r.has("tolerances.max_bracket_steps")) {
        c.tolerances.max_bracket_steps = r.integer("tolerances.max_bracket_steps");
    }
    c.tolerances.grazing_slope_floor = r.number("tolerances.grazing_slope_floor", c.tolerances.grazing_slope_floor);
    c.tolerances.horizon = r.number("tolerances.horizon", c.tolerances.horizon);
    try {
        validate(c.tolerances);
    } catch (const Error &e) {
        r.fail("tolerances", e.what());
    }

    if (r.has("stop.n_events")) {
        c.stop.n_events = r.integer("stop.n_events");
        if (*c.stop.n_events < 0) {
            r.fail("stop.n_events", "must be non-negative");
        }
    }
    c.stop.horizon_time = r.maybe("stop.horizon_time");
    c.stop.v_threshold = r.maybe("stop.v_threshold");
    if (!c.stop.n_events && !c.stop.horizon_time && !c.stop.v_threshold) {
        r.fail("stop", "missing: set n_events, horizon_time or v_threshold");
    }

    const bool fermi = c.model == Model::fermi_ulam || c.model == Model::fermi_ulam_singular;
    if (fermi) {
        if (!(c.g >= 0.0)) {
            r.fail("scenario.g", "must be >= 0 for Fermi-Ulam models");
        }
        PlatePair pair{read_profile(r, "lower"), read_profile(r, "upper"), std::nullopt};
        if (c.model == Model::fermi_ulam_singular) {
            pair.tangency = Tangency{r.number("tangency.t_star"), static_cast<int>(r.integer("tangency.order")),
                                     r.number("tangency.epsilon", 0.1)};
        }
        try {
            verify_plates(pair);
        } catch (const Error &e) {
            r.fail(c.model == Model::fermi_ulam_singular ? "tangency" : "upper", e.what());
        }
        c.plates = std::move(pair);
        c.initial = read_points(r);
        for (const PhasePoint &p : c.initial) {
            if (!(p.v > 0.0)) {
                r.fail("initial", "launch velocities must be positive");
            }
        }
    } else {
        if (!(c.g > 0.0)) {
            r.fail("scenario.g", "must be > 0 for bouncing models");
        }
        c.plate = read_profile(r, "plate");
        if (!c.plate->periodic()) {
            r.fail("plate.kind", "bouncing models need a periodic plate");
        }
        if (r.has("resonant.variant")) {
            const std::string v = r.str("resonant.variant");
            if (v == "gamma1") {
                c.resonant = ResonantVariant::gamma1;
            } else if (v == "gamma2") {
                c.resonant = ResonantVariant::gamma2;
            } else {
                r.fail("resonant.variant", "expected gamma1 or gamma2");
            }
            c.m2 = static_cast<int>(r.integer("resonant.m2"));
            if (c.m2 < 1) {
                r.fail("resonant.m2", "must be a positive integer");
            }
        }
        if (c.model == Model::one_ball) {
            if (c.resonant) {
                if (!c.stop.n_events) {
                    r.fail("stop.n_events", "resonant runs need a hop count");
                }
            } else {
                c.initial = read_points(r);
            }
        } else {
            std::optional<ResonantSpec> spec;
            if (c.resonant) {
                try {
                    spec = make_resonant_spec(*c.resonant, c.m2, *c.plate, c.g);
                } catch (const Error &e) {
                    r.fail("resonant.variant", e.what());
                }
                c.t_start = spec->t0;
            } else {
                c.t_start = r.number("initial.t");
            }
            const double floor_z = c.plate->value(c.t_start);
            for (int i = 0; i < 2; ++i) {
                const std::string sec = i == 0 ? "ball1" : "ball2";
                BallState &b = c.balls[static_cast<std::size_t>(i)];
                b.label = i == 0 ? Body::P1 : Body::P2;
                b.mass = r.number(sec + ".mass", 1.0);
                if (i == 1 && spec && !r.has("ball2.z") && !r.has("ball2.v")) {
                    b.z = floor_z;
                    b.v = resonant_speed(*spec, *c.plate, c.g);
                    continue;
                }
                const std::string z = r.str(sec + ".z");
                b.z = z == "plate" ? floor_z : r.number(sec + ".z");
                b.v = r.number(sec + ".v");
                if (!(b.mass >= 0.0)) {
                    r.fail(sec + ".mass", "must be >= 0");
                }
            }
            if (c.balls[0].mass == 0.0 && c.balls[1].mass == 0.0) {
                r.fail("ball1.mass", "at most one ball may have zero mass");
            }
            if (c.balls[1].mass == 0.0 && c.model != Model::two_ball) {
                r.fail("ball2.mass", "P2 must be massive in restricted models");
            }
            if (c.model == Model::restricted_case1 || c.model == Model::restricted_case2) {
                if (c.balls[0].mass != 0.0) {
                    r.fail("ball1.mass", "restricted models need a zero-mass P1");
                }
                const bool above = c.balls[0].z > c.balls[1].z ||
                                   (c.balls[0].z == c.balls[1].z && c.balls[0].v > c.balls[1].v);
                if (above != (c.model == Model::restricted_case1)) {
                    r.fail("ball1.z", c.model == Model::restricted_case1 ? "P1 must start above P2"
                                                                         : "P1 must start below P2");
                }
            }
            for (const BallState &b : c.balls) {
                if (b.z < floor_z) {
                    r.fail(b.label == Body::P1 ? "ball1.z" : "ball2.z", "ball starts below the plate");
                }
            }
        }
    }
    r.reject_unknown();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    return build_config(ConfigText::load(path));
}

namespace {

std::optional<double> crossing_time(const TrajectoryRecord &rec, const RunStop &stop)
{
    if (!stop.v_threshold) {
        return std::nullopt;
    }
    for (const CollisionEvent &e : rec.events) {
        if (std::abs(e.first.v_post) > *stop.v_threshold ||
            (e.second && std::abs(e.second->v_post) > *stop.v_threshold)) {
            return e.time;
        }
    }
    for (const PhasePoint &p : rec.section) {
        if (std::abs(p.v) > *stop.v_threshold) {
            return p.t;
        }
    }
    return std::nullopt;
}

} // namespace

RunResult run_scenario(const ScenarioConfig &c, int threads)
{
    RunResult out;
    switch (c.model) {
    case Model::fermi_ulam:
        for (const PhasePoint &p : c.initial) {
            out.records.push_back(fermi_ulam_simulate(*c.plates, c.g, p, c.stop, c.tolerances));
        }
        break;
    case Model::fermi_ulam_singular:
        for (const PhasePoint &p : c.initial) {
            SingularStop stop{c.stop.horizon_time, c.stop.v_threshold, c.stop.n_events};
            SingularRun run = singular_run(*c.plates, c.g, p, stop, c.tolerances);
            out.records.push_back(std::move(run.record));
            run.record = {};
            if (!out.singular) {
                out.singular = std::move(run);
            }
        }
        break;
    case Model::one_ball:
        if (c.resonant) {
            const ResonantSpec spec = make_resonant_spec(*c.resonant, c.m2, *c.plate, c.g);
            ResonantRun run = build_resonant(spec, *c.plate, c.g, static_cast<int>(*c.stop.n_events), c.tolerances,
                                             1e-8, threads);
            out.records.push_back(run.record);
            out.resonance = std::move(run);
        } else {
            for (const PhasePoint &p : c.initial) {
                out.records.push_back(one_ball_simulate(p, *c.plate, c.g, c.stop, c.tolerances));
            }
        }
        break;
    case Model::two_ball:
    case Model::restricted_case1:
    case Model::restricted_case2:
        out.records.push_back(two_ball_simulate(c.balls, c.t_start, *c.plate, c.g, c.stop, c.tolerances));
        break;
    }
    for (TrajectoryRecord &rec : out.records) {
        rec.scenario_id = c.id;
    }
    if (!out.records.empty()) {
        out.threshold_time = crossing_time(out.records.front(), c.stop);
    }
    return out;
}

} // namespace bounce

#include "bounce/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "bounce/bouncing.hpp"
#include "bounce/collision.hpp"
#include "bounce/commands.hpp"
#include "bounce/diagnostics.hpp"
#include "bounce/error.hpp"
#include "bounce/fermi_ulam.hpp"
#include "bounce/parallel.hpp"
#include "bounce/scenario.hpp"
#ifdef BOUNCE_LAB_HAS_ORACLE
#include "bounce/oracle.hpp"
#endif

namespace bounce {

bool oracle_available() noexcept
{
#ifdef BOUNCE_LAB_HAS_ORACLE
    return true;
#else
    return false;
#endif
}

namespace {

using clock_type = std::chrono::steady_clock;

struct Check {
    bool pass = false;
    std::string detail;
    bool skipped = false;
};

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

RootSolveSettings solver(const AcceptanceOptions &o)
{
    RootSolveSettings s;
    if (o.t_tol) {
        s.t_tol = *o.t_tol;
    }
    return s;
}

ForcingProfile resonance_plate()
{
    return ForcingProfile::sinusoid(1.0, 0.5);
}

// Hop-by-hop check of a resonant orbit against its closed form, using the
// simulated landings.
Check resonant_criterion(ResonantVariant variant, int hops, const AcceptanceOptions &o, double budget,
                           clock_type::time_point started)
{
    const ForcingProfile plate = resonance_plate();
    const double g = 2.0;
    const ResonantSpec spec = make_resonant_spec(variant, 3, plate, g);
    const ResonantRun run = build_resonant(spec, plate, g, hops, solver(o), 1e-8, o.threads);
    double dv = 0.0;
    double dt = 0.0;
    for (int n = 0; n < hops; ++n) {
        const auto &ev = run.record.events[static_cast<std::size_t>(n)];
        const double launch = n == 0 ? spec.t0 : run.record.events[static_cast<std::size_t>(n - 1)].time;
        const double v_expected = variant == ResonantVariant::gamma2 ? 3.0 + 2.0 * (n + 1) : 3.0;
        const double hop_expected = variant == ResonantVariant::gamma2 ? 3.0 + 2.0 * n : 3.0;
        dv = std::max(dv, std::abs(ev.first.v_post - v_expected));
        dt = std::max(dt, std::abs(ev.time - launch - hop_expected));
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = dv <= 1e-8 && dt <= 1e-8 && elapsed < budget;
    out.detail = std::to_string(hops) + " hops, max |dv| = " + fmt(dv) + ", max |d hop| = " + fmt(dt) +
                 ", free-run agreement " + std::to_string(run.free_run_agreement) + " hops";
    return out;
}

Check criterion_gamma2(const AcceptanceOptions &o, clock_type::time_point t)
{
    return resonant_criterion(ResonantVariant::gamma2, 100, o, 1.0, t);
}

Check criterion_gamma1(const AcceptanceOptions &o, clock_type::time_point t)
{
    return resonant_criterion(ResonantVariant::gamma1, 1000, o, 1.0, t);
}

PlatePair smooth_plates(double a1, double a2, double phase)
{
    return {ForcingProfile::sinusoid(1.0, a1), ForcingProfile::sinusoid(1.0, a2, phase, 1.0), std::nullopt};
}

Check criterion_poincare_cartan(const AcceptanceOptions &o, clock_type::time_point started)
{
    const PlatePair plates = smooth_plates(0.1, 0.1, 1.0);
    const double g = 1.0;
    std::mt19937_64 rng(4101);
    std::uniform_real_distribution<double> amp(-5.0, 5.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    std::string failure;
    for (int loop = 0; loop < 10; ++loop) {
        double a[3];
        double p[3];
        for (int j = 0; j < 3; ++j) {
            a[j] = amp(rng) / (j + 1);
            p[j] = ph(rng);
        }
        LoopCurve curve;
        curve.period = 1.0;
        for (int i = 0; i < 1024; ++i) {
            const double t = i / 1024.0;
            double v = 100.0;
            for (int j = 0; j < 3; ++j) {
                v += a[j] * std::cos(2.0 * std::numbers::pi * (j + 1) * t + p[j]);
            }
            curve.samples.push_back({t, v});
        }
        try {
            const double i0 = poincare_cartan_integral(curve, plates, g);
            const double i1 = poincare_cartan_image_integral(curve, plates, g, solver(o));
            worst = std::max(worst, std::abs(i0 - i1) / std::abs(i0));
        } catch (const Error &e) {
            failure = "loop " + std::to_string(loop) + ": " + e.what();
            break;
        }
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    if (!failure.empty()) {
        out.detail = failure;
        return out;
    }
    out.pass = worst < 1e-6 && elapsed < 10.0;
    out.detail = "10 loops at v ~ 100, max relative change " + fmt(worst);
    return out;
}

Check criterion_singular_k1(const AcceptanceOptions &o, clock_type::time_point started)
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                           Tangency{0.0, 1, 2.0}};
    verify_plates(plates);
    SingularStop stop;
    stop.time_reached = -1e-6;
    SingularOptions opts;
    opts.keep_events = false;
    const SingularRun run = singular_run(plates, 0.0, {-1.0, 10.0}, stop, solver(o), opts);
    const auto &s = run.record.section;
    double worst = 0.0;
    long before = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        worst = std::max(worst, std::abs(s[i + 1].v - s[i].v - 2.0));
    }
    for (const PhasePoint &p : s) {
        before += p.t < -1e-6 ? 1 : 0;
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = worst <= 1e-8 && before > 1000 && run.stopped_by_criterion && elapsed < 5.0;
    out.detail = std::to_string(before) + " collisions before t >= -1e-6, max |dv - 2| = " + fmt(worst);
    return out;
}

Check criterion_singular_k2(const AcceptanceOptions &o, clock_type::time_point started)
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, 0.0, 1.0}, -10.0, 10.0),
                           Tangency{0.0, 2, 2.0}};
    verify_plates(plates);
    SingularStop stop;
    stop.n_events = 201;
    const SingularRun run = singular_run(plates, 0.0, {-0.5, 20.0}, stop, solver(o));
    bool strictly = true;
    const auto &s = run.record.section;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        strictly = strictly && s[i + 1].v > s[i].v;
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = run.fit_events >= 200 && std::abs(run.fitted_slope - 1.0) <= 0.1 && strictly && elapsed < 5.0;
    out.detail = "slope of increments against -4 t_n = " + fmt(run.fitted_slope) + " over " +
                 std::to_string(run.fit_events) + " events, strictly increasing: " + (strictly ? "yes" : "no");
    return out;
}

Check criterion_recurrence(const AcceptanceOptions &, clock_type::time_point started)
{
    const RecurrenceResult r = iterate_recurrence(StepPolynomial::square(), -0.1, 1'000'000);
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t n = 10'001; n < r.sequence.size(); ++n) {
        const double x = static_cast<double>(n) * -r.sequence[n];
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = lo >= 0.8 && hi <= 1.2 && r.partial_sums.back() > 10.0 && r.diverged && elapsed < 5.0;
    out.detail = "n (-s_n) in [" + fmt(lo) + ", " + fmt(hi) + "] for n > 1e4, partial sum " +
                 fmt(r.partial_sums.back());
    return out;
}

Check criterion_boundedness(const AcceptanceOptions &o, clock_type::time_point started)
{
    const PlatePair plates = smooth_plates(0.1, 0.1, 1.0);
    const double g = 2.0;
    struct Run {
        Verdict verdict = Verdict::inconclusive;
        double ratio = 0.0;
        std::string error;
    };
    std::vector<Run> runs(32);
    parallel_for(runs.size(), o.threads, [&](std::size_t i) {
        const PhasePoint start{static_cast<double>(i % 8) / 8.0, 10.0 + 2.5 * static_cast<double>(i / 8)};
        RunStop stop;
        stop.n_events = 1'000'000;
        try {
            const TrajectoryRecord rec = fermi_ulam_simulate(plates, g, start, stop, solver(o), false);
            const EnvelopeReport env = envelope(rec, 1000);
            runs[i].verdict = env.verdict;
            runs[i].ratio = env.second_half_sup / env.first_half_sup;
        } catch (const Error &e) {
            runs[i].error = e.what();
        }
    });
    int bounded = 0;
    double worst = 0.0;
    std::string error;
    for (const Run &r : runs) {
        bounded += r.verdict == Verdict::bounded_evidence ? 1 : 0;
        worst = std::max(worst, r.ratio);
        if (!r.error.empty() && error.empty()) {
            error = r.error;
        }
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = bounded == 32 && elapsed < 300.0;
    out.detail = std::to_string(bounded) + "/32 runs bounded_evidence, worst sup ratio " + fmt(worst);
    if (!error.empty()) {
        out.detail += ", first error: " + error;
    }
    return out;
}

Check criterion_collision_law(const AcceptanceOptions &, clock_type::time_point)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mass(0.0, 10.0);
    std::uniform_real_distribution<double> vel(-10.0, 10.0);
    double dp = 0.0;
    double de = 0.0;
    bool exchange = true;
    for (int i = 0; i < 10'000; ++i) {
        const double m1 = i % 10 == 0 ? 0.0 : mass(rng);
        const double m2 = 0.01 + mass(rng);
        const double v1 = vel(rng);
        const double v2 = vel(rng);
        const VelocityPair post = ball_ball_collide(m1, v1, m2, v2);
        const double p_scale = std::abs(m1 * v1) + std::abs(m2 * v2);
        const double e0 = m1 * v1 * v1 + m2 * v2 * v2;
        dp = std::max(dp, std::abs(m1 * v1 + m2 * v2 - m1 * post.first - m2 * post.second) / p_scale);
        de = std::max(de, std::abs(e0 - m1 * post.first * post.first - m2 * post.second * post.second) / e0);
        const VelocityPair same = ball_ball_collide(m2, v1, m2, v2);
        exchange = exchange && same.first == v2 && same.second == v1;
    }
    Check out;
    out.pass = dp <= 1e-12 && de <= 1e-12 && exchange;
    out.detail = "10^4 tuples, max relative momentum error " + fmt(dp) + ", energy error " + fmt(de) +
                 ", equal-mass exchange exact: " + (exchange ? "yes" : "no");
    return out;
}

#ifdef BOUNCE_LAB_HAS_ORACLE

// Randomised smooth scenario; kind cycles through one ball, Fermi-Ulam, two balls.
ScenarioConfig random_scenario(int index, std::mt19937_64 &rng, const RootSolveSettings &tol)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
    ScenarioConfig c;
    c.id = "random-" + std::to_string(index);
    c.tolerances = tol;
    switch (index % 3) {
    case 0:
        c.model = Model::one_ball;
        c.g = in(1.0, 3.0);
        c.plate = ForcingProfile::sinusoid(1.0, in(0.02, 0.1), in(0.0, 6.0));
        c.initial = {{in(0.0, 1.0), in(1.5, 3.0)}};
        break;
    case 1: {
        c.model = Model::fermi_ulam;
        c.g = in(0.0, 2.0);
        c.plates = smooth_plates(in(0.02, 0.1), in(0.02, 0.1), in(0.0, 6.0));
        c.initial = {{in(0.0, 1.0), in(4.0, 8.0)}};
        break;
    }
    default: {
        c.model = Model::two_ball;
        c.g = in(1.0, 3.0);
        c.plate = ForcingProfile::sinusoid(1.0, in(0.02, 0.1), in(0.0, 6.0));
        c.t_start = in(0.0, 1.0);
        const double z0 = c.plate->value(c.t_start) + in(0.05, 0.5);
        const double z1 = z0 + in(0.2, 1.0);
        c.balls[0] = {in(0.5, 2.0), z1, in(-2.0, 2.0), Body::P1};
        c.balls[1] = {in(0.5, 2.0), z0, in(-1.0, 3.0), Body::P2};
        break;
    }
    }
    return c;
}

TrajectoryRecord engine_run(const ScenarioConfig &c, double horizon)
{
    RunStop stop;
    stop.horizon_time = horizon;
    switch (c.model) {
    case Model::one_ball:
        return one_ball_simulate(c.initial.front(), *c.plate, c.g, stop, c.tolerances);
    case Model::fermi_ulam:
        return fermi_ulam_simulate(*c.plates, c.g, c.initial.front(), stop, c.tolerances);
    default:
        return two_ball_simulate(c.balls, c.t_start, *c.plate, c.g, stop, c.tolerances);
    }
}

Check criterion_oracle(const AcceptanceOptions &o, clock_type::time_point)
{
    const RootSolveSettings tol = solver(o);
    std::mt19937_64 rng(909);
    std::vector<ScenarioConfig> scenarios;
    for (int i = 0; i < 100; ++i) {
        scenarios.push_back(random_scenario(i, rng, tol));
    }
    struct Cmp {
        bool same_kinds = false;
        double worst = 0.0;
        std::size_t events = 0;
        std::string error;
    };
    std::vector<Cmp> cmp(scenarios.size());
    parallel_for(scenarios.size(), o.threads, [&](std::size_t i) {
        const ScenarioConfig &c = scenarios[i];
        const double horizon = (c.model == Model::two_ball ? c.t_start : c.initial.front().t) + 2.0;
        try {
            const TrajectoryRecord a = engine_run(c, horizon);
            const TrajectoryRecord b = oracle_run(c, horizon);
            cmp[i].same_kinds = a.events.size() == b.events.size();
            cmp[i].events = a.events.size();
            for (std::size_t k = 0; cmp[i].same_kinds && k < a.events.size(); ++k) {
                cmp[i].same_kinds = a.events[k].kind == b.events[k].kind;
                cmp[i].worst = std::max(cmp[i].worst, std::abs(a.events[k].time - b.events[k].time));
            }
        } catch (const Error &e) {
            cmp[i].error = e.what();
        }
    });
    int agree = 0;
    double worst = 0.0;
    std::size_t events = 0;
    std::string first_bad;
    for (std::size_t i = 0; i < cmp.size(); ++i) {
        const bool ok = cmp[i].error.empty() && cmp[i].same_kinds && cmp[i].worst <= 5.0 * tol.t_tol;
        agree += ok ? 1 : 0;
        worst = std::max(worst, cmp[i].worst);
        events += cmp[i].events;
        if (!ok && first_bad.empty()) {
            first_bad = scenarios[i].id + (cmp[i].error.empty() ? std::string(" disagrees") : ": " + cmp[i].error);
        }
    }
    Check out;
    out.pass = agree == 100;
    out.detail = std::to_string(agree) + "/100 scenarios agree (" + std::to_string(events) +
                 " events), max |dt| = " + fmt(worst);
    if (!first_bad.empty()) {
        out.detail += ", first failure " + first_bad;
    }
    return out;
}

#endif

Check criterion_case2(const AcceptanceOptions &o, clock_type::time_point started)
{
    const ForcingProfile plate = resonance_plate();
    const double g = 2.0;
    const RootSolveSettings tol = solver(o);
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma1, 3, plate, g);
    const ResonantRun orbit = build_resonant(spec, plate, g, 3, tol);
    const PlatePair pair = restricted_case2_as_fermi_ulam(orbit.record, plate, g);

    // Zero-mass ball launched from the plate under the massive ball's first arc.
    const double ts = spec.t0 + 0.5;
    const PhasePoint launch{ts, 4.0};
    const FlightState p2{spec.t0, plate.value(spec.t0), resonant_speed(spec, plate, g), g};
    RunStop stop;
    stop.n_events = 20;
    const TrajectoryRecord two = two_ball_simulate(
        {BallState{0.0, plate.value(ts), launch.v, Body::P1}, BallState{1.0, p2.position(ts), p2.velocity(ts), Body::P2}},
        ts, plate, g, stop, tol);
    RunStop maps;
    maps.n_events = 10;
    const TrajectoryRecord fu = fermi_ulam_simulate(pair, g, launch, maps, tol);
    double worst = 0.0;
    std::size_t compared = 0;
    bool kinds = true;
    for (std::size_t k = 0; k < std::min(two.events.size(), fu.events.size()); ++k) {
        const CollisionEvent &a = two.events[k];
        const CollisionEvent &b = fu.events[k];
        const bool match = (a.kind == EventKind::plate_hit && b.kind == EventKind::plate_hit) ||
                           (a.kind == EventKind::ball_ball && b.kind == EventKind::upper_plate_hit);
        kinds = kinds && match && a.first.body == Body::P1;
        worst = std::max(worst, std::abs(a.time - b.time));
        ++compared;
    }
    const bool engines_agree = compared == 20 && kinds && worst <= 10.0 * tol.t_tol;

    // Sampled starts below the contact at the massive ball's first landing.
    const Tangency tg = *pair.tangency;
    const double K = 10.0;
    int growth = 0;
    int sampled = 0;
    std::string error;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const PhasePoint start{tg.t_star - tg.epsilon * (0.2 + 0.2 * i), K * (1.1 + 0.25 * j)};
            ++sampled;
            try {
                SingularStop s;
                s.n_events = 400;
                s.time_reached = tg.t_star - 1e-6;
                const SingularRun run = singular_run(pair, g, start, s, tol);
                growth += envelope(run.record, 16).verdict == Verdict::growth_evidence ? 1 : 0;
            } catch (const Error &e) {
                if (error.empty()) {
                    error = e.what();
                }
            }
        }
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - started).count();
    Check out;
    out.pass = engines_agree && growth == sampled && elapsed < 30.0;
    out.detail = std::to_string(compared) + " zero-mass events, engines differ by " + fmt(worst) +
                 (kinds ? "" : " (kind mismatch)") + "; growth_evidence in " + std::to_string(growth) + "/" +
                 std::to_string(sampled) + " sampled starts";
    if (!error.empty()) {
        out.detail += ", first error: " + error;
    }
    return out;
}

std::string read_file(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check criterion_determinism(const AcceptanceOptions &o, clock_type::time_point)
{
    std::filesystem::path dir = o.scratch.empty() ? std::filesystem::temp_directory_path() / "bounce_lab_validate"
                                                  : o.scratch;
    std::filesystem::create_directories(dir);
    const std::filesystem::path cfg = dir / "gamma2.cfg";
    {
        std::ofstream out(cfg);
        out << "[scenario]\nid = gamma2\nmodel = one_ball\ng = 2\n\n[plate]\nkind = sinusoid\nperiod = 1\n"
               "amplitude = 0.5\n\n[resonant]\nvariant = gamma2\nm2 = 3\n\n[stop]\nn_events = 100\n";
        if (o.t_tol) {
            out << "\n[tolerances]\nt_tol = " << format_number(*o.t_tol) << "\n";
        }
    }
    std::ostringstream log;
    const int a = cmd_simulate(cfg, dir / "threads1", 1, log);
    const int b = cmd_simulate(cfg, dir / "threads8", 8, log);
    Check out;
    if (a != 0 || b != 0) {
        out.detail = "simulate failed: " + log.str();
        return out;
    }
    bool same = true;
    for (const char *name : {"events.csv", "summary.json"}) {
        same = same && read_file(dir / "threads1" / name) == read_file(dir / "threads8" / name) &&
               !read_file(dir / "threads1" / name).empty();
    }
    out.pass = same;
    out.detail = same ? "events.csv and summary.json byte-identical at 1 and 8 threads"
                      : "outputs differ between 1 and 8 threads";
    return out;
}

struct Entry {
    const char *name;
    std::function<Check(const AcceptanceOptions &, clock_type::time_point)> run;
};

const std::vector<Entry> &registry()
{
    static const std::vector<Entry> entries{
        {"resonant acceleration (gamma2)", criterion_gamma2},
        {"periodic orbit (gamma1)", criterion_gamma1},
        {"Poincare-Cartan invariance", criterion_poincare_cartan},
        {"singular acceleration k=1", criterion_singular_k1},
        {"singular acceleration k=2", criterion_singular_k2},
        {"harmonic-type divergence of s_{n+1} = s_n + s_n^2", criterion_recurrence},
        {"boundedness evidence, smooth plates", criterion_boundedness},
        {"collision-law conservation", criterion_collision_law},
#ifdef BOUNCE_LAB_HAS_ORACLE
        {"oracle equivalence", criterion_oracle},
#else
        {"oracle equivalence", nullptr},
#endif
        {"zero-mass ball below a periodic ball", criterion_case2},
        {"determinism across thread counts", criterion_determinism},
    };
    return entries;
}

} // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions &options)
{
    if (id < 1 || id > criterion_count) {
        raise(ErrorKind::InvalidArgument, "no criterion " + std::to_string(id));
    }
    const Entry &e = registry()[static_cast<std::size_t>(id - 1)];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    const auto started = clock_type::now();
    if (!e.run) {
        r.status = CriterionStatus::skipped;
        r.detail = "oracle not built; refusing to claim this criterion";
        return r;
    }
    try {
        const Check o = e.run(options, started);
        r.status = o.pass ? CriterionStatus::pass : CriterionStatus::fail;
        r.detail = o.detail;
    } catch (const std::exception &ex) {
        r.status = CriterionStatus::fail;
        r.detail = std::string("raised: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(clock_type::now() - started).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options, std::ostream &out)
{
    std::vector<CriterionResult> results;
    for (int id = 1; id <= criterion_count; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
            continue;
        }
        results.push_back(run_criterion(id, options));
        out << format_result(results.back()) << std::endl;
    }
    return results;
}

std::string format_result(const CriterionResult &r)
{
    const char *tag = r.status == CriterionStatus::pass ? "[PASS]" : r.status == CriterionStatus::fail ? "[FAIL]" : "[SKIP]";
    std::ostringstream os;
    os.precision(3);
    os << tag << ' ' << r.id << ' ' << r.name << ": " << r.detail << " (" << r.seconds << " s)";
    return os.str();
}

} // namespace bounce

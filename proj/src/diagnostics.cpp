#include "bounce/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bounce/error.hpp"
#include "bounce/fermi_ulam.hpp"

namespace bounce {

std::string_view to_string(Verdict verdict) noexcept
{
    switch (verdict) {
    case Verdict::bounded_evidence:
        return "bounded_evidence";
    case Verdict::growth_evidence:
        return "growth_evidence";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

namespace {

double ols_slope(const std::vector<double> &x, const std::vector<double> &y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace

EnvelopeReport envelope(const TrajectoryRecord &record, int window, const EnvelopeOptions &options)
{
    std::vector<double> speeds;
    if (!record.section.empty()) {
        for (const PhasePoint &p : record.section) {
            speeds.push_back(std::abs(p.v));
        }
    } else {
        for (const CollisionEvent &e : record.events) {
            if (std::isfinite(e.first.v_post)) {
                speeds.push_back(std::abs(e.first.v_post));
            }
        }
    }
    return envelope(speeds, window, options);
}

EnvelopeReport envelope(const std::vector<double> &speeds, int window, const EnvelopeOptions &options)
{
    if (window < 8) {
        raise(ErrorKind::InvalidArgument, "envelope window must be at least 8");
    }
    const std::size_t w = static_cast<std::size_t>(window);
    const std::size_t n_windows = speeds.size() / w;
    if (n_windows < 2) {
        std::ostringstream os;
        os << speeds.size() << " speeds do not fill two windows of " << window;
        raise(ErrorKind::TooShort, os.str());
    }
    EnvelopeReport r;
    r.window_size = window;
    std::vector<double> centers;
    for (std::size_t k = 0; k < n_windows; ++k) {
        const auto first = speeds.begin() + static_cast<std::ptrdiff_t>(k * w);
        const auto [mn, mx] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(w));
        r.window_sup.push_back(*mx);
        r.window_inf.push_back(*mn);
        centers.push_back((static_cast<double>(k) + 0.5) * static_cast<double>(w));
    }
    const std::size_t used = n_windows * w;
    const std::size_t half = used / 2;
    r.first_half_sup = *std::max_element(speeds.begin(), speeds.begin() + static_cast<std::ptrdiff_t>(half));
    r.second_half_sup = *std::max_element(speeds.begin() + static_cast<std::ptrdiff_t>(half),
                                          speeds.begin() + static_cast<std::ptrdiff_t>(used));
    r.global_sup = std::max(r.first_half_sup, r.second_half_sup);

    std::vector<double> index(used);
    for (std::size_t i = 0; i < used; ++i) {
        index[i] = static_cast<double>(i);
    }
    r.trend_slope = ols_slope(index, std::vector<double>(speeds.begin(), speeds.begin() + static_cast<std::ptrdiff_t>(used)));

    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n_windows - 1);
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(options.resamples));
    std::vector<double> bx(n_windows);
    std::vector<double> by(n_windows);
    for (int b = 0; b < options.resamples; ++b) {
        for (std::size_t k = 0; k < n_windows; ++k) {
            const std::size_t j = pick(rng);
            bx[k] = centers[j];
            by[k] = r.window_sup[j];
        }
        slopes.push_back(ols_slope(bx, by));
    }
    std::sort(slopes.begin(), slopes.end());
    r.slope_lower = slopes[static_cast<std::size_t>(0.01 * static_cast<double>(slopes.size()))];

    if (r.second_half_sup <= options.bounded_ratio * r.first_half_sup) {
        r.verdict = Verdict::bounded_evidence;
    } else if (r.slope_lower > 0.0) {
        r.verdict = Verdict::growth_evidence;
    } else {
        r.verdict = Verdict::inconclusive;
    }
    return r;
}

double StepPolynomial::operator()(double s) const
{
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc * s * s;
}

RecurrenceResult iterate_recurrence(const StepPolynomial &tau, double s0, long n, const RecurrenceOptions &options)
{
    if (!(s0 < 0.0 && s0 > -options.delta) || n < 0) {
        raise(ErrorKind::InvalidArgument, "s0 must lie in (-delta, 0) and n must be non-negative");
    }
    for (int i = 0; i < 1000; ++i) {
        const double s = s0 * (1.0 - i / 1000.0);
        if (!(tau(s) > 0.0)) {
            raise(ErrorKind::InvalidArgument, "tau must be positive on [s0, 0)");
        }
    }
    RecurrenceResult out;
    out.sequence.reserve(static_cast<std::size_t>(n) + 1);
    out.partial_sums.reserve(static_cast<std::size_t>(n) + 1);
    double s = s0;
    double sum = 0.0;
    for (long k = 0; k <= n; ++k) {
        if (!(s < 0.0 && s > -options.delta)) {
            std::ostringstream os;
            os << "iterate " << k << " = " << s << " left (-" << options.delta << ", 0)";
            raise(ErrorKind::LeftDomain, os.str());
        }
        sum += -s;
        out.sequence.push_back(s);
        out.partial_sums.push_back(sum);
        s += tau(s);
    }
    // Tail fits over k in [n/10, n].
    if (n >= 100) {
        std::vector<double> lk;
        std::vector<double> ls;
        std::vector<double> sums;
        const long from = std::max<long>(1, n / 10);
        const long stride = std::max<long>(1, (n - from) / 1000);
        for (long k = from; k <= n; k += stride) {
            lk.push_back(std::log(static_cast<double>(k)));
            sums.push_back(out.partial_sums[static_cast<std::size_t>(k)]);
            ls.push_back(std::log(out.partial_sums[static_cast<std::size_t>(k)]));
        }
        out.log_slope = ols_slope(lk, sums);
        out.power_exponent = ols_slope(lk, ls);
    }
    out.diverged = sum > options.bound && out.log_slope > 0.0 && out.power_exponent < 1.0;
    return out;
}

std::vector<PortraitRow> phase_portrait(const std::vector<TrajectoryRecord> &records, PortraitCoords coords, double l,
                                        const PlatePair *plates)
{
    std::vector<PortraitRow> rows;
    if (records.empty()) {
        return rows;
    }
    for (const TrajectoryRecord &r : records) {
        if (r.scenario_id != records.front().scenario_id || r.period != records.front().period) {
            raise(ErrorKind::MixedScenario, "portrait records come from different scenarios");
        }
    }
    if (coords == PortraitCoords::ty) {
        if (!(l > 0.0)) {
            raise(ErrorKind::InvalidScale, "ty coordinates need l > 0");
        }
        if (plates != nullptr) {
            (void)ScaleTransform(*plates, l);
        }
    }
    const double T = records.front().period;
    for (std::size_t id = 0; id < records.size(); ++id) {
        const auto &sec = records[id].section;
        for (std::size_t k = 0; k < sec.size(); ++k) {
            PortraitRow row;
            row.trajectory_id = static_cast<int>(id);
            row.event_index = static_cast<long>(k);
            row.phase = std::isfinite(T) ? sec[k].t - T * std::floor(sec[k].t / T) : sec[k].t;
            row.value = coords == PortraitCoords::tv ? sec[k].v : transform_U(sec[k], l).y;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace bounce

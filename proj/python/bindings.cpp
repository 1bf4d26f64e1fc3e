#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bounce/acceptance.hpp"
#include "bounce/bouncing.hpp"
#include "bounce/collision.hpp"
#include "bounce/commands.hpp"
#include "bounce/diagnostics.hpp"
#include "bounce/error.hpp"
#include "bounce/fermi_ulam.hpp"
#include "bounce/forcing.hpp"
#include "bounce/scenario.hpp"

namespace py = pybind11;
using namespace bounce;

namespace {

py::dict record_to_dict(const TrajectoryRecord &r)
{
    py::list events;
    for (const CollisionEvent &e : r.events) {
        py::dict d;
        d["kind"] = std::string(to_string(e.kind));
        d["time"] = e.time;
        d["body"] = std::string(to_string(e.first.body));
        d["v_pre"] = e.first.v_pre;
        d["v_post"] = e.first.v_post;
        d["z"] = e.first.z;
        d["plate_velocity"] = e.plate_velocity;
        if (e.second) {
            d["partner"] = std::string(to_string(e.second->body));
            d["partner_v_pre"] = e.second->v_pre;
            d["partner_v_post"] = e.second->v_post;
        }
        events.append(d);
    }
    py::list t;
    py::list v;
    for (const PhasePoint &p : r.section) {
        t.append(p.t);
        v.append(p.v);
    }
    py::dict out;
    out["scenario_id"] = r.scenario_id;
    out["outcome"] = std::string(to_string(r.outcome));
    out["outcome_detail"] = r.outcome_detail;
    out["events"] = events;
    out["section_t"] = t;
    out["section_v"] = v;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Event-driven bouncing-ball and Fermi-Ulam simulations";

    static py::handle error = py::exception<Error>(m, "BounceError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<ForcingProfile>(m, "ForcingProfile")
        .def_static("constant", &ForcingProfile::constant, py::arg("value"), py::arg("period") = 1.0)
        .def_static("sinusoid", &ForcingProfile::sinusoid, py::arg("period"), py::arg("amplitude"),
                    py::arg("phase") = 0.0, py::arg("offset") = 0.0)
        .def_static("polynomial", &ForcingProfile::polynomial, py::arg("coefficients"), py::arg("window_lo"),
                    py::arg("window_hi"))
        .def("eval", &ForcingProfile::eval, py::arg("t"), py::arg("order") = 0)
        .def_property_readonly("period", &ForcingProfile::period)
        .def("__repr__", &ForcingProfile::describe);

    py::class_<Tangency>(m, "Tangency")
        .def(py::init([](double t_star, int order, double epsilon) { return Tangency{t_star, order, epsilon}; }),
             py::arg("t_star"), py::arg("order"), py::arg("epsilon"));

    py::class_<PlatePair>(m, "PlatePair")
        .def(py::init([](const ForcingProfile &lower, const ForcingProfile &upper, std::optional<Tangency> t) {
                 PlatePair p{lower, upper, t};
                 verify_plates(p);
                 return p;
             }),
             py::arg("lower"), py::arg("upper"), py::arg("tangency") = std::nullopt);

    m.def("class_c_test",
          [](const ForcingProfile &f, double g, int k_max) -> std::optional<std::pair<double, int>> {
              if (auto w = class_c_test(f, g, k_max)) {
                  return std::make_pair(w->t0, w->K);
              }
              return std::nullopt;
          },
          py::arg("profile"), py::arg("g"), py::arg("k_max"));
    m.def("critical_scale", &critical_scale, py::arg("profile"), py::arg("g"));
    m.def("reflect_off_plate", &reflect_off_plate, py::arg("v_in"), py::arg("plate_velocity"));
    m.def("ball_ball_collide",
          [](double m1, double v1, double m2, double v2) {
              const VelocityPair p = ball_ball_collide(m1, v1, m2, v2);
              return std::make_pair(p.first, p.second);
          },
          py::arg("m1"), py::arg("v1"), py::arg("m2"), py::arg("v2"));

    m.def("map_A",
          [](double t, double v, const PlatePair &plates, double g) {
              const MapAStep s = map_A({t, v}, plates, g);
              return py::make_tuple(py::make_tuple(s.next.t, s.next.v), py::make_tuple(s.mid.t, s.mid.v));
          },
          py::arg("t"), py::arg("v"), py::arg("plates"), py::arg("g"),
          "Returns ((t', v'), (t_mid, v_mid)).");
    m.def("one_ball_map",
          [](double t, double v, const ForcingProfile &plate, double g) {
              const OneBallStep s = one_ball_map({t, v}, plate, g);
              return std::make_pair(s.next.t, s.next.v);
          },
          py::arg("t"), py::arg("v"), py::arg("plate"), py::arg("g"));

    m.def("resonant_orbit",
          [](const std::string &variant, int m2, const ForcingProfile &plate, double g, int n_hops) {
              const ResonantSpec spec = make_resonant_spec(
                  variant == "gamma1" ? ResonantVariant::gamma1 : ResonantVariant::gamma2, m2, plate, g);
              const ResonantRun run = build_resonant(spec, plate, g, n_hops);
              py::dict d = record_to_dict(run.record);
              d["t0"] = spec.t0;
              d["max_deviation"] = run.max_deviation;
              return d;
          },
          py::arg("variant"), py::arg("m2"), py::arg("plate"), py::arg("g"), py::arg("n_hops"));

    m.def("simulate_config",
          [](const std::filesystem::path &path) {
              const ScenarioConfig config = load_config(path);
              RunResult result;
              {
                  py::gil_scoped_release release;
                  result = run_scenario(config, 1);
              }
              py::list records;
              for (const TrajectoryRecord &r : result.records) {
                  records.append(record_to_dict(r));
              }
              return records;
          },
          py::arg("path"));
    m.def("summary_json",
          [](const std::filesystem::path &path) {
              const ScenarioConfig config = load_config(path);
              return summary_json(config, run_scenario(config, 1));
          },
          py::arg("path"));

    m.def("envelope_verdict",
          [](const std::vector<double> &speeds, int window) {
              return std::string(to_string(envelope(speeds, window).verdict));
          },
          py::arg("speeds"), py::arg("window"));
    m.def("recurrence_iterate",
          [](const std::vector<double> &coefficients, double s0, long n) {
              const RecurrenceResult r = iterate_recurrence(StepPolynomial{coefficients}, s0, n);
              py::dict d;
              d["sequence"] = r.sequence;
              d["partial_sums"] = r.partial_sums;
              d["log_slope"] = r.log_slope;
              d["diverged"] = r.diverged;
              return d;
          },
          py::arg("coefficients"), py::arg("s0"), py::arg("n"));

    m.def("run_criterion",
          [](int id) {
              CriterionResult r;
              {
                  py::gil_scoped_release release;
                  r = run_criterion(id, {});
              }
              return format_result(r);
          },
          py::arg("id"));
    m.def("oracle_available", &oracle_available);
}

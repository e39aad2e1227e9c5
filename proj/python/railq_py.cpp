// Python bindings. Rationals cross the boundary as fractions.Fraction, schedules as
// nested lists of per-station delays, QUBO states as lists of 0/1.

#include "railq/errors.hpp"
#include "railq/instance_io.hpp"
#include "railq/qubo.hpp"
#include "railq/reference.hpp"
#include "railq/solvers.hpp"
#include "railq/validate.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace railq;

namespace {

py::object fraction(const Rational& r) {
    static py::object cls = py::module_::import("fractions").attr("Fraction");
    return cls(r.numerator(), r.denominator());
}

Rational rational(const py::handle& value) {
    static py::object cls = py::module_::import("fractions").attr("Fraction");
    const auto f = cls(value);
    return {f.attr("numerator").cast<std::int64_t>(), f.attr("denominator").cast<std::int64_t>()};
}

Schedule schedule_of(const std::vector<std::vector<Minutes>>& delays) { return Schedule{delays}; }

py::dict result_dict(const ReferenceResult& r) {
    py::dict d;
    d["method"] = r.method;
    d["feasible"] = r.feasible;
    d["delays"] = r.schedule.delays;
    d["objective"] = fraction(r.objective);
    d["max_secondary_delay"] = r.summary.max_secondary;
    d["sum_final_secondary_delay"] = r.summary.sum_secondary_final;
    d["message"] = r.message;
    return d;
}

std::vector<std::string> train_ids(const RailwayInstance& inst) {
    std::vector<std::string> ids;
    for (TrainIndex j = 0; j < inst.train_count(); ++j) ids.push_back(inst.route(j).id);
    return ids;
}

} // namespace

PYBIND11_MODULE(_railq, m) {
    m.doc() = "Single-track dispatching as QUBO: model, solvers, validation";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<InfeasibleModelError>(m, "InfeasibleModelError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<RailwayInstance>(m, "Instance")
        .def_static("load", [](const std::string& path) { return RailwayInstance(load_instance_data(path)); })
        .def_static("from_json", [](const std::string& text) { return RailwayInstance(parse_instance(text)); })
        .def_property_readonly("name", &RailwayInstance::name)
        .def_property_readonly("trains", &train_ids)
        .def("decision_count", [](const RailwayInstance& i, const std::string& train) {
            return i.decision_count(i.train_index(train));
        })
        .def("unavoidable_delays", [](const RailwayInstance& i) { return unavoidable_schedule(i).delays; })
        .def("to_json", [](const RailwayInstance& i) { return serialize_instance(i.data()); })
        .def("replicate", [](const RailwayInstance& i, int copies, Minutes period) {
            return RailwayInstance(replicate_instance(i.data(), copies, period));
        }, py::arg("copies"), py::arg("period"));

    py::class_<QuboProblem>(m, "Qubo")
        .def_property_readonly("size", &QuboProblem::size)
        .def_property_readonly("offset_L", [](const QuboProblem& p) { return fraction(p.offset_L); })
        .def_property_readonly("excluded_pairs", [](const QuboProblem& p) { return p.excluded.size(); })
        .def("energy", [](const QuboProblem& p, const Bits& x) { return fraction(p.energy(x)); })
        .def("hard_penalty", [](const QuboProblem& p, const Bits& x) { return fraction(hard_penalty(p, x)); })
        .def("matrix", [](const QuboProblem& p) {
            py::list rows;
            for (const auto& row : p.Q.dense()) {
                py::list r;
                for (const auto& v : row) r.append(fraction(v));
                rows.append(r);
            }
            return rows;
        }, "Dense symmetric matrix with energy x^T Q x")
        .def("decode", [](const QuboProblem& p, const Bits& x) -> py::object {
            const auto d = decode(p, x);
            if (!d.ok()) return py::none();
            return py::cast(d.schedule->delays);
        })
        .def("encode", [](const QuboProblem& p, const std::vector<std::vector<Minutes>>& delays) {
            return encode(p, schedule_of(delays));
        })
        .def("ising", [](const QuboProblem& p) {
            const auto ising = qubo_to_ising(p.Q);
            py::list h;
            for (const auto& v : ising.h) h.append(fraction(v));
            py::dict J;
            for (const auto& [ij, v] : ising.J) J[py::make_tuple(ij.first, ij.second)] = fraction(v);
            return py::make_tuple(h, J, fraction(ising.offset));
        }, "(h, J, offset) with E_ising(s) = E_qubo(x) + offset, s = 2x - 1")
        .def("export", [](const QuboProblem& p) {
            std::ostringstream out;
            write_qubo(out, p.Q);
            return out.str();
        });

    m.def("build_qubo", [](const RailwayInstance& inst, py::object p_sum, py::object p_pair) {
        auto pen = inst.penalties();
        if (!p_sum.is_none()) pen.p_sum = rational(p_sum);
        if (!p_pair.is_none()) pen.p_pair = rational(p_pair);
        return build_qubo(inst, pen.p_sum, pen.p_pair);
    }, py::arg("instance"), py::arg("p_sum") = py::none(), py::arg("p_pair") = py::none());

    m.def("spectrum", [](const QuboProblem& p, std::size_t k_levels, unsigned threads) {
        SpectrumOptions o;
        o.k_levels = k_levels;
        o.threads = threads;
        std::vector<SpectrumEntry> levels;
        {
            py::gil_scoped_release release;
            levels = brute_force_spectrum(p, o);
        }
        py::list out;
        for (const auto& l : levels) out.append(py::make_tuple(fraction(l.energy), l.states));
        return out;
    }, py::arg("qubo"), py::arg("k_levels") = 1, py::arg("threads") = 0,
       "Lowest energy levels as (energy, [states]) pairs");

    m.def("anneal", [](const QuboProblem& p, std::size_t num_reads, std::size_t sweeps, double beta_min,
                       double beta_max, std::uint64_t seed, unsigned threads) {
        AnnealParams a;
        a.num_reads = num_reads;
        a.sweeps = sweeps;
        a.beta_min = beta_min;
        a.beta_max = beta_max;
        a.seed = seed;
        a.threads = threads;
        SampleSet samples;
        {
            py::gil_scoped_release release;
            samples = simulated_annealing(p.Q, a);
        }
        py::list out;
        for (const auto& r : samples.reads) out.append(py::make_tuple(r.state, fraction(r.energy), r.multiplicity));
        return out;
    }, py::arg("qubo"), py::arg("num_reads") = 1000, py::arg("sweeps") = 1000, py::arg("beta_min") = 0.1,
       py::arg("beta_max") = 4.0, py::arg("seed") = 0, py::arg("threads") = 0,
       "Distinct reads as (state, energy, multiplicity), lowest energy first");

    m.def("solve_reference", [](const RailwayInstance& inst, const std::string& method) {
        if (method == "exact") return result_dict(exact_precedence_solve(inst));
        if (method == "fcfs") return result_dict(fcfs(inst));
        if (method == "flfs") return result_dict(flfs(inst));
        if (method == "amcc") return result_dict(amcc(inst));
        throw ParameterError("unknown method: " + method);
    }, py::arg("instance"), py::arg("method") = "exact");

    m.def("check", [](const RailwayInstance& inst, const std::vector<std::vector<Minutes>>& delays, bool capacity) {
        const auto report = check_feasibility(inst, schedule_of(delays), CheckOptions{capacity});
        return py::make_tuple(report.feasible(), format_report(inst, report));
    }, py::arg("instance"), py::arg("delays"), py::arg("capacity") = true);

    m.def("objective", [](const RailwayInstance& inst, const std::vector<std::vector<Minutes>>& delays) {
        return fraction(objective_value(inst, schedule_of(delays)));
    });

    m.def("equivalent", [](const RailwayInstance& inst, const std::vector<std::vector<Minutes>>& a,
                           const std::vector<std::vector<Minutes>>& b) {
        return dispatching_equivalent(inst, schedule_of(a), schedule_of(b));
    });
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latflow/cli.hpp"
#include "latflow/diophantine.hpp"
#include "latflow/error.hpp"
#include "latflow/experiments.hpp"
#include "latflow/lattice.hpp"
#include "latflow/report.hpp"

namespace py = pybind11;
using namespace latflow;

namespace {

ModeSpec mode_of(const std::string& mode, std::initializer_list<std::string> literals) {
  if (mode != "auto") return ModeSpec::parse(mode);
  for (const auto& l : literals) {
    if (!is_exact_literal(l)) return ModeSpec::bigfloat(256);
  }
  return ModeSpec::rational();
}

LineSegmentSpec line_of(const std::string& a, const std::string& b, const std::string& s1, const std::string& s2,
                        const std::string& mode) {
  const ModeSpec m = mode_of(mode, {a, b, s1, s2});
  return LineSegmentSpec(parse_scalar(a, m), parse_scalar(b, m), parse_scalar(s1, m), parse_scalar(s2, m), m);
}

std::string rational_text(const Scalar& x) { return x.to_rational().get_str(); }

py::tuple vec(const IntegerVec3& v) {
  return py::make_tuple(py::int_(py::str(v.p1.get_str())), py::int_(py::str(v.p2.get_str())),
                        py::int_(py::str(v.q.get_str())));
}

py::int_ big(const mpz_class& z) { return py::int_(py::str(z.get_str())); }

py::dict witness(const DiophantineWitness& w) {
  py::dict d;
  d["q"] = big(w.q);
  d["p1"] = big(w.p1);
  d["p2"] = big(w.p2);
  d["residual1"] = rational_text(w.residual1);
  d["residual2"] = rational_text(w.residual2);
  d["class"] = to_string(w.tag);
  return d;
}

}  // namespace

PYBIND11_MODULE(_latflow, m) {
  m.doc() = "Diagonal flow on planar lines: lattice reduction, Diophantine witnesses, orbit experiments";

  py::register_exception<Error>(m, "LatflowError");
  py::register_exception<BudgetError>(m, "BudgetError");

  m.def(
      "nearest_residuals",
      [](const std::string& a, const std::string& b, long long q) {
        const ModeSpec mode = mode_of("auto", {a, b});
        const auto r = nearest_residuals(parse_scalar(a, mode), parse_scalar(b, mode), mpz_class(static_cast<long>(q)));
        return py::make_tuple(big(r.p1), big(r.p2), rational_text(r.residual1), rational_text(r.residual2));
      },
      py::arg("a"), py::arg("b"), py::arg("q"));

  m.def(
      "rational_certificate",
      [](const std::string& a, const std::string& b) -> py::object {
        const ModeSpec mode = mode_of("auto", {a, b});
        std::optional<RationalCertificate> cert;
        try {
          cert = rational_certificate(parse_scalar(a, mode), parse_scalar(b, mode));
        } catch (const NotApplicable&) {
        }
        if (!cert) return py::none();
        return py::make_tuple(big(cert->p1), big(cert->p2), big(cert->q));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "w2_witness_search",
      [](const std::string& a, const std::string& b, const std::string& C, std::uint64_t q_max) {
        const ModeSpec mode = mode_of("auto", {a, b});
        const auto s = w2_witness_search(parse_scalar(a, mode), parse_scalar(b, mode),
                                         scalar_from_decimal(C, ModeSpec::rational()), q_max);
        py::list out;
        for (const auto& w : s.witnesses) out.append(witness(w));
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("C"), py::arg("q_max"));

  m.def(
      "segment_minimum",
      [](const std::string& a, const std::string& b, const std::string& s1, const std::string& s2, double t,
         const std::string& R_cap, const std::string& mode) -> py::object {
        const auto found =
            segment_minimum(line_of(a, b, s1, s2, mode), FlowTime(t), scalar_from_decimal(R_cap, ModeSpec::rational()));
        if (!found) return py::none();
        return py::make_tuple(vec(found->vector), found->value.to_double());
      },
      py::arg("a"), py::arg("b"), py::arg("s1"), py::arg("s2"), py::arg("t"), py::arg("R_cap"),
      py::arg("mode") = "auto");

  m.def(
      "shortest_vector",
      [](const std::vector<std::vector<double>>& rows) {
        if (rows.size() != 3) throw InvalidInput("basis must be 3x3");
        Matrix3d b;
        for (int r = 0; r < 3; ++r) {
          if (rows[static_cast<std::size_t>(r)].size() != 3) throw InvalidInput("basis must be 3x3");
          for (int c = 0; c < 3; ++c) b(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        const auto sv = shortest_vector(b);
        return py::make_tuple(vec(sv.vector), sv.lambda1.to_double());
      },
      py::arg("basis"), "Columns are basis vectors; returns (coefficients, sup-norm lambda1).");

  m.def(
      "sample_lambda1",
      [](const std::string& a, const std::string& b, const std::string& s1, const std::string& s2, double t,
         std::size_t N, std::uint64_t seed) {
        std::vector<double> out;
        py::gil_scoped_release release;
        for (const auto& s : sample_translate(line_of(a, b, s1, s2, "auto"), FlowTime(t), N, seed)) {
          out.push_back(s.lambda1.to_double());
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("s1"), py::arg("s2"), py::arg("t"), py::arg("N"), py::arg("seed"));

  m.def("ks_distance", &ks_distance, py::arg("a"), py::arg("b"));

  m.def(
      "run",
      [](const std::string& config_json) {
        const RunConfig config = RunConfig::from_json(nlohmann::ordered_json::parse(config_json));
        Report report;
        {
          py::gil_scoped_release release;
          report = cli::run(config);
        }
        return dump_json(report.to_json());
      },
      py::arg("config_json"), "Runs a RunConfig given as JSON and returns the report as JSON text.");
}

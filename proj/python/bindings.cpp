#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <vector>

#include "fcnls/cli_io.hpp"
#include "fcnls/errors.hpp"
#include "fcnls/evolution.hpp"
#include "fcnls/experiments.hpp"
#include "fcnls/functionals.hpp"
#include "fcnls/groundstate.hpp"
#include "fcnls/model.hpp"
#include "fcnls/spectral.hpp"
#include "fcnls/virial.hpp"

namespace py = pybind11;

namespace {

using carr = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

fcnls::Field to_field(const fcnls::Grid& g, const carr& a) {
  if (a.ndim() != g.dim)
    throw py::value_error("array rank must equal the grid dimension");
  for (int d = 0; d < g.dim; ++d)
    if (a.shape(d) != g.M)
      throw py::value_error("array extent must equal the grid size M");
  fcnls::Field u(g);
  std::memcpy(u.data(), a.data(), u.size() * sizeof(fcnls::cplx));
  return u;
}

carr to_array(const fcnls::Field& u) {
  const fcnls::Grid& g = u.grid();
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(g.dim), g.M);
  carr a(shape);
  std::memcpy(a.mutable_data(), u.data(), u.size() * sizeof(fcnls::cplx));
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fractional Choquard equation laboratory: model algebra, spectral "
            "operators, ground states, time evolution, and experiments";

  py::register_exception<fcnls::Error>(m, "Error");

  py::class_<fcnls::ProblemParams>(m, "ProblemParams")
      .def(py::init<>())
      .def(py::init([](int N, double s, double b, double alpha, double p, int eps) {
             return fcnls::ProblemParams{N, s, b, alpha, p, eps};
           }),
           py::arg("N") = 2, py::arg("s") = 0.8, py::arg("b") = -0.1,
           py::arg("alpha") = 1.0, py::arg("p") = 3.0, py::arg("eps") = -1)
      .def_readwrite("N", &fcnls::ProblemParams::N)
      .def_readwrite("s", &fcnls::ProblemParams::s)
      .def_readwrite("b", &fcnls::ProblemParams::b)
      .def_readwrite("alpha", &fcnls::ProblemParams::alpha)
      .def_readwrite("p", &fcnls::ProblemParams::p)
      .def_readwrite("eps", &fcnls::ProblemParams::eps)
      .def("__eq__", [](const fcnls::ProblemParams& a, const fcnls::ProblemParams& b) {
        return a == b;
      })
      .def("__repr__", [](const fcnls::ProblemParams& q) {
        return "ProblemParams(N=" + std::to_string(q.N) + ", s=" + std::to_string(q.s) +
               ", b=" + std::to_string(q.b) + ", alpha=" + std::to_string(q.alpha) +
               ", p=" + std::to_string(q.p) + ", eps=" + std::to_string(q.eps) + ")";
      });

  py::class_<fcnls::DerivedExponents>(m, "DerivedExponents")
      .def_readonly("s_c", &fcnls::DerivedExponents::s_c)
      .def_readonly("B", &fcnls::DerivedExponents::B)
      .def_readonly("A", &fcnls::DerivedExponents::A)
      .def_readonly("p_star", &fcnls::DerivedExponents::p_star)
      .def_readonly("p_upper", &fcnls::DerivedExponents::p_upper)
      .def_readonly("p_tilde", &fcnls::DerivedExponents::p_tilde)
      .def_readonly("p_bar", &fcnls::DerivedExponents::p_bar)
      .def_readonly("riesz_const", &fcnls::DerivedExponents::riesz_const)
      .def_readonly("blowup_power_cap", &fcnls::DerivedExponents::blowup_power_cap);

  py::class_<fcnls::RegimeFlags>(m, "RegimeFlags")
      .def_readonly("admissible", &fcnls::RegimeFlags::admissible)
      .def_readonly("intercritical", &fcnls::RegimeFlags::intercritical)
      .def_readonly("lwp_window", &fcnls::RegimeFlags::lwp_window)
      .def_readonly("blowup_window", &fcnls::RegimeFlags::blowup_window)
      .def_readonly("defocusing_global", &fcnls::RegimeFlags::defocusing_global);

  m.def("validate", &fcnls::validate, py::arg("params"));
  m.def("derive", &fcnls::derive, py::arg("params"));
  m.def("regime", &fcnls::regime, py::arg("params"));

  py::class_<fcnls::Grid>(m, "Grid")
      .def(py::init([](int dim, int M, double L, bool offset) {
             fcnls::Grid g{dim, M, L, offset};
             fcnls::validate_grid(g);
             return g;
           }),
           py::arg("dim") = 2, py::arg("M") = 64, py::arg("L") = 10.0,
           py::arg("offset") = true)
      .def_readonly("dim", &fcnls::Grid::dim)
      .def_readonly("M", &fcnls::Grid::M)
      .def_readonly("L", &fcnls::Grid::L)
      .def_readonly("offset", &fcnls::Grid::offset)
      .def_property_readonly("h", &fcnls::Grid::h)
      .def("coord", &fcnls::Grid::coord, py::arg("i"))
      .def("coords",
           [](const fcnls::Grid& g) {
             std::vector<py::ssize_t> shape{g.M};
             py::array_t<double> a(shape);
             double* p = a.mutable_data();
             for (int i = 0; i < g.M; ++i) p[i] = g.coord(i);
             return a;
           })
      .def("__repr__", [](const fcnls::Grid& g) {
        return "Grid(dim=" + std::to_string(g.dim) + ", M=" + std::to_string(g.M) +
               ", L=" + std::to_string(g.L) +
               ", offset=" + (g.offset ? std::string("True") : std::string("False")) + ")";
      });

  m.def("frac_laplacian",
        [](const fcnls::Grid& g, const carr& u, double power) {
          return to_array(fcnls::frac_laplacian(to_field(g, u), power));
        },
        py::arg("grid"), py::arg("u"), py::arg("power"));
  m.def("riesz_convolve",
        [](const fcnls::Grid& g, const carr& u, double alpha) {
          return to_array(fcnls::riesz_convolve(to_field(g, u), alpha));
        },
        py::arg("grid"), py::arg("u"), py::arg("alpha"));
  m.def("homogeneous_norm",
        [](const fcnls::Grid& g, const carr& u, double sigma) {
          return fcnls::homogeneous_norm(to_field(g, u), sigma);
        },
        py::arg("grid"), py::arg("u"), py::arg("sigma"));
  m.def("sup_norm",
        [](const fcnls::Grid& g, const carr& u) {
          return fcnls::sup_norm(to_field(g, u));
        },
        py::arg("grid"), py::arg("u"));

  py::class_<fcnls::FunctionalBundle>(m, "FunctionalBundle")
      .def_readonly("mass", &fcnls::FunctionalBundle::mass)
      .def_readonly("grad_s_sq", &fcnls::FunctionalBundle::grad_s_sq)
      .def_readonly("nonlocal", &fcnls::FunctionalBundle::nonlocal)
      .def_readonly("energy", &fcnls::FunctionalBundle::energy)
      .def_readonly("action", &fcnls::FunctionalBundle::action)
      .def_readonly("constraint", &fcnls::FunctionalBundle::constraint)
      .def_readonly("h_value", &fcnls::FunctionalBundle::h_value);

  m.def("bundle",
        [](const fcnls::Grid& g, const carr& u, const fcnls::ProblemParams& q) {
          return fcnls::bundle(to_field(g, u), q);
        },
        py::arg("grid"), py::arg("u"), py::arg("params"));
  m.def("nonlocal_term",
        [](const fcnls::Grid& g, const carr& u, const fcnls::ProblemParams& q) {
          return fcnls::nonlocal_term(to_field(g, u), q);
        },
        py::arg("grid"), py::arg("u"), py::arg("params"));
  m.def("gn_quotient",
        [](const fcnls::Grid& g, const carr& u, const fcnls::ProblemParams& q) {
          return fcnls::gn_quotient(to_field(g, u), q);
        },
        py::arg("grid"), py::arg("u"), py::arg("params"));

  py::class_<fcnls::GroundState>(m, "GroundState")
      .def_property_readonly("phi",
                             [](const fcnls::GroundState& gs) { return to_array(gs.phi); })
      .def_property_readonly("grid",
                             [](const fcnls::GroundState& gs) { return gs.phi.grid(); })
      .def_readonly("residual", &fcnls::GroundState::residual)
      .def_readonly("mass_phi", &fcnls::GroundState::mass_phi)
      .def_readonly("grad_s_sq_phi", &fcnls::GroundState::grad_s_sq_phi)
      .def_readonly("nonlocal_phi", &fcnls::GroundState::nonlocal_phi)
      .def_readonly("c_gn_formula", &fcnls::GroundState::c_gn_formula)
      .def_readonly("c_gn_quotient", &fcnls::GroundState::c_gn_quotient)
      .def_readonly("iterations", &fcnls::GroundState::iterations);

  m.def("solve_ground_state",
        [](const fcnls::ProblemParams& q, const fcnls::Grid& g, py::object init,
           double tol, int max_iter, double shell_tol) {
          fcnls::GroundStateOptions opts;
          opts.tol = tol;
          opts.max_iter = max_iter;
          opts.shell_tol = shell_tol;
          if (init.is_none()) return fcnls::solve_ground_state(q, g, nullptr, opts);
          fcnls::Field f = to_field(g, init.cast<carr>());
          return fcnls::solve_ground_state(q, g, &f, opts);
        },
        py::arg("params"), py::arg("grid"), py::arg("init") = py::none(),
        py::arg("tol") = 1e-9, py::arg("max_iter") = 2000,
        py::arg("shell_tol") = 1e-4);
  m.def("gn_constant_formula", &fcnls::gn_constant_formula, py::arg("params"),
        py::arg("mass_phi"));

  py::class_<fcnls::Indicators>(m, "Indicators")
      .def_readonly("me", &fcnls::Indicators::me)
      .def_readonly("g", &fcnls::Indicators::g);
  m.def("indicators",
        [](const fcnls::Grid& g, const carr& u0, const fcnls::GroundState& gs,
           const fcnls::ProblemParams& q) {
          return fcnls::indicators(to_field(g, u0), gs, q);
        },
        py::arg("grid"), py::arg("u0"), py::arg("ground_state"), py::arg("params"));

  py::enum_<fcnls::RunStatus>(m, "RunStatus")
      .value("Completed", fcnls::RunStatus::Completed)
      .value("BlowUpDetected", fcnls::RunStatus::BlowUpDetected)
      .value("StepUnderflow", fcnls::RunStatus::StepUnderflow);

  py::class_<fcnls::EvolutionConfig>(m, "EvolutionConfig")
      .def(py::init<>())
      .def_readwrite("dt0", &fcnls::EvolutionConfig::dt0)
      .def_readwrite("t_end", &fcnls::EvolutionConfig::t_end)
      .def_readwrite("dt_min", &fcnls::EvolutionConfig::dt_min)
      .def_readwrite("blowup_grad_factor", &fcnls::EvolutionConfig::blowup_grad_factor)
      .def_readwrite("blowup_linf_factor", &fcnls::EvolutionConfig::blowup_linf_factor)
      .def_readwrite("record_every", &fcnls::EvolutionConfig::record_every)
      .def_readwrite("virial_R", &fcnls::EvolutionConfig::virial_R)
      .def_readwrite("dealias", &fcnls::EvolutionConfig::dealias);

  py::class_<fcnls::TimeSeriesRow>(m, "TimeSeriesRow")
      .def_readonly("t", &fcnls::TimeSeriesRow::t)
      .def_readonly("mass", &fcnls::TimeSeriesRow::mass)
      .def_readonly("energy", &fcnls::TimeSeriesRow::energy)
      .def_readonly("grad_s", &fcnls::TimeSeriesRow::grad_s)
      .def_readonly("linf", &fcnls::TimeSeriesRow::linf)
      .def_readonly("m_psi", &fcnls::TimeSeriesRow::m_psi)
      .def_readonly("dt", &fcnls::TimeSeriesRow::dt);

  py::class_<fcnls::RunOutcome>(m, "RunOutcome")
      .def_readonly("status", &fcnls::RunOutcome::status)
      .def_readonly("t_stop", &fcnls::RunOutcome::t_stop)
      .def_property_readonly("final",
                             [](const fcnls::RunOutcome& o) { return to_array(o.final); })
      .def_readonly("series", &fcnls::RunOutcome::series)
      .def_readonly("theorem_window", &fcnls::RunOutcome::theorem_window);

  m.def("linear_step",
        [](const fcnls::Grid& g, const carr& u, double dt, const fcnls::ProblemParams& q) {
          return to_array(fcnls::linear_step(to_field(g, u), dt, q));
        },
        py::arg("grid"), py::arg("u"), py::arg("dt"), py::arg("params"));
  m.def("nonlinear_step",
        [](const fcnls::Grid& g, const carr& u, double dt, const fcnls::ProblemParams& q) {
          return to_array(fcnls::nonlinear_step(to_field(g, u), dt, q));
        },
        py::arg("grid"), py::arg("u"), py::arg("dt"), py::arg("params"));
  m.def("evolve",
        [](const fcnls::Grid& g, const carr& u0, const fcnls::ProblemParams& q,
           const fcnls::EvolutionConfig& cfg, py::object on_record) {
          std::function<void(double, const fcnls::Field&)> cb;
          if (!on_record.is_none())
            cb = [on_record](double t, const fcnls::Field& u) {
              on_record(t, to_array(u));
            };
          return fcnls::evolve(to_field(g, u0), q, cfg, cb);
        },
        py::arg("grid"), py::arg("u0"), py::arg("params"), py::arg("config"),
        py::arg("on_record") = py::none());

  py::class_<fcnls::VarianceRow>(m, "VarianceRow")
      .def_readonly("t", &fcnls::VarianceRow::t)
      .def_readonly("m_psi", &fcnls::VarianceRow::m_psi)
      .def_readonly("dm_dt", &fcnls::VarianceRow::dm_dt)
      .def_readonly("bound_rhs", &fcnls::VarianceRow::bound_rhs);

  m.def("localized_variance",
        [](const fcnls::Grid& g, const carr& u, double R) {
          return fcnls::localized_variance(to_field(g, u), fcnls::build_weight(g, R));
        },
        py::arg("grid"), py::arg("u"), py::arg("R"));
  m.def("variance_report",
        [](const fcnls::Grid& g, const std::vector<double>& times,
           const std::vector<carr>& fields, double R, const fcnls::ProblemParams& q,
           double c1, double c2, double eps_hat) {
          std::vector<fcnls::Field> fs;
          fs.reserve(fields.size());
          for (const carr& a : fields) fs.push_back(to_field(g, a));
          fcnls::VirialOptions opts{c1, c2, eps_hat};
          return fcnls::variance_report(times, fs, fcnls::build_weight(g, R), q, opts);
        },
        py::arg("grid"), py::arg("times"), py::arg("fields"), py::arg("R"),
        py::arg("params"), py::arg("c1") = 1.0, py::arg("c2") = 1.0,
        py::arg("eps_hat") = 0.01);

  py::enum_<fcnls::Label>(m, "Label")
      .value("Global", fcnls::Label::Global)
      .value("BlowUp", fcnls::Label::BlowUp)
      .value("Undetermined", fcnls::Label::Undetermined);

  py::class_<fcnls::Verdict>(m, "Verdict")
      .def_readonly("label", &fcnls::Verdict::label)
      .def_readonly("me", &fcnls::Verdict::me)
      .def_readonly("g", &fcnls::Verdict::g)
      .def_readonly("reason", &fcnls::Verdict::reason);

  py::class_<fcnls::DichotomyRow>(m, "DichotomyRow")
      .def_readonly("lambda_", &fcnls::DichotomyRow::lambda)
      .def_readonly("predicted", &fcnls::DichotomyRow::predicted)
      .def_readonly("observed", &fcnls::DichotomyRow::observed)
      .def_readonly("max_grad_s", &fcnls::DichotomyRow::max_grad_s)
      .def_readonly("t_last", &fcnls::DichotomyRow::t_last)
      .def_readonly("mismatch", &fcnls::DichotomyRow::mismatch)
      .def_readonly("note", &fcnls::DichotomyRow::note);

  py::class_<fcnls::DichotomyReport>(m, "DichotomyReport")
      .def_readonly("rows", &fcnls::DichotomyReport::rows)
      .def_readonly("confirmations", &fcnls::DichotomyReport::confirmations)
      .def_readonly("mismatches", &fcnls::DichotomyReport::mismatches);

  m.def("classify",
        [](const fcnls::Grid& g, const carr& u0, const fcnls::GroundState& gs,
           const fcnls::ProblemParams& q) {
          return fcnls::classify(to_field(g, u0), gs, q);
        },
        py::arg("grid"), py::arg("u0"), py::arg("ground_state"), py::arg("params"));
  m.def("dichotomy_sweep", &fcnls::dichotomy_sweep, py::arg("ground_state"),
        py::arg("params"), py::arg("scales"), py::arg("config"));
  m.def("gn_sweep", &fcnls::gn_sweep, py::arg("ground_state"), py::arg("params"),
        py::arg("n_samples"), py::arg("seed"));

  m.def("snapshot_write",
        [](const fcnls::Grid& g, const carr& u, const std::string& path) {
          fcnls::snapshot_write(to_field(g, u), path);
        },
        py::arg("grid"), py::arg("u"), py::arg("path"));
  m.def("snapshot_read",
        [](const std::string& path) {
          fcnls::Field u = fcnls::snapshot_read(path);
          return py::make_tuple(u.grid(), to_array(u));
        },
        py::arg("path"));
}

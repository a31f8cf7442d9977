#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "capdrum/bounds.hpp"
#include "capdrum/capacity.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/json_io.hpp"
#include "capdrum/spectrum.hpp"
#include "capdrum/suite.hpp"

namespace py = pybind11;
using namespace capdrum;

namespace {

Box box_from(const std::vector<double>& flat) {
  if (flat.size() % 2 != 0 || flat.empty() || flat.size() > 8)
    throw InvalidParameter("bbox wants lo coords then hi coords, 2*dim values");
  int dim = int(flat.size()) / 2;
  Box b;
  b.lo = Vec::zeros(dim);
  b.hi = Vec::zeros(dim);
  for (int a = 0; a < dim; ++a) {
    b.lo[a] = flat[size_t(a)];
    b.hi[a] = flat[size_t(dim + a)];
  }
  return b;
}

Vec vec_from(const std::vector<double>& v) {
  if (v.empty() || v.size() > 4)
    throw InvalidParameter("point wants 1 to 4 coordinates");
  Vec p = Vec::zeros(int(v.size()));
  for (size_t a = 0; a < v.size(); ++a) p[int(a)] = v[a];
  return p;
}

SearchParams search_from(const std::vector<double>& bbox, double r_min,
                         double r_max, int r_steps, double h,
                         double center_spacing, int bisect_iters,
                         int solve_budget, double verify_h) {
  SearchParams s;
  s.bbox = box_from(bbox);
  s.radius_grid = linear_radius_grid(r_min, r_max, r_steps);
  s.center_spacing = center_spacing;
  s.bisect_iters = bisect_iters;
  s.solve_budget = solve_budget;
  s.cap.h = h;
  s.cap.verify_h = verify_h;
  return s;
}

}  // namespace

PYBIND11_MODULE(_capdrum, m) {
  m.doc() = "capacitary radius and two-sided Dirichlet spectral bounds";

  m.def("sphere_area", &sphere_area, py::arg("n"));
  m.def("ball_capacity", &ball_capacity, py::arg("n"), py::arg("r") = 1.0);

  m.def(
      "constants_json",
      [](int n, double gamma, int multiplicity_override) {
        std::optional<int> ov;
        if (multiplicity_override > 0) ov = multiplicity_override;
        return dump_json(to_json(explicit_constants(n, gamma, ov)));
      },
      py::arg("n"), py::arg("gamma"), py::arg("multiplicity_override") = -1);

  m.def("domain_roundtrip", [](const std::string& text) {
    return dump_json(to_json(parse_domain_text(text)));
  });

  m.def(
      "capacity_grid_json",
      [](const std::string& domain, const std::vector<double>& bbox, double h,
         double outer_factor) {
        CompactMask mask = voxelize_mask(parse_domain_text(domain),
                                         box_from(bbox), h);
        GridCapacityOptions o;
        o.outer_factor = outer_factor;
        o.keep_potential = false;
        return dump_json(to_json(capacity_grid(mask, o).estimate));
      },
      py::arg("domain"), py::arg("bbox"), py::arg("h") = 1.0 / 32,
      py::arg("outer_factor") = 8.0);

  m.def(
      "capacity_wos_json",
      [](const std::string& domain, const std::vector<double>& bbox, double h,
         std::int64_t walks, std::uint64_t seed) {
        CompactMask mask = voxelize_mask(parse_domain_text(domain),
                                         box_from(bbox), h);
        MaskStats st = mask_stats(mask);
        double r1 = 2 * st.hull_radius, r2 = 4 * st.hull_radius;
        return dump_json(to_json(capacity_wos(mask, walks, r1, r2, seed)));
      },
      py::arg("domain"), py::arg("bbox"), py::arg("h") = 1.0 / 32,
      py::arg("walks") = 100000, py::arg("seed") = 0);

  m.def(
      "eigenvalue_json",
      [](const std::string& domain, const std::vector<double>& bbox, double h,
         double tol, bool extrapolate, double widen_factor) {
        DomainSpec spec = parse_domain_text(domain);
        Box b = box_from(bbox);
        EigenResult r =
            widen_factor > 1
                ? width_extrapolated_eigenvalue(spec, b, widen_factor, h, tol)
                : bottom_eigenvalue(spec, b, h, tol, extrapolate);
        return dump_json(to_json(r));
      },
      py::arg("domain"), py::arg("bbox"), py::arg("h") = 1.0 / 32,
      py::arg("tol") = 1e-6, py::arg("extrapolate") = true,
      py::arg("widen_factor") = 0.0);

  m.def(
      "is_negligible_json",
      [](const std::string& domain, const std::vector<double>& center,
         double radius, double gamma, double h) {
        CapParams cap;
        cap.h = h;
        Ball b{vec_from(center), radius};
        return dump_json(
            to_json(is_negligible(parse_domain_text(domain), b, gamma, cap)));
      },
      py::arg("domain"), py::arg("center"), py::arg("radius"),
      py::arg("gamma"), py::arg("h") = 1.0 / 32);

  m.def(
      "capacitary_radius_json",
      [](const std::string& domain, const std::vector<double>& gammas,
         const std::vector<double>& bbox, double r_min, double r_max,
         int r_steps, double h, double center_spacing, int bisect_iters,
         int solve_budget, double verify_h) {
        SearchParams s = search_from(bbox, r_min, r_max, r_steps, h,
                                     center_spacing, bisect_iters,
                                     solve_budget, verify_h);
        nlohmann::json arr = nlohmann::json::array();
        for (const RadiusResult& r :
             capacitary_radius_multi(parse_domain_text(domain), gammas, s))
          arr.push_back(to_json(r));
        return dump_json(arr);
      },
      py::arg("domain"), py::arg("gammas"), py::arg("bbox"), py::arg("r_min"),
      py::arg("r_max"), py::arg("r_steps"), py::arg("h") = 1.0 / 32,
      py::arg("center_spacing") = 0.0, py::arg("bisect_iters") = 5,
      py::arg("solve_budget") = 0, py::arg("verify_h") = 0.0);

  m.def(
      "measure_radius_json",
      [](const std::string& domain, double alpha,
         const std::vector<double>& bbox, double r_min, double r_max,
         int r_steps, double h) {
        SearchParams s = search_from(bbox, r_min, r_max, r_steps, h, 0, 5, 0, 0);
        return dump_json(
            to_json(measure_radius(parse_domain_text(domain), alpha, s)));
      },
      py::arg("domain"), py::arg("alpha"), py::arg("bbox"), py::arg("r_min"),
      py::arg("r_max"), py::arg("r_steps"), py::arg("h") = 1.0 / 32);

  m.def(
      "two_sided_json",
      [](const std::string& domain, double gamma,
         const std::vector<double>& bbox, double r_min, double r_max,
         int r_steps, double h, bool with_oracle,
         const std::vector<double>& oracle_bbox, double widen_factor,
         bool with_construction, int solve_budget) {
        SearchParams s = search_from(bbox, r_min, r_max, r_steps, h, 0, 5,
                                     solve_budget, 0);
        OracleParams o;
        o.enabled = with_oracle;
        o.h = h;
        if (!oracle_bbox.empty()) o.bbox = box_from(oracle_bbox);
        o.widen_factor = widen_factor;
        o.with_construction = with_construction;
        return dump_json(
            to_json(two_sided(parse_domain_text(domain), gamma, s, o)));
      },
      py::arg("domain"), py::arg("gamma"), py::arg("bbox"), py::arg("r_min"),
      py::arg("r_max"), py::arg("r_steps"), py::arg("h") = 1.0 / 32,
      py::arg("with_oracle") = true,
      py::arg("oracle_bbox") = std::vector<double>{},
      py::arg("widen_factor") = 0.0, py::arg("with_construction") = false,
      py::arg("solve_budget") = 0);

  m.def(
      "trial_function_bound_json",
      [](const std::string& domain, const std::vector<double>& center,
         double radius, double gamma, double h) {
        Ball b{vec_from(center), radius};
        return dump_json(to_json(
            trial_function_bound(parse_domain_text(domain), b, gamma, h)));
      },
      py::arg("domain"), py::arg("center"), py::arg("radius"),
      py::arg("gamma"), py::arg("h") = 1.0 / 32);

  m.def(
      "suite_csv",
      [](double h, const std::vector<double>& gammas,
         const std::vector<std::string>& only) {
        SuiteParams p;
        p.h = h;
        if (!gammas.empty()) p.gammas = gammas;
        p.only = only;
        return suite_csv(run_suite(p));
      },
      py::arg("h") = 1.0 / 32, py::arg("gammas") = std::vector<double>{},
      py::arg("only") = std::vector<std::string>{});

  py::register_exception<SpecParseError>(m, "SpecParseError",
                                         PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit",
                                        PyExc_RuntimeError);
}

// capdrum: capacitary-radius spectral bounds for open sets in R^n.
//
// Subcommands: constants, capacity, eigen, radius, bounds, suite.  Every
// report is a JSON object with a "config" block echoing the flags that
// produced it; --output redirects the report to a file.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capdrum/bounds.hpp"
#include "capdrum/capacity.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/errors.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/json_io.hpp"
#include "capdrum/spectrum.hpp"
#include "capdrum/suite.hpp"

namespace {

using capdrum::Box;
using capdrum::DomainSpec;
using capdrum::Vec;
using nlohmann::json;

// Accepts plain decimals and p/q fractions, so spacings read naturally
// ("--h 1/32").
double parse_real(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    double num = std::stod(text.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(text);
    double den = std::stod(text.substr(slash + 1), &used);
    if (used != text.size() - slash - 1 || den == 0)
      throw std::invalid_argument(text);
    return num / den;
  } catch (const std::exception&) {
    throw capdrum::InvalidParameter("not a number: '" + text + "'");
  }
}

std::vector<double> parse_csv_reals(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_real(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

// "x0,y0,z0,x1,y1,z1": lo corner then hi corner, dimension = count / 2.
Box parse_bbox(const std::string& text) {
  std::vector<double> v = parse_csv_reals(text);
  if (v.size() % 2 != 0 || v.size() < 2 || v.size() > 8)
    throw capdrum::InvalidParameter(
        "bbox needs an even count of 2..8 coordinates (lo corner, hi corner)");
  int dim = static_cast<int>(v.size() / 2);
  Box b;
  b.lo = Vec::zeros(dim);
  b.hi = Vec::zeros(dim);
  for (int a = 0; a < dim; ++a) {
    b.lo[a] = v[static_cast<std::size_t>(a)];
    b.hi[a] = v[static_cast<std::size_t>(a + dim)];
  }
  return b;
}

Box bbox_or_domain(const std::string& flag, const DomainSpec& domain,
                   const char* what) {
  if (!flag.empty()) return parse_bbox(flag);
  std::optional<Box> bb = domain.bounding_box();
  if (!bb)
    throw capdrum::InvalidParameter(
        std::string(what) +
        " needs --bbox: the domain has no finite bounding box");
  return *bb;
}

void emit(const json& report, const std::string& output) {
  std::string text = capdrum::dump_json(report);
  if (output.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + output);
  out << text;
}

json bbox_json(const Box& b) {
  json lo = json::array(), hi = json::array();
  for (int a = 0; a < b.lo.dim; ++a) {
    lo.push_back(b.lo[a]);
    hi.push_back(b.hi[a]);
  }
  return json{{"lo", lo}, {"hi", hi}};
}

struct CommonFlags {
  std::string output;
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sided Dirichlet spectral bounds from the interior "
               "capacitary radius"};
  app.require_subcommand(1);
  // --h is a spec'd spacing flag on most subcommands, so help keeps only
  // its long form
  app.set_help_flag("--help", "print help and exit");
  // let --output / --seed appear after the subcommand name
  app.fallthrough();

  CommonFlags common;
  app.add_option("--output", common.output,
                 "write the JSON report to this file instead of stdout");
  app.add_option("--seed", common.seed,
                 "random seed for sampling methods (default 0)");

  // ---- constants --------------------------------------------------------
  auto* c_cmd = app.add_subcommand(
      "constants", "explicit constants c, C, kappa, N for given n and gamma");
  c_cmd->set_help_flag("--help", "print help and exit");
  int c_n = 3;
  std::string c_gamma = "0.5";
  int c_n_override = -1;
  c_cmd->add_option("--n", c_n, "dimension (>= 3)")->required();
  c_cmd->add_option("--gamma", c_gamma, "negligibility fraction in (0,1)")
      ->required();
  c_cmd->add_option("--N-override", c_n_override,
                    "override the covering multiplicity N(n)");

  // ---- capacity ---------------------------------------------------------
  auto* cap_cmd = app.add_subcommand(
      "capacity", "Wiener capacity of the compact set described by a spec");
  cap_cmd->set_help_flag("--help", "print help and exit");
  std::string cap_set, cap_h = "1/32", cap_method = "grid", cap_bbox;
  std::string cap_outer = "8";
  std::int64_t cap_walks = 100000;
  cap_cmd->add_option("--set", cap_set, "JSON file describing the set")
      ->required();
  cap_cmd->add_option("--h", cap_h, "grid spacing (decimals or p/q)");
  cap_cmd->add_option("--method", cap_method, "grid | wos | both")
      ->check(CLI::IsMember({"grid", "wos", "both"}));
  cap_cmd->add_option("--outer-factor", cap_outer,
                      "outer box size over mask hull radius");
  cap_cmd->add_option("--walks", cap_walks, "walk-on-spheres sample count");
  cap_cmd->add_option("--bbox", cap_bbox,
                      "voxelization box x0,..,x1,.. (default: set bounds)");

  // ---- eigen ------------------------------------------------------------
  auto* eig_cmd = app.add_subcommand(
      "eigen", "finite-difference bottom eigenvalue of the Dirichlet Laplacian");
  eig_cmd->set_help_flag("--help", "print help and exit");
  std::string eig_domain, eig_h = "1/32", eig_tol = "1e-6", eig_bbox;
  std::string eig_widen = "0";
  bool eig_extrapolate = false;
  eig_cmd->add_option("--domain", eig_domain, "JSON file describing the domain")
      ->required();
  eig_cmd->add_option("--h", eig_h, "grid spacing");
  eig_cmd->add_option("--tol", eig_tol, "eigensolve tolerance");
  eig_cmd->add_option("--bbox", eig_bbox, "computational box (default: domain bounds)");
  eig_cmd->add_flag("--extrapolate", eig_extrapolate,
                    "Richardson-extrapolate with a 2h companion solve");
  eig_cmd->add_option("--widen", eig_widen,
                      "widen factor > 1: remove bbox truncation by the 1/L^2 model");

  // ---- radius -----------------------------------------------------------
  auto* rad_cmd = app.add_subcommand(
      "radius", "interior capacitary / measure / essential radius search");
  rad_cmd->set_help_flag("--help", "print help and exit");
  std::string rad_domain, rad_gamma = "0.5", rad_kind = "cap", rad_h = "1/32";
  std::string rad_rmin, rad_rmax, rad_bbox, rad_alpha = "0.5", rad_schedule;
  std::string rad_spacing = "0";
  int rad_steps = 8, rad_budget = 0, rad_bisect = 5;
  rad_cmd->add_option("--domain", rad_domain, "JSON file describing the domain")
      ->required();
  rad_cmd->add_option("--gamma", rad_gamma, "negligibility fraction in (0,1)");
  rad_cmd->add_option("--kind", rad_kind, "cap | mes | ess")
      ->check(CLI::IsMember({"cap", "mes", "ess"}));
  rad_cmd->add_option("--h", rad_h, "grid spacing");
  rad_cmd->add_option("--r-min", rad_rmin, "smallest radius")->required();
  rad_cmd->add_option("--r-max", rad_rmax, "largest radius")->required();
  rad_cmd->add_option("--r-steps", rad_steps, "radius grid point count");
  rad_cmd->add_option("--bbox", rad_bbox,
                      "center search box (default: domain bounds)");
  rad_cmd->add_option("--center-spacing", rad_spacing,
                      "candidate lattice spacing (default: radius step)");
  rad_cmd->add_option("--alpha", rad_alpha, "volume fraction for --kind mes");
  rad_cmd->add_option("--R-schedule", rad_schedule,
                      "ascending removal radii for --kind ess, e.g. 2,4,8");
  rad_cmd->add_option("--solve-budget", rad_budget,
                      "cap on exact capacity solves per radius (0: unlimited)");
  rad_cmd->add_option("--bisect-iters", rad_bisect,
                      "bisection refinement passes past the grid step");

  // ---- bounds -----------------------------------------------------------
  auto* bnd_cmd = app.add_subcommand(
      "bounds", "two-sided eigenvalue bounds c r^-2 <= lambda <= C r^-2");
  bnd_cmd->set_help_flag("--help", "print help and exit");
  std::string bnd_domain, bnd_gamma = "0.5", bnd_h = "1/32";
  std::string bnd_rmin, bnd_rmax, bnd_bbox, bnd_alpha, bnd_schedule;
  std::string bnd_spacing = "0", bnd_oracle_bbox, bnd_widen = "0";
  int bnd_steps = 8, bnd_budget = 0, bnd_bisect = 5;
  bool bnd_oracle = false, bnd_lieb = false, bnd_essential = false;
  bool bnd_construction = false;
  bnd_cmd->add_option("--domain", bnd_domain, "JSON file describing the domain")
      ->required();
  bnd_cmd->add_option("--gamma", bnd_gamma, "negligibility fraction in (0,1)");
  bnd_cmd->add_option("--h", bnd_h, "grid spacing");
  bnd_cmd->add_option("--r-min", bnd_rmin, "smallest radius")->required();
  bnd_cmd->add_option("--r-max", bnd_rmax, "largest radius")->required();
  bnd_cmd->add_option("--r-steps", bnd_steps, "radius grid point count");
  bnd_cmd->add_option("--bbox", bnd_bbox,
                      "center search box (default: domain bounds)");
  bnd_cmd->add_option("--center-spacing", bnd_spacing,
                      "candidate lattice spacing (default: radius step)");
  bnd_cmd->add_flag("--with-oracle", bnd_oracle,
                    "attach the finite-difference reference eigenvalue");
  bnd_cmd->add_option("--oracle-bbox", bnd_oracle_bbox,
                      "oracle box (default: the search box)");
  bnd_cmd->add_option("--widen", bnd_widen,
                      "oracle widen factor for truncated unbounded domains");
  bnd_cmd->add_flag("--with-construction", bnd_construction,
                    "also evaluate the explicit trial-function upper bound");
  bnd_cmd->add_flag("--lieb", bnd_lieb, "measure-based lower bound instead");
  bnd_cmd->add_option("--alpha", bnd_alpha, "volume fraction for --lieb");
  bnd_cmd->add_flag("--essential", bnd_essential,
                    "essential-spectrum bounds over an R schedule");
  bnd_cmd->add_option("--R-schedule", bnd_schedule,
                      "ascending removal radii for --essential");
  bnd_cmd->add_option("--solve-budget", bnd_budget,
                      "cap on exact capacity solves per radius (0: unlimited)");
  bnd_cmd->add_option("--bisect-iters", bnd_bisect,
                      "bisection refinement passes past the grid step");

  // ---- suite ------------------------------------------------------------
  auto* suite_cmd = app.add_subcommand(
      "suite", "two-sided bounds on the six stock domains");
  suite_cmd->set_help_flag("--help", "print help and exit");
  std::string suite_h = "1/32", suite_gammas = "0.3,0.5,0.7";
  std::string suite_format = "json", suite_only;
  suite_cmd->add_option("--h", suite_h, "grid spacing");
  suite_cmd->add_option("--gammas", suite_gammas,
                        "ascending comma-separated gamma values");
  suite_cmd->add_option("--format", suite_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  suite_cmd->add_option("--only", suite_only,
                        "comma-separated domain names to run (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_cmd) {
      double gamma = parse_real(c_gamma);
      std::optional<int> n_override;
      if (c_cmd->count("--N-override")) n_override = c_n_override;
      capdrum::ExplicitConstants k =
          capdrum::explicit_constants(c_n, gamma, n_override);
      json rep = capdrum::to_json(k);
      rep["config"] = {{"subcommand", "constants"},
                       {"n", c_n},
                       {"gamma", gamma},
                       {"seed", common.seed}};
      if (n_override) rep["config"]["N_override"] = *n_override;
      emit(rep, common.output);
      return 0;
    }

    if (*cap_cmd) {
      DomainSpec set = capdrum::load_domain_file(cap_set);
      double h = parse_real(cap_h);
      double outer = parse_real(cap_outer);
      Box bbox = bbox_or_domain(cap_bbox, set, "capacity of this set");
      capdrum::CompactMask mask = capdrum::voxelize_mask(set, bbox, h);
      json rep;
      rep["config"] = {{"subcommand", "capacity"}, {"set", cap_set},
                       {"h", h},                   {"method", cap_method},
                       {"outer_factor", outer},    {"walks", cap_walks},
                       {"bbox", bbox_json(bbox)},  {"seed", common.seed}};
      if (cap_method == "grid" || cap_method == "both") {
        capdrum::GridCapacityOptions opts;
        opts.outer_factor = outer;
        rep["grid"] = capdrum::to_json(capacity_grid(mask, opts).estimate);
      }
      if (cap_method == "wos" || cap_method == "both") {
        capdrum::MaskStats st = capdrum::mask_stats(mask);
        double r1 = 2 * st.hull_radius, r2 = 4 * st.hull_radius;
        rep["wos"] = capdrum::to_json(
            capacity_wos(mask, cap_walks, r1, r2, common.seed));
      }
      emit(rep, common.output);
      return 0;
    }

    if (*eig_cmd) {
      DomainSpec domain = capdrum::load_domain_file(eig_domain);
      double h = parse_real(eig_h);
      double tol = parse_real(eig_tol);
      double widen = parse_real(eig_widen);
      Box bbox = bbox_or_domain(eig_bbox, domain, "the eigenvalue solve");
      capdrum::EigenResult res =
          widen > 1
              ? capdrum::width_extrapolated_eigenvalue(domain, bbox, widen, h,
                                                       tol)
              : capdrum::bottom_eigenvalue(domain, bbox, h, tol,
                                           eig_extrapolate);
      json rep = capdrum::to_json(res);
      rep["config"] = {{"subcommand", "eigen"},
                       {"domain", eig_domain},
                       {"h", h},
                       {"tol", tol},
                       {"bbox", bbox_json(bbox)},
                       {"extrapolate", eig_extrapolate},
                       {"widen", widen},
                       {"seed", common.seed}};
      emit(rep, common.output);
      return 0;
    }

    if (*rad_cmd) {
      DomainSpec domain = capdrum::load_domain_file(rad_domain);
      double gamma = parse_real(rad_gamma);
      capdrum::SearchParams search;
      search.bbox = bbox_or_domain(rad_bbox, domain, "the radius search");
      search.radius_grid = capdrum::linear_radius_grid(
          parse_real(rad_rmin), parse_real(rad_rmax), rad_steps);
      search.center_spacing = parse_real(rad_spacing);
      search.solve_budget = rad_budget;
      search.bisect_iters = rad_bisect;
      search.cap.h = parse_real(rad_h);
      capdrum::RadiusResult res;
      if (rad_kind == "cap") {
        res = capdrum::capacitary_radius(domain, gamma, search);
      } else if (rad_kind == "mes") {
        res = capdrum::measure_radius(domain, parse_real(rad_alpha), search);
      } else {
        if (rad_schedule.empty())
          throw capdrum::InvalidParameter(
              "--kind ess needs --R-schedule (e.g. 2,4,8)");
        res = capdrum::essential_radius(
            domain, gamma, parse_csv_reals(rad_schedule), search);
      }
      json rep = capdrum::to_json(res);
      rep["config"] = {{"subcommand", "radius"},
                       {"domain", rad_domain},
                       {"gamma", gamma},
                       {"kind", rad_kind},
                       {"h", search.cap.h},
                       {"r_min", search.radius_grid.front()},
                       {"r_max", search.radius_grid.back()},
                       {"r_steps", rad_steps},
                       {"bbox", bbox_json(search.bbox)},
                       {"center_spacing", search.center_spacing},
                       {"solve_budget", rad_budget},
                       {"bisect_iters", rad_bisect},
                       {"seed", common.seed}};
      if (rad_kind == "mes") rep["config"]["alpha"] = parse_real(rad_alpha);
      if (rad_kind == "ess") rep["config"]["R_schedule"] = parse_csv_reals(rad_schedule);
      emit(rep, common.output);
      return 0;
    }

    if (*bnd_cmd) {
      DomainSpec domain = capdrum::load_domain_file(bnd_domain);
      double gamma = parse_real(bnd_gamma);
      capdrum::SearchParams search;
      search.bbox = bbox_or_domain(bnd_bbox, domain, "the radius search");
      search.radius_grid = capdrum::linear_radius_grid(
          parse_real(bnd_rmin), parse_real(bnd_rmax), bnd_steps);
      search.center_spacing = parse_real(bnd_spacing);
      search.solve_budget = bnd_budget;
      search.bisect_iters = bnd_bisect;
      search.cap.h = parse_real(bnd_h);
      std::optional<Box> oracle_bbox;
      if (!bnd_oracle_bbox.empty()) oracle_bbox = parse_bbox(bnd_oracle_bbox);
      capdrum::BoundsReport rep;
      if (bnd_lieb) {
        double alpha = bnd_alpha.empty() ? 0.5 : parse_real(bnd_alpha);
        rep = capdrum::lieb_lower(domain, alpha, search);
      } else if (bnd_essential) {
        if (bnd_schedule.empty())
          throw capdrum::InvalidParameter(
              "--essential needs --R-schedule (e.g. 2,4,8)");
        rep = capdrum::essential_bounds(
            domain, gamma, parse_csv_reals(bnd_schedule), search);
      } else {
        capdrum::OracleParams oracle;
        oracle.enabled = bnd_oracle;
        oracle.h = search.cap.h;
        oracle.widen_factor = parse_real(bnd_widen);
        oracle.with_construction = bnd_construction;
        oracle.bbox = oracle_bbox;
        rep = capdrum::two_sided(domain, gamma, search, oracle);
      }
      json out = capdrum::to_json(rep);
      out["config"] = {{"subcommand", "bounds"},
                       {"domain", bnd_domain},
                       {"gamma", gamma},
                       {"h", search.cap.h},
                       {"r_min", search.radius_grid.front()},
                       {"r_max", search.radius_grid.back()},
                       {"r_steps", bnd_steps},
                       {"bbox", bbox_json(search.bbox)},
                       {"center_spacing", search.center_spacing},
                       {"with_oracle", bnd_oracle},
                       {"with_construction", bnd_construction},
                       {"lieb", bnd_lieb},
                       {"essential", bnd_essential},
                       {"widen", parse_real(bnd_widen)},
                       {"solve_budget", bnd_budget},
                       {"bisect_iters", bnd_bisect},
                       {"seed", common.seed}};
      if (!bnd_alpha.empty()) out["config"]["alpha"] = parse_real(bnd_alpha);
      if (!bnd_schedule.empty())
        out["config"]["R_schedule"] = parse_csv_reals(bnd_schedule);
      if (oracle_bbox) out["config"]["oracle_bbox"] = bbox_json(*oracle_bbox);
      emit(out, common.output);
      using capdrum::Verdict;
      return rep.verdict == Verdict::violated_lower ||
                     rep.verdict == Verdict::violated_upper
                 ? 2
                 : 0;
    }

    if (*suite_cmd) {
      capdrum::SuiteParams params;
      params.h = parse_real(suite_h);
      params.gammas = parse_csv_reals(suite_gammas);
      if (!suite_only.empty()) {
        for (const std::string& tok : split_csv(suite_only))
          params.only.push_back(tok);
      }
      params.progress = stderr;
      capdrum::SuiteResult res = capdrum::run_suite(params);
      if (suite_format == "csv") {
        std::string text = capdrum::suite_csv(res);
        if (common.output.empty()) {
          std::fputs(text.c_str(), stdout);
        } else {
          std::ofstream out(common.output, std::ios::binary);
          if (!out)
            throw std::runtime_error("cannot write output file: " +
                                     common.output);
          out << text;
        }
      } else {
        json rows = json::array();
        for (const capdrum::SuiteRow& row : res.rows) {
          json jr = {{"domain", row.domain},
                     {"gamma", row.gamma},
                     {"report", capdrum::to_json(row.report)},
                     {"seconds", row.seconds}};
          if (!row.error.empty()) jr["error"] = row.error;
          rows.push_back(std::move(jr));
        }
        json rep = {{"config",
                     {{"subcommand", "suite"},
                      {"h", params.h},
                      {"gammas", params.gammas},
                      {"format", suite_format},
                      {"only", params.only},
                      {"seed", common.seed}}},
                    {"rows", rows},
                    {"all_pass", res.all_pass}};
        emit(rep, common.output);
      }
      return res.all_pass ? 0 : 2;
    }
  } catch (const capdrum::SpecParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

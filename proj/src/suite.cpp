#include "capdrum/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "capdrum/errors.hpp"
#include "capdrum/spectrum.hpp"

namespace capdrum {
namespace {

SearchParams make_search(const Box& bbox, double r_min, double r_max,
                         int steps, double h) {
  SearchParams s;
  s.bbox = bbox;
  s.radius_grid = linear_radius_grid(r_min, r_max, steps);
  s.solve_budget = 4;
  s.cap.h = h;
  s.cap.tol = 1e-6;
  return s;
}

OracleParams make_oracle(const Box& bbox, double h, double widen = 0) {
  OracleParams o;
  o.enabled = true;
  o.h = h;
  o.bbox = bbox;
  o.widen_factor = widen;
  return o;
}

std::string csv_field(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

const char* verdict_token(Verdict v) {
  switch (v) {
    case Verdict::sandwich_holds: return "sandwich-holds";
    case Verdict::violated_lower: return "violated-lower";
    case Verdict::violated_upper: return "violated-upper";
    default: return "oracle-missing";
  }
}

}  // namespace

std::vector<SuiteDomain> builtin_suite(double h) {
  std::vector<SuiteDomain> out;

  {
    SuiteDomain d;
    d.name = "ball";
    d.spec = DomainSpec::ball_at(Vec{0, 0, 0}, 1.0);
    d.search = make_search(Box{Vec{-0.5, -0.5, -0.5}, Vec{0.5, 0.5, 0.5}},
                           0.5, 1.25, 4, h);
    d.oracle = make_oracle(Box{Vec{-1, -1, -1}, Vec{1, 1, 1}}, h);
    out.push_back(std::move(d));
  }
  {
    SuiteDomain d;
    d.name = "cube";
    d.spec = DomainSpec::box_at(Vec{0, 0, 0}, Vec{1, 1, 1});
    d.search = make_search(Box{Vec{0, 0, 0}, Vec{1, 1, 1}}, 0.25, 1.0, 4, h);
    d.oracle = make_oracle(Box{Vec{0, 0, 0}, Vec{1, 1, 1}}, h);
    out.push_back(std::move(d));
  }
  {
    // |x_3| < 1.  Unbounded: the oracle removes the box truncation with the
    // width extrapolation, exact for this separable domain.
    SuiteDomain d;
    d.name = "slab";
    d.spec = DomainSpec::intersect(
        {DomainSpec::half_space_at(Vec{0, 0, 1}, 1.0),
         DomainSpec::half_space_at(Vec{0, 0, -1}, 1.0)});
    d.search = make_search(Box{Vec{-0.25, -0.25, -0.25}, Vec{0.25, 0.25, 0.25}},
                           0.5, 1.5, 5, h);
    d.oracle = make_oracle(Box{Vec{-1, -1, -1}, Vec{1, 1, 1}}, h, 2.0);
    out.push_back(std::move(d));
  }
  {
    SuiteDomain d;
    d.name = "l_shape";
    d.spec = DomainSpec::unite({DomainSpec::box_at(Vec{0, 0, 0}, Vec{2, 1, 1}),
                                DomainSpec::box_at(Vec{0, 0, 0}, Vec{1, 2, 1})});
    d.search = make_search(Box{Vec{0, 0, 0}, Vec{2, 2, 1}}, 0.25, 1.0, 4, h);
    d.oracle = make_oracle(Box{Vec{0, 0, 0}, Vec{2, 2, 1}}, h);
    out.push_back(std::move(d));
  }
  {
    // 4^3 box minus a unit lattice of small ball holes: the capacitary
    // radius keeps growing far past the inradius (about 0.77 between holes)
    // because each hole removes only capacity 4 pi / 10.  The capacity of
    // the swallowed holes grows in shell jumps, so the ratio dips between
    // shells and the search exploits the dips.
    SuiteDomain d;
    d.name = "perforated_box";
    DomainSpec holes = DomainSpec::periodic(
        DomainSpec::ball_at(Vec{0.5, 0.5, 0.5}, 0.1),
        {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}}, {4, 4, 4});
    d.spec = DomainSpec::intersect(
        {DomainSpec::box_at(Vec{0, 0, 0}, Vec{4, 4, 4}),
         DomainSpec::complement_of(std::move(holes))});
    d.search = make_search(Box{Vec{1, 1, 1}, Vec{3, 3, 3}}, 0.75, 1.65, 4, h);
    d.oracle = make_oracle(Box{Vec{0, 0, 0}, Vec{4, 4, 4}}, h);
    out.push_back(std::move(d));
  }
  {
    // Two far-apart unit balls.  The search box covers one of them (the
    // domain is symmetric) and the oracle box isolates one component, whose
    // bottom eigenvalue equals the bottom over the union.
    SuiteDomain d;
    d.name = "two_balls";
    d.spec = DomainSpec::unite({DomainSpec::ball_at(Vec{0, 0, 0}, 1.0),
                                DomainSpec::ball_at(Vec{10, 0, 0}, 1.0)});
    d.search = make_search(Box{Vec{-0.5, -0.5, -0.5}, Vec{0.5, 0.5, 0.5}},
                           0.5, 1.25, 4, h);
    d.oracle = make_oracle(Box{Vec{-1, -1, -1}, Vec{1, 1, 1}}, h);
    out.push_back(std::move(d));
  }

  return out;
}

SuiteResult run_suite(const SuiteParams& params) {
  SuiteResult result;
  result.all_pass = true;

  for (const SuiteDomain& dom : builtin_suite(params.h)) {
    if (!params.only.empty() &&
        std::find(params.only.begin(), params.only.end(), dom.name) ==
            params.only.end()) {
      continue;
    }
    if (params.progress) {
      std::fprintf(params.progress, "[suite] %s ...\n", dom.name.c_str());
      std::fflush(params.progress);
    }
    auto t0 = std::chrono::steady_clock::now();
    std::vector<RadiusResult> radii;
    std::optional<EigenResult> oracle;
    std::string error;

    try {
      radii = capacitary_radius_multi(dom.spec, params.gammas, dom.search);
      try {
        Box bbox = dom.oracle.bbox ? *dom.oracle.bbox : dom.search.bbox;
        if (dom.oracle.widen_factor > 1) {
          oracle = width_extrapolated_eigenvalue(
              dom.spec, bbox, dom.oracle.widen_factor, dom.oracle.h,
              dom.oracle.tol);
        } else {
          oracle = bottom_eigenvalue(dom.spec, bbox, dom.oracle.h,
                                     dom.oracle.tol);
        }
      } catch (const std::exception& e) {
        error = e.what();
      }
    } catch (const std::exception& e) {
      error = e.what();
      radii.clear();
    }

    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (params.progress) {
      std::fprintf(params.progress, "[suite] %s done in %.1fs%s%s\n",
                   dom.name.c_str(), seconds, error.empty() ? "" : ": ",
                   error.c_str());
      std::fflush(params.progress);
    }

    int dim = 3;
    try {
      dim = dom.spec.dimension();
    } catch (const std::exception&) {
    }

    for (std::size_t gi = 0; gi < params.gammas.size(); ++gi) {
      SuiteRow row;
      row.domain = dom.name;
      row.gamma = params.gammas[gi];
      row.seconds = seconds;
      row.error = error;
      if (gi < radii.size()) {
        row.report = report_from_radius(dim, params.gammas[gi], radii[gi],
                                        oracle);
      } else {
        row.report.gamma = params.gammas[gi];
        row.report.n = dim;
      }
      bool pass = row.error.empty() &&
                  row.report.verdict == Verdict::sandwich_holds;
      if (!pass) result.all_pass = false;
      result.rows.push_back(std::move(row));
    }
  }

  return result;
}

std::string suite_csv(const SuiteResult& result) {
  std::ostringstream os;
  os << "domain,gamma,status,radius,lower,oracle_lambda,upper,eps_radius,"
        "eps_cap,eps_eig,eps_total,verdict,seconds,error\n";
  for (const SuiteRow& row : result.rows) {
    const BoundsReport& rep = row.report;
    const char* status = rep.radius.status == RadiusStatus::finite
                             ? "finite"
                             : rep.radius.status == RadiusStatus::infinite
                                   ? "infinite"
                                   : "zero";
    std::string err = row.error;
    for (char& c : err) {
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    os << row.domain << ',' << csv_field(row.gamma) << ',' << status << ','
       << csv_field(rep.radius.radius) << ',' << csv_field(rep.lower) << ','
       << (rep.oracle_lambda ? csv_field(rep.oracle_lambda->value()) : "")
       << ',' << (rep.upper ? csv_field(*rep.upper) : "") << ','
       << csv_field(rep.eps_radius) << ',' << csv_field(rep.eps_cap) << ','
       << csv_field(rep.eps_eig) << ',' << csv_field(rep.eps_total) << ','
       << verdict_token(rep.verdict) << ',' << csv_field(row.seconds) << ','
       << err << '\n';
  }
  return os.str();
}

}  // namespace capdrum

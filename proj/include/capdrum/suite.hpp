#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "capdrum/bounds.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/geometry.hpp"

namespace capdrum {

// One stock benchmark domain with its adapted search box, radius grid, and
// reference-eigenvalue setup.
struct SuiteDomain {
  std::string name;
  DomainSpec spec;
  SearchParams search;
  OracleParams oracle;
};

// The six stock domains at grid spacing h: unit ball, unit cube, slab of
// width 2, L-shaped box, perforated box (4^3 box with a unit lattice of
// radius-0.1 ball holes), and a union of two far-apart unit balls.  The
// perforated box is the case separating the capacitary radius from the
// inradius.
std::vector<SuiteDomain> builtin_suite(double h);

struct SuiteRow {
  std::string domain;
  double gamma = 0;
  BoundsReport report;
  std::string error;   // nonempty: this row failed and report is partial
  double seconds = 0;  // wall time of the whole domain evaluation; rows of
                       // one domain share the searches, so they share this
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  bool all_pass = false;  // every row error-free with verdict sandwich-holds
};

struct SuiteParams {
  double h = 1.0 / 32;
  std::vector<double> gammas{0.3, 0.5, 0.7};
  std::vector<std::string> only;    // restrict to these domains; empty = all
  std::FILE* progress = nullptr;    // per-domain progress lines, e.g. stderr
};

// Radius searches are shared across the gammas of a domain and the oracle is
// solved once per domain; rows are emitted in (domain, gamma) order.
SuiteResult run_suite(const SuiteParams& params);

std::string suite_csv(const SuiteResult& result);

}  // namespace capdrum

"""Capacitary radius and two-sided Dirichlet spectral bounds.

Thin dict-returning wrappers over the compiled module; domains are JSON
texts or dicts of the same shape the CLI consumes, e.g.
``{"op": "ball", "center": [0, 0, 0], "radius": 1.0}``.
"""

import json as _json

import _capdrum as _core

sphere_area = _core.sphere_area
ball_capacity = _core.ball_capacity
SpecParseError = _core.SpecParseError
ResourceLimit = _core.ResourceLimit


def _domain_text(domain):
    if isinstance(domain, str):
        return domain
    return _json.dumps(domain)


def _loads(text):
    return _json.loads(text)


def constants(n, gamma, multiplicity_override=-1):
    return _loads(_core.constants_json(n, gamma, multiplicity_override))


def domain_roundtrip(domain):
    return _loads(_core.domain_roundtrip(_domain_text(domain)))


def capacity_grid(domain, bbox, h=1.0 / 32, outer_factor=8.0):
    return _loads(
        _core.capacity_grid_json(_domain_text(domain), list(bbox), h, outer_factor)
    )


def capacity_wos(domain, bbox, h=1.0 / 32, walks=100000, seed=0):
    return _loads(
        _core.capacity_wos_json(_domain_text(domain), list(bbox), h, walks, seed)
    )


def eigenvalue(domain, bbox, h=1.0 / 32, tol=1e-6, extrapolate=True, widen_factor=0.0):
    return _loads(
        _core.eigenvalue_json(
            _domain_text(domain), list(bbox), h, tol, extrapolate, widen_factor
        )
    )


def is_negligible(domain, center, radius, gamma, h=1.0 / 32):
    return _loads(
        _core.is_negligible_json(_domain_text(domain), list(center), radius, gamma, h)
    )


def capacitary_radius(
    domain,
    gammas,
    bbox,
    r_min,
    r_max,
    r_steps,
    h=1.0 / 32,
    center_spacing=0.0,
    bisect_iters=5,
    solve_budget=0,
    verify_h=0.0,
):
    if isinstance(gammas, float):
        gammas = [gammas]
    return _loads(
        _core.capacitary_radius_json(
            _domain_text(domain),
            list(gammas),
            list(bbox),
            r_min,
            r_max,
            r_steps,
            h,
            center_spacing,
            bisect_iters,
            solve_budget,
            verify_h,
        )
    )


def measure_radius(domain, alpha, bbox, r_min, r_max, r_steps, h=1.0 / 32):
    return _loads(
        _core.measure_radius_json(
            _domain_text(domain), alpha, list(bbox), r_min, r_max, r_steps, h
        )
    )


def two_sided(
    domain,
    gamma,
    bbox,
    r_min,
    r_max,
    r_steps,
    h=1.0 / 32,
    with_oracle=True,
    oracle_bbox=(),
    widen_factor=0.0,
    with_construction=False,
    solve_budget=0,
):
    return _loads(
        _core.two_sided_json(
            _domain_text(domain),
            gamma,
            list(bbox),
            r_min,
            r_max,
            r_steps,
            h,
            with_oracle,
            list(oracle_bbox),
            widen_factor,
            with_construction,
            solve_budget,
        )
    )


def trial_function_bound(domain, center, radius, gamma, h=1.0 / 32):
    return _loads(
        _core.trial_function_bound_json(
            _domain_text(domain), list(center), radius, gamma, h
        )
    )


def suite_csv(h=1.0 / 32, gammas=(), only=()):
    return _core.suite_csv(h, list(gammas), list(only))

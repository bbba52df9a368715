"""Nelder-Mead simplex search and the ramp-optimization drivers built on it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

log = logging.getLogger(__name__)


class InputError(ValueError):
    """Objective is not finite at the starting point."""


@dataclass(frozen=True)
class SimplexOptions:
    step: object = 0.02
    reflect: float = 1.0
    expand: float = 2.0
    contract: float = 0.5
    shrink: float = 0.5
    ftol: float = 1e-12
    xtol: float = 1e-8
    max_evals: int = 4000
    restarts: int = 3
    penalty: float = 1.0
    keep_history: bool = True

    def __post_init__(self):
        if not (self.reflect > 0 and self.expand > 1 and 0 < self.contract < 1
                and 0 < self.shrink < 1 and self.expand > self.reflect):
            raise ValueError("invalid Nelder-Mead coefficients")


@dataclass
class OptimizationResult:
    x: np.ndarray
    fun: float
    nfev: int
    converged: bool
    restarts: int = 0
    all_penalized: bool = False
    history: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


class _Counter:
    """Wraps the objective: evaluation count, penalties and the incumbent."""

    def __init__(self, objective, opts):
        self.objective = objective
        self.opts = opts
        self.nfev = 0
        self.history = []
        self.best_x = None
        self.best_f = np.inf
        self.best_penalized_x = None
        self.best_penalized_f = np.inf

    def __call__(self, x):
        self.nfev += 1
        out = self.objective(np.array(x, dtype=float))
        penalized = False
        if isinstance(out, tuple):
            out, penalized = out
        value = float(out)
        if not np.isfinite(value):
            value = np.inf
        if penalized:
            if value < self.best_penalized_f:
                self.best_penalized_f, self.best_penalized_x = value, np.array(x)
            internal = value + self.opts.penalty
        else:
            if value < self.best_f:
                self.best_f, self.best_x = value, np.array(x)
            internal = value
        if self.opts.keep_history:
            self.history.append(value)
        return internal


def _initial_simplex(x0, step):
    n = len(x0)
    steps = np.broadcast_to(np.asarray(step, dtype=float), (n,))
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += steps[i] if steps[i] != 0 else 0.00025
    return simplex


def _run(f, x0, opts, budget):
    n = len(x0)
    simplex = _initial_simplex(x0, opts.step)
    fs = np.array([f(x) for x in simplex])
    converged = False
    while f.nfev < budget:
        order = np.argsort(fs, kind="stable")
        simplex, fs = simplex[order], fs[order]
        spread = fs[-1] - fs[0]
        size = np.max(np.abs(simplex[1:] - simplex[0]))
        if (spread <= opts.ftol or not np.isfinite(spread) and fs[0] == fs[-1]) and size <= opts.xtol:
            converged = True
            break
        if spread <= opts.ftol and size <= opts.xtol * 1e3 and fs[0] == 0.0:
            converged = True
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + opts.reflect * (centroid - worst)
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + opts.expand * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + opts.contract * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + opts.contract * (worst - centroid)
            fc = f(xc)
            if fc < fs[-1]:
                simplex[-1], fs[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            simplex[i] = simplex[0] + opts.shrink * (simplex[i] - simplex[0])
            fs[i] = f(simplex[i])
    order = np.argsort(fs, kind="stable")
    return simplex[order[0]], fs[order[0]], converged


def nelder_mead(objective, x0, opts: SimplexOptions = SimplexOptions()) -> OptimizationResult:
    """Minimize ``objective`` from ``x0`` with restarts around the incumbent.

    ``objective`` returns a float, or ``(value, penalized)``; penalized points
    are pushed up by ``opts.penalty`` inside the simplex and are only
    reported if no unpenalized point was ever evaluated.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if opts.max_evals < len(x0) + 1:
        raise ValueError("max_evals must exceed the dimension")
    f = _Counter(objective, opts)
    if len(x0) == 0:
        f0 = f(x0)
        if not np.isfinite(f0):
            raise InputError("objective is not finite at x0")
        return _result(f, True, 0)
    if not np.isfinite(f(x0)):
        raise InputError("objective is not finite at x0")

    converged = False
    restarts = 0
    x, fx = x0, np.inf
    for attempt in range(opts.restarts + 1):
        start = f.best_x if f.best_x is not None else x
        x, fx, converged = _run(f, start, opts, opts.max_evals)
        log.debug("simplex pass %d: f=%.3e nfev=%d", attempt, fx, f.nfev)
        if f.nfev >= opts.max_evals:
            break
        if attempt and not f.best_f < previous - opts.ftol:
            break
        previous = f.best_f
        restarts = attempt
    return _result(f, converged, restarts)


def _result(f, converged, restarts):
    if f.best_x is not None:
        x, fun, penalized = f.best_x, f.best_f, False
    else:
        x, fun, penalized = f.best_penalized_x, f.best_penalized_f, True
    return OptimizationResult(np.asarray(x), float(fun), f.nfev, converged, restarts,
                              penalized, f.history)


# ---------------------------------------------------------------- ramp optimization

POSITION_STEP = 0.02  # lattice sites
DEPTH_STEP = 10.0  # recoils


def optimize_transport(duration_us=25.0, harmonics=5, setup=None, opts=None, x0=None):
    """Position harmonics minimizing the excitation after a single-site transport."""
    from .scenarios import TransportSetup

    setup = setup or TransportSetup()
    opts = opts or SimplexOptions(step=POSITION_STEP)
    if harmonics == 0:
        value = setup.excitation(duration_us)
        return OptimizationResult(np.zeros(0), value, 1, True, history=[value],
                                  meta={"duration_us": duration_us})
    x0 = np.zeros(harmonics) if x0 is None else np.asarray(x0, dtype=float)
    result = nelder_mead(lambda c: setup.excitation(duration_us, c), x0, opts)
    result.meta["duration_us"] = duration_us
    return result


# (harmonics, evaluation budget) of the warm-up stages before the full search
BANDMAP_STAGES = ((2, 400), (4, 1000), (8, 2500))


def _bandmap_stages(k, final_evals):
    stages = [(m, ev) for m, ev in BANDMAP_STAGES if m < k]
    return stages + [(k, final_evals)]


def optimize_bandmap(spec=None, harmonics=None, opts=None, x0=None, search_resolution=None,
                     verify=True, staged=True):
    """Depth and position harmonics maximizing the two-atom band-mapping fidelity.

    With ``staged`` (and no ``x0``) the search starts with two harmonics and
    adds more in steps (2, 4, 8, then all), each stage starting from the
    previous optimum padded with zeros. A direct 30-dimensional simplex from
    zero stalls far above the reachable infidelity. ``opts`` applies to the
    last stage; the warm-up stages use :data:`BANDMAP_STAGES` budgets.

    The objective runs at ``search_resolution``; the optimum is then re-run at
    the default resolution, and with ``verify`` also at doubled resolution.
    ``meta["flagged"]`` is set when the two re-runs differ by more than 50%.
    """
    from .controls import BandMapSpec
    from .scenarios import DEFAULT_RESOLUTION, SEARCH_RESOLUTION, BandMapSetup

    spec = spec or BandMapSpec()
    k = spec.harmonics if harmonics is None else harmonics
    search = BandMapSetup(spec, resolution=search_resolution or SEARCH_RESOLUTION)
    if opts is None:
        opts = SimplexOptions(step=[DEPTH_STEP] * k + [POSITION_STEP] * k, max_evals=6000)
    if k == 0:
        x0 = np.zeros(0)
        value, clamped = search.objective(x0)
        result = OptimizationResult(x0, value, 1, True, all_penalized=clamped, history=[value])
    elif x0 is not None or not staged:
        x0 = np.zeros(2 * k) if x0 is None else np.asarray(x0, dtype=float)
        result = nelder_mead(search.objective, x0, opts)
    else:
        x, m, nfev, stages = np.zeros(0), 0, 0, []
        for size, evals in _bandmap_stages(k, opts.max_evals):
            start = np.zeros(2 * size)
            start[:m], start[size:size + m] = x[:m], x[m:]
            if size == k:
                stage_opts = opts
            else:
                stage_opts = replace(opts, step=[DEPTH_STEP] * size + [POSITION_STEP] * size,
                                     max_evals=evals)
            result = nelder_mead(search.objective, start, stage_opts)
            x, m = result.x, size
            nfev += result.nfev
            stages.append((size, result.fun, result.nfev))
            log.info("band map stage K=%d: 1-F=%.3e after %d evaluations",
                     size, result.fun, result.nfev)
        result.nfev = nfev
        result.meta["stages"] = stages

    final = BandMapSetup(spec, resolution=DEFAULT_RESOLUTION).run(result.x[:k], result.x[k:])
    result.meta.update(infidelity=final.infidelity, fidelity_moved=final.fidelity_moved,
                       fidelity_static=final.fidelity_static, clamped=final.clamped)
    if verify:
        fine = BandMapSetup(spec, resolution=DEFAULT_RESOLUTION.doubled())
        check = fine.run(result.x[:k], result.x[k:]).infidelity
        result.meta["infidelity_verify"] = check
        result.meta["flagged"] = not abs(check - final.infidelity) <= 0.5 * final.infidelity
    return result

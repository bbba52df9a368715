"""Command-line scenario runner.

    tweezer-qc --scenario rampup-scan --out results/
    tweezer-qc --config run.cfg --verify

The config file holds ``section.key = value`` lines; ``#`` starts a comment.
Values may carry a unit suffix (``11us``, ``500Er``, ``36nm``). Unknown keys
are rejected. Every run writes ``resolved_config.txt`` next to its outputs.

Exit codes: 0 success, 2 configuration error, 3 numerical or model error,
4 a check failed under ``--verify``.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import analytic, budgets, gates, io
from .controls import BandMapSpec
from .dynamics import NumericError
from .potentials import LatticeSpec, PotentialField, TweezerSpec, trap_frequency
from .units import RB87, UNITS

log = logging.getLogger("tweezer_qc")

SCENARIOS = ("rampup-scan", "transport-scan", "optimize-transport", "optimize-bandmap",
             "multisite", "sensitivity-map", "budgets", "error-report", "constants", "potential")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(ValueError):
    def __init__(self, message, line=0, column=0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line, self.column = line, column


# ---------------------------------------------------------------- config schema

_UNITS = {
    "time": {"us": 1.0, "ms": 1e3, "s": 1e6, "": 1.0},  # canonical: microseconds
    "energy": {"Er": 1.0, "": 1.0},  # canonical: lattice recoils
    "length": {"nm": 1.0, "um": 1e3, "": 1.0},  # canonical: nanometers
    "sites": {"a": 1.0, "": 1.0},  # canonical: lattice sites
}

# key -> (kind, default); kinds are the unit families above or a python type name
SCHEMA = {
    "scenario.id": ("str", "constants"),
    "lattice.depth": ("energy", 50.0),
    "tweezer.depth": ("energy", 500.0),
    "tweezer.waist": ("sites", 0.5),
    "tweezer.wavelength": ("length", 420.86),
    "grid.points_per_site": ("int", 256),
    "grid.steps_per_period": ("int", 100),
    "rampup.start": ("time", 4.0),
    "rampup.stop": ("time", 30.0),
    "rampup.step": ("time", 0.5),
    "transport.start": ("time", 5.0),
    "transport.stop": ("time", 45.0),
    "transport.step": ("time", 0.25),
    "transport.duration": ("time", 25.0),
    "transport.harmonics": ("int", 5),
    "transport.max_evals": ("int", 4000),
    "multisite.sites": ("int", 100),
    "multisite.ramps": ("bool", False),
    "multisite.rampup": ("time", 11.0),
    "multisite.coeffs_file": ("str", ""),
    "bandmap.v_start": ("energy", 400.0),
    "bandmap.v_aux": ("energy", 200.0),
    "bandmap.duration": ("time", 75.0),
    "bandmap.harmonics": ("int", 15),
    "bandmap.max_evals": ("int", 6000),
    "bandmap.frames": ("int", 151),
    "sensitivity.offset_min": ("length", -10.0),
    "sensitivity.offset_max": ("length", 10.0),
    "sensitivity.offset_points": ("int", 21),
    "sensitivity.scale_min": ("float", 0.99),
    "sensitivity.scale_max": ("float", 1.01),
    "sensitivity.scale_points": ("int", 21),
    "sensitivity.coeffs_file": ("str", ""),
    "budgets.sites": ("ints", (0, 1, 5)),
    "errors.field_noise": ("float", 50e-6),
    "errors.hold": ("time", 100.0),
    "errors.rel_intensity_noise": ("float", 1e-5),
    "errors.gate_time": ("time", 300.0),
    "output.frames": ("int", 51),
}

_VALUE = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)$")


def _convert(kind, text, line=0, column=0):
    if kind == "str":
        return text
    if kind == "bool":
        if text.lower() in ("true", "yes", "1"):
            return True
        if text.lower() in ("false", "no", "0"):
            return False
        raise ConfigError(f"not a boolean: {text!r}", line, column)
    if kind == "ints":
        try:
            return tuple(int(v) for v in str(text).split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"not a list of integers: {text!r}", line, column) from None
    m = _VALUE.match(str(text).strip())
    if not m:
        raise ConfigError(f"not a number: {text!r}", line, column)
    number, suffix = m.groups()
    if kind == "int":
        if suffix or not re.fullmatch(r"[-+]?\d+", number):
            raise ConfigError(f"not an integer: {text!r}", line, column)
        return int(number)
    if kind == "float":
        if suffix:
            raise ConfigError(f"unexpected unit {suffix!r}", line, column)
        return float(number)
    table = _UNITS[kind]
    if suffix not in table:
        raise ConfigError(f"unit {suffix!r} not valid for a {kind}", line, column)
    return float(number) * table[suffix]


@dataclass
class ScenarioConfig:
    values: dict = field(default_factory=lambda: {k: d for k, (_, d) in SCHEMA.items()})

    def __getitem__(self, key):
        return self.values[key]

    @property
    def scenario(self):
        return self.values["scenario.id"]

    def resolved_text(self):
        lines = [f"{k} = {io.format_value(self.values[k])}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"

    def params(self):
        return dict(self.values)


def parse_config(text) -> ScenarioConfig:
    cfg = ScenarioConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", lineno, 1)
        key, value = line.split("=", 1)
        column = len(raw) - len(raw.lstrip()) + 1
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno, column)
        value = value.strip()
        if not value and SCHEMA[key][0] != "str":
            raise ConfigError(f"missing value for {key!r}", lineno, line.index("=") + 2)
        cfg.values[key] = _convert(SCHEMA[key][0], value, lineno, line.index("=") + 2)
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    return cfg


# ---------------------------------------------------------------- scenarios


@dataclass
class RunContext:
    cfg: ScenarioConfig
    out: Path
    verify: bool = False
    threads: int = 1
    checks: list = field(default_factory=list)

    def csv(self, name, columns, rows, comment=""):
        return io.write_csv(self.out / name, columns, rows, self.cfg.params(), comment)

    def check(self, name, passed, detail=""):
        self.checks.append((name, bool(passed), detail))

    @property
    def resolution(self):
        from .scenarios import Resolution
        return Resolution(self.cfg["grid.points_per_site"], self.cfg["grid.steps_per_period"])

    @property
    def lattice(self):
        return LatticeSpec(self.cfg["lattice.depth"])

    def bandmap_spec(self):
        c = self.cfg
        return BandMapSpec(c["bandmap.v_start"], c["bandmap.v_aux"], c["bandmap.duration"],
                           c["bandmap.harmonics"], waist=c["tweezer.waist"])


def _span(start, stop, step):
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _converged(a, b):
    """Resolution-doubling agreement: within 10% or 1e-5 absolute."""
    return abs(a - b) <= max(0.1 * abs(a), 1e-5)


def run_constants(ctx):
    lat = PotentialField((ctx.lattice,))
    tw = TweezerSpec(ctx.cfg["tweezer.depth"], ctx.cfg["tweezer.waist"])
    w_lat, s_lat = trap_frequency(lat)
    w_tw, s_tw = trap_frequency(PotentialField((tw,)))
    w_c, s_c = trap_frequency(lat + tw)
    from .dynamics import bloch_bands
    values = dict(UNITS.describe())
    values.update({
        "species": RB87.name,
        "lattice_trap_frequency_hz": UNITS.angular_si(w_lat) / (2 * np.pi),
        "lattice_oscillator_length_nm": UNITS.length_si(s_lat) * 1e9,
        "tweezer_trap_frequency_hz": UNITS.angular_si(w_tw) / (2 * np.pi),
        "tweezer_oscillator_length_nm": UNITS.length_si(s_tw) * 1e9,
        "combined_trap_frequency_hz": UNITS.angular_si(w_c) / (2 * np.pi),
        "combined_oscillator_length_nm": UNITS.length_si(s_c) * 1e9,
        "tunneling_hz": UNITS.energy_hz(bloch_bands(ctx.lattice).tunneling),
        "linewidth_6p1/2_hz": RB87.linewidth_half,
        "linewidth_6p3/2_hz": RB87.linewidth_three_half,
    })
    io.write_keyvalue(ctx.out / "constants.txt", values, ctx.cfg.params())


def run_potential(ctx):
    x = np.linspace(-2, 2, 801)
    tw = TweezerSpec(ctx.cfg["tweezer.depth"], ctx.cfg["tweezer.waist"])
    lat = PotentialField((ctx.lattice,))
    v = (lat + tw)(x)
    ctx.csv("potential.csv", ["x_site", "V_lattice_Er", "V_total_Er"],
            zip(x, lat(x), v))


def run_rampup_scan(ctx):
    from .scenarios import RampupSetup
    c = ctx.cfg
    setup = RampupSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"], ctx.resolution)
    times = _span(c["rampup.start"], c["rampup.stop"], c["rampup.step"])
    rows = [(p.duration_us, p.numeric, p.envelope, p.harmonic) for p in map(setup.run, times)]
    ctx.csv("rampup_scan.csv", ["T_r_us", "P_e_numeric", "P_e_envelope", "P_e_harmonic"], rows)
    if ctx.verify:
        fine = RampupSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"],
                           ctx.resolution.doubled())
        t_best = rows[int(np.argmin([r[1] for r in rows]))][0]
        a, b = setup.run(t_best).numeric, fine.run(t_best).numeric
        ctx.check("rampup convergence at the best duration", _converged(a, b), f"{a:.3e} vs {b:.3e}")
        _hygiene(ctx, setup.final_field, setup.grid, setup.dt, label="ramp-up")


def run_transport_scan(ctx):
    from .scenarios import TransportSetup
    c = ctx.cfg
    setup = TransportSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"], ctx.resolution)
    omega, sigma = trap_frequency(setup._well(0.0))
    rows = []
    for t in _span(c["transport.start"], c["transport.stop"], c["transport.step"]):
        tt = UNITS.from_us(t)
        xi = analytic.transport_xi(1.0, tt, sigma, omega)
        rows.append((t, setup.excitation(t), float(analytic.envelope_excitation(xi)),
                     float(analytic.transport_excitation(tt, xi, omega))))
    ctx.csv("transport_scan.csv", ["T_t_us", "P_e_numeric", "P_e_envelope", "P_e_harmonic"], rows)
    if ctx.verify:
        fine = TransportSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"],
                              ctx.resolution.doubled())
        t = c["transport.duration"]
        a, b = setup.excitation(t), fine.excitation(t)
        ctx.check("transport convergence", _converged(a, b), f"{a:.3e} vs {b:.3e}")
        _hygiene(ctx, setup._well(0.0), setup.grid, setup.dt, label="transport")


def _hygiene(ctx, static_field, grid, dt, center=0.0, label=""):
    """Unitarity and energy conservation of a stationary state over 100 trap periods."""
    from .dynamics import energy, propagate, stationary_states
    from .scenarios import _localized
    state = _localized(static_field, grid, center, 0)
    omega, _ = trap_frequency(static_field, center)
    traj = propagate(state, static_field, (0.0, 100 * 2 * np.pi / omega), dt)
    drift = abs(traj.final.norm - state.norm)
    e0, e1 = energy(state, static_field), energy(traj.final, static_field)
    tag = f" ({label})" if label else ""
    ctx.check("unitarity" + tag, drift < 1e-9, f"norm drift {drift:.2e}")
    ctx.check("energy conservation" + tag, abs(e1 - e0) < 1e-8 * abs(e0), f"{abs(e1 - e0):.2e}")


def _transport_coeffs(ctx):
    path = ctx.cfg["multisite.coeffs_file"]
    if path:
        return io.read_keyvalue(path)["coeffs"]
    return run_optimize_transport(ctx).x


def run_optimize_transport(ctx):
    from .scenarios import TransportSetup
    from .search import POSITION_STEP, SimplexOptions, optimize_transport
    c = ctx.cfg
    setup = TransportSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"], ctx.resolution)
    opts = SimplexOptions(step=POSITION_STEP, max_evals=c["transport.max_evals"])
    res = optimize_transport(c["transport.duration"], c["transport.harmonics"], setup, opts)
    io.write_keyvalue(ctx.out / "transport_opt.txt", {
        "duration_us": c["transport.duration"], "harmonics": c["transport.harmonics"],
        "coeffs": res.x, "excitation": res.fun, "evaluations": res.nfev,
        "converged": res.converged}, c.params())
    ramp = setup.ramp(c["transport.duration"], res.x)
    t, d, x = ramp.sample(c["output.frames"])
    ctx.csv("transport_ramp.csv", ["t_us", "depth_Er", "position_site"], zip(UNITS.us(t), d, x))
    if ctx.verify:
        fine = TransportSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"],
                              ctx.resolution.doubled())
        b = fine.excitation(c["transport.duration"], res.x)
        ctx.check("optimized transport convergence", _converged(res.fun, b),
                  f"{res.fun:.3e} vs {b:.3e}")
        _hygiene(ctx, setup._well(0.0), setup.grid, setup.dt, label="transport")
    return res


def run_multisite(ctx):
    from .scenarios import TransportSetup, multisite_transport
    c = ctx.cfg
    coeffs = _transport_coeffs(ctx)
    setup = TransportSetup(c["tweezer.depth"], ctx.lattice, c["tweezer.waist"], ctx.resolution)
    res = multisite_transport(coeffs, c["transport.duration"], c["multisite.sites"], setup,
                              ramps=c["multisite.ramps"], rampup_us=c["multisite.rampup"])
    ctx.csv("multisite.csv", ["n", "P_e"], zip(res.sites, res.excitation),
            comment=f"max/single = {res.max_ratio:.4g}, period = {res.dominant_period():.4g} sites")
    if ctx.verify:
        _hygiene(ctx, setup._well(0.0), setup.grid, setup.dt, label="transport")


def _bandmap_coeffs(ctx):
    path = ctx.cfg["sensitivity.coeffs_file"]
    if path:
        return io.read_keyvalue(path)["coeffs"]
    return run_optimize_bandmap(ctx).x


def run_optimize_bandmap(ctx):
    from .scenarios import BandMapSetup
    from .search import DEPTH_STEP, POSITION_STEP, SimplexOptions, optimize_bandmap
    c = ctx.cfg
    spec = ctx.bandmap_spec()
    k = spec.harmonics
    opts = SimplexOptions(step=[DEPTH_STEP] * k + [POSITION_STEP] * k,
                          max_evals=c["bandmap.max_evals"])  # budget of the final stage
    res = optimize_bandmap(spec, opts=opts, verify=ctx.verify)
    setup = BandMapSetup(spec, ctx.lattice, ctx.resolution)
    out = setup.run(res.x[:k], res.x[k:], frames=c["bandmap.frames"])
    a, b = out.trajectories
    w = gates.transverse_pair(0.0, ctx.lattice)
    phase = gates.bandmap_interaction_phase(a, b, transverse=w)
    io.write_keyvalue(ctx.out / "bandmap_opt.txt", {
        "harmonics": k, "coeffs": res.x, "infidelity": out.infidelity,
        "fidelity_moved": out.fidelity_moved, "fidelity_static": out.fidelity_static,
        "clamped": out.clamped, "interaction_phase_rad": phase, "evaluations": res.nfev,
        **{key: v for key, v in res.meta.items() if key.startswith(("infidelity_", "flagged"))},
    }, c.params())
    _, moved = setup.field(res.x[:k], res.x[k:])
    t, d, x = moved.sample(c["output.frames"])
    ctx.csv("bandmap_ramp.csv", ["t_us", "depth_Er", "position_site"], zip(UNITS.us(t), d, x))
    rows = []
    step = max(1, len(a.times) // c["output.frames"])
    for i in range(0, len(a.times), step):
        grid = a.states[i].grid
        for j in range(0, grid.n_points, 8):
            rows.append((UNITS.us(a.times[i]), grid.x[j], a.states[i].density[j],
                         b.states[i].density[j]))
    ctx.csv("bandmap_density.csv", ["t_us", "x_site", "density_moved", "density_static"], rows)
    if ctx.verify:
        start, _ = setup.field()
        _hygiene(ctx, start.at(0.0), setup.grid, setup.dt, spec.left, "band map")
        ctx.check("band-map resolution check", not res.meta.get("flagged", False),
                  f"{res.meta.get('infidelity'):.3e} vs {res.meta.get('infidelity_verify'):.3e}")
    res.meta["interaction_phase"] = phase
    return res


def run_sensitivity_map(ctx):
    from .scenarios import BandMapSetup
    c = ctx.cfg
    coeffs = _bandmap_coeffs(ctx)
    setup = BandMapSetup(ctx.bandmap_spec(), ctx.lattice, ctx.resolution)
    offsets = np.linspace(c["sensitivity.offset_min"], c["sensitivity.offset_max"],
                          c["sensitivity.offset_points"])
    scales = np.linspace(c["sensitivity.scale_min"], c["sensitivity.scale_max"],
                         c["sensitivity.scale_points"])
    smap = budgets.sensitivity_map(setup, coeffs, offsets, scales, workers=ctx.threads)
    rows = [(o, s, smap.infidelity[i, j]) for i, s in enumerate(scales)
            for j, o in enumerate(offsets)]
    ctx.csv("sensitivity_map.csv", ["offset_nm", "scale", "infidelity"], rows)
    crows = []
    for level, paths in smap.contours().items():
        for p, path in enumerate(paths):
            crows += [(level, p, o, s) for o, s in path]
    ctx.csv("sensitivity_contours.csv", ["level", "path", "offset_nm", "scale"], crows)
    if smap.failures:
        ctx.check("sensitivity cells", False, f"{len(smap.failures)} cells failed")
    if ctx.verify:
        start, _ = setup.field()
        _hygiene(ctx, start.at(0.0), setup.grid, setup.dt, setup.spec.left, "band map")


def run_budgets(ctx):
    rows, text = [], []
    for gate in gates.GATES:
        for n in ctx.cfg["budgets.sites"]:
            b = gates.gate_budget(gate, n)
            rows.append((gate, n, b.total_us, gates.closed_form_total_us(gate, n)))
            text.append(f"{gate}, n = {n}\n{b.table()}\n")
    (ctx.out / "budgets.txt").write_text("\n".join(text))
    ctx.csv("budgets.csv", ["gate", "n", "total_us", "closed_form_us"], rows)
    for gate, n, total, closed in rows:
        ctx.check(f"{gate} budget n={n}", total == closed, f"{total} vs {closed}")


def run_error_report(ctx):
    c = ctx.cfg
    gate_s = c["errors.gate_time"] * 1e-6
    far = budgets.tweezer_scattering(budgets.FAR_DETUNED_WAVELENGTH, exposure=gate_s)
    spin = budgets.tweezer_scattering(c["tweezer.wavelength"] * 1e-9, polarization="sigma-",
                                      state="up", exposure=25e-6, label="spin-dependent")
    lat = budgets.lattice_scattering(c["lattice.depth"], exposure=gate_s)
    deph = budgets.dephasing_budget(budgets.DephasingScenario(c["errors.field_noise"],
                                                              hold=c["errors.hold"] * 1e-6))
    values = {}
    for name, s in (("far_detuned", far), ("spin_dependent", spin), ("lattice", lat)):
        rate = budgets.scattering_rate(s)
        values[f"{name}_rate_hz"] = rate
        values[f"{name}_exposure_s"] = s.exposure
        values[f"{name}_probability"] = budgets.scattering_probability(rate, s.exposure)
    values.update({
        "field_noise_g": c["errors.field_noise"],
        "coherence_time_s": deph.coherence_time,
        "magnetic_phase_error": deph.error,
        "intensity_phase_error_rad": budgets.intensity_dephasing(
            c["tweezer.depth"], c["errors.rel_intensity_noise"], c["errors.hold"] * 1e-6),
        "fault_tolerance_threshold": budgets.FAULT_TOLERANCE_THRESHOLD,
    })
    io.write_keyvalue(ctx.out / "error_report.txt", values, c.params())


RUNNERS = {
    "constants": run_constants, "potential": run_potential, "rampup-scan": run_rampup_scan,
    "transport-scan": run_transport_scan, "optimize-transport": run_optimize_transport,
    "optimize-bandmap": run_optimize_bandmap, "multisite": run_multisite,
    "sensitivity-map": run_sensitivity_map, "budgets": run_budgets,
    "error-report": run_error_report,
}


def run(cfg: ScenarioConfig, out, verify=False, threads=1):
    """Run one scenario; returns the list of ``(check, passed, detail)`` tuples."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.txt").write_text(
        "\n".join(io.header_lines(cfg.params())) + "\n" + cfg.resolved_text())
    ctx = RunContext(cfg, out, verify, threads)
    RUNNERS[cfg.scenario](ctx)
    if ctx.checks:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}  {detail}" for name, ok, detail in ctx.checks]
        (out / "checks.txt").write_text("\n".join(lines) + "\n")
    return ctx.checks


def build_parser():
    p = argparse.ArgumentParser(prog="tweezer-qc", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, help="config file of 'section.key = value' lines")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--scenario", choices=SCENARIOS, help="overrides scenario.id")
    p.add_argument("--threads", type=int, default=1, help="worker processes for maps")
    p.add_argument("--verify", action="store_true", help="doubled-resolution re-checks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text)
        if args.scenario:
            cfg.values["scenario.id"] = args.scenario
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        checks = run(cfg, args.out, args.verify, args.threads)
    except (NumericError, ValueError, ArithmeticError, KeyError) as exc:
        print(f"{cfg.scenario} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    failed = [c for c in checks if not c[1]]
    for name, ok, detail in checks:
        log.info("%s %s %s", "PASS" if ok else "FAIL", name, detail)
    if args.verify and failed:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

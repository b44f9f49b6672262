"""Command-line entry point.

Subcommands ``params``, ``xsec``, ``relax``, ``decay``, ``mc`` and
``validate`` read one JSON config (``--config``; defaults to helium-3 at
293 K and 7 atm) and write JSON or CSV to stdout or ``--out``.

Exit codes: 0 success, 1 validation or computation failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .classical import no_collision_attenuation, torrey_attenuation
from .config import ConfigError, RunConfig, load_config
from .gas import derive, diagnostics
from .kinetic import IntegrationError, relaxation, transverse_attenuation
from .montecarlo import MCConfig, MCError, simulate
from .scattering import (
    MIN_KA_OVER_HBAR,
    HardSphereModel,
    QuadratureError,
    ValidityWarning,
    angular_xsecs,
    geometric_transport,
    thermal_integrals,
)
from .validation import AcceptanceContext, format_line, run_acceptance, summary

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2

XSEC_COLUMNS = ("k_over_hbar_a", "sigma_U_over_pi_a2", "im_sigma_I_over_pi_a2")
DECAY_COLUMNS = (
    "t",
    "attenuation_2nd_order",
    "attenuation_classical",
    "attenuation_nocollision",
    "phase_re",
    "phase_im",
)
RELAX_KEYS = ("alpha_per_s", "D_mm2_per_s")
MC_KEYS = ("mean_re", "mean_im", "std_error", "n_particles", "seed")
# refuse walks that would take hours
MC_MAX_STEPS = 10_000_000


def _relaxation(cfg: RunConfig):
    derived = derive(cfg.gas)
    model = HardSphereModel.from_conditions(cfg.gas)
    transport = geometric_transport(model) if cfg.collision_model == "geometric" else None
    integrals = thermal_integrals(model, cfg.gas.temperature, transport=transport)
    return relaxation(derived, integrals)


def cmd_params(cfg: RunConfig, args) -> tuple[object, int]:
    rep = diagnostics(cfg.gas, cfg.waveform.peak_F())
    out = rep.to_json_dict()
    out["warnings"] = [f.name for f in rep.validity_flags if not f.passed]
    return out, EXIT_OK


def cmd_xsec(cfg: RunConfig, args) -> tuple[object, int]:
    s = cfg.xsec
    ka = np.linspace(s.ka_min, s.ka_max, s.n_points)
    if s.ka_min < MIN_KA_OVER_HBAR:
        warnings.warn(f"ka/hbar below {MIN_KA_OVER_HBAR}: short-wavelength amplitude unreliable", ValidityWarning)
    r = angular_xsecs(ka)
    rows = [
        dict(zip(XSEC_COLUMNS, (float(x), float(u), float(i.imag))))
        for x, u, i in zip(ka, r["transport"], r["interference"])
    ]
    return rows, EXIT_OK


def cmd_relax(cfg: RunConfig, args) -> tuple[object, int]:
    rel = _relaxation(cfg)
    return {"alpha_per_s": rel.alpha, "D_mm2_per_s": rel.D * 1e6}, EXIT_OK


def cmd_decay(cfg: RunConfig, args) -> tuple[object, int]:
    rel = _relaxation(cfg)
    w = cfg.waveform
    gamma = cfg.gas.gyromagnetic_ratio
    t = np.linspace(0.0, w.duration, cfg.decay.n_points)
    x = cfg.decay.x_m
    kin = transverse_attenuation(w, rel, gamma, t, x)
    tor = torrey_attenuation(w, rel.D, gamma, t, x)
    nc = no_collision_attenuation(w, cfg.gas.temperature, cfg.gas.particle_mass, gamma, t, x)
    if kin.validity_warning:
        print(f"warning: {kin.validity_warning}", file=sys.stderr)
    rows = [
        dict(zip(DECAY_COLUMNS, map(float, vals)))
        for vals in zip(t, kin.attenuation, tor.magnitude, nc.magnitude, kin.phase.real, kin.phase.imag)
    ]
    return rows, EXIT_OK


def cmd_mc(cfg: RunConfig, args) -> tuple[object, int]:
    s = cfg.mc
    alpha = s.collision_rate_per_s
    if alpha is None:
        alpha = _relaxation(cfg).alpha
    mc = MCConfig(
        n_particles=s.n_particles,
        seed=s.seed,
        collision_rate=float(alpha),
        temperature=cfg.gas.temperature,
        mass=cfg.gas.particle_mass,
        gamma=cfg.gas.gyromagnetic_ratio,
        waveform=cfg.waveform,
        dt=s.dt_s,
        n_blocks=s.n_blocks,
        workers=s.workers,
    )
    steps = cfg.waveform.duration / mc.step
    if steps > MC_MAX_STEPS:
        raise ConfigError(
            f"walk needs {steps:.3g} time steps (alpha T = {alpha * cfg.waveform.duration:.3g}); "
            "set mc.collision_rate_per_s or shorten the waveform"
        )
    return simulate(mc).to_json_dict(), EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> tuple[object, int]:
    results = run_acceptance(AcceptanceContext(cfg.gas, seed=cfg.mc.seed))
    for r in results:
        print(format_line(r), file=sys.stderr)
    out = summary(results)
    return out, EXIT_OK if out["all_passed"] else EXIT_FAILURE


COMMANDS = {
    "params": (cmd_params, "json", "validity diagnostics of the gas conditions"),
    "xsec": (cmd_xsec, "csv", "transport and interference cross sections over a ka grid"),
    "relax": (cmd_relax, "json", "collision rate and diffusion constant"),
    "decay": (cmd_decay, "csv", "transverse attenuation time series"),
    "mc": (cmd_mc, "json", "random-walk estimate of the attenuation"),
    "validate": (cmd_validate, "json", "run the acceptance checks"),
}


def _to_json(obj) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        raise TypeError(f"not serialisable: {type(o).__name__}")

    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return None
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, list):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(obj), indent=2, default=default) + "\n"


def _to_csv(obj) -> str:
    if isinstance(obj, dict) and "checks" in obj:
        obj = obj["checks"]
    rows = obj if isinstance(obj, list) else [obj]
    buf = io.StringIO()
    fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in row.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinkinetics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, fmt, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=fmt, help=f"output format (default: {fmt})")
        p.add_argument("--seed", type=int, help="override mc.seed")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    func = COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result, code = func(cfg, args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, IntegrationError, MCError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    text = _to_json(result) if args.format == "json" else _to_csv(result)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

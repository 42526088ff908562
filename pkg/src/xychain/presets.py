"""Named experiment presets and config-document expansion.

Each preset expands to a full run or sweep config; explicit keys in a config
document override the preset's values.  Time grids for periodic drives keep
whole periods on the grid (64 samples per period) so periodicity can be
checked without interpolation.
"""

from __future__ import annotations

import math

from .errors import ConfigError
from .schemas import PresetInfo, RunConfig, SweepConfig

_TWO_PI = 2.0 * math.pi


def _chain(n, gamma, kt, j, h):
    return {"n_sites": n, "gamma": gamma, "kT": kt, "j_profile": j, "h_profile": h}


def _const(v):
    return {"kind": "constant", "j0": v}


def _run(chain, t_max, n_samples, **extra):
    cfg = {"chain": chain, "t_max": t_max, "n_samples": n_samples}
    cfg.update(extra)
    return cfg


def _periodic_run(kind, j0, k, n, gamma, kt, periods=5, per_period=64):
    period = _TWO_PI / k
    return _run(_chain(n, gamma, kt, {"kind": kind, "j0": j0, "k": k}, _const(1.0)),
                t_max=periods * period, n_samples=periods * per_period + 1)


def _lambda_sweep(gamma, kt, j_profile, n=400, t_max=200.0, n_samples=501):
    base = _run(_chain(n, gamma, kt, j_profile,
                       {"kind": "proportional", "lambda": 1.0}),
                t_max=t_max, n_samples=n_samples)
    values = [round(0.2 + i * (3.0 - 0.2) / 24, 10) for i in range(25)]
    return {"base": base, "sweep_variable": "lambda", "values": values,
            "window_fraction": 0.3}


PRESETS = {
    # exponential and hyperbolic switch-on of the coupling, constant field
    "fig1a": {
        "kind": "run",
        "description": "J_exp ramp J0=0.5 -> J1=2, K=0.1, h=1, N=1000, kT=0, gamma=1",
        "config": _run(_chain(1000, 1.0, 0.0,
                              {"kind": "exp", "j0": 0.5, "j1": 2.0, "k": 0.1},
                              _const(1.0)), t_max=200.0, n_samples=501),
    },
    "fig1b": {
        "kind": "run",
        "description": "J_exp ramp J0=0.5 -> J1=2, K=10, h=1, N=1000, kT=0, gamma=1",
        "config": _run(_chain(1000, 1.0, 0.0,
                              {"kind": "exp", "j0": 0.5, "j1": 2.0, "k": 10.0},
                              _const(1.0)), t_max=40.0, n_samples=801),
    },
    "fig1c": {
        "kind": "run",
        "description": "J_tanh step J0=0.5 -> J1=2, K=0.1, h=1, N=1000, kT=0, gamma=1",
        "config": _run(_chain(1000, 1.0, 0.0,
                              {"kind": "tanh", "j0": 0.5, "j1": 2.0, "k": 0.1},
                              _const(1.0)), t_max=200.0, n_samples=501),
    },
    "fig1d": {
        "kind": "run",
        "description": "J_tanh step J0=0.5 -> J1=2, K=10, h=1, N=1000, kT=0, gamma=1",
        "config": _run(_chain(1000, 1.0, 0.0,
                              {"kind": "tanh", "j0": 0.5, "j1": 2.0, "k": 10.0},
                              _const(1.0)), t_max=40.0, n_samples=801),
    },
    # size study: sudden exponential switch, revival time vs N
    "fig2": {
        "kind": "sweep",
        "description": "N sweep 100..300, J_exp J0=0.5 -> J1=2, K=1000, h=1, kT=0, gamma=1",
        "config": {
            "base": _run(_chain(100, 1.0, 0.0,
                                {"kind": "exp", "j0": 0.5, "j1": 2.0, "k": 1000.0},
                                _const(1.0)), t_max=90.0, n_samples=1801),
            "sweep_variable": "N",
            "values": [100, 150, 200, 250, 300],
            "window_fraction": 0.3,
        },
    },
    # periodic coupling, constant field
    "fig3a": {"kind": "run", "description": "J_cos, J0=0.5, K=0.1, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("cos", 0.5, 0.1, 400, 1.0, 0.0)},
    "fig3b": {"kind": "run", "description": "J_cos, J0=0.5, K=0.5, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("cos", 0.5, 0.5, 400, 1.0, 0.0)},
    "fig3c": {"kind": "run", "description": "J_cos, J0=0.5, K=1, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("cos", 0.5, 1.0, 400, 1.0, 0.0)},
    "fig4a": {"kind": "run", "description": "J_sin, J0=0.5, K=0.1, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("sin", 0.5, 0.1, 400, 1.0, 0.0)},
    "fig4b": {"kind": "run", "description": "J_sin, J0=0.5, K=0.5, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("sin", 0.5, 0.5, 400, 1.0, 0.0)},
    "fig4c": {"kind": "run", "description": "J_sin, J0=0.5, K=1, h=1, N=400, kT=0, gamma=1",
              "config": _periodic_run("sin", 0.5, 1.0, 400, 1.0, 0.0)},
    # periodic coupling AND field, h(t) = J(t)
    "fig5a": {
        "kind": "run",
        "description": "J_cos with h = J (lambda=1), J0=h0=0.5, K=1, N=400, kT=0, gamma=1",
        "config": _run(_chain(400, 1.0, 0.0, {"kind": "cos", "j0": 0.5, "k": 1.0},
                              {"kind": "proportional", "lambda": 1.0}),
                       t_max=5 * _TWO_PI, n_samples=5 * 64 + 1),
    },
    "fig5b": {
        "kind": "run",
        "description": "J_sin with h = J (lambda=1), J0=h0=0.5, K=1, N=400, kT=0, gamma=1",
        "config": _run(_chain(400, 1.0, 0.0, {"kind": "sin", "j0": 0.5, "k": 1.0},
                              {"kind": "proportional", "lambda": 1.0}),
                       t_max=5 * _TWO_PI, n_samples=5 * 64 + 1),
    },
    # asymptotic concurrence vs lambda for proportional drives
    "fig6a": {
        "kind": "sweep",
        "description": "lambda sweep 0.2..3, J_exp J0=0.5 -> J1=1, K=0.1, h=J/lambda, kT=0, gamma=1",
        "config": _lambda_sweep(1.0, 0.0, {"kind": "exp", "j0": 0.5, "j1": 1.0, "k": 0.1}),
    },
    "fig6b_kt05": {
        "kind": "sweep",
        "description": "lambda sweep at kT=0.5, J_exp J0=0.5 -> J1=1, K=0.1, gamma=1",
        "config": _lambda_sweep(1.0, 0.5, {"kind": "exp", "j0": 0.5, "j1": 1.0, "k": 0.1}),
    },
    "fig6b_kt10": {
        "kind": "sweep",
        "description": "lambda sweep at kT=1, J_exp J0=0.5 -> J1=1, K=0.1, gamma=1",
        "config": _lambda_sweep(1.0, 1.0, {"kind": "exp", "j0": 0.5, "j1": 1.0, "k": 0.1}),
    },
    # partially anisotropic and isotropic chains, J(0) = 1
    "fig7a": {
        "kind": "sweep",
        "description": "lambda sweep at gamma=0.5, J_exp J0=1 -> J1=2, K=0.1, kT=0",
        "config": _lambda_sweep(0.5, 0.0, {"kind": "exp", "j0": 1.0, "j1": 2.0, "k": 0.1}),
    },
    "fig7b": {
        "kind": "sweep",
        "description": "lambda sweep at gamma=0 (isotropic), J_exp J0=1 -> J1=2, K=0.1, kT=0",
        "config": _lambda_sweep(0.0, 0.0, {"kind": "exp", "j0": 1.0, "j1": 2.0, "k": 0.1}),
    },
}


def preset_infos() -> list:
    return [PresetInfo(name=name, kind=entry["kind"], description=entry["description"],
                       config=entry["config"]) for name, entry in sorted(PRESETS.items())]


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def expand_config(doc: dict, kind: str):
    """Resolve a config document (possibly naming a preset) to a validated config.

    ``kind`` is "run" or "sweep"; explicit keys override preset values.
    """
    doc = dict(doc)
    name = doc.pop("preset", None)
    base: dict = {}
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; see the presets listing")
        entry = PRESETS[name]
        if entry["kind"] != kind:
            raise ConfigError(f"preset {name!r} is a {entry['kind']} preset, not {kind}")
        base = entry["config"]
    merged = _deep_merge(base, doc)
    model = RunConfig if kind == "run" else SweepConfig
    try:
        return model.model_validate(merged)
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

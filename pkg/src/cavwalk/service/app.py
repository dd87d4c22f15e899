"""FastAPI surface wrapping the core package.

Each endpoint validates a request model, runs the corresponding pure
computation and returns `{meta, rows}`.  Parameter problems surface as 400,
violated internal invariants as 500 with an "invariant" marker so the CLI
can distinguish the two.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..asymptotics import (
    RESONANCE_EPS,
    ArcsineLaw,
    amplitudes_for_cavity,
    classical_variance_rate,
    coin_for_walk,
    driven_amplitudes,
    ks_distance,
    limit_moment,
    limit_pdf,
    resonance_branch,
    resonance_times,
)
from ..cavity import apply_cavity, rabi_angles
from ..operators import bloch_from_density, coin_state_from_angle
from ..walk import WalkConfig, evolve, position_distribution, scaled_moment
from .schemas import (
    CavityRequest,
    CavitySpec,
    ConvergeRequest,
    LimitRequest,
    ResonanceRequest,
    RunResult,
    WalkRequest,
)


class InvariantViolation(Exception):
    """A computed result failed a consistency check it should satisfy."""


def _cavity_meta(spec: CavitySpec) -> dict[str, Any]:
    model = spec.to_model()
    eta, theta = rabi_angles(model)
    return {
        "model": model.variant.value,
        "r": model.r,
        "m": model.multiplicity,
        "lambda": model.lam,
        "t": model.t,
        "eta": eta,
        "theta": theta,
    }


def walk_result(req: WalkRequest) -> RunResult:
    model = req.cavity.to_model() if req.cavity else None
    coin = coin_for_walk(req.chi, model)
    dist = position_distribution(evolve(WalkConfig(k=req.k, n_steps=req.steps, coin=coin)))
    reach = req.k * req.steps
    reachable = (np.abs(dist.positions) <= reach) & ((dist.positions - reach) % 2 == 0)
    rows = [
        {
            "n": req.steps,
            "m": int(m),
            "y": float(m) / req.steps if req.steps > 0 else 0.0,
            "p": float(p),
        }
        for m, p in zip(dist.positions[reachable], dist.probabilities[reachable])
    ]
    total = sum(row["p"] for row in rows)
    if abs(total - 1.0) > 1e-9:
        raise InvariantViolation(f"emitted probabilities sum to {total:.12g}")
    meta: dict[str, Any] = {
        "columns": ["n", "m", "y", "p"],
        "chi": req.chi,
        "k": req.k,
        "steps": req.steps,
        "coin_bloch": [float(v) for v in bloch_from_density(coin)],
        "probability_sum": total,
    }
    if req.cavity:
        meta.update(_cavity_meta(req.cavity))
    return RunResult(meta=meta, rows=rows)


def limit_result(req: LimitRequest) -> RunResult:
    if req.cavity:
        amp = amplitudes_for_cavity(req.chi, req.cavity.to_model())
    else:
        amp = driven_amplitudes(req.chi, 0.0, 1.0, 0.0)
    meta: dict[str, Any] = {
        "chi": req.chi,
        "k": 2,
        "A": amp.cos_coeff,
        "B": amp.sin_coeff,
        "C": amp.amplitude,
        "Lambda": amp.phase,
        "C_squared": amp.amplitude**2,
    }
    if req.cavity:
        meta.update(_cavity_meta(req.cavity))
    if amp.amplitude <= RESONANCE_EPS:
        # degenerate law: report the diffusive branch instead of pdf rows
        meta.update(
            {
                "columns": [],
                "branch": "classical",
                "scaling": "position / sqrt(n)",
                "variance_per_step": classical_variance_rate(2),
            }
        )
        return RunResult(meta=meta, rows=[])
    law = ArcsineLaw(amplitude=amp.amplitude)
    step = 2.0 * amp.amplitude / (req.samples + 1)
    rows = []
    for i in range(1, req.samples + 1):
        y = -amp.amplitude + i * step
        rows.append({"y": y, "density": limit_pdf(law, y)})
    meta.update({"columns": ["y", "density"], "branch": "arcsine"})
    return RunResult(meta=meta, rows=rows)


def cavity_result(req: CavityRequest) -> RunResult:
    model = req.cavity.to_model()
    coin_out = apply_cavity(coin_state_from_angle(req.chi), model)
    bloch = bloch_from_density(coin_out)
    rows = [
        {"i": i, "j": j, "re": float(coin_out[i, j].real), "im": float(coin_out[i, j].imag)}
        for i in range(2)
        for j in range(2)
    ]
    meta: dict[str, Any] = {
        "columns": ["i", "j", "re", "im"],
        "chi": req.chi,
        "bloch": [float(v) for v in bloch],
        "bloch_norm": float(np.linalg.norm(bloch)),
    }
    meta.update(_cavity_meta(req.cavity))
    return RunResult(meta=meta, rows=rows)


def resonance_result(req: ResonanceRequest) -> RunResult:
    model = req.cavity.to_model()
    eta, theta = rabi_angles(model)
    times = resonance_times(model, req.chi, req.count)
    rows = []
    for j, t in enumerate(times):
        residual = driven_amplitudes(req.chi, model.lam * t, eta, theta).amplitude
        if residual >= RESONANCE_EPS:
            raise InvariantViolation(f"amplitude {residual:.3e} at reported resonance time {t:.12g}")
        rows.append({"index": j, "t": t, "amplitude": residual})
    meta: dict[str, Any] = {
        "columns": ["index", "t", "amplitude"],
        "chi": req.chi,
        "branch": resonance_branch(req.chi),
    }
    cavity_meta = _cavity_meta(req.cavity)
    cavity_meta.pop("t")  # times are the output here, not an input
    meta.update(cavity_meta)
    return RunResult(meta=meta, rows=rows)


def converge_result(req: ConvergeRequest) -> RunResult:
    model = req.cavity.to_model() if req.cavity else None
    coin = coin_for_walk(req.chi, model)
    bloch = bloch_from_density(coin)
    amplitude = math.hypot(bloch[1], bloch[2])
    meta: dict[str, Any] = {"chi": req.chi, "k": req.k, "C": amplitude}
    if req.cavity:
        meta.update(_cavity_meta(req.cavity))
    if amplitude <= RESONANCE_EPS:
        rate = classical_variance_rate(req.k)
        rows = []
        for n in sorted(req.steps):
            dist = position_distribution(evolve(WalkConfig(k=req.k, n_steps=n, coin=coin)))
            mean = scaled_moment(dist, 1, n, exponent=0.0)
            variance = scaled_moment(dist, 2, n, exponent=0.0) - mean**2
            rows.append({"n": n, "var_rate": variance / n, "var_err": abs(variance / n - rate)})
        meta.update(
            {
                "columns": ["n", "var_rate", "var_err"],
                "branch": "classical",
                "variance_per_step": rate,
            }
        )
        return RunResult(meta=meta, rows=rows)
    if req.k != 2:
        raise ValueError("the closed-form limit law covers the two-substep walk only; use k=2 or a resonance coin")
    law = ArcsineLaw(amplitude=amplitude, offset=float(bloch[0]))
    target = limit_moment(law, 2)
    rows = []
    for n in sorted(req.steps):
        dist = position_distribution(evolve(WalkConfig(k=req.k, n_steps=n, coin=coin)))
        second = scaled_moment(dist, 2, n, exponent=1.0)
        rows.append(
            {
                "n": n,
                "ks": ks_distance(dist, n, law),
                "m2": second,
                "m2_err": abs(second - target),
            }
        )
    meta.update(
        {
            "columns": ["n", "ks", "m2", "m2_err"],
            "branch": "arcsine",
            "target_m2": target,
        }
    )
    return RunResult(meta=meta, rows=rows)


app = FastAPI(title="cavwalk", version=__version__)


def _run(builder, req) -> RunResult:
    try:
        return builder(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except (InvariantViolation, AssertionError) as exc:
        raise HTTPException(status_code=500, detail=f"invariant: {exc}") from exc


@app.post("/walk", response_model=RunResult)
def post_walk(req: WalkRequest) -> RunResult:
    return _run(walk_result, req)


@app.post("/limit", response_model=RunResult)
def post_limit(req: LimitRequest) -> RunResult:
    return _run(limit_result, req)


@app.post("/cavity", response_model=RunResult)
def post_cavity(req: CavityRequest) -> RunResult:
    return _run(cavity_result, req)


@app.post("/resonance", response_model=RunResult)
def post_resonance(req: ResonanceRequest) -> RunResult:
    return _run(resonance_result, req)


@app.post("/converge", response_model=RunResult)
def post_converge(req: ConvergeRequest) -> RunResult:
    return _run(converge_result, req)

"""End-to-end imaging pipelines and the pipeline-by-autofocus comparison."""

from __future__ import annotations

import json
import math
import time

import numpy as np

from .autofocus import (
    compensated_history,
    leca_on_history,
    pga_estimate_phase,
    phase_on_chirps,
    phase_to_beta,
)
from .bpa import (
    backproject,
    correct_trajectory,
    pixelwise_bf_backproject,
    pre_bpa_beamform,
    range_profiles,
)
from .errors import ConfigError, SarError
from .fmcw import BeatCube
from .geometry import Trajectory, element_positions
from .metrics import RuntimeProbe, evaluate
from .pfa import apply_phase_correction, pfa_image, polar_resample
from .scenario import Scenario

PIPELINES = ("pfa", "bpa_siso", "bpa_prebf", "bpa_pixelwise")
AUTOFOCUS = ("none", "leca_ic", "leca_pga", "pga")
_ALIASES = {"pfa_none": ("pfa", "none"), "pfa_leca": ("pfa", "leca_ic"), "pfa_pga": ("pfa", "pga")}


def _pfa(hist, scenario, probe, beta=0.0):
    g = scenario.pfa
    if beta:
        hist = apply_phase_correction(hist, beta)
    with probe("resample"):
        rect = polar_resample(hist, g.nkx, g.nky, g.method)
    with probe("fft"):
        image = pfa_image(rect, g.zero_pad, g.window)
    image.meta["beta_hat"] = float(beta)
    return image


def _pga_beta(hist, scenario, probe):
    image = _pfa(hist, scenario, probe)
    with probe("autofocus"):
        est = pga_estimate_phase(image, scenario.autofocus.pga)
        beta = phase_to_beta(phase_on_chirps(est, image, hist.geometry), hist.geometry, scenario.radar)
    return beta, est


def _bpa(kind, cube, traj, scenario, probe):
    grid, g = scenario.bpa_grid(), scenario.bpa
    radar = cube.radar
    if kind == "bpa_pixelwise":
        with probe("backprojection"):
            return pixelwise_bf_backproject(cube, traj, grid, radar, g.zero_pad, g.interp)
    with probe("range_fft"):
        if kind == "bpa_siso":
            history = cube.data[0]
            track = Trajectory(element_positions(traj, radar)[0], traj.label)
        else:
            history = pre_bpa_beamform(cube)
            track = traj
        profiles = range_profiles(history, radar, g.zero_pad)
    with probe("backprojection"):
        image = backproject(profiles, track, grid, radar, g.interp)
    image.meta["pipeline"] = kind
    return image


def run_pipeline(kind, autofocus="none", scenario: Scenario | None = None, cube: BeatCube | None = None,
                 probe: RuntimeProbe | None = None):
    """Form one image and its metrics.

    ``kind`` is one of ``pfa``, ``bpa_siso``, ``bpa_prebf``, ``bpa_pixelwise``
    (or the shorthands ``pfa_none``, ``pfa_leca``, ``pfa_pga``).  ``autofocus``
    is ``none``, ``leca_ic`` (contrast-maximizing beta), ``leca_pga`` (beta from
    the PGA quadratic) or ``pga`` (PGA-corrected PFA image, PFA only).
    BPA pipelines apply the estimated beta to the trajectory; the PFA pipeline
    applies it as a phase correction.  The cube is simulated from the
    scenario when not given.
    """
    if kind in _ALIASES:
        if autofocus not in ("none", _ALIASES[kind][1]):
            raise ConfigError(f"pipeline {kind!r} already fixes the autofocus")
        kind, autofocus = _ALIASES[kind]
    if kind not in PIPELINES:
        raise ConfigError(f"unknown pipeline {kind!r}; choose from {PIPELINES}")
    if autofocus not in AUTOFOCUS:
        raise ConfigError(f"unknown autofocus {autofocus!r}; choose from {AUTOFOCUS}")
    if autofocus == "pga" and kind != "pfa":
        raise ConfigError("plain PGA needs the PFA slow-time axis; use leca_pga for BPA")

    scenario = scenario or Scenario()
    probe = probe or RuntimeProbe()
    if cube is None:
        cube = scenario.simulate()
    traj = scenario.measured_trajectory()
    srp = scenario.srp
    start = time.perf_counter()

    beta, extra = 0.0, {}
    hist = None
    if kind == "pfa" or autofocus != "none":
        with probe("compensate"):
            hist = compensated_history(cube, traj, srp, cube.radar)
    if autofocus == "leca_ic":
        g = scenario.pfa
        with probe("autofocus"):
            result = leca_on_history(hist, scenario.autofocus.leca, scenario.autofocus.roi,
                                     nkx=g.nkx, nky=g.nky, zero_pad=g.zero_pad,
                                     method=g.method, window=g.window)
        beta, extra = result.beta, {"ic_trace": result.ic_trace}
    elif autofocus == "leca_pga":
        beta, est = _pga_beta(hist, scenario, probe)
        extra = {"pga_poly": est.poly}

    if kind == "pfa":
        if autofocus == "pga":
            image = _pfa(hist, scenario, probe)
            with probe("autofocus"):
                est = pga_estimate_phase(image, scenario.autofocus.pga)
            image = est.corrected
            extra = {"pga_poly": est.poly}
        else:
            image = _pfa(hist, scenario, probe, beta)
    else:
        track = correct_trajectory(traj, beta) if autofocus != "none" else traj
        image = _bpa(kind, cube, track, scenario, probe)

    cc = time.perf_counter() - start
    image.meta.update({
        "pipeline": kind, "autofocus": autofocus, "beta_hat": float(beta),
        "runtime_s": cc, "stages": dict(probe.stages), **extra,
    })
    return image, evaluate(image, cc_s=cc, stages=probe.stages)


ROWS = (("AR", "ar_m", min), ("IC", "ic", max), ("IE", "ie", min), ("CC", "cc_s", min))


def run_compare(scenario: Scenario | None = None, pipelines=PIPELINES, autofocus=("none", "leca_ic", "leca_pga")):
    """Run every pipeline-by-autofocus cell on one shared cube.

    Returns ``{"scenario_hash", "columns", "cells"}``.  Each cell holds the
    metrics or an ``error`` string; failed cells do not stop the run.  Cells
    that do not apply (plain ``pga`` on BPA) are skipped.
    """
    scenario = scenario or Scenario()
    cube = scenario.simulate()
    cells = {}
    for kind in pipelines:
        for af in autofocus:
            key = f"{kind}/{af}"
            if af == "pga" and kind != "pfa":
                continue
            try:
                _, report = run_pipeline(kind, af, scenario, cube)
                cells[key] = report.to_dict()
            except SarError as exc:
                cells[key] = {"error": f"{type(exc).__name__}: {exc}"}
    _mark_best(cells, pipelines)
    return {"scenario_hash": scenario.digest(), "columns": list(cells), "cells": cells}


def _mark_best(cells, pipelines):
    """Flag the best value of each metric within each pipeline group."""
    for kind in pipelines:
        group = {k: v for k, v in cells.items() if k.startswith(kind + "/") and "error" not in v}
        for _, field, pick in ROWS:
            values = {k: v[field] for k, v in group.items() if _finite(v[field])}
            if not values:
                continue
            best = pick(values.values())
            for k, v in values.items():
                if v == best:
                    group[k].setdefault("best", []).append(field)


def _finite(v):
    return isinstance(v, (int, float)) and math.isfinite(v)


def format_table(report) -> str:
    """Fixed-width text table; ``*`` marks the best value in its pipeline group."""
    cols = report["columns"]
    width = max([14] + [len(c) + 2 for c in cols])
    lines = ["metric".ljust(8) + "".join(c.rjust(width) for c in cols)]
    for label, field, _ in ROWS:
        row = label.ljust(8)
        for c in cols:
            cell = report["cells"][c]
            if "error" in cell:
                text = "failed"
            else:
                value = cell[field]
                text = "nan" if not _finite(value) else f"{value:.4g}"
                if field in cell.get("best", []):
                    text += "*"
            row += text.rjust(width)
        lines.append(row)
    failed = [f"{c}: {report['cells'][c]['error']}" for c in cols if "error" in report["cells"][c]]
    lines += [f"  {f}" for f in failed]
    lines.append(f"scenario {report['scenario_hash']}  (* best in pipeline group)")
    return "\n".join(lines)


def report_json(report) -> str:
    return json.dumps(report, indent=2, default=lambda o: o.tolist() if isinstance(o, np.ndarray) else str(o))

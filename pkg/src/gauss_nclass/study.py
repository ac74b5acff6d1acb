"""Monte Carlo campaigns relating nonclassicality depth to logarithmic negativity.

Two pieces live here:

* :func:`run_study` / :func:`relation_analysis` sample states, bring them to
  canonical form and check whether the clamped LN is a function of depth.
* :func:`perturbation_identity` checks the symmetric-case statement that two
  states of equal depth have equal ``e`` and hence equal LN.

For the symmetric family ``m1 = m2 = m``, ``n1 = n2 = n``, ``c1 = -c2 = c``
one has ``e = (1 - 2T)^2 / 2``, so ``LN = -log2(1 - 2T)`` exactly.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .canonical import CanonicalizationError, canonicalize, minimal_depth, reduce_to_standard_form
from .gaussian import SamplerConfig, StandardMoments, StateError, sample_state
from .measures import log_negativity, nonclassicality_depth, pt_invariant_e

DEFAULT_BIN_WIDTH = 1e-3
MIN_RECORDS = 100
MAX_RELATIVE_DC = 0.1


@dataclass(frozen=True)
class StudyRecord:
    state_id: int
    depth: float
    ln: float
    converged: bool
    residuals: tuple = (math.nan, math.nan)


DEPTH_MODES = ("canonical", "minimal")


def study_record(config: SamplerConfig, index: int, depth_mode: str = "canonical") -> StudyRecord:
    """Canonicalize one sampled state and record its depth and clamped LN.

    ``depth_mode="minimal"`` records the depth minimized over local squeezings
    instead of the depth at the canonical point.
    """
    state = sample_state(config, index)
    try:
        result = canonicalize(state)
    except (CanonicalizationError, StateError, ValueError):
        return StudyRecord(index, math.nan, math.nan, False)
    if depth_mode == "minimal":
        depth = minimal_depth(result.moments)[0]
    else:
        depth = nonclassicality_depth(result.moments)
    return StudyRecord(
        index,
        depth,
        log_negativity(result.moments)[1],
        result.converged,
        (result.residual_11, result.residual_14),
    )


def _chunk(args):
    config, start, stop, depth_mode = args
    return [study_record(config, i, depth_mode) for i in range(start, stop)]


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("GAUSS_NCLASS_THREADS")
    n = requested or (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def run_study(config: SamplerConfig, workers: int | None = None, depth_mode: str = "canonical") -> list:
    """One record per sampled state, ordered by ``state_id`` whatever the worker count."""
    if depth_mode not in DEPTH_MODES:
        raise ValueError(f"depth_mode must be one of {DEPTH_MODES}")
    n = worker_count(workers)
    if n == 1:
        return [study_record(config, i, depth_mode) for i in range(config.count)]
    step = math.ceil(config.count / (4 * n))
    jobs = [(config, s, min(s + step, config.count), depth_mode) for s in range(0, config.count, step)]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return [rec for chunk in pool.map(_chunk, jobs) for rec in chunk]


def records_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["state_id", "depth", "ln", "converged"])
    for r in records:
        writer.writerow([r.state_id, repr(r.depth), repr(r.ln), "true" if r.converged else "false"])
    return buf.getvalue()


def symmetric_curve_ln(depth):
    """LN of a symmetric canonical state with the given depth: ``-log2(1 - 2T)``."""
    return -np.log2(1.0 - 2.0 * np.asarray(depth, dtype=float)) + 0.0


@dataclass(frozen=True)
class RelationReport:
    bins: list
    max_spread: float
    max_curve_deviation: float
    n_converged: int
    bin_width: float

    def to_json(self) -> dict:
        return {
            "bins": self.bins,
            "max_spread": self.max_spread,
            "max_curve_deviation": self.max_curve_deviation,
            "n_converged": self.n_converged,
            "bin_width": self.bin_width,
        }


def relation_analysis(records, bin_width: float = DEFAULT_BIN_WIDTH, min_records: int = MIN_RECORDS) -> RelationReport:
    """Bin converged records by depth and report the LN spread per bin.

    ``max_spread`` is the largest ``max - min`` of LN inside one depth bin.
    LN rises with depth (slope at least ``2 / ln 2``), so a populated bin has
    a spread of roughly ``bin_width * 2.9`` even when LN is an exact function
    of depth.

    ``max_curve_deviation`` is the largest ``|LN - (-log2(1 - 2T))|``. The
    symmetric subclass already attains every depth in ``[0, 1/2)`` on that
    curve, so any single-valued depth-to-LN relation must be this one.
    """
    good = [r for r in records if r.converged]
    if len(good) < min_records:
        raise ValueError(f"need at least {min_records} converged records, got {len(good)}")
    depth = np.array([r.depth for r in good])
    ln = np.array([r.ln for r in good])
    deviation = np.abs(ln - symmetric_curve_ln(depth))

    keys = np.floor(depth / bin_width).astype(np.int64)
    bins = []
    max_spread = 0.0
    for key in np.unique(keys):
        sel = keys == key
        lo, hi = float(ln[sel].min()), float(ln[sel].max())
        max_spread = max(max_spread, hi - lo)
        bins.append(
            {
                "depth_lo": float(key * bin_width),
                "depth_hi": float((key + 1) * bin_width),
                "count": int(sel.sum()),
                "ln_min": lo,
                "ln_max": hi,
                "spread": hi - lo,
                "curve_deviation": float(deviation[sel].max()),
            }
        )
    return RelationReport(bins, max_spread, float(deviation.max()), len(good), bin_width)


# --- symmetric-case perturbation identity -----------------------------------

@dataclass(frozen=True)
class PerturbationSpec:
    m: float
    n: float
    c: float
    delta_c: float
    tolerance: float = 1e-10


@dataclass(frozen=True)
class PerturbationResult:
    delta_m: float
    delta_n: float
    delta_e: float  # closed-form difference with the corrected chi
    delta_e_direct: float  # e' - e from the general moment formula
    delta_e_minus_chi: float  # closed form with the minus-sign chi variant
    delta_depth: float
    e: float
    chi: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def symmetric_moments(m: float, n: float, c: float) -> StandardMoments:
    return StandardMoments(m, m, n, n, c, -c)


def symmetric_e(m: float, n: float, c: float) -> float:
    return m * m + n * n + 2 * c * c - (m + n) * math.sqrt(4 * c * c + (m - n) ** 2)


def delta_e_closed_form(m, n, c, dm, dn, dc, chi) -> float:
    return 2 * (dc * dc + 2 * c * dc - dm * dn - m * dn - n * dm) + chi * (dm + dn)


def chi_value(m: float, n: float, c: float) -> float:
    return m + n - math.sqrt(4 * c * c + (m - n) ** 2)


def chi_minus_variant(m: float, n: float, c: float) -> float:
    """Variant with ``-(m - n)^2`` under the root; NaN when the radicand is negative."""
    rad = 4 * c * c - (m - n) ** 2
    return m + n - math.sqrt(rad) if rad >= 0 else math.nan


def depth_preserving_shift(m: float, n: float, c: float, delta_c: float, asymmetry: float = 0.0) -> tuple:
    """``(delta_m, delta_n)`` with ``delta_m - delta_n = asymmetry`` keeping the depth fixed.

    Equal depth means ``delta_m + delta_n = R' - R`` where
    ``R = sqrt(4c^2 + (m - n)^2)`` and ``R'`` is the same at the shifted state.
    """
    base = math.sqrt(4 * c * c + (m - n) ** 2)
    shifted = math.sqrt(4 * (c + delta_c) ** 2 + (m - n + asymmetry) ** 2)
    total = shifted - base
    return 0.5 * (total + asymmetry), 0.5 * (total - asymmetry)


def perturbation_identity(spec: PerturbationSpec, asymmetry: float = 0.0, extra_noise: float = 0.0) -> PerturbationResult:
    """Shift ``c`` by ``delta_c`` and ``m, n`` so that the depth is unchanged.

    ``asymmetry`` fixes ``delta_m - delta_n``; only the sum is constrained by
    equal depth. A positive ``extra_noise`` is added to both shifts on top,
    which breaks depth preservation and serves as a negative control; the
    closed-form ``delta_e`` assumes equal depth and is meaningless then, so
    compare ``delta_e_direct`` instead.
    """
    m, n, c, dc = spec.m, spec.n, spec.c, spec.delta_c
    if abs(dc) > MAX_RELATIVE_DC * abs(c):
        raise ValueError(f"|delta_c| must not exceed {MAX_RELATIVE_DC} |c|")
    if extra_noise < 0:
        raise ValueError("extra_noise must be non-negative")
    base = symmetric_moments(m, n, c)
    if log_negativity(base)[0] <= 0:
        raise ValueError("base state is not entangled")
    dm, dn = depth_preserving_shift(m, n, c, dc, asymmetry)
    dm, dn = dm + extra_noise, dn + extra_noise
    try:
        shifted = symmetric_moments(m + dm, n + dn, c + dc)
    except StateError as err:
        raise ValueError(f"perturbed state is unphysical: {err}") from err

    e0, e1 = pt_invariant_e(base), pt_invariant_e(shifted)
    chi = chi_value(m, n, c)
    return PerturbationResult(
        delta_m=dm,
        delta_n=dn,
        delta_e=delta_e_closed_form(m, n, c, dm, dn, dc, chi),
        delta_e_direct=e1 - e0,
        delta_e_minus_chi=delta_e_closed_form(m, n, c, dm, dn, dc, chi_minus_variant(m, n, c)),
        delta_depth=nonclassicality_depth(shifted) - nonclassicality_depth(base),
        e=e0,
        chi=chi,
    )


def random_symmetric_spec(seed: int, index: int, max_squeeze: float = 1.0, max_thermal: float = 1.0):
    """Seeded entangled symmetric base state with ``|delta_c| <= 0.1 c``; None if separable."""
    config = SamplerConfig(seed, index + 1, max_squeeze, max_thermal, mix_passive=False)
    reduced, _ = reduce_to_standard_form(sample_state(config, index))
    m, n, c = reduced.m1, reduced.n1, reduced.c1
    if log_negativity(symmetric_moments(m, n, c))[0] <= 0:
        return None
    rng = np.random.default_rng([int(seed), int(index), 1])
    return PerturbationSpec(m, n, c, MAX_RELATIVE_DC * c * rng.uniform(-1.0, 1.0))


def identity_campaign(seed: int, count: int, max_draws: int | None = None) -> list:
    """``count`` pairs ``(spec, preserving, control)`` over seeded entangled symmetric states.

    Draws whose base is separable or whose shifted state is unphysical are
    skipped. The control adds ``|delta_c|`` of extra noise to both modes.
    """
    out = []
    limit = max_draws if max_draws is not None else 20 * count
    index = 0
    while len(out) < count:
        if index >= limit:
            raise RuntimeError(f"only {len(out)} admissible states in {limit} draws")
        spec = random_symmetric_spec(seed, index)
        index += 1
        if spec is None:
            continue
        try:
            kept = perturbation_identity(spec)
            control = perturbation_identity(spec, extra_noise=abs(spec.delta_c))
        except ValueError:
            continue
        out.append((spec, kept, control))
    return out

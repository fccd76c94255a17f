"""Layer dynamics: the whitening step, its soft variant, residual and fuzzy
connections, the full deep forward pass, and the SGC / Pairnorm baselines.

The forward pass is non-parametric by default (per-layer weights fixed to the
identity), which keeps arbitrarily deep runs cheap and exactly analyzable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    GraphainError,
    InvalidCoefficientsError,
    RankDeficientError,
    ZeroActivationError,
)
from .graph import (
    Graph,
    NormalizedOperator,
    OPERATOR_MODES,
    apply_centering,
    apply_operator,
    normalized_adjacency,
)
from .linalg import SpectralFilterParams, inv_sqrt, soft_spectral_filter

ACTIVATIONS = ("identity", "relu")


@dataclass(frozen=True)
class PropagationConfig:
    """All forward-pass hyper-parameters.

    alpha, beta and gamma are the aggregation / residual / initial mixing
    weights; they may be given on any nonnegative scale and are renormalized
    to sum to one at construction.  p and q are the fuzzy decay factors, with
    p = q = 0 reducing exactly to the vanilla residual and initial terms.
    """

    alpha: float
    beta: float
    gamma: float
    filter: SpectralFilterParams
    layers: int
    p: float = 0.0
    q: float = 0.0
    activation: str = "identity"
    operator_mode: str = "symmetric"
    parametric: bool = False

    def __post_init__(self):
        coeffs = (self.alpha, self.beta, self.gamma)
        if any(c < 0.0 or not math.isfinite(c) for c in coeffs):
            raise InvalidCoefficientsError("alpha, beta, gamma must be nonnegative")
        total = sum(coeffs)
        if total <= 0.0:
            raise InvalidCoefficientsError("alpha + beta + gamma must be positive")
        object.__setattr__(self, "alpha", self.alpha / total)
        object.__setattr__(self, "beta", self.beta / total)
        object.__setattr__(self, "gamma", self.gamma / total)
        for name in ("p", "q"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise InvalidCoefficientsError(f"{name} must be in [0, 1], got {val}")
        if self.layers < 1:
            raise InvalidCoefficientsError("layers must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise InvalidCoefficientsError(f"unknown activation {self.activation!r}")
        if self.operator_mode not in OPERATOR_MODES:
            raise InvalidCoefficientsError(
                f"unknown operator mode {self.operator_mode!r}"
            )
        if not self.parametric and self.activation != "identity":
            raise InvalidCoefficientsError(
                "non-parametric runs require the identity activation"
            )


@dataclass(frozen=True)
class LayerTrace:
    """Running skip-connection accumulators, plus optional layer snapshots."""

    s_last: np.ndarray
    s_init: np.ndarray
    q_pow: float
    layers: tuple | None = None  # (H_1, ..., H_t) when snapshotting


@dataclass(frozen=True)
class PropagationResult:
    embedding: np.ndarray
    trace: LayerTrace


def init_trace(h1: np.ndarray, keep_layers: bool = False) -> LayerTrace:
    """Both fuzzy accumulators start at the first layer, with unit decay power."""
    return LayerTrace(
        s_last=h1, s_init=h1, q_pow=1.0, layers=(h1,) if keep_layers else None
    )


def fuzzy_update(trace: LayerTrace, h_t: np.ndarray, p: float, q: float) -> LayerTrace:
    """Advance the fuzzy accumulators after a new layer.

    The decay power is updated before the initial-connection sum.  p == 0 and
    a vanished decay power short-circuit to plain assignment so the reduction
    to vanilla residual and initial connections is bit-exact.
    """
    q_pow = trace.q_pow * q
    if p == 0.0:
        s_last = h_t
    else:
        s_last = p * trace.s_last + h_t
    if q_pow == 0.0:
        s_init = trace.s_init
    else:
        s_init = trace.s_init + q_pow * h_t
    layers = None if trace.layers is None else trace.layers + (h_t,)
    return LayerTrace(s_last=s_last, s_init=s_init, q_pow=q_pow, layers=layers)


def graphain_step(h: np.ndarray, op: NormalizedOperator) -> np.ndarray:
    """One hard whitening step: center the aggregate, then orthonormalize it.

    The output has exactly orthonormal columns and zero column sums (up to
    roundoff).  Raises RankDeficientError when the centered aggregate loses
    column rank, e.g. on graphs whose aggregation collapses all rows.
    """
    b = apply_centering(apply_operator(op, h))
    return b @ inv_sqrt(b.T @ b)


def softgraphain_step(
    h: np.ndarray, op: NormalizedOperator, params: SpectralFilterParams
) -> np.ndarray:
    """Soft variant: center the aggregate and temper its singular values."""
    b = apply_centering(apply_operator(op, h))
    return soft_spectral_filter(b, params)


def residual_combine(
    h_t: np.ndarray,
    s_last: np.ndarray,
    s_init: np.ndarray,
    cfg: PropagationConfig,
    op: NormalizedOperator,
) -> np.ndarray:
    """Mix the centered aggregate with the residual and initial accumulators.

    Zero coefficients skip their term entirely, which keeps the degenerate
    mixes (e.g. alpha = 1) bit-exact.
    """
    if h_t.shape != s_last.shape or h_t.shape != s_init.shape:
        raise DimensionMismatchError("skip-connection terms must share a shape")
    out = None
    terms = (
        (cfg.alpha, lambda: apply_centering(apply_operator(op, h_t))),
        (cfg.beta, lambda: s_last),
        (cfg.gamma, lambda: s_init),
    )
    for coeff, make in terms:
        if coeff == 0.0:
            continue
        term = make()
        part = term if coeff == 1.0 else coeff * term
        out = part.copy() if out is None else out + part
    return out


def _activation_fn(name: str):
    if name == "relu":
        return lambda m: np.maximum(m, 0.0)
    return lambda m: m


def run_fuzzy_r_softgraphain(
    g: Graph,
    cfg: PropagationConfig,
    reducer: np.ndarray | None = None,
    keep_trace: bool = False,
) -> PropagationResult:
    """Full deep forward pass.

    The first layer runs without skip connections; later layers mix the
    centered aggregate with the fuzzy accumulators, apply the soft filter and
    the activation, then advance the accumulators.  ``reducer`` maps raw
    features to the working width; without it the feature width is used
    as-is.  Rank failures carry the failing layer index.
    """
    op = normalized_adjacency(g, cfg.operator_mode)
    x = g.features if reducer is None else g.features @ np.asarray(reducer, float)
    d = x.shape[1]
    if cfg.filter.d0 > d:
        raise DimensionMismatchError(
            f"filter d0={cfg.filter.d0} exceeds working width {d}"
        )
    act = _activation_fn(cfg.activation)

    def _step(m: np.ndarray, layer: int) -> np.ndarray:
        try:
            return act(soft_spectral_filter(m, cfg.filter))
        except RankDeficientError as err:
            err.args = (f"layer {layer}: {err.args[0] if err.args else ''}",)
            raise

    h = _step(apply_centering(apply_operator(op, x)), 1)
    trace = init_trace(h, keep_layers=keep_trace)
    for t in range(2, cfg.layers + 1):
        b = residual_combine(h, trace.s_last, trace.s_init, cfg, op)
        h = _step(b, t)
        trace = fuzzy_update(trace, h, cfg.p, cfg.q)
    return PropagationResult(embedding=h, trace=trace)


def sgc_propagate(x: np.ndarray, op: NormalizedOperator, layers: int) -> np.ndarray:
    """Plain repeated aggregation with no centering or normalization."""
    if layers < 0:
        raise GraphainError("layer count must be >= 0")
    h = np.array(x, dtype=np.float64, copy=True)
    for _ in range(layers):
        h = apply_operator(op, h)
    return h


def pairnorm_step(h: np.ndarray, op: NormalizedOperator, c: float) -> np.ndarray:
    """Center the aggregate and rescale it to Frobenius norm c * sqrt(n)."""
    if c <= 0.0:
        raise InvalidCoefficientsError("pairnorm scale must be positive")
    hp = apply_centering(apply_operator(op, h))
    norm = float(np.linalg.norm(hp))
    if norm < 1e-300:
        raise ZeroActivationError("centered activation collapsed to zero")
    n = h.shape[0]
    return (c * math.sqrt(n) / norm) * hp

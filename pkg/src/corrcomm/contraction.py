"""Exact verification lab for information contraction under interaction.

Everything here works on finite, exactly-enumerated joints: an interactive
protocol is a list of channel tables (round i reads the round-i speaker's
sample plus the message history), and all divergences are computed in
closed form from the materialized joint table. Verifiers return report
objects carrying margins; failed checks embed the violating instance in a
JSON-ready form so it can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .infotheory import FiniteJoint, cond_mutual_info, kl, mutual_info
from .rng import substream
from .sources import shift_params

__all__ = [
    "InteractiveSpec",
    "InfoSplit",
    "ChainReport",
    "SearchResult",
    "SweepOutcome",
    "binary_symmetric_product",
    "build_joint",
    "compute_info_split",
    "random_spec",
    "search_max_ratio",
    "verify_tilted_contraction",
    "binary_input_contraction",
    "verify_tensorization",
    "verify_interactive_chain",
    "verify_shift_reduction",
    "gap_hamming_demo",
    "majority_channel",
    "replay_violation",
    "sweep_tilted",
    "sweep_binary_contraction",
    "sweep_chain",
    "sweep_tensorization",
    "sweep_shift",
    "sweep_gap_hamming",
]

JOINT_ENTRY_GUARD = 10**7
TOL = 1e-9


# ----------------------------------------------------------------------
# interactive protocol specs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class InteractiveSpec:
    """Finite source plus alternating channel tables, Alice first.

    Channel i (1-based) is an array of shape (input_size, |U_1|, ...,
    |U_{i-1}|, |U_i|): odd rounds read x, even rounds read y, and every
    slice along the last axis is a pmf.
    """

    source: FiniteJoint
    channels: tuple[np.ndarray, ...]

    def __post_init__(self):
        channels = []
        sizes = []
        for i, chan in enumerate(self.channels, start=1):
            chan = np.asarray(chan, dtype=float)
            expect_input = self.source.nx if i % 2 == 1 else self.source.ny
            want = (expect_input, *sizes)
            if chan.shape[:-1] != want:
                raise ValueError(
                    f"round {i} channel shape {chan.shape} incompatible with "
                    f"input size {expect_input} and history sizes {sizes}"
                )
            if chan.shape[-1] < 1:
                raise ValueError(f"round {i} has an empty message alphabet")
            if np.any(chan < 0):
                raise ValueError(f"round {i} channel has negative entries")
            if not np.allclose(chan.sum(axis=-1), 1.0, atol=1e-9):
                raise ValueError(f"round {i} channel rows must sum to 1")
            channels.append(chan)
            sizes.append(chan.shape[-1])
        object.__setattr__(self, "channels", tuple(channels))

    @property
    def rounds(self) -> int:
        return len(self.channels)

    @property
    def message_sizes(self) -> tuple[int, ...]:
        return tuple(c.shape[-1] for c in self.channels)

    @property
    def message_bits(self) -> float:
        """Budget charged as sum of log2 alphabet sizes (>= entropy)."""
        return float(sum(math.log2(s) for s in self.message_sizes))

    def to_jsonable(self) -> dict:
        return {
            "source": self.source.probs.tolist(),
            "channels": [c.tolist() for c in self.channels],
        }

    @staticmethod
    def from_jsonable(data: dict) -> "InteractiveSpec":
        return InteractiveSpec(
            source=FiniteJoint(np.asarray(data["source"], dtype=float)),
            channels=tuple(np.asarray(c, dtype=float) for c in data["channels"]),
        )


def binary_symmetric_product(rho: float, n: int) -> FiniteJoint:
    """n independent copies of the +-1 symmetric pair, composite alphabets."""
    if n < 1:
        raise ValueError(f"coordinate count must be positive, got {n}")
    out = FiniteJoint.binary_symmetric(rho)
    for _ in range(n - 1):
        out = out.product(FiniteJoint.binary_symmetric(rho))
    return out


def build_joint(spec: InteractiveSpec, source: FiniteJoint | None = None) -> np.ndarray:
    """Materialize the joint over (x, y, u_1, ..., u_r).

    Guarded at 10^7 entries. The optional source override reruns the same
    channels on a different input law (used for independent references).
    """
    src = spec.source if source is None else source
    if (src.nx, src.ny) != (spec.source.nx, spec.source.ny):
        raise ValueError("source override must keep the alphabet sizes")
    entries = src.nx * src.ny
    for s in spec.message_sizes:
        entries *= s
    if entries > JOINT_ENTRY_GUARD:
        raise ValueError(
            f"joint would hold {entries} entries, guard is {JOINT_ENTRY_GUARD}"
        )
    joint = src.probs.copy()
    for i, chan in enumerate(spec.channels, start=1):
        if i % 2 == 1:
            lifted = chan[:, None, ...]  # broadcast over y
        else:
            lifted = chan[None, :, ...]  # broadcast over x
        joint = joint[..., None] * lifted
    return joint


# ----------------------------------------------------------------------
# round-by-round information decomposition
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class InfoSplit:
    """Per-round information sums for one interactive spec, in bits.

    injected adds, round by round, the information each message carries
    about its speaker's own sample given the history; interchanged adds
    the information it carries about the other party's sample. The
    contraction statement under test is interchanged <= rho^2 injected.
    The *_chain fields recompute both via transcript-level identities
    (interchanged = I(X;Y) - I(X;Y|U^r), injected = I(U^r; X,Y)) as a
    cross-check.
    """

    interchanged: float
    injected: float
    ratio: float
    interchanged_chain: float
    injected_chain: float


def _round_cmi(joint: np.ndarray, round_idx: int, observe_x: bool) -> float:
    """I(U_i ; X or Y | U^{i-1}) from the full joint table."""
    r = joint.ndim - 2
    i = round_idx  # 1-based
    drop_var = 1 if observe_x else 0
    marg = joint.sum(axis=tuple([drop_var] + list(range(2 + i, 2 + r))))
    # axes now: (kept var, u_1..u_i); flatten history, order (var, u_i, hist)
    var_size = marg.shape[0]
    u_i = marg.shape[-1]
    hist = int(np.prod(marg.shape[1:-1], dtype=np.int64)) if i > 1 else 1
    arr = marg.reshape(var_size, hist, u_i).transpose(0, 2, 1)
    return cond_mutual_info(arr)


def compute_info_split(spec: InteractiveSpec, source: FiniteJoint | None = None) -> InfoSplit:
    """Round-information sums plus their transcript-identity cross-checks."""
    joint = build_joint(spec, source)
    interchanged = 0.0
    injected = 0.0
    for i in range(1, spec.rounds + 1):
        speaker_is_alice = i % 2 == 1
        about_x = _round_cmi(joint, i, observe_x=True)
        about_y = _round_cmi(joint, i, observe_x=False)
        if speaker_is_alice:
            injected += about_x
            interchanged += about_y
        else:
            injected += about_y
            interchanged += about_x

    nx, ny = joint.shape[0], joint.shape[1]
    u_total = int(np.prod(joint.shape[2:], dtype=np.int64))
    src = spec.source if source is None else source
    mi_xy = mutual_info(src)
    mi_xy_given_u = cond_mutual_info(joint.reshape(nx, ny, u_total))
    ratio = interchanged / injected if injected > 0 else 0.0
    return InfoSplit(
        interchanged=interchanged,
        injected=injected,
        ratio=ratio,
        interchanged_chain=mi_xy - mi_xy_given_u,
        injected_chain=mutual_info(joint.reshape(nx * ny, u_total)),
    )


# ----------------------------------------------------------------------
# randomized search for the worst-case ratio
# ----------------------------------------------------------------------

def random_spec(
    source: FiniteJoint,
    r_max: int,
    u_max: int,
    rng: np.random.Generator,
) -> InteractiveSpec:
    """Uniformly random rounds/alphabets with Dirichlet(1) channel rows."""
    if r_max < 1 or u_max < 2:
        raise ValueError("need r_max >= 1 and u_max >= 2")
    rounds = int(rng.integers(1, r_max + 1))
    sizes: list[int] = []
    channels = []
    for i in range(1, rounds + 1):
        u_i = int(rng.integers(2, u_max + 1))
        input_size = source.nx if i % 2 == 1 else source.ny
        shape = (input_size, *sizes)
        rows = rng.dirichlet(np.ones(u_i), size=shape)
        channels.append(rows)
        sizes.append(u_i)
    return InteractiveSpec(source=source, channels=tuple(channels))


@dataclass(frozen=True)
class SearchResult:
    best_ratio: float
    best_split: InfoSplit
    best_spec: InteractiveSpec
    evaluations: int
    max_ratio_seen: float
    violations: list = field(default_factory=list)


# Ratios are meaningless once the messages carry almost nothing; treat
# specs below this many own-bits as ratio 0 during search.
SEARCH_INFO_FLOOR = 1e-7


def _ratio_of(spec: InteractiveSpec) -> tuple[float, InfoSplit]:
    split = compute_info_split(spec)
    if split.injected < SEARCH_INFO_FLOOR:
        return 0.0, split
    return split.ratio, split


def _weaken_channel(chan: np.ndarray, t: float) -> np.ndarray:
    # Mix toward the input-independent channel; contrast scales by (1 - t).
    avg = chan.mean(axis=0, keepdims=True)
    return (1.0 - t) * chan + t * avg


def search_max_ratio(
    source: FiniteJoint,
    r_max: int = 3,
    u_max: int = 3,
    restarts: int = 200,
    seed: int = 0,
    ascent_from: int = 3,
    ascent_steps: int = 300,
    ceiling: float | None = None,
) -> SearchResult:
    """Randomized multi-restart hill climb on the cross/own information ratio.

    Draws `restarts` random specs, then coordinate-ascends from the best
    few, favoring moves that weaken channels toward input independence
    (the regime where the ratio approaches its supremum). When `ceiling`
    is given, every evaluated spec is checked against it and violators are
    recorded with the serialized instance.
    """
    rng = substream(seed, "search_max_ratio")
    evaluations = 0
    max_seen = 0.0
    violations: list[dict] = []

    def consider(spec: InteractiveSpec) -> tuple[float, InfoSplit]:
        nonlocal evaluations, max_seen
        ratio, split = _ratio_of(spec)
        evaluations += 1
        max_seen = max(max_seen, ratio)
        if ceiling is not None and ratio > ceiling:
            violations.append(
                {
                    "check": "ratio_ceiling",
                    "ratio": ratio,
                    "ceiling": ceiling,
                    "instance": spec.to_jsonable(),
                }
            )
        return ratio, split

    pool: list[tuple[float, InfoSplit, InteractiveSpec]] = []
    for _ in range(restarts):
        spec = random_spec(source, r_max, u_max, rng)
        ratio, split = consider(spec)
        pool.append((ratio, split, spec))
    pool.sort(key=lambda item: item[0], reverse=True)

    best_ratio, best_split, best_spec = pool[0]
    for start_ratio, start_split, start_spec in pool[: max(1, ascent_from)]:
        cur_ratio, cur_split, cur_spec = start_ratio, start_split, start_spec
        channels = [c.copy() for c in cur_spec.channels]
        for _ in range(ascent_steps):
            idx = int(rng.integers(len(channels)))
            cand = [c.copy() for c in channels]
            if rng.random() < 0.6:
                cand[idx] = _weaken_channel(cand[idx], 0.5 * rng.random())
            else:
                flat = cand[idx].reshape(-1, cand[idx].shape[-1])
                row = int(rng.integers(flat.shape[0]))
                corner = rng.dirichlet(np.ones(flat.shape[1]))
                t = 0.3 * rng.random()
                flat[row] = (1.0 - t) * flat[row] + t * corner
            cand_spec = replace(cur_spec, channels=tuple(cand))
            ratio, split = consider(cand_spec)
            if ratio > cur_ratio:
                cur_ratio, cur_split, cur_spec = ratio, split, cand_spec
                channels = cand
        if cur_ratio > best_ratio:
            best_ratio, best_split, best_spec = cur_ratio, cur_split, cur_spec

    return SearchResult(
        best_ratio=best_ratio,
        best_split=best_split,
        best_spec=best_spec,
        evaluations=evaluations,
        max_ratio_seen=max_seen,
        violations=violations,
    )


# ----------------------------------------------------------------------
# one-shot verifiers
# ----------------------------------------------------------------------

def verify_tilted_contraction(
    rho: float,
    f,
    g,
    channel_u,
    channel_v=None,
    tol: float = 1e-10,
) -> dict:
    """Contraction survives product tilts of the symmetric binary pair.

    The source is P(x, y) proportional to f(x) g(y) Q(x, y) with Q the
    +-1 symmetric pair at correlation rho. For U drawn from x via
    channel_u the check is I(U;Y) <= rho^2 I(U;X); when channel_v (drawn
    from y) is given, the mirrored check I(X;V) <= rho^2 I(Y;V) runs too.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (2,) or g.shape != (2,):
        raise ValueError("tilt weights must be length-2 vectors")
    if np.any(f < 0) or np.any(g < 0):
        raise ValueError("tilt weights must be nonnegative")
    base = FiniteJoint.binary_symmetric(rho).probs
    tilted = f[:, None] * g[None, :] * base
    mass = tilted.sum()
    if mass <= 0:
        raise ValueError("tilt removes all probability mass")
    tilted /= mass

    def side(channel, from_x: bool) -> tuple[float, float]:
        chan = np.asarray(channel, dtype=float)
        n_in = 2
        if chan.ndim != 2 or chan.shape[0] != n_in:
            raise ValueError(f"channel must have shape (2, m), got {chan.shape}")
        if np.any(chan < 0) or not np.allclose(chan.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("channel rows must be pmfs")
        if from_x:
            joint3 = tilted[:, :, None] * chan[:, None, :]  # (x, y, u)
            own = mutual_info(joint3.sum(axis=1))  # I(U;X)
            cross = mutual_info(joint3.sum(axis=0))  # I(U;Y)
        else:
            joint3 = tilted[:, :, None] * chan[None, :, :]  # (x, y, v)
            own = mutual_info(joint3.sum(axis=0))  # I(V;Y)
            cross = mutual_info(joint3.sum(axis=1))  # I(V;X)
        return cross, own

    cross_u, own_u = side(channel_u, from_x=True)
    margin = rho * rho * own_u - cross_u
    report = {
        "ok": margin >= -tol,
        "margin": margin,
        "cross_u": cross_u,
        "own_u": own_u,
    }
    if channel_v is not None:
        cross_v, own_v = side(channel_v, from_x=False)
        margin_v = rho * rho * own_v - cross_v
        report["margin_v"] = margin_v
        report["cross_v"] = cross_v
        report["own_v"] = own_v
        report["ok"] = report["ok"] and margin_v >= -tol
    if not report["ok"]:
        report["instance"] = {
            "check": "tilted_contraction",
            "rho": rho,
            "f": f.tolist(),
            "g": g.tolist(),
            "channel_u": np.asarray(channel_u).tolist(),
            "channel_v": None if channel_v is None else np.asarray(channel_v).tolist(),
        }
    return report


def binary_input_contraction(p, q, channel, pa=(0.5, 0.5), tol: float = 1e-10) -> dict:
    """Hellinger-affinity contraction for a binary-input output channel.

    With A binary, B | A=0 ~ p, B | A=1 ~ q, and U drawn from A, checks
    I(U;B) <= I(U;A) (1 - (sum_v sqrt(p(v) q(v)))^2).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("output pmfs must be 1-D with matching alphabets")
    pa = np.asarray(pa, dtype=float)
    chan = np.asarray(channel, dtype=float)
    if chan.ndim != 2 or chan.shape[0] != 2:
        raise ValueError(f"channel must have shape (2, m), got {chan.shape}")
    affinity = float(np.sqrt(p * q).sum())
    coeff = 1.0 - affinity * affinity
    # joint over (a, u, b)
    cond_b = np.stack([p, q])  # (a, b)
    joint = pa[:, None, None] * chan[:, :, None] * cond_b[:, None, :]
    i_ua = mutual_info(joint.sum(axis=2))
    i_ub = mutual_info(joint.sum(axis=0).T)  # (u, b) -> pass (b, u) irrelevant
    margin = coeff * i_ua - i_ub
    report = {
        "ok": margin >= -tol,
        "margin": margin,
        "i_ua": i_ua,
        "i_ub": i_ub,
        "coefficient": coeff,
    }
    if not report["ok"]:
        report["instance"] = {
            "check": "binary_input_contraction",
            "p": p.tolist(),
            "q": q.tolist(),
            "channel": chan.tolist(),
            "pa": pa.tolist(),
        }
    return report


def verify_tensorization(
    source1: FiniteJoint,
    source2: FiniteJoint,
    spec_channels,
    sup1: float | None = None,
    sup2: float | None = None,
    search_restarts: int = 300,
    seed: int = 0,
    slack: float = 0.02,
) -> dict:
    """Product-source specs cannot beat the worst single-coordinate ratio.

    Runs the given channels on source1 x source2 and compares the ratio
    against max(sup_j) + slack, where each sup_j is found by
    search_max_ratio on coordinate j alone (or passed in precomputed).
    """
    product = source1.product(source2)
    spec = InteractiveSpec(source=product, channels=tuple(spec_channels))
    ratio, split = _ratio_of(spec)
    if sup1 is None:
        sup1 = search_max_ratio(source1, restarts=search_restarts, seed=seed).best_ratio
    if sup2 is None:
        sup2 = search_max_ratio(
            source2, restarts=search_restarts, seed=seed + 1
        ).best_ratio
    ceiling = max(sup1, sup2) + slack
    report = {
        "ok": ratio <= ceiling,
        "ratio": ratio,
        "ceiling": ceiling,
        "sup1": sup1,
        "sup2": sup2,
        "split": split,
    }
    if not report["ok"]:
        report["instance"] = {
            "check": "tensorization",
            "source1": source1.probs.tolist(),
            "source2": source2.probs.tolist(),
            "channels": [np.asarray(c).tolist() for c in spec_channels],
            "ratio": ratio,
            "ceiling": ceiling,
        }
    return report


@dataclass(frozen=True)
class ChainReport:
    """Divergence-chain quantities for one interactive run, in bits."""

    div_transcript_x: float
    div_transcript_y: float
    interchanged: float
    injected: float
    rho_sq_injected: float
    one_way_gap: float | None
    ok: bool
    instance: dict | None = None


def verify_interactive_chain(spec: InteractiveSpec, rho: float, tol: float = TOL) -> ChainReport:
    """Transcript divergences vs the interchanged and injected information.

    The reference law reruns the same channels on the independent source
    with matching marginals. Checks, within tol:
    max(D(P_UX || ref), D(P_UY || ref)) <= I(X;Y) - I(X;Y|U^r)
    <= rho^2 I(U^r;X,Y), and for one-way specs the y-side divergence
    equals the interchanged information exactly.
    """
    src = spec.source
    ref_source = FiniteJoint.from_product(src.marginal_x(), src.marginal_y())
    joint = build_joint(spec)
    ref = build_joint(spec, source=ref_source)
    nx, ny = src.nx, src.ny
    u_total = int(np.prod(joint.shape[2:], dtype=np.int64))

    with_x = joint.sum(axis=1).reshape(nx * u_total)
    with_x_ref = ref.sum(axis=1).reshape(nx * u_total)
    with_y = joint.sum(axis=0).reshape(ny * u_total)
    with_y_ref = ref.sum(axis=0).reshape(ny * u_total)
    d_x = kl(with_x, with_x_ref)
    d_y = kl(with_y, with_y_ref)

    interchanged = mutual_info(src) - cond_mutual_info(
        joint.reshape(nx, ny, u_total)
    )
    injected = mutual_info(joint.reshape(nx * ny, u_total))
    scaled = rho * rho * injected

    one_way_gap = abs(d_y - interchanged) if spec.rounds == 1 else None
    ok = (
        max(d_x, d_y) <= interchanged + tol
        and interchanged <= scaled + tol
        and (one_way_gap is None or one_way_gap <= tol)
    )
    instance = None
    if not ok:
        instance = {
            "check": "interactive_chain",
            "rho": rho,
            **spec.to_jsonable(),
            "values": {
                "div_transcript_x": d_x,
                "div_transcript_y": d_y,
                "interchanged": interchanged,
                "injected": injected,
            },
        }
    return ChainReport(
        div_transcript_x=d_x,
        div_transcript_y=d_y,
        interchanged=interchanged,
        injected=injected,
        rho_sq_injected=scaled,
        one_way_gap=one_way_gap,
        ok=ok,
        instance=instance,
    )


# ----------------------------------------------------------------------
# correlation-shift reduction
# ----------------------------------------------------------------------

def _product3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Independent product of two (w, x, y) tables, composite axes."""
    out = np.einsum("abc,def->adbecf", a, b)
    return out.reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
    )


def _shifted_source_table(rho_in: float, alpha: float, s: float) -> np.ndarray:
    """Joint of (W0=(B,Z), X', Y') for one +-1 coordinate.

    B ~ Bernoulli(alpha) selects a shared uniform sign Z for both parties
    (with Y' taking s Z); otherwise the original pair passes through.
    """
    base = FiniteJoint.binary_symmetric(rho_in).probs  # indices 0 -> +1? map below
    # index convention: symbol 0 is +1, symbol 1 is -1
    table = np.zeros((4, 2, 2))  # (b*2+z_idx, x', y')
    for b in (0, 1):
        pb = alpha if b == 1 else 1.0 - alpha
        for z_idx, z in enumerate((1.0, -1.0)):
            pz = 0.5
            for x_idx, x in enumerate((1.0, -1.0)):
                for y_idx, y in enumerate((1.0, -1.0)):
                    pxy = base[x_idx, y_idx]
                    if b == 1:
                        xs, ys = z, s * z
                    else:
                        xs, ys = x, y
                    xi = 0 if xs > 0 else 1
                    yi = 0 if ys > 0 else 1
                    table[b * 2 + z_idx, xi, yi] += pb * pz * pxy
    return table


def verify_shift_reduction(
    rho0: float,
    rho1: float,
    spec_channels,
    n: int = 1,
    tol: float = TOL,
) -> dict:
    """A correlation shift costs at most ((rho1-rho0)/(1-|rho0|))^2 per bit.

    The same channels run on the shifted pair under two hypotheses: input
    correlation (rho1-rho0)/(1-|rho0|) (so the shifted pair has correlation
    rho1) versus input correlation 0 (shifted correlation rho0). With the
    shared shift randomness W0 = (B, Z) counted as part of the transcript,
    both transcript-sample divergences are bounded by the squared shift
    ratio times the protocol's message bits.
    """
    params = shift_params("binary", rho0, rho1)
    rho_in = params.input_rho
    if n < 1:
        raise ValueError(f"coordinate count must be positive, got {n}")

    def composite(rho_val: float) -> FiniteJoint:
        table = _shifted_source_table(rho_val, params.alpha, params.s)
        full = table
        for _ in range(n - 1):
            full = _product3(full, table)
        # fold W0 into the x side so standard channel lifting applies
        w, nx, ny = full.shape
        folded = full.transpose(1, 0, 2).reshape(nx * w, ny)
        return FiniteJoint(folded)

    def lift_channels(w_size: int, x_size: int):
        lifted = []
        for i, chan in enumerate(spec_channels, start=1):
            chan = np.asarray(chan, dtype=float)
            if i % 2 == 1:
                if chan.shape[0] != x_size:
                    raise ValueError(
                        f"round {i} channel expects input size {chan.shape[0]}, "
                        f"shifted alphabet has {x_size}"
                    )
                # channel reads x' only; composite x index is (x', w0)
                # with x' slowest, so each x' row repeats w_size times
                lifted.append(np.repeat(chan, w_size, axis=0))
            else:
                lifted.append(chan)
        return tuple(lifted)

    w_size = 4**n
    x_size = 2**n
    chans = lift_channels(w_size, x_size)

    def transcript_margins(rho_val: float):
        src = composite(rho_val)
        spec = InteractiveSpec(source=src, channels=chans)
        joint = build_joint(spec)  # ((x', w0), y', u...)
        u_total = int(np.prod(joint.shape[2:], dtype=np.int64))
        unflat = joint.reshape(x_size, w_size, 2**n, u_total)
        with_x = unflat.sum(axis=2).reshape(-1)  # (x', w0, u)
        with_y = unflat.sum(axis=0).reshape(-1)  # (w0, y', u)
        return with_x, with_y

    x1, y1 = transcript_margins(rho_in)
    x0, y0 = transcript_margins(0.0)
    d_x = kl(x1, x0)
    d_y = kl(y1, y0)
    bits = float(sum(math.log2(np.asarray(c).shape[-1]) for c in spec_channels))
    bound = params.input_rho**2 * bits
    worst = max(d_x, d_y)
    report = {
        "ok": worst <= bound + tol,
        "div_x": d_x,
        "div_y": d_y,
        "bound": bound,
        "rho_input": rho_in,
        "message_bits": bits,
    }
    if not report["ok"]:
        report["instance"] = {
            "check": "shift_reduction",
            "rho0": rho0,
            "rho1": rho1,
            "n": n,
            "channels": [np.asarray(c).tolist() for c in spec_channels],
        }
    return report


# ----------------------------------------------------------------------
# two-hypothesis mixture demo
# ----------------------------------------------------------------------

def majority_channel(n: int) -> np.ndarray:
    """Deterministic one-bit channel: 1 when most of the n signs are +1."""
    size = 2**n
    table = np.zeros((size, 2))
    for idx in range(size):
        ones = bin(idx).count("1")  # symbol 1 encodes -1
        plus = n - ones
        table[idx, 1 if plus > n - plus else 0] = 1.0
    return table


def gap_hamming_demo(n: int, spec_channels, c: float = 1.0, tol: float = TOL) -> dict:
    """Sign-of-correlation testing needs order n bits of transcript.

    The hidden bit U flips the correlation of an n-coordinate +-1 source
    between +c/sqrt(n) and -c/sqrt(n). For the given transcript channels,
    computes I(U; transcript) exactly, bounds it by the mixture divergence
    (1/2) sum_sign D(P^sign_{X,U^r} || P^0_{X,U^r}), and bounds that by
    rho0^2 I(transcript; X,Y) under the mixture. implied_k_lower =
    I(U;transcript) / rho0^2 is the budget needed to make the transcript
    useful, i.e. Theta(n) when I(U;transcript) is order 1.
    """
    if not 1 <= n <= 20:
        raise ValueError(f"coordinate count must lie in [1, 20], got {n}")
    rho0 = c / math.sqrt(n)
    if not 0 < rho0 <= 1:
        raise ValueError(f"per-coordinate correlation {rho0} outside (0, 1]")

    def full_joint(rho_val: float) -> np.ndarray:
        source = binary_symmetric_product(rho_val, n)
        spec = InteractiveSpec(source=source, channels=tuple(spec_channels))
        return build_joint(spec)

    joint_plus = full_joint(rho0)
    joint_minus = full_joint(-rho0)
    joint_null = full_joint(0.0)

    nx = joint_plus.shape[0]
    u_total = int(np.prod(joint_plus.shape[2:], dtype=np.int64))

    def with_x(j: np.ndarray) -> np.ndarray:
        return j.sum(axis=1).reshape(nx * u_total)

    def transcript_only(j: np.ndarray) -> np.ndarray:
        return j.sum(axis=(0, 1)).reshape(u_total)

    mixture_kl_bound = 0.5 * kl(with_x(joint_plus), with_x(joint_null)) + 0.5 * kl(
        with_x(joint_minus), with_x(joint_null)
    )

    # I(U; transcript) with U the uniform hypothesis bit
    table = 0.5 * np.stack(
        [transcript_only(joint_plus), transcript_only(joint_minus)]
    )
    i_u_pi = mutual_info(table)

    mixture = 0.5 * (joint_plus + joint_minus)
    injected_mix = mutual_info(mixture.reshape(-1, u_total))

    ok = (
        i_u_pi <= mixture_kl_bound + tol
        and mixture_kl_bound <= rho0**2 * injected_mix + tol
    )
    report = {
        "ok": ok,
        "rho0": rho0,
        "i_u_pi": i_u_pi,
        "mixture_kl_bound": mixture_kl_bound,
        "injected_mixture": injected_mix,
        "implied_k_lower": i_u_pi / rho0**2,
    }
    if not ok:
        report["instance"] = {
            "check": "gap_hamming",
            "n": n,
            "c": c,
            "channels": [np.asarray(ch).tolist() for ch in spec_channels],
        }
    return report


# ----------------------------------------------------------------------
# randomized sweeps and replay
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepOutcome:
    suite: str
    checks: int
    violations: list
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_pmf(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.dirichlet(np.ones(size))


def sweep_tilted(rho: float, draws: int, seed: int, u_max: int = 3) -> SweepOutcome:
    """Random tilts and channels through verify_tilted_contraction."""
    rng = substream(seed, "sweep_tilted")
    violations = []
    worst = math.inf
    for _ in range(draws):
        f = rng.random(2) * 2.0
        g = rng.random(2) * 2.0
        if f.max() <= 0 or g.max() <= 0:
            continue
        m_u = int(rng.integers(2, u_max + 1))
        m_v = int(rng.integers(2, u_max + 1))
        chan_u = rng.dirichlet(np.ones(m_u), size=2)
        chan_v = rng.dirichlet(np.ones(m_v), size=2)
        report = verify_tilted_contraction(rho, f, g, chan_u, chan_v)
        worst = min(worst, report["margin"], report.get("margin_v", math.inf))
        if not report["ok"]:
            violations.append(report["instance"])
    return SweepOutcome(
        suite="tilted",
        checks=draws,
        violations=violations,
        stats={"worst_margin": worst},
    )


def sweep_binary_contraction(
    draws: int, seed: int, b_max: int = 4, u_max: int = 3
) -> SweepOutcome:
    rng = substream(seed, "sweep_binary_contraction")
    violations = []
    worst = math.inf
    for _ in range(draws):
        b_size = int(rng.integers(2, b_max + 1))
        p = _random_pmf(rng, b_size)
        q = _random_pmf(rng, b_size)
        chan = rng.dirichlet(np.ones(int(rng.integers(2, u_max + 1))), size=2)
        report = binary_input_contraction(p, q, chan)
        worst = min(worst, report["margin"])
        if not report["ok"]:
            violations.append(report["instance"])
    return SweepOutcome(
        suite="binary_contraction",
        checks=draws,
        violations=violations,
        stats={"worst_margin": worst},
    )


def sweep_chain(
    rhos,
    specs_per_rho: int,
    seed: int,
    n_max: int = 2,
    r_max: int = 3,
    u_max: int = 3,
) -> SweepOutcome:
    """Random interactive specs on product sources through the chain check."""
    rng = substream(seed, "sweep_chain")
    violations = []
    checks = 0
    worst = math.inf
    one_way_worst = 0.0
    for rho in rhos:
        for _ in range(specs_per_rho):
            n = int(rng.integers(1, n_max + 1))
            source = binary_symmetric_product(rho, n)
            spec = random_spec(source, r_max, u_max, rng)
            report = verify_interactive_chain(spec, rho)
            checks += 1
            worst = min(
                worst,
                report.interchanged - max(report.div_transcript_x, report.div_transcript_y),
                report.rho_sq_injected - report.interchanged,
            )
            if report.one_way_gap is not None:
                one_way_worst = max(one_way_worst, report.one_way_gap)
            if not report.ok:
                violations.append(report.instance)
    return SweepOutcome(
        suite="chain",
        checks=checks,
        violations=violations,
        stats={"worst_margin": worst, "one_way_worst_gap": one_way_worst},
    )


def sweep_tensorization(
    rho1: float,
    rho2: float,
    draws: int,
    seed: int,
    r_max: int = 2,
    u_max: int = 2,
) -> SweepOutcome:
    source1 = FiniteJoint.binary_symmetric(rho1)
    source2 = FiniteJoint.binary_symmetric(rho2)
    sup1 = search_max_ratio(source1, restarts=400, seed=seed).best_ratio
    sup2 = search_max_ratio(source2, restarts=400, seed=seed + 1).best_ratio
    rng = substream(seed, "sweep_tensorization")
    product = source1.product(source2)
    violations = []
    worst = math.inf
    for _ in range(draws):
        spec = random_spec(product, r_max, u_max, rng)
        report = verify_tensorization(
            source1, source2, spec.channels, sup1=sup1, sup2=sup2
        )
        worst = min(worst, report["ceiling"] - report["ratio"])
        if not report["ok"]:
            violations.append(report["instance"])
    return SweepOutcome(
        suite="tensor",
        checks=draws,
        violations=violations,
        stats={"worst_margin": worst, "sup1": sup1, "sup2": sup2},
    )


def sweep_shift(
    rho0: float,
    rho1: float,
    draws: int,
    seed: int,
    r_max: int = 3,
    u_max: int = 3,
    n: int = 1,
) -> SweepOutcome:
    rng = substream(seed, "sweep_shift")
    # channel shapes live on the shifted alphabets
    shape_source = binary_symmetric_product(0.0, n)
    violations = []
    worst = math.inf
    for _ in range(draws):
        spec = random_spec(shape_source, r_max, u_max, rng)
        report = verify_shift_reduction(rho0, rho1, spec.channels, n=n)
        worst = min(worst, report["bound"] - max(report["div_x"], report["div_y"]))
        if not report["ok"]:
            violations.append(report["instance"])
    return SweepOutcome(
        suite="shift",
        checks=draws,
        violations=violations,
        stats={"worst_margin": worst},
    )


def sweep_gap_hamming(
    n: int,
    c: float,
    draws: int,
    seed: int,
    include_majority: bool = True,
) -> SweepOutcome:
    rng = substream(seed, "sweep_gap_hamming")
    source_shape = binary_symmetric_product(0.0, n)
    violations = []
    checks = 0
    worst = math.inf
    majority_report = None

    def account(report: dict) -> None:
        nonlocal worst
        worst = min(
            worst,
            report["mixture_kl_bound"] - report["i_u_pi"],
            report["rho0"] ** 2 * report["injected_mixture"]
            - report["mixture_kl_bound"],
        )
        if not report["ok"]:
            violations.append(report["instance"])

    if include_majority:
        majority_report = gap_hamming_demo(n, (majority_channel(n),), c)
        checks += 1
        account(majority_report)
    for _ in range(draws):
        # allow two rounds: a transcript that never touches y carries zero
        # information about the correlation sign, so r=1 alone is vacuous
        spec = random_spec(source_shape, r_max=2, u_max=2, rng=rng)
        report = gap_hamming_demo(n, spec.channels, c)
        checks += 1
        account(report)
    stats = {"worst_margin": worst}
    if majority_report is not None:
        stats["majority"] = {
            k: majority_report[k]
            for k in ("i_u_pi", "mixture_kl_bound", "implied_k_lower")
        }
    return SweepOutcome(
        suite="gaphamming", checks=checks, violations=violations, stats=stats
    )


def replay_violation(record: dict) -> dict:
    """Re-run the check named in a serialized violation record."""
    check = record.get("check")
    if check == "tilted_contraction":
        return verify_tilted_contraction(
            record["rho"],
            record["f"],
            record["g"],
            record["channel_u"],
            record.get("channel_v"),
        )
    if check == "binary_input_contraction":
        return binary_input_contraction(
            record["p"], record["q"], record["channel"], record.get("pa", (0.5, 0.5))
        )
    if check == "interactive_chain":
        spec = InteractiveSpec.from_jsonable(record)
        report = verify_interactive_chain(spec, record["rho"])
        return {"ok": report.ok, "report": report}
    if check == "shift_reduction":
        return verify_shift_reduction(
            record["rho0"], record["rho1"], record["channels"], record.get("n", 1)
        )
    if check == "gap_hamming":
        return gap_hamming_demo(record["n"], record["channels"], record["c"])
    if check == "tensorization":
        return verify_tensorization(
            FiniteJoint(np.asarray(record["source1"])),
            FiniteJoint(np.asarray(record["source2"])),
            record["channels"],
        )
    if check == "ratio_ceiling":
        spec = InteractiveSpec.from_jsonable(record["instance"])
        ratio, _ = _ratio_of(spec)
        return {"ok": ratio <= record["ceiling"], "ratio": ratio}
    raise ValueError(f"unknown violation record kind: {check!r}")

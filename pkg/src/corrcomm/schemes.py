"""One-way and two-way estimation schemes under a k-bit budget.

Each scheme exists in two equivalent forms:

* a batch runner (``run_*``) that executes the protocol literally on a
  ``PairBatch``, producing a ``Transcript`` with exact bit accounting, and
* a vectorized trial sampler used by ``estimate_risk`` that draws the
  scheme's sufficient statistics directly (for example the maximum of
  2^k unit normals via its inverse CDF), which follows the identical
  distribution at a fraction of the cost.

Tests cross-validate the two forms against each other; risk sweeps default
to the sampler so Monte Carlo sizes in the hundreds of thousands stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import ndtri
from scipy.stats import norm

from .infotheory import binary_entropy
from .rng import substream
from .sources import CorrelationModel, PairBatch, gen_pairs

__all__ = [
    "Message",
    "Transcript",
    "EstimateResult",
    "RiskReport",
    "SchemeConfig",
    "expected_max_normal",
    "var_max_normal",
    "naive_mse_exact",
    "max_scheme_mse_exact",
    "run_naive",
    "run_max_scheme",
    "run_local_scheme",
    "run_binary_block",
    "run_two_way",
    "block_layout",
    "BlockLayout",
    "default_phase1_bits",
    "check_preconditions",
    "estimate_risk",
    "SCHEME_NAMES",
]

LN2 = math.log(2.0)
MAX_POINTER_BITS = 26  # batch runners materialize 2^k samples; keep that sane

# Local-scheme constants: the marking threshold sits at a (1 - C_THRESHOLD)
# multiple of the asymptotic maximum location, and the index prefix carries
# a (1 + C_BITS) multiple of the nominal bit count.
C_THRESHOLD = 0.1
C_BITS = 0.15

# Binary block scheme: the block count carries an EXIST_FACTOR * sqrt(n)
# safety multiple so a block with the exact target sum exists with high
# probability, and the prefix gets GUARD_BITS extra bits so the decoder's
# candidate list is unique with high probability.
EXIST_FACTOR = 6.0
GUARD_BITS = 4

TWO_WAY_NOMINAL_CAP = 0.95


# ----------------------------------------------------------------------
# quadrature oracles for the maximum of N unit normals
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _max_normal_moment(n: int, power: int) -> float:
    """integral of x^power n phi(x) Phi(x)^(n-1) dx to ~1e-10 abs error."""
    if n == 1 and power == 1:
        return 0.0
    log_n = math.log(n)
    peak = math.sqrt(2.0 * log_n) if n > 1 else 0.0
    lo, hi = -12.0, peak + 12.0

    def integrand(x):
        return x**power * math.exp(
            log_n + norm.logpdf(x) + (n - 1) * norm.logcdf(x)
        )

    points = [peak] if lo < peak < hi else None
    value, err = integrate.quad(
        integrand, lo, hi, points=points, limit=400, epsabs=1e-11, epsrel=1e-11
    )
    if err > 1e-8:
        raise ArithmeticError(
            f"max-normal moment quadrature error {err} exceeds 1e-8 (n={n})"
        )
    return float(value)


def _check_pool_size(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"pool size must be a positive integer, got {n!r}")
    return int(n)


def expected_max_normal(n: int) -> float:
    """E[max of n iid standard normals], by adaptive quadrature."""
    return _max_normal_moment(_check_pool_size(n), 1)


def var_max_normal(n: int) -> float:
    """Var[max of n iid standard normals], by adaptive quadrature."""
    n = _check_pool_size(n)
    mean = _max_normal_moment(n, 1)
    return _max_normal_moment(n, 2) - mean * mean


def naive_mse_exact(k: int, rho: float) -> float:
    """Exact risk of the k-sample sign-exchange estimator."""
    return (1.0 - rho * rho) / k


def max_scheme_mse_exact(k: int, rho: float) -> float:
    """Exact risk of the unclamped maximum-pointer estimator at budget k."""
    n = 2**int(k)
    mean = expected_max_normal(n)
    return (1.0 - rho * rho + rho * rho * var_max_normal(n)) / (mean * mean)


# ----------------------------------------------------------------------
# transcripts and result records
# ----------------------------------------------------------------------

SPEAKERS = ("alice", "bob")


@dataclass(frozen=True)
class Message:
    speaker: str
    payload: str  # '0'/'1' characters
    bit_count: int

    def __post_init__(self):
        if self.speaker not in SPEAKERS:
            raise ValueError(f"speaker must be one of {SPEAKERS}, got {self.speaker!r}")
        if self.bit_count != len(self.payload):
            raise ValueError(
                f"bit_count {self.bit_count} does not match payload length "
                f"{len(self.payload)}"
            )
        if self.payload.strip("01"):
            raise ValueError("payload must consist of '0'/'1' characters")


@dataclass(frozen=True)
class Transcript:
    """Ordered messages with speaker labels under a fixed bit budget."""

    budget: int
    messages: tuple[Message, ...]
    crs_tag: int | None = None  # shared-randomness stream tag, if any

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"bit budget must be positive, got {self.budget}")
        if self.messages and self.messages[0].speaker != "alice":
            raise ValueError("round 1 belongs to alice")
        if self.bits_used > self.budget:
            raise ValueError(
                f"transcript spends {self.bits_used} bits, budget is {self.budget}"
            )

    @property
    def bits_used(self) -> int:
        return sum(m.bit_count for m in self.messages)


@dataclass(frozen=True)
class EstimateResult:
    """Outcome of one protocol run; rho_hat is truncated to [-1, 1]."""

    rho_hat: float
    bits_used: int
    aux: dict = field(default_factory=dict)
    transcript: Transcript | None = None

    def __post_init__(self):
        if not -1.0 <= self.rho_hat <= 1.0:
            raise ValueError(f"estimate {self.rho_hat} escaped [-1, 1]")
        if self.transcript is not None and self.bits_used != self.transcript.bits_used:
            raise ValueError("bits_used disagrees with the transcript")


@dataclass(frozen=True)
class RiskReport:
    """Monte Carlo risk aggregates for one (scheme, k, rho) cell."""

    scheme: str
    rho_true: float
    k: int
    trials: int
    mse: float
    bias: float
    variance: float
    ci95_halfwidth: float
    seed: int
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        gap = abs(self.mse - (self.bias**2 + self.variance))
        if gap > 1e-9:
            raise ValueError(
                f"mse {self.mse} inconsistent with bias^2 + variance "
                f"(gap {gap})"
            )


def _clamp(value: float) -> float:
    return float(min(1.0, max(-1.0, value)))


def _bits(value: int, width: int) -> str:
    return format(int(value), f"0{width}b")


# ----------------------------------------------------------------------
# batch runners
# ----------------------------------------------------------------------

def _require_family(batch: PairBatch, family: str, scheme: str) -> None:
    if batch.family != family:
        raise ValueError(f"{scheme} expects a {family} batch, got {batch.family}")


def run_naive(k: int, batch: PairBatch) -> EstimateResult:
    """Send k raw signs; estimate by the mean of the k products."""
    if k < 1:
        raise ValueError(f"bit budget must be positive, got {k}")
    _require_family(batch, "binary", "run_naive")
    if len(batch) < k:
        raise ValueError(f"need at least {k} pairs, batch has {len(batch)}")
    x = batch.x[:k]
    y = batch.y[:k]
    raw = float(np.mean(x * y))
    payload = "".join("1" if v > 0 else "0" for v in x)
    transcript = Transcript(budget=k, messages=(Message("alice", payload, k),))
    return EstimateResult(
        rho_hat=_clamp(raw),
        bits_used=k,
        aux={"raw": raw},
        transcript=transcript,
    )


def _check_pointer_budget(k: int, batch_len: int, scheme: str) -> int:
    if k < 1:
        raise ValueError(f"bit budget must be positive, got {k}")
    if k > MAX_POINTER_BITS:
        raise ValueError(
            f"{scheme} materializes 2^k samples; k={k} exceeds the "
            f"{MAX_POINTER_BITS}-bit guard"
        )
    n = 2**k
    if batch_len < n:
        raise ValueError(f"need at least {n} pairs, batch has {batch_len}")
    return n


def run_max_scheme(k: int, batch: PairBatch) -> EstimateResult:
    """Point at the largest of 2^k x-samples; estimate from its y-partner.

    The unclamped ratio y_W / E[max] is exactly unbiased with variance
    (1 - rho^2 + rho^2 Var[max]) / E[max]^2; the reported rho_hat truncates
    it to [-1, 1], which can only shrink the squared error. The exact raw
    value is kept in aux["raw"].
    """
    _require_family(batch, "gaussian", "run_max_scheme")
    n = _check_pointer_budget(k, len(batch), "run_max_scheme")
    winner = int(np.argmax(batch.x[:n]))
    raw = float(batch.y[winner] / expected_max_normal(n))
    transcript = Transcript(
        budget=k, messages=(Message("alice", _bits(winner, k), k),)
    )
    return EstimateResult(
        rho_hat=_clamp(raw),
        bits_used=k,
        aux={"raw": raw, "winner": winner},
        transcript=transcript,
    )


def _local_prefix_bits(k: int, rho_nominal: float, c_bits: float) -> int:
    # Nominal count k (1 - rho^2); the (1 + c_bits) multiple pays for
    # decoding collisions. Capped at the full index width.
    m = math.ceil(k * (1.0 - rho_nominal**2) * (1.0 + c_bits))
    return max(1, min(k, m))


def _local_threshold(k: int, rho_nominal: float, c_threshold: float) -> float:
    return rho_nominal * math.sqrt(2.0 * k * LN2) * (1.0 - c_threshold)


def run_local_scheme(
    k: int,
    rho_nominal: float,
    batch: PairBatch,
    c_threshold: float = C_THRESHOLD,
    c_bits: float = C_BITS,
) -> EstimateResult:
    """Maximum pointer compressed against side information near rho_nominal.

    Alice sends only the m = ceil(k (1 - rho_nominal^2)(1 + c_bits)) most
    significant bits of her argmax index (capped at k). Bob marks indices
    whose y-value clears rho_nominal sqrt(2 k ln2)(1 - c_threshold) and
    decodes to the unique marked index matching the prefix. When the prefix
    is the full index the marking step is bypassed. On a zero or multiple
    match he falls back to rho_nominal and sets aux["decode_failed"].
    """
    _require_family(batch, "gaussian", "run_local_scheme")
    if not -1.0 < rho_nominal < 1.0:
        raise ValueError(f"nominal correlation must lie in (-1, 1), got {rho_nominal}")
    n = _check_pointer_budget(k, len(batch), "run_local_scheme")
    x = batch.x[:n]
    y = batch.y[:n]
    winner = int(np.argmax(x))
    m = _local_prefix_bits(k, rho_nominal, c_bits)
    threshold = _local_threshold(k, rho_nominal, c_threshold)
    mean_max = expected_max_normal(n)

    if m == k:
        decoded: int | None = winner
    else:
        prefix = winner >> (k - m)
        lo = prefix << (k - m)
        hi = lo + (1 << (k - m))
        candidates = np.nonzero(y[lo:hi] > threshold)[0] + lo
        decoded = int(candidates[0]) if candidates.size == 1 else None

    if decoded is None:
        raw = rho_nominal
        rho_hat = rho_nominal
        failed = True
    else:
        raw = float(y[decoded] / mean_max)
        rho_hat = _clamp(raw)
        failed = False

    transcript = Transcript(
        budget=k,
        messages=(Message("alice", _bits(winner >> (k - m), m), m),),
    )
    return EstimateResult(
        rho_hat=rho_hat,
        bits_used=m,
        aux={
            "raw": raw,
            "decode_failed": failed,
            "winner": winner,
            "decoded": decoded,
            "m_bits": m,
            "threshold": threshold,
        },
        transcript=transcript,
    )


# ----------------------------------------------------------------------
# binary block scheme
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BlockLayout:
    """Sizes resolved from (rho_tilde, n_block, rho_nominal)."""

    n_block: int
    target_sum: int
    m_blocks: int
    index_bits: int
    prefix_bits: int
    window: float
    center: float
    samples_needed: int


def block_layout(
    rho_tilde: float,
    n_block: int,
    rho_nominal: float,
    exist_factor: float = EXIST_FACTOR,
    guard_bits: int = GUARD_BITS,
) -> BlockLayout:
    """Resolve block counts and message sizes for the binary block scheme.

    The block count m = ceil(exist_factor sqrt(n) 2^{n (1 - h((1-rt)/2))})
    makes a block with sum exactly n rho_tilde exist with high probability.
    The prefix length is the nominal n (h((1 - rho rho_tilde)/2) -
    h((1 - rho_tilde)/2)) bits plus the safety overhead, capped at the full
    index width.
    """
    if not 0.0 < rho_tilde <= 1.0:
        raise ValueError(f"anchor correlation must lie in (0, 1], got {rho_tilde}")
    if n_block < 2:
        raise ValueError(f"block size must be at least 2, got {n_block}")
    target = rho_tilde * n_block
    target_int = round(target)
    if abs(target - target_int) > 1e-9:
        raise ValueError(
            f"n_block * rho_tilde = {target} must be an integer"
        )
    if (target_int - n_block) % 2 != 0:
        raise ValueError(
            f"sum {target_int} unreachable for blocks of {n_block} signs "
            "(parity mismatch)"
        )
    if not -1.0 <= rho_nominal <= 1.0:
        raise ValueError(f"nominal correlation must lie in [-1, 1], got {rho_nominal}")
    h1 = binary_entropy((1.0 - rho_tilde) / 2.0)
    h2 = binary_entropy((1.0 - rho_nominal * rho_tilde) / 2.0)
    overhead = math.log2(exist_factor * math.sqrt(n_block))
    m_blocks = max(2, math.ceil(exist_factor * math.sqrt(n_block) * 2 ** (n_block * (1.0 - h1))))
    if m_blocks * n_block > 10**8:
        raise ValueError(
            f"layout needs {m_blocks * n_block} samples per run; "
            "reduce n_block or rho_tilde"
        )
    index_bits = max(1, math.ceil(math.log2(m_blocks)))
    prefix_bits = math.ceil(n_block * (h2 - h1) + overhead + guard_bits)
    prefix_bits = max(1, min(index_bits, prefix_bits))
    return BlockLayout(
        n_block=n_block,
        target_sum=target_int,
        m_blocks=m_blocks,
        index_bits=index_bits,
        prefix_bits=prefix_bits,
        window=math.sqrt(n_block),
        center=n_block * rho_nominal * rho_tilde,
        samples_needed=m_blocks * n_block,
    )


def run_binary_block(
    k: int,
    rho_tilde: float,
    n_block: int,
    batch: PairBatch,
    rho_nominal: float = 0.0,
    exist_factor: float = EXIST_FACTOR,
    guard_bits: int = GUARD_BITS,
) -> EstimateResult:
    """Anchor on a block whose sign-sum is exactly n_block * rho_tilde.

    Alice scans her blocks for the first one with sum n_block * rho_tilde
    and sends a prefix of its index. Bob marks blocks whose sum lies within
    +-sqrt(n_block) of n_block * rho_nominal * rho_tilde, decodes to the
    unique marked block matching the prefix, and estimates rho by his block
    sum divided by n_block * rho_tilde. If no block has the required sum,
    or decoding is ambiguous, the fallback estimate is the empirical
    correlation of block 1 with the failure flagged in aux.
    """
    _require_family(batch, "binary", "run_binary_block")
    if k < 1:
        raise ValueError(f"bit budget must be positive, got {k}")
    layout = block_layout(rho_tilde, n_block, rho_nominal, exist_factor, guard_bits)
    if layout.prefix_bits > k:
        raise ValueError(
            f"scheme needs {layout.prefix_bits} bits, budget is {k}"
        )
    if len(batch) < layout.samples_needed:
        raise ValueError(
            f"need at least {layout.samples_needed} pairs, batch has {len(batch)}"
        )
    n, m = layout.n_block, layout.m_blocks
    xs = batch.x[: n * m].reshape(m, n)
    ys = batch.y[: n * m].reshape(m, n)
    sums_a = xs.sum(axis=1)
    sums_b = ys.sum(axis=1)

    hits = np.nonzero(sums_a == layout.target_sum)[0]
    exist_failed = hits.size == 0
    j_star = int(hits[0]) if not exist_failed else 0

    marked = np.abs(sums_b - layout.center) <= layout.window
    decode_failed = False
    decoded: int | None = None
    if not exist_failed:
        if layout.prefix_bits == layout.index_bits:
            decoded = j_star
        else:
            shift = layout.index_bits - layout.prefix_bits
            prefix = j_star >> shift
            block_ids = np.nonzero(marked)[0]
            matches = block_ids[(block_ids >> shift) == prefix]
            if matches.size == 1:
                decoded = int(matches[0])
            else:
                decode_failed = True

    if exist_failed or decode_failed:
        raw = float(np.mean(xs[0] * ys[0]))
    else:
        raw = float(sums_b[decoded] / (n * rho_tilde))

    prefix_val = j_star >> (layout.index_bits - layout.prefix_bits)
    transcript = Transcript(
        budget=k,
        messages=(
            Message("alice", _bits(prefix_val, layout.prefix_bits), layout.prefix_bits),
        ),
    )
    return EstimateResult(
        rho_hat=_clamp(raw),
        bits_used=layout.prefix_bits,
        aux={
            "raw": raw,
            "exist_failed": exist_failed,
            "decode_failed": decode_failed,
            "anchor_block": j_star,
            "decoded": decoded,
            "layout": layout,
        },
        transcript=transcript,
    )


# ----------------------------------------------------------------------
# two-way scheme
# ----------------------------------------------------------------------

def default_phase1_bits(k: int) -> int:
    """Default coarse-phase budget ceil(sqrt(k)): grows, but is o(k)."""
    return math.ceil(math.sqrt(k))


def _phase1_estimate(mean_product: float) -> float:
    # E[sign(X) sign(Y)] = (2/pi) arcsin(rho) for unit normals; invert it.
    return math.sin(0.5 * math.pi * mean_product)


def run_two_way(
    k: int,
    k1: int | None,
    batch: PairBatch,
    c_threshold: float = C_THRESHOLD,
    c_bits: float = C_BITS,
) -> EstimateResult:
    """Coarse sign exchange, then the local scheme at the estimated rho.

    Phase 1 spends k1 bits on the signs of fresh coordinates; the arcsine
    identity turns the sign-agreement rate into a provisional rho0. Phase 2
    runs the local scheme with budget k - k1 and rho_nominal = rho0
    (truncated into (-0.95, 0.95) so the local scheme's preconditions hold).
    The provisional estimate is treated as common knowledge for phase 2.
    """
    _require_family(batch, "gaussian", "run_two_way")
    if k1 is None:
        k1 = default_phase1_bits(k)
    if k1 < 1:
        raise ValueError(
            f"phase 1 needs a positive (slowly growing) budget, got {k1}"
        )
    if k1 >= k:
        raise ValueError(f"phase 1 budget {k1} must leave room in k={k}")
    k2 = k - k1
    n2 = _check_pointer_budget(k2, len(batch) - k1, "run_two_way phase 2")
    sign_x = np.where(batch.x[:k1] >= 0, 1.0, -1.0)
    sign_y = np.where(batch.y[:k1] >= 0, 1.0, -1.0)
    mean_product = float(np.mean(sign_x * sign_y))
    rho0 = _phase1_estimate(mean_product)
    rho0 = min(TWO_WAY_NOMINAL_CAP, max(-TWO_WAY_NOMINAL_CAP, rho0))

    tail = PairBatch(
        x=batch.x[k1 : k1 + n2], y=batch.y[k1 : k1 + n2], family="gaussian"
    )
    local = run_local_scheme(k2, rho0, tail, c_threshold, c_bits)

    payload = "".join("1" if v > 0 else "0" for v in sign_x)
    transcript = Transcript(
        budget=k,
        messages=(
            Message("alice", payload, k1),
            local.transcript.messages[0],
        ),
    )
    return EstimateResult(
        rho_hat=local.rho_hat,
        bits_used=k1 + local.bits_used,
        aux={
            "raw": local.aux["raw"],
            "rho0_hat": rho0,
            "decode_failed": local.aux["decode_failed"],
            "m_bits": local.aux["m_bits"],
        },
        transcript=transcript,
    )


# ----------------------------------------------------------------------
# vectorized trial samplers (sufficient statistics, identical laws)
# ----------------------------------------------------------------------

def _uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    # Uniform on (0, 1), bounded away from the endpoints for safe logs.
    return np.clip(rng.random(size), 1e-300, 1.0 - 1e-16)


def _sample_max_normal(n_pool: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Draw max of n_pool iid normals via X = Phi^{-1}(U^{1/n_pool})."""
    u = _uniform_open(rng, trials)
    upper_tail = -np.expm1(np.log(u) / n_pool)
    upper_tail = np.clip(upper_tail, 1e-300, 1.0 - 1e-16)
    return -ndtri(upper_tail)


def _sample_tail_normal(threshold: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw normals conditioned to exceed threshold."""
    q = norm.sf(threshold)
    u = _uniform_open(rng, count)
    return -ndtri(np.clip(q * u, 1e-300, 1.0 - 1e-16))


def _naive_trials(k: int, rho: float, trials: int, rng: np.random.Generator):
    agree = rng.binomial(k, (1.0 + rho) / 2.0, size=trials)
    raw = (2.0 * agree - k) / k
    return np.clip(raw, -1.0, 1.0), {"raw": raw}


def _max_trials(k: int, rho: float, trials: int, rng: np.random.Generator):
    n_pool = 2**k
    x_w = _sample_max_normal(n_pool, trials, rng)
    noise = rng.standard_normal(trials)
    raw = (rho * x_w + math.sqrt(1.0 - rho * rho) * noise) / expected_max_normal(n_pool)
    return np.clip(raw, -1.0, 1.0), {"raw": raw}


def _local_trials(
    k: int,
    rho: float,
    rho_nominal,
    trials: int,
    rng: np.random.Generator,
    c_threshold: float = C_THRESHOLD,
    c_bits: float = C_BITS,
):
    """Local-scheme trials; rho_nominal may be a scalar or per-trial array."""
    nominal = np.broadcast_to(np.asarray(rho_nominal, dtype=float), (trials,))
    if np.any(np.abs(nominal) >= 1.0):
        raise ValueError("nominal correlation must lie in (-1, 1)")
    n_pool = 2**k
    mean_max = expected_max_normal(n_pool)
    x_w = _sample_max_normal(n_pool, trials, rng)
    y_w = rho * x_w + math.sqrt(1.0 - rho * rho) * rng.standard_normal(trials)

    raw = np.array(nominal)  # fallback default
    failed = np.zeros(trials, dtype=bool)
    # Trials share (k, c_*) but may differ in nominal rho; group identical
    # nominals so thresholds and prefix widths stay scalar per group.
    for value in np.unique(nominal):
        sel = np.nonzero(nominal == value)[0]
        m = _local_prefix_bits(k, float(value), c_bits)
        if m == k:
            raw[sel] = y_w[sel] / mean_max
            continue
        if k - m > 62:
            raise ValueError(
                f"suffix width {k - m} exceeds exact integer sampling range"
            )
        threshold = _local_threshold(k, float(value), c_threshold)
        marked_w = y_w[sel] > threshold
        others = (1 << (k - m)) - 1
        spurious = rng.binomial(others, norm.sf(threshold), size=sel.size)
        success = marked_w & (spurious == 0)
        wrong = ~marked_w & (spurious == 1)
        fail = ~(success | wrong)
        raw[sel[success]] = y_w[sel[success]] / mean_max
        n_wrong = int(wrong.sum())
        if n_wrong:
            raw[sel[wrong]] = _sample_tail_normal(threshold, n_wrong, rng) / mean_max
        failed[sel[fail]] = True
    return np.clip(raw, -1.0, 1.0), {"raw": raw, "decode_failed": failed}


def _block_trials(
    rho: float,
    rho_tilde: float,
    n_block: int,
    rho_nominal: float,
    trials: int,
    rng: np.random.Generator,
    exist_factor: float = EXIST_FACTOR,
    guard_bits: int = GUARD_BITS,
):
    """Block-scheme trials from the blocks' sufficient statistics.

    A block is summarized by (alice sum, bob sum, agreement count): alice
    sums are 2 Bin(n, 1/2) - n, and given a block with a plus-ones, bob
    agrees with U ~ Bin(a, (1+rho)/2) of them and with V ~ Bin(n-a, ...)
    of the minus-ones, so his sum is 2(U - V) - alice_sum and the block's
    empirical correlation is (2(U + V) - n)/n. This reproduces the exact
    joint law of everything run_binary_block computes from raw samples.
    """
    layout = block_layout(rho_tilde, n_block, rho_nominal, exist_factor, guard_bits)
    n, m = layout.n_block, layout.m_blocks
    p_keep = (1.0 + rho) / 2.0
    shift = layout.index_bits - layout.prefix_bits
    block_prefix = np.arange(m) >> shift if shift > 0 else None

    raw = np.empty(trials)
    exist_failed = np.zeros(trials, dtype=bool)
    decode_failed = np.zeros(trials, dtype=bool)

    chunk = max(1, int(4_000_000 // max(m, 1)))
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        sums_a = 2 * rng.binomial(n, 0.5, size=(size, m)) - n
        a_plus = (n + sums_a) // 2
        u = rng.binomial(a_plus, p_keep)
        v = rng.binomial(n - a_plus, p_keep)
        sums_b = 2 * (u - v) - sums_a
        corr_block1 = (2.0 * (u[:, 0] + v[:, 0]) - n) / n

        hits = sums_a == layout.target_sum
        exists = hits.any(axis=1)
        j_star = hits.argmax(axis=1)
        marked = np.abs(sums_b - layout.center) <= layout.window

        if shift == 0:
            decoded = j_star
            ok = exists
            d_failed = np.zeros(size, dtype=bool)
        else:
            prefix = j_star >> shift
            match = marked & (block_prefix[None, :] == prefix[:, None])
            counts = match.sum(axis=1)
            d_failed = exists & (counts != 1)
            ok = exists & (counts == 1)
            decoded = match.argmax(axis=1)

        vals = np.where(
            ok,
            np.take_along_axis(sums_b, decoded[:, None], axis=1)[:, 0]
            / (n * rho_tilde),
            corr_block1,
        )
        sl = slice(done, done + size)
        raw[sl] = vals
        exist_failed[sl] = ~exists
        decode_failed[sl] = d_failed
        done += size

    return np.clip(raw, -1.0, 1.0), {
        "raw": raw,
        "exist_failed": exist_failed,
        "decode_failed": decode_failed,
    }


def _two_way_trials(
    k: int,
    k1: int,
    rho: float,
    trials: int,
    rng: np.random.Generator,
    c_threshold: float = C_THRESHOLD,
    c_bits: float = C_BITS,
):
    p_agree = 0.5 + math.asin(rho) / math.pi
    agrees = rng.binomial(k1, p_agree, size=trials)
    mean_products = (2.0 * agrees - k1) / k1
    rho0 = np.clip(
        np.sin(0.5 * math.pi * mean_products),
        -TWO_WAY_NOMINAL_CAP,
        TWO_WAY_NOMINAL_CAP,
    )
    rho_hat, aux = _local_trials(
        k - k1, rho, rho0, trials, rng, c_threshold, c_bits
    )
    aux = dict(aux)
    aux["rho0_hat"] = rho0
    return rho_hat, aux


# ----------------------------------------------------------------------
# risk estimation
# ----------------------------------------------------------------------

SCHEME_NAMES = ("naive", "max", "local", "binary_block", "two_way")


@dataclass(frozen=True)
class SchemeConfig:
    """Which scheme to run and with what knobs.

    params accepts, depending on the scheme: rho_nominal, c_threshold,
    c_bits, rho_tilde, n_block, k1, exist_factor, guard_bits. Setting
    use_batches runs the literal batch protocol per trial instead of the
    sufficient-statistic sampler (same law, much slower).
    """

    scheme: str
    k: int
    params: dict = field(default_factory=dict)
    use_batches: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEME_NAMES:
            raise ValueError(
                f"scheme must be one of {SCHEME_NAMES}, got {self.scheme!r}"
            )
        if self.k < 1:
            raise ValueError(f"bit budget must be positive, got {self.k}")


def _config_family(config: SchemeConfig) -> str:
    return "binary" if config.scheme in ("naive", "binary_block") else "gaussian"


def _samples_needed(config: SchemeConfig, rho_true: float) -> int:
    p = config.params
    if config.scheme == "naive":
        return config.k
    if config.scheme == "max":
        return 2**config.k
    if config.scheme == "local":
        return 2**config.k
    if config.scheme == "two_way":
        k1 = p["k1"] if p.get("k1") is not None else default_phase1_bits(config.k)
        return k1 + 2 ** (config.k - k1)
    layout = block_layout(
        p["rho_tilde"],
        p["n_block"],
        p.get("rho_nominal", rho_true),
        p.get("exist_factor", EXIST_FACTOR),
        p.get("guard_bits", GUARD_BITS),
    )
    return layout.samples_needed


def check_preconditions(config: SchemeConfig, rho_true: float) -> int:
    """Validate one (scheme, k, rho) cell without drawing a single sample.

    Returns the pair count one batch-mode trial would consume. Raises
    ValueError whenever the cell cannot run: nominal correlation outside
    (-1, 1), block layout infeasible for the budget, phase-1 budget out of
    range, or missing scheme parameters.
    """
    if not -1.0 <= rho_true <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho_true}")
    p = config.params
    try:
        if config.scheme == "local":
            nominal = p.get("rho_nominal", rho_true)
            if not -1.0 < nominal < 1.0:
                raise ValueError(
                    f"nominal correlation must lie in (-1, 1), got {nominal}"
                )
        pointer_k = config.k
        if config.scheme == "two_way":
            k1 = p["k1"] if p.get("k1") is not None else default_phase1_bits(config.k)
            if not 1 <= k1 < config.k:
                raise ValueError(
                    f"phase 1 budget must satisfy 1 <= k1 < k, got k1={k1}, "
                    f"k={config.k}"
                )
            pointer_k = config.k - k1
        if (
            config.use_batches
            and config.scheme in ("max", "local", "two_way")
            and pointer_k > MAX_POINTER_BITS
        ):
            raise ValueError(
                f"batch mode materializes 2^{pointer_k} samples; the guard "
                f"is {MAX_POINTER_BITS} bits"
            )
        needed = _samples_needed(config, rho_true)
        if config.scheme == "binary_block":
            layout = block_layout(
                p["rho_tilde"],
                p["n_block"],
                p.get("rho_nominal", rho_true),
                p.get("exist_factor", EXIST_FACTOR),
                p.get("guard_bits", GUARD_BITS),
            )
            if layout.prefix_bits > config.k:
                raise ValueError(
                    f"scheme needs {layout.prefix_bits} bits, budget is {config.k}"
                )
    except KeyError as exc:
        raise ValueError(
            f"scheme {config.scheme!r} needs parameter {exc.args[0]!r}"
        ) from exc
    return needed


def _run_batch_trial(config: SchemeConfig, batch: PairBatch, rho_true: float) -> EstimateResult:
    p = config.params
    if config.scheme == "naive":
        return run_naive(config.k, batch)
    if config.scheme == "max":
        return run_max_scheme(config.k, batch)
    if config.scheme == "local":
        return run_local_scheme(
            config.k,
            p.get("rho_nominal", rho_true),
            batch,
            p.get("c_threshold", C_THRESHOLD),
            p.get("c_bits", C_BITS),
        )
    if config.scheme == "two_way":
        return run_two_way(
            config.k,
            p.get("k1"),
            batch,
            p.get("c_threshold", C_THRESHOLD),
            p.get("c_bits", C_BITS),
        )
    return run_binary_block(
        config.k,
        p["rho_tilde"],
        p["n_block"],
        batch,
        p.get("rho_nominal", rho_true),
        p.get("exist_factor", EXIST_FACTOR),
        p.get("guard_bits", GUARD_BITS),
    )


def _sample_trials(config: SchemeConfig, rho_true: float, trials: int,
                   rng: np.random.Generator):
    p = config.params
    if config.scheme == "naive":
        return _naive_trials(config.k, rho_true, trials, rng)
    if config.scheme == "max":
        return _max_trials(config.k, rho_true, trials, rng)
    if config.scheme == "local":
        return _local_trials(
            config.k,
            rho_true,
            p.get("rho_nominal", rho_true),
            trials,
            rng,
            p.get("c_threshold", C_THRESHOLD),
            p.get("c_bits", C_BITS),
        )
    if config.scheme == "two_way":
        k1 = p["k1"] if p.get("k1") is not None else default_phase1_bits(config.k)
        if not 1 <= k1 < config.k:
            raise ValueError(
                f"phase 1 budget must satisfy 1 <= k1 < k, got k1={k1}, k={config.k}"
            )
        return _two_way_trials(
            config.k,
            k1,
            rho_true,
            trials,
            rng,
            p.get("c_threshold", C_THRESHOLD),
            p.get("c_bits", C_BITS),
        )
    return _block_trials(
        rho_true,
        p["rho_tilde"],
        p["n_block"],
        p.get("rho_nominal", rho_true),
        trials,
        rng,
        p.get("exist_factor", EXIST_FACTOR),
        p.get("guard_bits", GUARD_BITS),
    )


def estimate_risk(config: SchemeConfig, rho_true: float, trials: int,
                  master_seed: int) -> RiskReport:
    """Monte Carlo squared-error risk of a scheme at one (k, rho) cell.

    Every trial sees fresh samples from a dedicated substream, so results
    are reproducible bit-for-bit for a fixed (config, seed) and independent
    of any execution interleaving.
    """
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    needed = check_preconditions(config, rho_true)

    if config.use_batches:
        model = CorrelationModel(_config_family(config), rho_true)
        rho_hats = np.empty(trials)
        raws = np.empty(trials)
        flags: dict[str, np.ndarray] = {}
        for trial in range(trials):
            try:
                batch = gen_pairs(model, needed, master_seed, trial)
                result = _run_batch_trial(config, batch, rho_true)
            except ValueError as exc:
                raise ValueError(f"trial {trial}: {exc}") from exc
            rho_hats[trial] = result.rho_hat
            raws[trial] = result.aux.get("raw", result.rho_hat)
            for flag in ("decode_failed", "exist_failed"):
                if flag in result.aux:
                    arr = flags.setdefault(flag, np.zeros(trials, dtype=bool))
                    arr[trial] = bool(result.aux[flag])
        aux = {"raw": raws, **flags}
    else:
        rng = substream(
            master_seed, f"risk/{config.scheme}/k={config.k}/rho={rho_true!r}"
        )
        rho_hats, aux = _sample_trials(config, rho_true, trials, rng)

    errors = rho_hats - rho_true
    sq = errors**2
    mse = float(sq.mean())
    bias = float(errors.mean())
    variance = float(rho_hats.var())
    ci95 = float(1.96 * sq.std(ddof=1) / math.sqrt(trials))
    extras = {}
    raw = aux.get("raw")
    if raw is not None:
        extras["raw_mean"] = float(np.mean(raw))
        extras["raw_mse"] = float(np.mean((raw - rho_true) ** 2))
        extras["raw_se_mean"] = float(np.std(raw, ddof=1) / math.sqrt(trials))
        extras["raw_mse_ci95"] = float(
            1.96 * np.std((raw - rho_true) ** 2, ddof=1) / math.sqrt(trials)
        )
    for flag in ("decode_failed", "exist_failed"):
        if flag in aux:
            extras[f"{flag.removesuffix('ed')}_rate"] = float(np.mean(aux[flag]))
    return RiskReport(
        scheme=config.scheme,
        rho_true=float(rho_true),
        k=config.k,
        trials=trials,
        mse=mse,
        bias=bias,
        variance=variance,
        ci95_halfwidth=ci95,
        seed=master_seed,
        extras=extras,
    )

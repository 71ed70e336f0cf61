"""Instance compression against a fixed nonadaptive computer.

The machinery here turns a query-bounded machine into a code for step
vectors. Query weights classify each block as good (its own step prefix
carries weight above a threshold) or bad. Good steps compress to a rank
inside the machine's heavy-prefix list; bad steps either ship in full or
drop their low-order bits, which the decoder wins back by simulating the
machine on substituted oracle answers and reading the measurement.

Everything is exact. Weights, thresholds, state amplitudes, and the two
certifying inequalities are rationals; square roots are never
materialized, comparisons against them happen in squared or exponential
form.

Encoding layout. Both cases open with the advice string, the good block
indices in double binary (each bit written twice, indices as ceil(log M)
bit values in increasing order), and the separator "01". Case 1 then
walks blocks in order: a good block stores its heavy-prefix rank in a
fixed-width field followed by the last p bits of its step name, a bad
block stores the full n-bit name. Case 2 stores full names for good
blocks, the leading n-p bits for bad blocks, and last-p-bit suffixes for
the bad blocks the selection procedure did not pick. The case tag rides
alongside the bits, not inside them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .model import (
    NonadaptiveComputer,
    QueryWord,
    answers_index,
    apply_oracle,
    list_index,
    outcome_to_answer,
)
from .ordered_search import (
    StepInstance,
    enumerate_instances,
    format_instance,
    rank_of,
)
from .statevec import Rational, SparseState, as_rational, distance_sq, measure_register


class EncodingFormatError(ValueError):
    """Serialized bits that do not parse under the scheme layout."""


class DecodeError(ValueError):
    """Parsing succeeded but reconstruction cannot finish."""


class LwssExhaustedError(RuntimeError):
    """The selection ran out of candidates before filling its quota.

    For a machine whose weights actually obey the selection guarantees
    this cannot happen; seeing it means an invariant was violated.
    """


# ---------------------------------------------------------------------------
# Error parameters


@dataclass(frozen=True)
class ErrorParams:
    """Error tolerance epsilon and slack c, with the derived threshold.

    Requires 0 <= epsilon and 0 < c < d(epsilon), where d is 1/(2 eps) - 1
    for positive epsilon and 1 for epsilon = 0. Under those constraints the
    inflated error eps_prime = (1 + c) * epsilon stays below 1/2, the
    threshold C = (1 - 2 eps_prime)^2 / 16 is positive, and its square
    root (1 - 2 eps_prime) / 4 is itself rational, so the decoder margin
    identity 2 sqrt(C) + epsilon = 1/2 - c * epsilon holds exactly.
    """

    epsilon: Rational
    c: Rational

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        object.__setattr__(self, "c", as_rational(self.c))
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not 0 < self.c < self.d:
            raise ValueError(f"c must lie strictly between 0 and {self.d}")

    @property
    def d(self) -> Fraction:
        if self.epsilon > 0:
            return 1 / (2 * self.epsilon) - 1
        return Fraction(1)

    @property
    def eps_prime(self) -> Fraction:
        return (1 + self.c) * self.epsilon

    @property
    def C(self) -> Fraction:
        half_gap = 1 - 2 * self.eps_prime
        return half_gap * half_gap / 16

    @property
    def sqrt_C(self) -> Fraction:
        return (1 - 2 * self.eps_prime) / 4

    @property
    def margin(self) -> Fraction:
        """Decoder headroom above 1/2: equals c * epsilon."""
        return self.c * self.epsilon


DEFAULT_PARAMS = ErrorParams(Fraction(1, 3), Fraction(1, 8))


def ceil_log2(x: Rational) -> int:
    """Smallest nonnegative w with 2**w >= x, for positive rational x."""
    x = as_rational(x)
    if x <= 0:
        raise ValueError("ceil_log2 needs a positive value")
    w = 0
    v = Fraction(1)
    while v < x:
        v *= 2
        w += 1
    return w


@dataclass(frozen=True)
class EncodingContext:
    """Shared parameters of one encode/decode configuration.

    M must be a power of two so that index fields have integral width.
    """

    M: int
    n: int
    p: int
    k: int
    T: int
    l: int
    params: ErrorParams = DEFAULT_PARAMS

    def __post_init__(self):
        if self.M < 1 or self.M & (self.M - 1):
            raise ValueError("M must be a power of two")
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.p <= self.n:
            raise ValueError("p must lie in [1, n]")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if not 1 <= self.l <= self.M:
            raise ValueError("l must lie in [1, M]")

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def log_M(self) -> int:
        return self.M.bit_length() - 1

    @property
    def C(self) -> Fraction:
        return self.params.C

    @property
    def t(self) -> Fraction:
        """Ratio T / C, the capacity bound on heavy-prefix ranks."""
        return Fraction(self.T) / self.C

    @property
    def width_k(self) -> int:
        """Bit width of the rank field for good blocks."""
        return ceil_log2(self.t) if self.T else 0


def _check_pair(ctx: EncodingContext, computer: NonadaptiveComputer) -> None:
    if (ctx.M, ctx.n) != (computer.M, computer.n):
        raise ValueError("context and computer disagree on M or n")
    if ctx.k != computer.advice_len:
        raise ValueError("context k does not match the computer's advice length")
    if ctx.T != computer.T:
        raise ValueError("context T does not match the computer's query count")
    if ctx.p > computer.output_width:
        raise ValueError("cannot measure more cells than the computer writes")


# ---------------------------------------------------------------------------
# Query weights

# A word's weight counts each prequery list once, no matter how many
# duplicate copies of the word the list holds.


def _weight_table(computer, block, advice):
    pre = computer.prequery_state(block, advice)
    acc: dict = {}
    for (words, ws), amp in pre.items():
        sq = amp * amp
        for w in set(words):
            acc[w] = acc.get(w, Fraction(0)) + sq
    return acc


def weight(computer, i, advice, j, z) -> Fraction:
    """Squared-amplitude mass of lists (on input block i) containing (j, z)."""
    return _weight_table(computer, i, advice).get(QueryWord(j, z), Fraction(0))


def prefix_weights(computer, block, advice, p):
    """Map (j, leading n-p bits) -> summed weight over the 2**p completions."""
    acc: dict = {}
    for w, v in _weight_table(computer, block, advice).items():
        key = (w.block, w.location[: len(w.location) - p])
        acc[key] = acc.get(key, Fraction(0)) + v
    return acc


def weight_p(computer, i, advice, j, prefix, p) -> Fraction:
    if len(prefix) != computer.n - p:
        raise ValueError("prefix length must be n - p")
    return prefix_weights(computer, i, advice, p).get((j, prefix), Fraction(0))


def _heavy_prefixes(computer, block, advice, p, threshold):
    tbl = prefix_weights(computer, block, advice, p)
    return tuple(
        sorted(a for (j, a), v in tbl.items() if j == block and v > threshold)
    )


# ---------------------------------------------------------------------------
# Good/bad profiling


@dataclass(frozen=True)
class BlockProfile:
    block: int
    prefix: str
    weight: Fraction
    good: bool
    rank: int | None
    heavy: tuple[str, ...] | None


@dataclass(frozen=True)
class GoodBadProfile:
    blocks: tuple[BlockProfile, ...]

    @property
    def good_indices(self) -> tuple[int, ...]:
        return tuple(bp.block for bp in self.blocks if bp.good)

    @property
    def l_prime(self) -> int:
        return len(self.good_indices)

    def entry(self, block: int) -> BlockProfile:
        return self.blocks[block - 1]


def profile(computer, advice_fn, instance, p, params=DEFAULT_PARAMS) -> GoodBadProfile:
    """Classify every block by the weight its machine puts on its own step.

    A block is good when the weight of its step's leading n-p bits is
    strictly above C. For good blocks the rank counts heavy prefixes that
    sort strictly below the step's own prefix.
    """
    if not 1 <= p <= computer.n:
        raise ValueError("p must lie in [1, n]")
    f = advice_fn(instance)
    out = []
    for i in range(1, computer.M + 1):
        tbl = prefix_weights(computer, i, f, p)
        heavy = tuple(
            sorted(a for (j, a), v in tbl.items() if j == i and v > params.C)
        )
        pre = instance.step_bits(i)[: computer.n - p]
        w = tbl.get((i, pre), Fraction(0))
        good = w > params.C
        rank = heavy.index(pre) if good else None
        out.append(BlockProfile(i, pre, w, good, rank, heavy if good else None))
    return GoodBadProfile(tuple(out))


# ---------------------------------------------------------------------------
# The certifying constant and its two inequalities


def c_uv_values(ctx: EncodingContext):
    """Both branch values of the certifying constant.

    The first entry is None when (k + 2) / l is not an integer; the value
    is then irrational and only the exponential-form inequality check can
    compare against it exactly.
    """
    first = None
    if (ctx.k + 2) % ctx.l == 0:
        e = ctx.p + 1 + (ctx.k + 2) // ctx.l
        first = ctx.C * ctx.N / (ctx.M * ctx.M * Fraction(2) ** e)
    a = 2 * ctx.l * ctx.log_M + ctx.k + 2
    second = ctx.C * (ctx.M - ctx.l) * ctx.p * ctx.p / (a * a)
    return first, second


def c_uv(ctx: EncodingContext, prof: GoodBadProfile) -> Fraction:
    """The certifying constant for this instance's branch.

    Raises when the branch value is irrational; check_inequalities still
    decides the comparison exactly in that situation.
    """
    first, second = c_uv_values(ctx)
    if ctx.l <= prof.l_prime:
        if first is None:
            raise ValueError(
                "(k+2)/l is not an integer, so this branch value is irrational; "
                "use check_inequalities for the exact comparison"
            )
        return first
    return second


@dataclass(frozen=True)
class InequalityReport:
    """Exact evaluation of the two length-guarantee inequalities.

    case1_holds decides (T/C)^l < 2^E with the integer exponent
    E = l(n - p - 1 - 2 log M) - (k + 2); this is the exponential form of
    the first inequality and is always exactly decidable, so no interval
    fallback is ever needed. case2_holds decides p^2 C (M - l) > A^2 T
    with A = 2 l log M + k + 2, the squared form of the second. The
    applicable one (selected by the instance's good-block count) equals
    the comparison T < c_uv whenever that constant is rational;
    matches_closed_form records the cross-check.
    """

    case: int
    case1_holds: bool
    case2_holds: bool
    certified: bool
    c_uv: Fraction | None
    matches_closed_form: bool | None
    detail: str


def check_inequalities(ctx: EncodingContext, prof: GoodBadProfile, T=None):
    """Decide the length guarantee for this configuration, exactly."""
    T = ctx.T if T is None else T
    if T < 1:
        raise ValueError("the length guarantee needs at least one query")
    t = Fraction(T) / ctx.C
    E = ctx.l * (ctx.n - ctx.p - 1 - 2 * ctx.log_M) - (ctx.k + 2)
    case1 = t**ctx.l < Fraction(2) ** E
    a = 2 * ctx.l * ctx.log_M + ctx.k + 2
    case2 = ctx.p * ctx.p * ctx.C * (ctx.M - ctx.l) > a * a * Fraction(T)
    case = 1 if ctx.l <= prof.l_prime else 2
    certified = case1 if case == 1 else case2
    first, second = c_uv_values(ctx)
    cu = first if case == 1 else second
    matches = None if cu is None else ((Fraction(T) < cu) == certified)
    if case == 1:
        detail = f"(T/C)^l = {t**ctx.l} against 2^{E}"
    else:
        detail = f"A^2 T = {a * a * T} against p^2 C (M-l) = {ctx.p * ctx.p * ctx.C * (ctx.M - ctx.l)}"
    return InequalityReport(case, case1, case2, certified, cu, matches, detail)


# ---------------------------------------------------------------------------
# Bit-level plumbing


def double_bits(bits: str) -> str:
    return "".join(ch + ch for ch in bits)


def _field(value: int, width: int) -> str:
    if width == 0:
        if value:
            raise ValueError(f"value {value} does not fit a zero-width field")
        return ""
    if value >= 2**width:
        raise ValueError(f"value {value} does not fit {width} bits")
    return format(value, f"0{width}b")


class _ItemWriter:
    def __init__(self):
        self._parts = []
        self._items = []
        self._pos = 0

    def put(self, name, bits):
        self._parts.append(bits)
        self._items.append((name, self._pos, len(bits)))
        self._pos += len(bits)

    def build(self, case):
        return Encoding(case, "".join(self._parts), tuple(self._items))


class BitReader:
    """Sequential reader over a 0/1 string with layout-error reporting."""

    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def take(self, width: int) -> str:
        if self.pos + width > len(self.bits):
            raise EncodingFormatError("bit stream ended inside a field")
        out = self.bits[self.pos : self.pos + width]
        self.pos += width
        return out

    def take_doubled(self) -> str:
        """Read doubled bits up to the "01" separator, returning the payload."""
        out = []
        while True:
            pair = self.take(2)
            if pair == "01":
                return "".join(out)
            if pair == "00":
                out.append("0")
            elif pair == "11":
                out.append("1")
            else:
                raise EncodingFormatError("malformed doubled section")

    def expect_end(self) -> None:
        if self.pos != len(self.bits):
            raise EncodingFormatError("trailing bits after the last field")


@dataclass(frozen=True)
class Encoding:
    """Raw code bits plus the case tag and an item map for audits.

    The item map is derivable from the context and never consulted while
    decoding; its offsets must tile the bit string exactly, so
    re-serializing the items reproduces the raw bits by construction.
    """

    case: int
    bits: str
    items: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        if self.case not in (1, 2):
            raise ValueError("case must be 1 or 2")
        if set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be a 0/1 string")
        pos = 0
        for name, off, length in self.items:
            if off != pos or length < 0:
                raise ValueError(f"item {name} breaks the contiguous layout")
            pos += length
        if pos != len(self.bits):
            raise ValueError("items do not cover the bit string")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def hex(self) -> str:
        """Bits packed left to right, zero padded up to a whole nibble."""
        if not self.bits:
            return ""
        pad = (-len(self.bits)) % 4
        padded = self.bits + "0" * pad
        return format(int(padded, 2), f"0{len(padded) // 4}x")

    def items_compact(self) -> str:
        return " ".join(f"{name}:{off}+{length}" for name, off, length in self.items)


# ---------------------------------------------------------------------------
# Selection of lightly queried bad blocks


@dataclass(frozen=True)
class LwssResult:
    """Outcome of the light-weight step selection over the bad blocks.

    W lists the selected blocks in pick order. survivor_sizes records the
    candidate-set size entering each round and after the last one.
    crosses holds (earlier pivot, later pivot, weight) rows so audits can
    recheck that every later pick stayed under the threshold when the
    earlier pivot's weights were examined.
    """

    W: tuple[int, ...]
    m: int
    threshold: Fraction | None
    pool: tuple[int, ...]
    survivor_sizes: tuple[int, ...]
    crosses: tuple[tuple[int, int, Fraction], ...]


def _round_count(t: Fraction, pool_size: int, quad_scale) -> int:
    """Floor of the positive root of (at) m^2 - (at - 1) m - pool = 0.

    With a = quad_scale. Computed through an integer square root of the
    discriminant; flooring the root and flooring the radical commute
    here, which the audit rechecks against direct evaluation.
    """
    if t == 0 or pool_size == 0:
        return 0
    coeff = as_rational(quad_scale) * t
    num, den = coeff.numerator, coeff.denominator
    disc = (num - den) ** 2 + 4 * num * den * pool_size
    return (num - den + isqrt(disc)) // (2 * num)


def _select(
    ctx,
    computer,
    advice,
    bad_prefixes,
    *,
    quad_scale=1,
    pool_bound=None,
    threshold_numerator=None,
):
    pool = tuple(sorted(bad_prefixes))
    bound = len(pool) if pool_bound is None else pool_bound
    m = _round_count(ctx.t, bound, quad_scale)
    thr_num = ctx.C if threshold_numerator is None else as_rational(threshold_numerator)
    threshold = thr_num / m if m else None
    survivors = list(pool)
    picked: list[int] = []
    sizes = [len(survivors)]
    tables = {}
    for _ in range(m):
        candidates = [j for j in survivors if j not in picked]
        if not candidates:
            raise LwssExhaustedError(
                f"no candidates left after {len(picked)} of {m} rounds"
            )
        pivot = candidates[0]
        picked.append(pivot)
        tbl = prefix_weights(computer, pivot, advice, ctx.p)
        tables[pivot] = tbl
        survivors = [
            j
            for j in survivors
            if tbl.get((j, bad_prefixes[j]), Fraction(0)) < threshold
        ]
        sizes.append(len(survivors))
    crosses = []
    for a_pos, a in enumerate(picked):
        for b in picked[a_pos + 1 :]:
            crosses.append(
                (a, b, tables[a].get((b, bad_prefixes[b]), Fraction(0)))
            )
    return LwssResult(
        tuple(picked), m, threshold, pool, tuple(sizes), tuple(crosses)
    )


def lwss(
    computer,
    advice_fn,
    instance,
    prof: GoodBadProfile,
    ctx: EncodingContext,
    *,
    quad_scale=1,
    pool_bound=None,
    threshold_numerator=None,
):
    """Pick bad blocks whose steps other picks query only lightly.

    Runs m rounds, m being the floored positive root of
    (T/C) m^2 - (T/C - 1) m - (number of bad blocks) = 0, except that a
    machine with no queries gets m = 0 outright. Each round picks the
    smallest remaining candidate and then discards every candidate on
    which the pick's machine run puts prefix weight at or above C/m.

    The three keyword knobs rescale the quadratic, the candidate bound,
    and the threshold numerator. They exist so variant selections are
    expressible through parameters; defaults reproduce the primary
    procedure.
    """
    _check_pair(ctx, computer)
    f = advice_fn(instance)
    bad = {bp.block: bp.prefix for bp in prof.blocks if not bp.good}
    return _select(
        ctx,
        computer,
        f,
        bad,
        quad_scale=quad_scale,
        pool_bound=pool_bound,
        threshold_numerator=threshold_numerator,
    )


# ---------------------------------------------------------------------------
# Encoder


def expected_length(ctx: EncodingContext, l_prime: int, case: int, selected: int = 0) -> int:
    """Item-by-item length total for one encoded instance."""
    base = ctx.k + 2 * l_prime * ctx.log_M + 2
    if case == 1:
        return base + l_prime * (ctx.width_k + ctx.p) + (ctx.M - l_prime) * ctx.n
    return (
        base
        + l_prime * ctx.n
        + (ctx.M - l_prime) * (ctx.n - ctx.p)
        + ctx.p * (ctx.M - l_prime - selected)
    )


def encode(ctx, computer, advice_fn, instance) -> Encoding:
    """Serialize one instance relative to the machine."""
    _check_pair(ctx, computer)
    f = advice_fn(instance)
    prof = profile(computer, advice_fn, instance, ctx.p, ctx.params)
    good = prof.good_indices
    case = 1 if ctx.l <= prof.l_prime else 2
    w = _ItemWriter()
    w.put("advice", f)
    w.put(
        "good-indices",
        double_bits("".join(_field(i - 1, ctx.log_M) for i in good)),
    )
    w.put("separator", "01")
    names = {i: instance.step_bits(i) for i in range(1, ctx.M + 1)}
    cut = ctx.n - ctx.p
    if case == 1:
        for bp in prof.blocks:
            if bp.good:
                w.put(f"rank-{bp.block}", _field(bp.rank, ctx.width_k))
                w.put(f"suffix-{bp.block}", names[bp.block][cut:])
            else:
                w.put(f"name-{bp.block}", names[bp.block])
        return w.build(1)
    for i in good:
        w.put(f"name-{i}", names[i])
    bad = [bp.block for bp in prof.blocks if not bp.good]
    for j in bad:
        w.put(f"prefix-{j}", names[j][:cut])
    sel = lwss(computer, advice_fn, instance, prof, ctx)
    chosen = set(sel.W)
    for j in bad:
        if j not in chosen:
            w.put(f"suffix-{j}", names[j][cut:])
    return w.build(2)


# ---------------------------------------------------------------------------
# Decoders


def _oracle_with_answers(computer, block, advice, answer_fn) -> SparseState:
    """Oracle application with answer bits supplied by a rule, not an instance."""
    pre = computer.prequery_state(block, advice)
    amps: dict = {}
    for (words, ws), amp in pre.items():
        bits = tuple(answer_fn(w.block, w.location) for w in words)
        key = (
            list_index(words, computer.M, computer.n),
            answers_index(bits),
            ws,
        )
        amps[key] = amps.get(key, Fraction(0)) + amp
    return SparseState(computer.state_dims(), amps)


def _majority_outcome(state, p):
    dist = measure_register(state, 2, p)
    for outcome, prob in dist.items():
        if prob > Fraction(1, 2):
            return outcome
    return None


def decode(ctx, computer, advice_fn, encoding: Encoding) -> StepInstance:
    """Reconstruct the instance from its code, using only the machine.

    The advice_fn argument is an optional cross-check template: when
    given, the decoded instance must map to the advice string recovered
    from the code. Decoding itself never calls it.

    Good blocks are recovered by rerunning the machine's prequery side
    and indexing into its heavy-prefix list. In case 2 the unselected bad
    blocks come straight from stored prefix and suffix bits, and each
    selected block is recovered by feeding the machine substituted oracle
    answers (exact for every word whose step is already known, 0 for
    words touching still-unknown selected steps), applying the final
    transform, and reading the unique measurement outcome above 1/2.
    """
    _check_pair(ctx, computer)
    r = BitReader(encoding.bits)
    f = r.take(ctx.k)
    raw = r.take_doubled()
    if ctx.log_M == 0:
        if raw:
            raise EncodingFormatError("index section must be empty when M = 1")
        good = (1,) if encoding.case == 1 else ()
    else:
        if len(raw) % ctx.log_M:
            raise EncodingFormatError("index section is not a whole number of fields")
        good_list = []
        for j in range(0, len(raw), ctx.log_M):
            v = int(raw[j : j + ctx.log_M], 2) + 1
            if good_list and v <= good_list[-1]:
                raise EncodingFormatError("good indices must strictly increase")
            good_list.append(v)
        good = tuple(good_list)
    if (encoding.case == 1) != (ctx.l <= len(good)):
        raise EncodingFormatError("case tag contradicts the good-block count")
    good_set = set(good)
    names: dict[int, str] = {}
    cut = ctx.n - ctx.p
    if encoding.case == 1:
        for i in range(1, ctx.M + 1):
            if i in good_set:
                rank_bits = r.take(ctx.width_k)
                rank = int(rank_bits, 2) if rank_bits else 0
                suffix = r.take(ctx.p)
                heavy = _heavy_prefixes(computer, i, f, ctx.p, ctx.C)
                if rank >= len(heavy):
                    raise DecodeError(
                        f"block {i} has no heavy prefix at rank {rank}"
                    )
                names[i] = heavy[rank] + suffix
            else:
                names[i] = r.take(ctx.n)
    else:
        for i in good:
            names[i] = r.take(ctx.n)
        bad = [i for i in range(1, ctx.M + 1) if i not in good_set]
        prefixes = {j: r.take(cut) for j in bad}
        sel = _select(ctx, computer, f, prefixes)
        chosen = set(sel.W)
        for j in bad:
            if j not in chosen:
                names[j] = prefixes[j] + r.take(ctx.p)
        prefix_of = {i: names[i][:cut] for i in good}
        prefix_of.update(prefixes)
        pending = set(sel.W)
        for pivot in sel.W:
            answer_fn = _substitution_rule(cut, names, prefix_of, pending)
            state = _oracle_with_answers(computer, pivot, f, answer_fn)
            state = computer.final.apply(state)
            outcome = _majority_outcome(state, ctx.p)
            if outcome is None:
                raise DecodeError(
                    f"no outcome for block {pivot} wins a strict majority"
                )
            names[pivot] = prefix_of[pivot] + outcome_to_answer(outcome, ctx.p)
            pending.discard(pivot)
    r.expect_end()
    instance = StepInstance(
        ctx.M, ctx.n, tuple(rank_of(names[i]) for i in range(1, ctx.M + 1))
    )
    if advice_fn is not None and advice_fn(instance) != f:
        raise DecodeError("decoded instance does not reproduce the advice string")
    return instance


def _substitution_rule(cut, names, prefix_of, pending):
    """Answer rule used while a selected block's step is being recovered.

    Words whose location prefix differs from the owning block's step
    prefix get their true answer, which the prefix comparison alone
    determines. On a prefix match the answer needs the step's suffix:
    exact when known, substituted by 0 while the owner is still pending.
    """

    def answer(block, location):
        v, z = location[:cut], location[cut:]
        own = prefix_of[block]
        if v < own:
            return 0
        if v > own:
            return 1
        if block in pending:
            return 0
        return 1 if z >= names[block][cut:] else 0

    return answer


# ---------------------------------------------------------------------------
# Single-block scheme


def _single_check(n, k, computer):
    if computer.M != 1:
        raise ValueError("the single-block scheme needs M = 1")
    if (n, k) != (computer.n, computer.advice_len):
        raise ValueError("n or k does not match the computer")
    p = k + 1
    if p > n:
        raise ValueError("needs k + 1 <= n")
    if p > computer.output_width:
        raise ValueError("cannot measure more cells than the computer writes")
    return p


def single_block_bound(n, k, params=DEFAULT_PARAMS) -> Fraction:
    """Query floor certified by the single-block scheme: C N / 2^(2k+2)."""
    return params.C * Fraction(2**n, 2 ** (2 * k + 2))


def encode_single(n, k, params, computer, advice_fn, instance) -> Encoding:
    """One-block code: advice, then either suffix plus rank or bare prefix.

    The case pivots on whether the machine weights the step's own prefix
    above C at p = k + 1. Case 2 always costs exactly n - 1 bits.
    """
    p = _single_check(n, k, computer)
    f = advice_fn(instance)
    name = instance.step_bits(1)
    cut = n - p
    heavy = _heavy_prefixes(computer, 1, f, p, params.C)
    w = _ItemWriter()
    w.put("advice", f)
    if name[:cut] in heavy:
        width = ceil_log2(Fraction(computer.T) / params.C) if computer.T else 0
        w.put("suffix", name[cut:])
        w.put("rank", _field(heavy.index(name[:cut]), width))
        return w.build(1)
    w.put("prefix", name[:cut])
    return w.build(2)


def decode_single(n, k, params, computer, encoding: Encoding) -> StepInstance:
    p = _single_check(n, k, computer)
    r = BitReader(encoding.bits)
    f = r.take(k)
    cut = n - p
    if encoding.case == 1:
        suffix = r.take(p)
        width = ceil_log2(Fraction(computer.T) / params.C) if computer.T else 0
        rank_bits = r.take(width)
        rank = int(rank_bits, 2) if rank_bits else 0
        heavy = _heavy_prefixes(computer, 1, f, p, params.C)
        if rank >= len(heavy):
            raise DecodeError(f"no heavy prefix at rank {rank}")
        name = heavy[rank] + suffix
    else:
        prefix = r.take(cut)

        def answer(block, location):
            v = location[:cut]
            if v < prefix:
                return 0
            if v > prefix:
                return 1
            return 0

        state = _oracle_with_answers(computer, 1, f, answer)
        state = computer.final.apply(state)
        outcome = _majority_outcome(state, p)
        if outcome is None:
            raise DecodeError("no outcome wins a strict majority")
        name = prefix + outcome_to_answer(outcome, p)
    r.expect_end()
    return StepInstance(1, n, (rank_of(name),))


# ---------------------------------------------------------------------------
# Sweep-level verification


@dataclass(frozen=True)
class PigeonholeReport:
    total: int
    injective: bool
    collisions: tuple[tuple[str, str], ...]
    min_length: int
    max_length: int
    case1_count: int
    case2_count: int
    long_count: int

    @property
    def ok(self) -> bool:
        """Codes are one to one and at least one is as long as a raw name."""
        return self.injective and self.long_count >= 1


def verify_pigeonhole(ctx, computer, advice_fn, M, n, budget=None) -> PigeonholeReport:
    """Encode every instance; check injectivity and the length census.

    A decodable code cannot shorten every instance: some code must reach
    M * n bits. This function observes that fact rather than assuming it.
    """
    if (M, n) != (ctx.M, ctx.n):
        raise ValueError("M or n does not match the context")
    seen: dict = {}
    collisions = []
    lengths = []
    cases = {1: 0, 2: 0}
    long_count = 0
    total = 0
    for instance in enumerate_instances(M, n, budget):
        enc = encode(ctx, computer, advice_fn, instance)
        total += 1
        key = (enc.case, enc.bits)
        if key in seen:
            collisions.append((format_instance(seen[key]), format_instance(instance)))
        else:
            seen[key] = instance
        lengths.append(len(enc))
        cases[enc.case] += 1
        if len(enc) >= M * n:
            long_count += 1
    return PigeonholeReport(
        total=total,
        injective=not collisions,
        collisions=tuple(collisions),
        min_length=min(lengths) if lengths else 0,
        max_length=max(lengths) if lengths else 0,
        case1_count=cases[1],
        case2_count=cases[2],
        long_count=long_count,
    )


# ---------------------------------------------------------------------------
# Per-instance invariant audit


@dataclass(frozen=True)
class AuditReport:
    """Every exactly checkable scheme invariant, for one instance.

    Selection fields are vacuously true for case 1. length_with_l is the
    case 2 length formula with l substituted for the good-block count,
    the form the certifying chain bounds; informational only.
    """

    instance: str
    case: int
    length: int
    expected: int
    length_matches: bool
    rank_ok: bool
    mass_ok: bool
    certificate: InequalityReport | None
    certificate_ok: bool
    selection: LwssResult | None
    selection_distinct: bool
    selection_floor_ok: bool
    selection_cross_ok: bool
    selection_m_ok: bool
    distance_ok: bool
    distances: tuple[Fraction, ...]
    length_with_l: int | None

    @property
    def ok(self) -> bool:
        return (
            self.length_matches
            and self.rank_ok
            and self.mass_ok
            and self.certificate_ok
            and self.selection_distinct
            and self.selection_floor_ok
            and self.selection_cross_ok
            and self.selection_m_ok
            and self.distance_ok
        )


def audit_instance(ctx, computer, advice_fn, instance) -> AuditReport:
    _check_pair(ctx, computer)
    f = advice_fn(instance)
    prof = profile(computer, advice_fn, instance, ctx.p, ctx.params)
    lp = prof.l_prime
    enc = encode(ctx, computer, advice_fn, instance)

    rank_ok = all(
        bp.rank < ctx.t and bp.rank < 2**ctx.width_k
        for bp in prof.blocks
        if bp.good
    )
    mass_ok = True
    for i in range(1, ctx.M + 1):
        tbl = prefix_weights(computer, i, f, ctx.p)
        own = sum((v for (j, _), v in tbl.items() if j == i), Fraction(0))
        if own > ctx.T:
            mass_ok = False

    certificate = (
        check_inequalities(ctx, prof) if ctx.T >= 1 else None
    )
    certified = certificate.certified if certificate else False
    certificate_ok = (not certified) or len(enc) < ctx.M * ctx.n

    selection = None
    sel_distinct = sel_floor = sel_cross = sel_m = True
    distance_ok = True
    distances: tuple = ()
    length_with_l = None
    if enc.case == 2:
        selection = lwss(computer, advice_fn, instance, prof, ctx)
        sel_distinct = len(set(selection.W)) == len(selection.W)
        bad_count = ctx.M - lp
        for i, size in enumerate(selection.survivor_sizes):
            if size < bad_count - ctx.t * selection.m * i:
                sel_floor = False
        if selection.threshold is not None:
            sel_cross = all(v < selection.threshold for (_, _, v) in selection.crosses)
        # The round count must be the largest m with the quadratic
        # t m^2 - (t - 1) m - bad_count nonpositive, and flooring keeps
        # C * bad_count <= T * (m + 1)^2.
        m = selection.m
        if ctx.T == 0:
            sel_m = m == 0
        else:

            def quad(x):
                return ctx.t * x * x - (ctx.t - 1) * x - bad_count

            sel_m = quad(m) <= 0 < quad(m + 1) if bad_count else m == 0
            if sel_m and bad_count:
                sel_m = ctx.C * bad_count <= ctx.T * (m + 1) ** 2
        distance_values = []
        pending = set(selection.W)
        cut = ctx.n - ctx.p
        names = {i: instance.step_bits(i) for i in range(1, ctx.M + 1)}
        prefix_of = {i: names[i][:cut] for i in names}
        for pivot in selection.W:
            rule = _substitution_rule(cut, names, prefix_of, pending)
            substituted = _oracle_with_answers(computer, pivot, f, rule)
            pre = computer.prequery_state(pivot, f)
            true_state = apply_oracle(computer, pre, instance)
            d = distance_sq(substituted, true_state)
            distance_values.append(d)
            if d > 4 * ctx.C:
                distance_ok = False
            pending.discard(pivot)
        distances = tuple(distance_values)
        length_with_l = expected_length(ctx, ctx.l, 2, selected=len(selection.W))

    expected = expected_length(
        ctx, lp, enc.case, selected=len(selection.W) if selection else 0
    )
    return AuditReport(
        instance=format_instance(instance),
        case=enc.case,
        length=len(enc),
        expected=expected,
        length_matches=len(enc) == expected,
        rank_ok=rank_ok,
        mass_ok=mass_ok,
        certificate=certificate,
        certificate_ok=certificate_ok,
        selection=selection,
        selection_distinct=sel_distinct,
        selection_floor_ok=sel_floor,
        selection_cross_ok=sel_cross,
        selection_m_ok=sel_m,
        distance_ok=distance_ok,
        distances=distances,
        length_with_l=length_with_l,
    )

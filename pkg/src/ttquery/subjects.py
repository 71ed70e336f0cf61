"""Built-in computers for the block search problem.

These are the machines the test sweeps and the CLI run against. The
reference algorithms (full, advised) are errorless and meet the known
query counts; the others shape their queries to reach specific branches
of the encoding machinery: zero makes no queries at all, probe keeps its
own step's prefix group almost unqueried, shortcut mixes duplicate query
lists with a sparse location pattern, and the two helpers at the bottom
aim their single query at a neighboring block.

Every final transform here is either the identity or an XOR of a
list-and-answer-determined value into the workspace cell block, which is
an involution on basis states and hence orthogonal for free.
"""

from __future__ import annotations

from fractions import Fraction

from .model import (
    AdviceFunction,
    ModelError,
    NonadaptiveComputer,
    PermutationFinal,
    PrequeryState,
    QueryWord,
    answer_to_outcome,
    list_index,
    no_advice,
)
from .ordered_search import StepInstance, bin_n, eval_G


class SubjectError(ValueError):
    """Unknown subject name or parameters the subject cannot take."""


def _ones(answers_idx: int) -> int:
    return bin(answers_idx).count("1")


def _xor_final(target_fn):
    """Final transform XORing target_fn(list index, answer index) into ws."""

    def fn(key):
        lidx, aidx, ws = key
        return (lidx, aidx, ws ^ target_fn(lidx, aidx))

    return PermutationFinal(fn)


def build_full_query(M: int, n: int):
    """Reference no-advice algorithm: query locations 1..N-1 of the input block.

    The step equals N minus the number of 1-answers, so the full n-bit name
    is recovered exactly; T = N - 1.
    """
    N = 2**n
    T = N - 1
    lists = {}
    for b in range(1, M + 1):
        words = tuple(QueryWord(b, bin_n(n, r)) for r in range(1, N))
        lists[list_index(words, M, n)] = words

    def prequery(block, advice):
        words = tuple(QueryWord(block, bin_n(n, r)) for r in range(1, N))
        return PrequeryState(T, N, {(words, 0): Fraction(1)})

    def target(lidx, aidx):
        if lidx not in lists:
            return 0
        step = N - _ones(aidx)
        return answer_to_outcome(bin_n(n, step))

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=T,
        advice_len=0,
        output_width=n,
        scratch_dim=1,
        prequery=prequery,
        final=_xor_final(target),
    )
    return computer, no_advice()


def build_advised(M: int, n: int, k: int):
    """Reference advised algorithm: floor(k/M) leading step bits per block.

    Advice narrows each step to a window of 2^(n-q) consecutive locations;
    the computer queries all but the last of them, so T = 2^(n-q) - 1.
    Leftover advice bits are zero padding.
    """
    if not 0 <= k <= M * n:
        raise SubjectError(f"advice length {k} outside 0..{M * n}")
    q = k // M
    T = 2 ** (n - q) - 1

    def window(block, prefix):
        if prefix:
            lo = int(prefix + "0" * (n - q), 2) + 1
            hi = int(prefix + "1" * (n - q), 2) + 1
        else:
            lo, hi = 1, 2**n
        words = tuple(QueryWord(block, bin_n(n, r)) for r in range(lo, hi))
        return words, hi

    windows = {}
    for b in range(1, M + 1):
        for g in range(2**q):
            prefix = format(g, f"0{q}b") if q else ""
            words, hi = window(b, prefix)
            if T:
                windows[list_index(words, M, n)] = hi

    def prequery(block, advice):
        prefix = advice[(block - 1) * q : block * q]
        words, hi = window(block, prefix)
        ws = answer_to_outcome(prefix) if q == n else 0
        return PrequeryState(T, 2**n, {(words, ws): Fraction(1)})

    def target(lidx, aidx):
        hi = windows.get(lidx)
        if hi is None:
            return 0
        step = hi - _ones(aidx)
        return answer_to_outcome(bin_n(n, step))

    final = _xor_final(target) if T else PermutationFinal(lambda key: key)

    def advice_bits(instance: StepInstance) -> str:
        parts = [instance.step_bits(b)[:q] for b in range(1, M + 1)]
        return "".join(parts) + "0" * (k - M * q)

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=T,
        advice_len=k,
        output_width=n,
        scratch_dim=1,
        prequery=prequery,
        final=final,
    )
    return computer, AdviceFunction(k, advice_bits)


def build_zero(M: int, n: int):
    """No queries, no advice, identity final transform. Always answers zero."""

    def prequery(block, advice):
        return PrequeryState(0, 2**n, {((), 0): Fraction(1)})

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=0,
        advice_len=0,
        output_width=n,
        scratch_dim=1,
        prequery=prequery,
        final=PermutationFinal(lambda key: key),
    )
    return computer, no_advice()


# The probe amplitudes form an exact unit pair with a deliberately skewed
# split: the heavy component sits on location 1, the light one on location
# N, and the light squared weight 4096/1050625 stays just under 1/256.
PROBE_HEAVY = Fraction(1023, 1025)
PROBE_LIGHT = Fraction(64, 1025)


def build_probe(M: int, n: int):
    """One-bit-per-block advice carrying the answer; queries are decoys.

    The advice bit for the input block is written straight into the output
    cell, so the error is zero at width 1. The two queried locations give
    the block a heavy weight only on the all-zero location prefix: every
    step outside {1, 2} makes its block bad.
    """
    k = M
    lo = bin_n(n, 1)
    hi = bin_n(n, 2**n)

    def prequery(block, advice):
        out = int(advice[block - 1])
        return PrequeryState(
            1,
            2,
            {
                ((QueryWord(block, lo),), out): PROBE_HEAVY,
                ((QueryWord(block, hi),), out): PROBE_LIGHT,
            },
        )

    def advice_bits(instance: StepInstance) -> str:
        return "".join(eval_G(instance, b, 1) for b in range(1, M + 1))

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=1,
        advice_len=k,
        output_width=1,
        scratch_dim=1,
        prequery=prequery,
        final=PermutationFinal(lambda key: key),
    )
    return computer, AdviceFunction(k, advice_bits)


def build_shortcut(n: int):
    """Single block, one advice bit: is the step a multiple of four?

    If not, query every location outside 4Z in ascending order; the first
    1-answer sits exactly at the step, whose residue gives its last two
    bits. If yes, the last two bits are 11 outright, and the query list is
    T duplicate copies of location 1 so that only steps with the all-zero
    location prefix keep a good weight profile.
    """
    if n < 2:
        raise SubjectError("shortcut needs n >= 2")
    N = 2**n
    T = 3 * N // 4
    ranks = tuple(r for r in range(1, N + 1) if r % 4 != 0)
    asc = tuple(QueryWord(1, bin_n(n, r)) for r in ranks)
    dup = (QueryWord(1, bin_n(n, 1)),) * T
    asc_idx = list_index(asc, 1, n)
    dup_idx = list_index(dup, 1, n)

    def prequery(block, advice):
        words = dup if advice == "1" else asc
        return PrequeryState(T, 4, {(words, 0): Fraction(1)})

    def target(lidx, aidx):
        if lidx == dup_idx:
            return 3
        if lidx != asc_idx:
            return 0
        for j in range(T):
            if (aidx >> (T - 1 - j)) & 1:
                return answer_to_outcome(format((ranks[j] - 1) % 4, "02b"))
        return 3

    def advice_bits(instance: StepInstance) -> str:
        return "1" if instance.step(1) % 4 == 0 else "0"

    computer = NonadaptiveComputer(
        M=1,
        n=n,
        T=T,
        advice_len=1,
        output_width=2,
        scratch_dim=1,
        prequery=prequery,
        final=_xor_final(target),
    )
    return computer, AdviceFunction(1, advice_bits)


def build_neighbor_probe(M: int, n: int):
    """Probe variant querying the next two blocks instead of its own.

    Answers still come from the advice bit, so the error stays zero, but
    every block is bad on every instance and the cross-block weights are
    the nonzero values the selection audits need to see.
    """
    if M < 3:
        raise SubjectError("neighbor probe needs M >= 3")
    loc = bin_n(n, 1)

    def prequery(block, advice):
        out = int(advice[block - 1])
        first = block % M + 1
        second = first % M + 1
        return PrequeryState(
            1,
            2,
            {
                ((QueryWord(first, loc),), out): PROBE_HEAVY,
                ((QueryWord(second, loc),), out): PROBE_LIGHT,
            },
        )

    def advice_bits(instance: StepInstance) -> str:
        return "".join(eval_G(instance, b, 1) for b in range(1, M + 1))

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=1,
        advice_len=M,
        output_width=1,
        scratch_dim=1,
        prequery=prequery,
        final=PermutationFinal(lambda key: key),
    )
    return computer, AdviceFunction(M, advice_bits)


def build_single_query(M: int, n: int):
    """One deterministic query: location 1 of the cyclically next block.

    With M = 1 that is the input block itself, which makes steps 1 and 2
    good and everything else bad. No advice, no output logic: the final
    transform is the identity, so the machine is wrong almost everywhere.
    Used to drive the encoder into sparse-weight regimes.
    """
    loc = bin_n(n, 1)

    def prequery(block, advice):
        words = (QueryWord(block % M + 1, loc),)
        return PrequeryState(1, 2**n, {(words, 0): Fraction(1)})

    computer = NonadaptiveComputer(
        M=M,
        n=n,
        T=1,
        advice_len=0,
        output_width=n,
        scratch_dim=1,
        prequery=prequery,
        final=PermutationFinal(lambda key: key),
    )
    return computer, no_advice()


REGISTRY = ("full", "advised", "zero", "probe", "shortcut")


def get_subject(name: str, M: int, n: int, k: int):
    """Build a registry subject, checking that k fits the subject's shape."""
    if name == "full":
        if k != 0:
            raise SubjectError("full takes no advice (k must be 0)")
        return build_full_query(M, n)
    if name == "advised":
        return build_advised(M, n, k)
    if name == "zero":
        if k != 0:
            raise SubjectError("zero takes no advice (k must be 0)")
        return build_zero(M, n)
    if name == "probe":
        if k != M:
            raise SubjectError(f"probe uses one advice bit per block (k must be {M})")
        return build_probe(M, n)
    if name == "shortcut":
        if M != 1:
            raise SubjectError("shortcut is a single-block subject (M must be 1)")
        if k != 1:
            raise SubjectError("shortcut uses one advice bit (k must be 1)")
        return build_shortcut(n)
    raise SubjectError(f"unknown subject {name!r}; built-ins: {', '.join(REGISTRY)}")

"""Multiple-block ordered search instances.

An instance is a vector of M step positions, one per block of size N = 2**n.
Block j's characteristic string is 0^(s_j - 1) 1^(N - s_j + 1): querying a
location answers whether that location is at or past the step. The target
function returns the last p bits of the step's n-bit name.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured instance budget."""


def bin_n(width: int, rank: int) -> str:
    """The lexicographically rank-th n-bit string, counting from 1.

    bin_n(n, 1) is all zeros and bin_n(n, 2**n) is all ones.
    """
    if width < 0:
        raise ValueError("width must be non-negative")
    if not 1 <= rank <= 2**width:
        raise ValueError(f"rank {rank} outside 1..2^{width}")
    return format(rank - 1, f"0{width}b") if width else ""


def rank_of(bits: str) -> int:
    """Inverse of bin_n: the 1-based lexicographic rank of a bit string."""
    if bits and any(b not in "01" for b in bits):
        raise ValueError(f"not a bit string: {bits!r}")
    return (int(bits, 2) if bits else 0) + 1


def step_string(n: int, step: int) -> str:
    """Characteristic string of a single block: 0^(s-1) 1^(N-s+1)."""
    size = 2**n
    if not 1 <= step <= size:
        raise ValueError(f"step {step} outside 1..{size}")
    return "0" * (step - 1) + "1" * (size - step + 1)


@dataclass(frozen=True)
class StepInstance:
    """One input to the M-block problem: a step position per block."""

    M: int
    n: int
    steps: tuple[int, ...]

    def __post_init__(self):
        if self.M < 1 or self.n < 1:
            raise ValueError("need M >= 1 and n >= 1")
        steps = tuple(int(s) for s in self.steps)
        object.__setattr__(self, "steps", steps)
        if len(steps) != self.M:
            raise ValueError(f"expected {self.M} steps, got {len(steps)}")
        size = 2**self.n
        for s in steps:
            if not 1 <= s <= size:
                raise ValueError(f"step {s} outside 1..{size}")

    @property
    def N(self) -> int:
        return 2**self.n

    def step(self, block: int) -> int:
        if not 1 <= block <= self.M:
            raise ValueError(f"block {block} outside 1..{self.M}")
        return self.steps[block - 1]

    def step_bits(self, block: int) -> str:
        """n-bit name of the block's step."""
        return bin_n(self.n, self.step(block))

    def block_string(self, block: int) -> str:
        return step_string(self.n, self.step(block))

    def answer(self, block: int, location: str) -> int:
        """Oracle bit: 1 iff the location is at or past the block's step."""
        if len(location) != self.n or any(b not in "01" for b in location):
            raise ValueError(f"bad location {location!r} for n={self.n}")
        return 1 if rank_of(location) >= self.step(block) else 0

    def literal(self) -> str:
        return format_instance(self)

    def __str__(self) -> str:
        return self.literal()


def format_instance(instance: StepInstance) -> str:
    steps = ",".join(str(s) for s in instance.steps)
    return f"M={instance.M} n={instance.n} steps={steps}"


def parse_instance(text: str) -> StepInstance:
    """Parse a literal like "M=2 n=3 steps=3,7"."""
    fields = {}
    for token in text.split():
        if "=" not in token:
            raise ValueError(f"bad token {token!r} in instance literal")
        key, _, value = token.partition("=")
        fields[key] = value
    try:
        M = int(fields["M"])
        n = int(fields["n"])
        steps = tuple(int(s) for s in fields["steps"].split(","))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"cannot parse instance literal {text!r}") from exc
    return StepInstance(M, n, steps)


def eval_G(instance: StepInstance, block: int, p: int) -> str:
    """Target value for a block: the last p bits of its step's n-bit name."""
    if not 1 <= p <= instance.n:
        raise ValueError(f"output width {p} outside 1..{instance.n}")
    return instance.step_bits(block)[-p:]


def instance_count(M: int, n: int) -> int:
    return (2**n) ** M


def enumerate_instances(
    M: int, n: int, budget: int | None = None
) -> Iterator[StepInstance]:
    """All instances in lexicographic step order, guarded by a count budget."""
    total = instance_count(M, n)
    if budget is not None and total > budget:
        raise BudgetExceededError(
            f"{total} instances at M={M}, n={n} exceed budget {budget}"
        )
    size = 2**n
    for steps in itertools.product(range(1, size + 1), repeat=M):
        yield StepInstance(M, n, steps)

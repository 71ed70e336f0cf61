"""Experiment runner behind the command line interface.

Four commands, all sweep-shaped: simulate prints exact output
distributions and error probabilities, roundtrip drives the coders over
every instance and censuses the code lengths, bounds tabulates the query
floors and the certifying constants, lemmas reruns every per-instance
invariant audit. Reports are deterministic: the same configuration
produces byte-identical CSV rows and JSON summaries.

Configuration is a flat key = value file. Rationals are written "p/q".
Recognized keys: M, n, p, k, epsilon, c, l, subject, scheme, budget,
instance, blocks, out. The subject is a built-in name or a path to a
JSON file holding the computer and advice tables.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, replace
from fractions import Fraction

from .adversary import adversary_bound
from .compression import (
    DecodeError,
    EncodingContext,
    EncodingFormatError,
    ErrorParams,
    LwssExhaustedError,
    audit_instance,
    c_uv_values,
    decode,
    decode_single,
    encode,
    encode_single,
    single_block_bound,
    verify_pigeonhole,
)
from .model import advice_from_doc, computer_from_doc, run
from .ordered_search import (
    BudgetExceededError,
    enumerate_instances,
    eval_G,
    format_instance,
    parse_instance,
)
from .statevec import as_rational, rational_str
from .subjects import REGISTRY, SubjectError, get_subject


class ConfigError(ValueError):
    """Bad configuration keys, values, or cross-field combinations."""


_INT_KEYS = ("M", "n", "p", "k", "l", "budget")
_ALL_KEYS = _INT_KEYS + (
    "epsilon",
    "c",
    "subject",
    "scheme",
    "instance",
    "blocks",
    "out",
)


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 1
    n: int = 3
    p: int = 1
    k: int = 0
    epsilon: Fraction = Fraction(1, 3)
    c: Fraction = Fraction(1, 8)
    l: int = 1
    subject: str = "full"
    scheme: str = "multi"
    budget: int = 4096
    instance: str | None = None
    blocks: tuple[int, ...] | None = None
    out: str | None = None


def parse_config(text: str) -> dict:
    """Read "key = value" lines; blank lines and # comments are skipped."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def build_config(raw: dict, **overrides) -> ExperimentConfig:
    cfg = ExperimentConfig()
    fields: dict = {}
    for key, value in raw.items():
        if key in _INT_KEYS:
            try:
                fields[key] = int(value)
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {value!r}") from None
        elif key in ("epsilon", "c"):
            try:
                fields[key] = as_rational(value)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"{key} must be a rational like 1/3") from None
        elif key == "blocks":
            try:
                fields[key] = tuple(int(v) for v in value.split(","))
            except ValueError:
                raise ConfigError("blocks must be comma-separated integers") from None
        else:
            fields[key] = value
    for key, value in overrides.items():
        if value is not None:
            fields[key] = value
    cfg = replace(cfg, **fields)
    if cfg.scheme not in ("multi", "single"):
        raise ConfigError("scheme must be multi or single")
    if cfg.budget < 0:
        raise ConfigError("budget must be nonnegative")
    return cfg


def load_config(path: str | None, **overrides) -> ExperimentConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = parse_config(fh.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
    return build_config(raw, **overrides)


def resolve_subject(cfg: ExperimentConfig):
    """Build a registry subject or load one from a JSON file."""
    if cfg.subject in REGISTRY:
        try:
            return get_subject(cfg.subject, cfg.M, cfg.n, cfg.k)
        except (SubjectError, ValueError) as e:
            raise ConfigError(str(e)) from None
    try:
        with open(cfg.subject, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"subject is neither a built-in name nor a readable file: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"subject file is not valid JSON: {e}") from None
    try:
        computer = computer_from_doc(doc["computer"])
        advice_fn = advice_from_doc(doc["advice"])
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"subject file is malformed: {e}") from None
    if (computer.M, computer.n) != (cfg.M, cfg.n):
        raise ConfigError("subject file disagrees with the configured M or n")
    if computer.advice_len != cfg.k:
        raise ConfigError("subject file disagrees with the configured k")
    return computer, advice_fn


@dataclass(frozen=True)
class Report:
    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    summary: dict
    ok: bool


def report_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.header)
    writer.writerows(report.rows)
    return buf.getvalue()


def report_json(report: Report) -> str:
    doc = {"command": report.name, "ok": report.ok, "summary": report.summary}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(report: Report, out: str | None) -> None:
    """Write CSV and JSON next to each other, or both to stdout."""
    if out is None:
        print(report_csv(report), end="")
        print(report_json(report), end="")
        return
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, f"{report.name}.csv"), "w", encoding="utf-8") as fh:
        fh.write(report_csv(report))
    with open(os.path.join(out, f"{report.name}.json"), "w", encoding="utf-8") as fh:
        fh.write(report_json(report))


def _params(cfg) -> ErrorParams:
    try:
        return ErrorParams(cfg.epsilon, cfg.c)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _context(cfg, computer) -> EncodingContext:
    try:
        return EncodingContext(
            M=cfg.M, n=cfg.n, p=cfg.p, k=cfg.k, T=computer.T, l=cfg.l,
            params=_params(cfg),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _instances(cfg):
    if cfg.instance is not None:
        try:
            instance = parse_instance(cfg.instance)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if (instance.M, instance.n) != (cfg.M, cfg.n):
            raise ConfigError("instance literal disagrees with M or n")
        return [instance]
    return enumerate_instances(cfg.M, cfg.n, cfg.budget)


_PASS, _FAIL = "pass", "fail"


def cmd_simulate(cfg: ExperimentConfig) -> Report:
    computer, advice_fn = resolve_subject(cfg)
    if not 1 <= cfg.p <= cfg.n:
        raise ConfigError("p must lie in [1, n]")
    if cfg.p > computer.output_width:
        raise ConfigError("p exceeds the subject's output width")
    blocks = cfg.blocks or tuple(range(1, cfg.M + 1))
    if any(not 1 <= b <= cfg.M for b in blocks):
        raise ConfigError("blocks must lie in [1, M]")
    rows = []
    max_error = Fraction(0)
    for instance in _instances(cfg):
        f = advice_fn(instance)
        for block in blocks:
            dist = run(computer, block, f, instance, width=cfg.p)
            expected = eval_G(instance, block, cfg.p)
            error = 1 - dist.get(expected, Fraction(0))
            max_error = max(max_error, error)
            shown = " ".join(
                f"{a}:{rational_str(pr)}" for a, pr in sorted(dist.items())
            )
            rows.append(
                (
                    format_instance(instance),
                    str(block),
                    expected,
                    shown,
                    rational_str(error),
                    _PASS if error <= cfg.epsilon else _FAIL,
                )
            )
    ok = max_error <= cfg.epsilon
    summary = {
        "rows": len(rows),
        "subject": cfg.subject,
        "T": computer.T,
        "p": cfg.p,
        "epsilon": rational_str(as_rational(cfg.epsilon)),
        "max_error": rational_str(max_error),
    }
    return Report(
        name="simulate",
        header=("instance", "block", "expected", "distribution", "error", "status"),
        rows=tuple(rows),
        summary=summary,
        ok=ok,
    )


def _roundtrip_multi(cfg, computer, advice_fn):
    ctx = _context(cfg, computer)
    rows = []
    all_pass = True
    for instance in _instances(cfg):
        enc = encode(ctx, computer, advice_fn, instance)
        try:
            back = decode(ctx, computer, advice_fn, enc)
            status = _PASS if back == instance else _FAIL
        except (DecodeError, EncodingFormatError, LwssExhaustedError):
            status = _FAIL
        all_pass = all_pass and status == _PASS
        rows.append(
            (
                format_instance(instance),
                str(enc.case),
                str(len(enc)),
                enc.hex,
                enc.items_compact(),
                status,
            )
        )
    pig = verify_pigeonhole(ctx, computer, advice_fn, cfg.M, cfg.n, cfg.budget)
    summary = {
        "scheme": "multi",
        "subject": cfg.subject,
        "l": cfg.l,
        "roundtrips": f"{sum(1 for r in rows if r[-1] == _PASS)}/{len(rows)}",
        "injective": pig.injective,
        "case1": pig.case1_count,
        "case2": pig.case2_count,
        "min_length": pig.min_length,
        "max_length": pig.max_length,
        "codes_at_least_Mn": pig.long_count,
    }
    return rows, summary, all_pass and pig.ok


def _roundtrip_single(cfg, computer, advice_fn):
    if cfg.M != 1:
        raise ConfigError("the single scheme needs M = 1")
    params = _params(cfg)
    if cfg.k + 1 > cfg.n:
        raise ConfigError("the single scheme needs k + 1 <= n")
    rows = []
    all_pass = True
    seen: dict = {}
    injective = True
    max_len = 0
    long_count = 0
    for instance in _instances(cfg):
        enc = encode_single(cfg.n, cfg.k, params, computer, advice_fn, instance)
        try:
            back = decode_single(cfg.n, cfg.k, params, computer, enc)
            status = _PASS if back == instance else _FAIL
        except (DecodeError, EncodingFormatError):
            status = _FAIL
        all_pass = all_pass and status == _PASS
        key = (enc.case, enc.bits)
        if key in seen:
            injective = False
        seen[key] = instance
        max_len = max(max_len, len(enc))
        if len(enc) >= cfg.n:
            long_count += 1
        rows.append(
            (
                format_instance(instance),
                str(enc.case),
                str(len(enc)),
                enc.hex,
                enc.items_compact(),
                status,
            )
        )
    summary = {
        "scheme": "single",
        "subject": cfg.subject,
        "roundtrips": f"{sum(1 for r in rows if r[-1] == _PASS)}/{len(rows)}",
        "injective": injective,
        "max_length": max_len,
        "codes_at_least_Mn": long_count,
    }
    return rows, summary, all_pass and injective and long_count >= 1


def cmd_roundtrip(cfg: ExperimentConfig) -> Report:
    computer, advice_fn = resolve_subject(cfg)
    if cfg.scheme == "single":
        rows, summary, ok = _roundtrip_single(cfg, computer, advice_fn)
    else:
        rows, summary, ok = _roundtrip_multi(cfg, computer, advice_fn)
    return Report(
        name="roundtrip",
        header=("instance", "case", "length", "hex", "items", "status"),
        rows=tuple(rows),
        summary=summary,
        ok=ok,
    )


def cmd_bounds(cfg: ExperimentConfig) -> Report:
    computer, _ = resolve_subject(cfg)
    params = _params(cfg)
    N = 2**cfg.n
    rows = []
    upper = N // 2 ** (cfg.k // cfg.M) - 1
    rows.append(("reference-upper", "-", str(upper), "queries of the advised reference machine"))
    rows.append(("subject-T", "-", str(computer.T), cfg.subject))
    if cfg.M == 1 and cfg.k + 1 <= cfg.n:
        v = single_block_bound(cfg.n, cfg.k, params)
        rows.append(
            ("single-block-floor", "-", rational_str(v), f"about {float(v):.10f}")
        )
    adv = adversary_bound(N, cfg.k, cfg.epsilon)
    rows.append(
        (
            "adversary-floor",
            "-",
            rational_str(adv),
            f"about {float(adv):.10f}, within 1e-9",
        )
    )
    for l in range(1, cfg.M + 1):
        try:
            ctx = EncodingContext(
                M=cfg.M, n=cfg.n, p=cfg.p, k=cfg.k, T=computer.T, l=l, params=params
            )
        except ValueError as e:
            raise ConfigError(str(e)) from None
        few_good, many_bad = c_uv_values(ctx)
        shown = "irrational exponent" if few_good is None else rational_str(few_good)
        rows.append(("c-uv-good-branch", str(l), shown, "applies when at least l blocks are good"))
        rows.append(
            ("c-uv-bad-branch", str(l), rational_str(many_bad), "applies otherwise")
        )
    summary = {
        "M": cfg.M,
        "n": cfg.n,
        "k": cfg.k,
        "epsilon": rational_str(as_rational(cfg.epsilon)),
        "c": rational_str(as_rational(cfg.c)),
        "reference_upper": upper,
        "subject_T": computer.T,
    }
    return Report(
        name="bounds",
        header=("bound", "l", "value", "note"),
        rows=tuple(rows),
        summary=summary,
        ok=True,
    )


_LEMMA_CHECKS = (
    ("length-ok", lambda a: a.length_matches),
    ("rank-ok", lambda a: a.rank_ok),
    ("mass-ok", lambda a: a.mass_ok),
    ("certificate-ok", lambda a: a.certificate_ok),
    ("selection-distinct", lambda a: a.selection_distinct),
    ("selection-floor", lambda a: a.selection_floor_ok),
    ("selection-cross", lambda a: a.selection_cross_ok),
    ("selection-m", lambda a: a.selection_m_ok),
    ("distance-ok", lambda a: a.distance_ok),
)


def cmd_lemmas(cfg: ExperimentConfig) -> Report:
    if cfg.scheme == "single":
        raise ConfigError("lemma audits apply to the multi scheme")
    computer, advice_fn = resolve_subject(cfg)
    ctx = _context(cfg, computer)
    rows = []
    failed = 0
    for instance in _instances(cfg):
        audit = audit_instance(ctx, computer, advice_fn, instance)
        flags = [check(audit) for _, check in _LEMMA_CHECKS]
        if not all(flags):
            failed += 1
        rows.append(
            (
                audit.instance,
                str(audit.case),
                str(audit.length),
                str(audit.expected),
                *(_PASS if flag else _FAIL for flag in flags),
                _PASS if all(flags) else _FAIL,
            )
        )
    summary = {
        "subject": cfg.subject,
        "l": cfg.l,
        "rows": len(rows),
        "failed": failed,
    }
    return Report(
        name="lemmas",
        header=(
            "instance",
            "case",
            "length",
            "expected",
            *(name for name, _ in _LEMMA_CHECKS),
            "status",
        ),
        rows=tuple(rows),
        summary=summary,
        ok=failed == 0,
    )


COMMANDS = {
    "simulate": cmd_simulate,
    "roundtrip": cmd_roundtrip,
    "bounds": cmd_bounds,
    "lemmas": cmd_lemmas,
}

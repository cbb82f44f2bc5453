"""Seeded Monte Carlo attack campaigns.

A campaign runs many independent trials against one ring instance.  Each trial
tosses a fair coin for the ground truth (PLWE with a fresh secret, or plain
uniform pairs), derives a private random stream from (master seed, trial
index), generates its samples, runs the configured attack, and records verdict
versus truth.  Reports are deterministic functions of (config, seed): the JSON
digest excludes only wall-clock fields.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analysis
from .analysis import (
    classify_variance_case,
    delta_probability,
    extended_gate,
    monte_carlo_delta,
    posterior_bounds,
    sigma_bar,
)
from .attacks import (
    VERDICT_NOT_PLWE,
    AttackVerdict,
    Decision,
    SigmaTable,
    build_sigma_table_fq,
    build_sigma_table_trace,
    extended_attack,
    small_set_attack,
    small_set_attack_trace,
    small_values_attack,
    small_values_attack_trace,
    unbounded_small_values_attack,
)
from .fields import ExtFieldCtx, FieldElement, mult_order
from .rings import RingPoly, RqContext, load_ring_doc
from .samplers import (
    BudgetExhausted,
    GaussianSpec,
    PlweInstance,
    Sample,
    plwe_oracle,
    plwe_oracle_rq0,
    sample_rq0,
    uniform_oracle,
    uniform_oracle_rq0,
)


class ConfigError(Exception):
    """Malformed experiment configuration; the message names the field."""


class PreconditionRefused(Exception):
    """An attack precondition failed; the message shows both sides."""


BASIC_FAMILIES = ("small_set", "small_values")
EXTENDED_FAMILIES = ("extended_small_set", "extended_small_values")
FAMILIES = BASIC_FAMILIES + EXTENDED_FAMILIES + ("unbounded_small_values",)
MODES = ("fq", "trace")


@dataclass(frozen=True)
class AttackSpec:
    family: str
    mode: str
    M: int = 0
    M0: int = 0
    ell: int = 0
    alpha: Optional[int] = None
    n: Optional[int] = None
    a: Optional[int] = None
    delta: Optional[float | str] = None
    trials: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    ring: RqContext
    gauss: GaussianSpec
    attack: AttackSpec
    seed: int
    honest_sampling: bool = False
    table_cap: int = analysis.DEFAULT_TABLE_CAP
    rq0_budget: int = 10**8
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}.{key}: missing")
    return doc[key]


def config_from_dict(doc: dict) -> ExperimentConfig:
    inst = _need(doc, "instance", "config")
    try:
        ring = load_ring_doc(inst)
    except ValueError as exc:
        raise ConfigError(f"instance: {exc}") from exc
    sigma = float(_need(inst, "sigma", "instance"))
    truncated = bool(_need(inst, "truncated", "instance"))
    try:
        gauss = GaussianSpec(sigma, truncated)
    except ValueError as exc:
        raise ConfigError(f"instance.sigma: {exc}") from exc

    att = _need(doc, "attack", "config")
    family = _need(att, "family", "attack")
    if family not in FAMILIES:
        raise ConfigError(f"attack.family: unknown family {family!r}")
    mode = _need(att, "mode", "attack")
    if mode not in MODES:
        raise ConfigError(f"attack.mode: must be one of {MODES}")
    trials = int(att.get("trials", 1))
    if trials < 1:
        raise ConfigError("attack.trials: must be >= 1")
    spec = AttackSpec(
        family=family,
        mode=mode,
        M=int(att.get("M", 0)),
        M0=int(att.get("M0", 0)),
        ell=int(att.get("ell", 0)),
        alpha=att.get("alpha"),
        n=att.get("n"),
        a=att.get("a"),
        delta=att.get("delta"),
        trials=trials,
    )
    if family == "unbounded_small_values":
        if spec.ell < 1:
            raise ConfigError("attack.ell: must be >= 1 for the unbounded family")
    elif spec.M < 1:
        raise ConfigError("attack.M: must be >= 1")
    if family in EXTENDED_FAMILIES:
        if spec.M0 < 1:
            raise ConfigError("attack.M0: must be >= 1 for extended families")
        if spec.M0 > spec.M:
            raise ConfigError("attack.M0: must not exceed attack.M")
    if mode == "fq" and spec.alpha is None:
        raise ConfigError("attack.alpha: required in fq mode")
    if mode == "trace" and (spec.n is None or spec.a is None):
        raise ConfigError("attack.n/attack.a: required in trace mode")

    seed = int(doc.get("seed", 0))
    if not (0 <= seed < 2**64):
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    sampling = doc.get("sampling", {})
    return ExperimentConfig(
        ring=ring,
        gauss=gauss,
        attack=spec,
        seed=seed,
        honest_sampling=bool(sampling.get("honest", False)),
        table_cap=int(doc.get("table_cap", analysis.DEFAULT_TABLE_CAP)),
        rq0_budget=int(doc.get("rq0_budget", 10**8)),
        raw=doc,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
    return config_from_dict(doc)


# ---------------------------------------------------------------------------
# attack plan: resolved parameters, tables and preconditions


@dataclass
class AttackPlan:
    cfg: ExperimentConfig
    alpha: Optional[FieldElement] = None
    ext: Optional[ExtFieldCtx] = None
    order: int = 0
    sigma_bar: float = 0.0
    table: Optional[SigmaTable] = None
    delta: Optional[float] = None
    gate: Optional[analysis.GateReport] = None
    preconditions: list[str] = field(default_factory=list)

    @property
    def samples_per_trial(self) -> int:
        att = self.cfg.attack
        return att.ell if att.family == "unbounded_small_values" else att.M


def _check(plan: AttackPlan, ok: bool, text: str) -> None:
    plan.preconditions.append(("ok: " if ok else "violated: ") + text)
    if not ok:
        raise PreconditionRefused(text)


def build_plan(cfg: ExperimentConfig, rng: np.random.Generator | None = None) -> AttackPlan:
    """Resolve evaluation points, tables, variance case and delta; refuse when
    a documented precondition fails."""
    att = cfg.attack
    ring = cfg.ring
    q = ring.q
    p0 = cfg.gauss.p0
    plan = AttackPlan(cfg)

    if att.mode == "fq":
        alpha = ring.modulus.element(int(att.alpha))
        # alpha must be a root of f mod q
        acc = 0
        for c in reversed(ring.f_mod):
            acc = (acc * alpha.value + c) % q
        if acc != 0:
            raise ConfigError(f"attack.alpha: {alpha.value} is not a root of f mod {q}")
        plan.alpha = alpha
        plan.order = 0 if alpha.value == 0 else mult_order(alpha)
        case = classify_variance_case("fq", alpha, plan.order, ring.N)
        plan.sigma_bar = sigma_bar(case, cfg.gauss.sigma)
        if plan.order:
            r_eff, blocklen = plan.order, max(1, ring.N // plan.order)
        else:
            # at the root 0 only the constant error coefficient survives
            r_eff, blocklen = 1, 1
    else:
        n = int(att.n)
        a_elt = ring.modulus.element(int(att.a))
        from .fields import is_irreducible_binomial
        from .rings import find_binomial_factors

        if n < 2 or n > ring.N:
            raise ConfigError(f"attack.n: must satisfy 2 <= n <= {ring.N}")
        if not is_irreducible_binomial(n, a_elt):
            raise ConfigError(f"attack.a: x^{n} - {a_elt.value} is reducible mod {q}")
        if not any(v.value == a_elt.value for v, _ in find_binomial_factors(ring, n)):
            raise ConfigError(
                f"attack.a: x^{n} - {a_elt.value} does not divide f mod {q}"
            )
        plan.ext = ExtFieldCtx(n, a_elt)
        plan.order = mult_order(a_elt)
        n_prime = max(1, ring.N // n)
        case = classify_variance_case("trace", a_elt, plan.order, n_prime)
        plan.sigma_bar = sigma_bar(case, cfg.gauss.sigma)
        r_eff = plan.order
        blocklen = max(1, n_prime // plan.order)

    family = att.family
    if family in ("small_set", "extended_small_set"):
        if att.mode == "fq":
            plan.table = build_sigma_table_fq(
                plan.alpha, r_eff, ring.N, cfg.gauss.sigma, cfg.table_cap
            )
        else:
            plan.table = build_sigma_table_trace(
                plan.ext.a, r_eff, blocklen, cfg.gauss.sigma, cfg.table_cap
            )
        budget = q * p0**r_eff
        _check(
            plan,
            plan.table.size < budget,
            f"|Sigma| = {plan.table.size} < q*p0^r = {budget:.1f}",
        )
    elif family in ("small_values", "extended_small_values"):
        lhs, rhs = 2.0 * plan.sigma_bar, q / 4.0
        if att.mode == "fq":
            _check(plan, lhs <= rhs, f"2*sigma_bar = {lhs:.2f} <= q/4 = {rhs:.2f}")
        else:
            _check(plan, lhs < rhs, f"2*sigma_bar = {lhs:.2f} < q/4 = {rhs:.2f}")
    else:  # unbounded_small_values
        if att.delta is None or att.delta == "series":
            plan.delta = delta_probability(q, plan.sigma_bar).delta
        elif att.delta == "mc":
            mc_rng = rng if rng is not None else np.random.default_rng([cfg.seed, 2**32])
            plan.delta = monte_carlo_delta(q, plan.sigma_bar, mc_rng)
        else:
            plan.delta = float(att.delta)
        big_delta = plan.delta - float(analysis.uniform_offset(q))
        _check(plan, big_delta > 0, f"Delta = {big_delta:.6g} > 0")

    if family in EXTENDED_FAMILIES:
        _check(plan, att.M0 <= att.M, f"M0 = {att.M0} <= M = {att.M}")
        if plan.table is not None:
            plan.gate = extended_gate(plan.table.size, q, p0, att.M0, r_eff)
        else:
            plan.gate = extended_gate(analysis.quarter_count(q), q, p0, att.M0, 1)
    return plan


# ---------------------------------------------------------------------------
# trial execution


def _generate_samples(
    plan: AttackPlan, truth_plwe: bool, rng: np.random.Generator
) -> tuple[list[Sample], int, Optional[RingPoly]]:
    """Samples for one trial plus the oracle invocation count and the secret
    (None on uniform trials)."""
    cfg = plan.cfg
    m = plan.samples_per_trial
    ring = cfg.ring
    secret = None
    invocations = 0
    samples: list[Sample] = []
    if plan.ext is None:
        if truth_plwe:
            inst = PlweInstance.generate(ring, cfg.gauss, rng)
            secret = inst.secret_for_tests()
            for _ in range(m):
                samples.append(plwe_oracle(inst, rng))
        else:
            for _ in range(m):
                samples.append(uniform_oracle(ring, rng))
        invocations = m
    elif cfg.honest_sampling:
        if truth_plwe:
            inst = PlweInstance.generate(ring, cfg.gauss, rng)
            secret = inst.secret_for_tests()
            source = lambda: plwe_oracle(inst, rng)
        else:
            source = lambda: uniform_oracle(ring, rng)
        for _ in range(m):
            draw = sample_rq0(source, plan.ext, cfg.rq0_budget)
            samples.append(draw.sample)
            invocations += draw.count
    else:
        if truth_plwe:
            inst = PlweInstance.generate(ring, cfg.gauss, rng)
            secret = inst.secret_for_tests()
            for _ in range(m):
                samples.append(plwe_oracle_rq0(inst, plan.ext, rng))
        else:
            for _ in range(m):
                samples.append(uniform_oracle_rq0(ring, plan.ext, rng))
        invocations = m
    return samples, invocations, secret


def run_attack_once(plan: AttackPlan, samples: list[Sample]):
    """Dispatch the configured attack on one sample batch."""
    att = plan.cfg.attack
    if att.family == "small_set":
        if plan.ext is None:
            return small_set_attack(samples, plan.table, plan.alpha)
        return small_set_attack_trace(samples, plan.table, plan.ext)
    if att.family == "small_values":
        if plan.ext is None:
            return small_values_attack(samples, plan.alpha)
        return small_values_attack_trace(samples, plan.ext)
    if att.family == "extended_small_set":
        r_eff = plan.table.r
        if plan.ext is None:
            sub = lambda chunk: small_set_attack(chunk, plan.table, plan.alpha)
        else:
            sub = lambda chunk: small_set_attack_trace(chunk, plan.table, plan.ext)
        return extended_attack(samples, att.M0, sub, r_eff, plan.cfg.gauss.p0)
    if att.family == "extended_small_values":
        if plan.ext is None:
            sub = lambda chunk: small_values_attack(chunk, plan.alpha)
        else:
            sub = lambda chunk: small_values_attack_trace(chunk, plan.ext)
        return extended_attack(samples, att.M0, sub, 1, plan.cfg.gauss.p0)
    if plan.ext is None:
        return unbounded_small_values_attack(samples, plan.delta, alpha=plan.alpha)
    return unbounded_small_values_attack(samples, plan.delta, ext=plan.ext)


def _says_plwe(outcome) -> bool:
    if isinstance(outcome, Decision):
        return outcome.is_plwe
    return outcome.kind != VERDICT_NOT_PLWE


def run_trial(plan: AttackPlan, trial_index: int, record: list | None = None) -> dict:
    rng = np.random.default_rng([plan.cfg.seed, trial_index])
    truth_plwe = bool(rng.integers(0, 2))
    t0 = time.perf_counter()
    try:
        samples, invocations, secret = _generate_samples(plan, truth_plwe, rng)
    except BudgetExhausted as exc:
        return {
            "trial": trial_index,
            "truth": "plwe" if truth_plwe else "uniform",
            "error": str(exc),
            "correct": False,
            "oracle_invocations": plan.cfg.rq0_budget,
            "wall_time_ms": 1000.0 * (time.perf_counter() - t0),
        }
    outcome = run_attack_once(plan, samples)
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    if record is not None:
        record.extend(samples)
    row = {
        "trial": trial_index,
        "truth": "plwe" if truth_plwe else "uniform",
        "outcome": outcome.to_dict(),
        "correct": _says_plwe(outcome) == truth_plwe,
        "oracle_invocations": invocations,
        "samples_used": len(samples),
        "wall_time_ms": wall_ms,
    }
    if truth_plwe and isinstance(outcome, AttackVerdict) and secret is not None:
        row["true_value_survives"] = _true_value(plan, secret) in outcome.survivors
    return row


def _true_value(plan: AttackPlan, secret: RingPoly) -> int:
    """The quantity the basic attacks guess: s(alpha), or Tr(s(alpha)) in
    trace mode."""
    from .rings import eval_poly

    if plan.ext is None:
        return eval_poly(secret, plan.alpha).value
    from .fields import trace

    return trace(eval_poly(secret, plan.ext.alpha())).value


# ---------------------------------------------------------------------------
# campaign report


@dataclass
class CampaignReport:
    config_echo: dict
    plan_summary: dict
    trials: list[dict]

    @property
    def n_trials(self) -> int:
        return len(self.trials)

    def rate(self, truth: str) -> float | None:
        rows = [t for t in self.trials if t["truth"] == truth]
        if not rows:
            return None
        return sum(1 for t in rows if t["correct"]) / len(rows)

    @property
    def accuracy(self) -> float:
        return sum(1 for t in self.trials if t["correct"]) / len(self.trials)

    def to_dict(self) -> dict:
        return {
            "config": self.config_echo,
            "plan": self.plan_summary,
            "aggregate": {
                "trials": self.n_trials,
                "accuracy": self.accuracy,
                "correct_on_plwe": self.rate("plwe"),
                "correct_on_uniform": self.rate("uniform"),
                "total_oracle_invocations": sum(
                    t.get("oracle_invocations", 0) for t in self.trials
                ),
                "mean_oracle_invocations": sum(
                    t.get("oracle_invocations", 0) for t in self.trials
                )
                / self.n_trials,
            },
            "trials": self.trials,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest_json(self) -> str:
        """Deterministic serialization: wall-clock fields stripped."""

        def strip(obj):
            if isinstance(obj, dict):
                return {k: strip(v) for k, v in obj.items() if k != "wall_time_ms"}
            if isinstance(obj, list):
                return [strip(v) for v in obj]
            return obj

        return json.dumps(strip(self.to_dict()), sort_keys=True)


def _plan_summary(plan: AttackPlan) -> dict:
    out: dict = {
        "mode": "trace" if plan.ext is not None else "fq",
        "order": plan.order,
        "sigma_bar": plan.sigma_bar,
        "preconditions": list(plan.preconditions),
    }
    if plan.alpha is not None:
        out["alpha"] = plan.alpha.value
    if plan.ext is not None:
        out["n"] = plan.ext.n
        out["a"] = plan.ext.a.value
    if plan.table is not None:
        out["sigma_table_size"] = plan.table.size
        out["sigma_table_analytic_bound"] = plan.table.analytic_bound
        att = plan.cfg.attack
        q, p0 = plan.cfg.ring.q, plan.cfg.gauss.p0
        out["predicted_bounds"] = {
            "M": att.M,
            "vote_posterior": posterior_bounds(
                "small_set",
                plan.cfg.gauss.truncated,
                M=max(att.M, 1),
                q=q,
                sigma_size=plan.table.analytic_bound,
                r=plan.table.r,
                p0=p0,
            ).vote_posterior,
        }
    if plan.delta is not None:
        out["delta"] = plan.delta
    if plan.gate is not None:
        out["extended_gate"] = {
            "lhs": plan.gate.lhs,
            "rhs": plan.gate.rhs,
            "satisfied": plan.gate.satisfied,
        }
    return out


def run_campaign(
    cfg: ExperimentConfig,
    threads: int = 1,
    record: list | None = None,
) -> CampaignReport:
    plan = build_plan(cfg)
    trials = cfg.attack.trials
    # workers rebuild the config from the raw document; recording needs the
    # in-process sample list, so it forces the sequential path
    if threads > 1 and cfg.raw and record is None:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(_trial_worker, [(cfg.raw, i) for i in range(trials)])
            )
    else:
        rows = [run_trial(plan, i, record) for i in range(trials)]
    echo = dict(cfg.raw) if cfg.raw else {}
    echo.setdefault("seed", cfg.seed)
    return CampaignReport(echo, _plan_summary(plan), rows)


def _trial_worker(args: tuple[dict, int]) -> dict:
    doc, index = args
    cfg = config_from_dict(doc)
    return run_trial(build_plan(cfg), index)


# ---------------------------------------------------------------------------
# sample files (one JSON document per line)


def save_samples(path: str, samples: list[Sample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_doc()) + "\n")


def load_samples(path: str, ring: RqContext) -> list[Sample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not any(line.strip() for line in lines):
        raise ConfigError(f"sample file {path}: empty")
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            a = ring.poly(doc["a"])
            b = ring.poly(doc["b"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"sample file {path}: line {lineno}: {exc}") from exc
        out.append(Sample(a, b))
    return out

"""JSON run-configuration parsing with fail-fast validation.

Field names mirror the runtime types one-to-one; unknown keys are rejected
so typos surface immediately instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .book import ExoticBook
from .costs import CostSpec
from .errors import ConfigError, DomainError
from .market import MarketView, SpotState, SvParams
from .pricing import VanillaOption

VEGA_HEDGE = "vega_hedge"
BUCKET_CANCELLATION = "bucket_cancellation"


@dataclass(frozen=True)
class RunSettings:
    """Command-level sizes; every field has a desk-scale default."""

    grid: int = 512
    oracle_grid: int = 2000
    n_paths: int = 100_000
    n_steps: int = 200
    seed: int = 20_240_101
    bump: float = 1e-4


@dataclass(frozen=True)
class RunConfig:
    params: SvParams
    state: SpotState
    options: list[VanillaOption]
    book: ExoticBook
    book_delta: float | None
    gamma: float
    horizon: float
    q0: np.ndarray
    costs: list[CostSpec]
    problem: str
    run: RunSettings = field(default_factory=RunSettings)
    view_override: MarketView | None = None


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing field(s) in {where}: {sorted(missing)}")


def _number(section: dict, key: str, where: str) -> float:
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _parse_cost(entry: dict, where: str) -> CostSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"{where} must be an object")
    _require_keys(entry, {"variant", "eta", "k"}, {"variant", "eta"}, where)
    variant = entry["variant"]
    try:
        if variant == "quadratic":
            return CostSpec.quadratic(_number(entry, "eta", where))
        if variant == "power":
            if "k" not in entry:
                raise ConfigError(f"{where}: power costs need an exponent k")
            return CostSpec.power(_number(entry, "eta", where), _number(entry, "k", where))
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: variant must be 'quadratic' or 'power', got {variant!r}")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    _require_keys(
        raw,
        {"model", "options", "book", "hedge", "run", "view_override"},
        {"model", "options", "book", "hedge"},
        "config",
    )

    model = raw["model"]
    _require_keys(
        model,
        {"xi", "rho", "kappa_p", "theta_p", "kappa_q", "theta_q", "mu", "s0", "nu0"},
        {"xi", "rho", "kappa_p", "theta_p", "kappa_q", "theta_q", "s0", "nu0"},
        "model",
    )
    params = SvParams(
        xi=_number(model, "xi", "model"),
        rho=_number(model, "rho", "model"),
        kappa_p=_number(model, "kappa_p", "model"),
        theta_p=_number(model, "theta_p", "model"),
        kappa_q=_number(model, "kappa_q", "model"),
        theta_q=_number(model, "theta_q", "model"),
        mu=_number(model, "mu", "model") if "mu" in model else 0.0,
    )
    try:
        state = SpotState(s0=_number(model, "s0", "model"), nu0=_number(model, "nu0", "model"))
    except DomainError as exc:
        raise ConfigError(f"model: {exc}") from exc

    if not isinstance(raw["options"], list) or not raw["options"]:
        raise ConfigError("options must be a non-empty list")
    options = []
    for idx, entry in enumerate(raw["options"]):
        where = f"options[{idx}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be an object")
        _require_keys(entry, {"strike", "maturity", "kind"}, {"strike", "maturity"}, where)
        kind = entry.get("kind", "call")
        try:
            options.append(
                VanillaOption(
                    strike=_number(entry, "strike", where),
                    maturity=_number(entry, "maturity", where),
                    kind=kind,
                )
            )
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from exc

    book_raw = raw["book"]
    _require_keys(book_raw, {"vega_mm", "delta"}, {"vega_mm"}, "book")
    if not isinstance(book_raw["vega_mm"], list):
        raise ConfigError("book.vega_mm must be a list of numbers")
    book = ExoticBook(vega_mm=np.asarray(book_raw["vega_mm"], dtype=float))
    book_delta = _number(book_raw, "delta", "book") if "delta" in book_raw else None

    hedge = raw["hedge"]
    _require_keys(
        hedge,
        {"gamma", "horizon", "q0", "costs", "problem"},
        {"gamma", "horizon", "q0", "costs", "problem"},
        "hedge",
    )
    if hedge["problem"] not in (VEGA_HEDGE, BUCKET_CANCELLATION):
        raise ConfigError(
            f"hedge.problem must be '{VEGA_HEDGE}' or '{BUCKET_CANCELLATION}'"
        )
    if not isinstance(hedge["q0"], list):
        raise ConfigError("hedge.q0 must be a list of numbers")
    if not isinstance(hedge["costs"], list):
        raise ConfigError("hedge.costs must be a list of cost objects")
    costs = [_parse_cost(c, f"hedge.costs[{i}]") for i, c in enumerate(hedge["costs"])]

    n = len(options)
    if len(hedge["q0"]) != n or len(book.vega_mm) != n or len(costs) != n:
        raise ConfigError(
            "options, hedge.q0, book.vega_mm and hedge.costs must share one length"
        )

    run = RunSettings()
    if "run" in raw:
        section = raw["run"]
        _require_keys(
            section,
            {"grid", "oracle_grid", "n_paths", "n_steps", "seed", "bump"},
            set(),
            "run",
        )
        values = {}
        for key in ("grid", "oracle_grid", "n_paths", "n_steps", "seed"):
            if key in section:
                value = section[key]
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"run.{key} must be an integer")
                values[key] = value
        if "bump" in section:
            values["bump"] = _number(section, "bump", "run")
        run = RunSettings(**values)

    view_override = None
    if "view_override" in raw:
        section = raw["view_override"]
        _require_keys(section, {"sharpe", "zeta"}, {"sharpe", "zeta"}, "view_override")
        view_override = MarketView(
            sharpe=_number(section, "sharpe", "view_override"),
            zeta=_number(section, "zeta", "view_override"),
        )

    return RunConfig(
        params=params,
        state=state,
        options=options,
        book=book,
        book_delta=book_delta,
        gamma=_number(hedge, "gamma", "hedge"),
        horizon=_number(hedge, "horizon", "hedge"),
        q0=np.asarray(hedge["q0"], dtype=float),
        costs=costs,
        problem=hedge["problem"],
        run=run,
        view_override=view_override,
    )

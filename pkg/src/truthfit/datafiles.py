"""CSV data sets and JSON mechanism configs for the command-line tools.

CSV layout: header ``x1,...,xd,y`` (just ``y`` when d = 0), one agent per
row, decimal floats at 17 significant digits so a write/read round trip
is bit-exact.  Mechanism configs are JSON objects carrying a ``kind`` tag
plus the fields of the corresponding config type; 0-based index sets,
median sides as "left"/"right", infinities as the strings "inf"/"-inf".
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .audit import GenMedParams, GrlParams, MechanismKind, MechanismSpec
from .core import DataSet, MedianSide
from .crm import CrmConfig
from .erm import L1Config, PhantomTerm, QuantileConfig
from .errors import ConfigurationError
from .impartial import AffineResponse, ImpartialConfig, PwlResponse, swap_config
from .separability import AgentPartition


class InputError(ValueError):
    """Malformed user-supplied file or value (CLI exit code 2)."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_dataset(path, data: DataSet) -> None:
    header = [f"x{k + 1}" for k in range(data.d)] + ["y"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row, y in zip(data.xs, data.ys):
            writer.writerow([_fmt(v) for v in row] + [_fmt(y)])


def read_dataset(path) -> DataSet:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read data file: {exc}") from exc
    if not rows:
        raise InputError("empty data file")
    header = [h.strip() for h in rows[0]]
    if header[-1] != "y" or header[:-1] != [f"x{k + 1}" for k in range(len(header) - 1)]:
        raise InputError(f"expected header x1,...,xd,y, got {header}")
    d = len(header) - 1
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != d + 1:
            raise InputError(f"line {lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            values = [float(v) for v in row]
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        xs.append(values[:d])
        ys.append(values[d])
    if not ys:
        raise InputError("data file has a header but no rows")
    try:
        return DataSet(np.array(xs, dtype=float).reshape(len(ys), d),
                       np.array(ys, dtype=float))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# --------------------------------------------------------------------------
# extended reals and median sides


def parse_extended(value) -> float:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return math.inf
        if text in ("-inf", "-infinity"):
            return -math.inf
        try:
            return float(text)
        except ValueError as exc:
            raise InputError(f"not a number: {value!r}") from exc
    return float(value)


def extended_jsonable(value: float):
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return float(value)


def _parse_side(value, default=MedianSide.LEFT) -> MedianSide:
    if value is None:
        return default
    if value == "left":
        return MedianSide.LEFT
    if value == "right":
        return MedianSide.RIGHT
    raise InputError(f'median side must be "left" or "right", got {value!r}')


def _side_name(side: MedianSide) -> str:
    return "left" if side is MedianSide.LEFT else "right"


# --------------------------------------------------------------------------
# mechanism configs


def load_mechanism_config(path) -> MechanismSpec:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from exc
    return parse_mechanism(obj)


def parse_mechanism(obj) -> MechanismSpec:
    """Build a MechanismSpec from a JSON-shaped dict."""
    if not isinstance(obj, dict):
        raise InputError("mechanism config must be a JSON object")
    kind_name = obj.get("kind")
    if kind_name == "impartial-swap":
        # resolved against the data at bind time via cli; handled upstream
        raise InputError("impartial-swap must be resolved with a data set first")
    try:
        kind = MechanismKind(kind_name)
    except ValueError:
        names = ", ".join(k.value for k in MechanismKind)
        raise InputError(f"unknown mechanism kind {kind_name!r}; expected one of {names}")
    traversal = obj.get("traversal_flag")
    if traversal is not None and not isinstance(traversal, bool):
        raise InputError("traversal_flag must be a boolean")
    try:
        params = _parse_params(kind, obj)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad {kind.value} config: {exc}") from exc
    return MechanismSpec(kind, params, traversal)


def _parse_params(kind: MechanismKind, obj: dict):
    if kind is MechanismKind.OLS:
        return None
    if kind is MechanismKind.L1ERM:
        weights = obj.get("weights")
        phantoms = tuple(
            PhantomTerm(anchor=tuple(p["anchor"]), target=float(p["target"]),
                        weight=float(p.get("weight", 1.0)))
            for p in obj.get("phantoms", ())
        )
        return L1Config(
            weights=None if weights is None else tuple(float(w) for w in weights),
            phantoms=phantoms,
            drift=float(obj.get("drift", 0.0)),
        )
    if kind is MechanismKind.QUANTILE:
        if "q" not in obj:
            raise InputError("quantile config needs q")
        return QuantileConfig(float(obj["q"]))
    if kind is MechanismKind.CRM:
        if "s" not in obj or "sprime" not in obj:
            raise InputError("crm config needs index sets s and sprime")
        return CrmConfig(
            s=tuple(int(i) for i in obj["s"]),
            sprime=tuple(int(i) for i in obj["sprime"]),
            outer_side=_parse_side(obj.get("outer_side")),
            inner_side=_parse_side(obj.get("inner_side")),
            intercept_side=_parse_side(obj.get("intercept_side")),
        )
    if kind is MechanismKind.GRL:
        for key in ("s", "sprime", "k", "kprime"):
            if key not in obj:
                raise InputError(f"grl config needs {key}")
        return GrlParams(
            s=tuple(int(i) for i in obj["s"]),
            sprime=tuple(int(i) for i in obj["sprime"]),
            k=int(obj["k"]), kprime=int(obj["kprime"]),
        )
    if kind is MechanismKind.GRH:
        if "sets" not in obj or "ranks" not in obj:
            raise InputError("grh config needs sets and ranks")
        return AgentPartition(
            sets=tuple(tuple(int(i) for i in s) for s in obj["sets"]),
            ranks=tuple(int(k) for k in obj["ranks"]),
        )
    if kind is MechanismKind.IMPARTIAL:
        if "g" not in obj or "c" not in obj:
            raise InputError("impartial config needs response list g and constant c")
        return ImpartialConfig(
            g=tuple(_parse_response(entry) for entry in obj["g"]),
            c=float(obj["c"]),
        )
    if kind is MechanismKind.GENERALIZED_MEDIAN:
        if "phantoms" not in obj:
            raise InputError("generalized-median config needs phantoms")
        return GenMedParams(tuple(parse_extended(v) for v in obj["phantoms"]))
    raise InputError(f"unhandled mechanism kind {kind!r}")


def _parse_response(entry: dict):
    rtype = entry.get("type")
    if rtype == "affine":
        return AffineResponse(a=tuple(float(v) for v in entry["a"]),
                              b=tuple(float(v) for v in entry["b"]))
    if rtype == "pwl":
        values = [[float(v) for v in row] for row in entry["values"]]
        return PwlResponse(breakpoints=tuple(float(v) for v in entry["breakpoints"]),
                           values=tuple(tuple(row) for row in values))
    raise InputError(f'impartial response type must be "affine" or "pwl", got {rtype!r}')


def resolve_mechanism(name: str | None, config_path, data: DataSet | None) -> MechanismSpec:
    """CLI-facing resolution of --mechanism plus optional --config.

    ``name`` may be a mechanism kind, "impartial-swap" (built from the
    data), or a preset "brown-mood"/"tukey" (resistant lines over the
    loaded data).  A config file, when given, must agree with the name.
    """
    from .grh import preset_partition  # local import to avoid cycles

    if name in ("brown-mood", "tukey"):
        if data is None:
            raise InputError(f"{name} preset needs a data set")
        part = preset_partition(data, name)
        return MechanismSpec(MechanismKind.GRH, part)
    if name == "impartial-swap":
        if data is None:
            raise InputError("impartial-swap needs a data set")
        return MechanismSpec(MechanismKind.IMPARTIAL, swap_config(data))
    if config_path is not None:
        spec = load_mechanism_config(config_path)
        if name is not None and name != spec.kind.value:
            raise InputError(
                f"--mechanism {name} conflicts with config kind {spec.kind.value}"
            )
        return spec
    if name is None:
        raise InputError("need --mechanism or --config")
    try:
        kind = MechanismKind(name)
    except ValueError:
        names = ", ".join(k.value for k in MechanismKind)
        raise InputError(f"unknown mechanism {name!r}; expected one of "
                         f"{names}, brown-mood, tukey, impartial-swap")
    if kind is MechanismKind.OLS:
        return MechanismSpec(kind)
    if kind is MechanismKind.L1ERM:
        return MechanismSpec(kind, L1Config())
    raise InputError(f"mechanism {name} needs a --config file")


def mechanism_jsonable(spec: MechanismSpec) -> dict:
    """Serialize a MechanismSpec back to its JSON config shape."""
    out: dict = {"kind": spec.kind.value}
    if spec.traversal_flag is not None:
        out["traversal_flag"] = spec.traversal_flag
    p = spec.params
    if spec.kind is MechanismKind.L1ERM and p is not None:
        if p.weights is not None:
            out["weights"] = [float(w) for w in p.weights]
        if p.phantoms:
            out["phantoms"] = [
                {"anchor": [float(v) for v in ph.anchor],
                 "target": float(ph.target), "weight": float(ph.weight)}
                for ph in p.phantoms
            ]
        if p.drift:
            out["drift"] = float(p.drift)
    elif spec.kind is MechanismKind.QUANTILE:
        out["q"] = float(p.q)
    elif spec.kind is MechanismKind.CRM:
        out.update(s=list(p.s), sprime=list(p.sprime),
                   outer_side=_side_name(p.outer_side),
                   inner_side=_side_name(p.inner_side),
                   intercept_side=_side_name(p.intercept_side))
    elif spec.kind is MechanismKind.GRL:
        out.update(s=list(p.s), sprime=list(p.sprime), k=p.k, kprime=p.kprime)
    elif spec.kind is MechanismKind.GRH:
        out.update(sets=[list(s) for s in p.sets], ranks=list(p.ranks))
    elif spec.kind is MechanismKind.IMPARTIAL:
        out.update(c=float(p.c), g=[_response_jsonable(g) for g in p.g])
    elif spec.kind is MechanismKind.GENERALIZED_MEDIAN:
        out["phantoms"] = [extended_jsonable(v) for v in p.phantoms]
    return out


def _response_jsonable(resp) -> dict:
    if isinstance(resp, AffineResponse):
        return {"type": "affine", "a": [float(v) for v in resp.a],
                "b": [float(v) for v in resp.b]}
    if isinstance(resp, PwlResponse):
        return {"type": "pwl",
                "breakpoints": [float(v) for v in resp.breakpoints],
                "values": [[float(v) for v in row] for row in resp.values]}
    raise ConfigurationError(f"cannot serialize response {type(resp).__name__}")

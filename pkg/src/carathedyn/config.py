"""Plain-text (TOML) system definitions and the bundled fixtures."""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .system import LocallyConstantFunction, Sft, SuspensionSystem, SystemError_

FIXTURE_NAMES = ("FULL2", "GOLD", "ROOF2", "BERN13", "SRB3")


class ConfigError(ValueError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "exp": math.exp}


def eval_number(value) -> float:
    """Numbers pass through; strings may be arithmetic over log/sqrt/exp."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a number, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported expression {value!r}")

    try:
        return ev(ast.parse(value, mode="eval"))
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {value!r}") from exc


def _function(table: dict, sft: Sft, what: str) -> LocallyConstantFunction:
    try:
        lo, hi = int(table["window_lo"]), int(table["window_hi"])
        raw = table["values"]
    except KeyError as exc:
        raise ConfigError(f"{what}: missing key {exc.args[0]}") from None
    if lo > 0 or hi < 0:
        raise ConfigError(f"{what}: window must satisfy window_lo <= 0 <= window_hi")
    values = {}
    for key, v in raw.items():
        try:
            word = sft.parse(key)
        except ValueError:
            raise ConfigError(f"{what}: unknown symbol in word {key!r}") from None
        if len(word) != hi - lo + 1:
            raise ConfigError(f"{what}: word {key!r} has the wrong length")
        values[word] = eval_number(v)
    f = LocallyConstantFunction(lo, hi, values)
    try:
        f.check(sft, positive=(what == "roof"))
    except SystemError_ as exc:
        raise ConfigError(f"{what}: {exc}") from None
    return f


@dataclass(frozen=True)
class SystemSpec:
    system: SuspensionSystem
    name: str
    description: str
    expansion: tuple[float, ...] | None = None


def parse_system(doc: dict, default_name: str = "") -> SystemSpec:
    try:
        names = tuple(doc["alphabet"])
        rows = doc["transitions"]
        roof_t = doc["roof"]
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]}") from None
    try:
        sft = Sft.from_matrix(rows, names)
    except SystemError_ as exc:
        raise ConfigError(str(exc)) from None
    roof = _function(roof_t, sft, "roof")
    expansion = None
    if "expansion" in doc:
        expansion = tuple(eval_number(doc["expansion"][n]) for n in names)
        if any(v <= 0 for v in expansion):
            raise ConfigError("expansion rates must be positive")
    if "potential" in doc:
        potential = _function(doc["potential"], sft, "potential")
    elif expansion is not None:
        potential = LocallyConstantFunction.per_symbol([-math.log(v) for v in expansion])
    else:
        raise ConfigError("missing key potential")
    k_r = int(doc.get("k_r", 0))
    r_unit = doc.get("r_unit")
    name = str(doc.get("name", default_name))
    try:
        system = SuspensionSystem(sft, roof, potential, k_r, name,
                                  None if r_unit is None else eval_number(r_unit))
    except SystemError_ as exc:
        raise ConfigError(str(exc)) from None
    return SystemSpec(system, name, str(doc.get("description", "")), expansion)


def load_system_file(path: str | Path) -> SystemSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_system(doc, path.stem.upper())


def load_fixture(name: str) -> SystemSpec:
    if name.upper() not in FIXTURE_NAMES:
        raise ConfigError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    text = resources.files("carathedyn.fixtures").joinpath(f"{name.lower()}.toml").read_text(encoding="utf-8")
    return parse_system(tomllib.loads(text), name.upper())


def fixture(name: str) -> SuspensionSystem:
    return load_fixture(name).system

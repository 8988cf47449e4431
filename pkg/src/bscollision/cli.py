"""Command-line front end: ``bscollision {trace,classify,witness,sweep}``.

Every option can also be given in a flat ``key = value`` config file passed
with ``--config``; flags on the command line override file values. Keys are
the long flag names without dashes (``r1``, ``nt``, ``lmax``, ...). Lines
starting with ``#`` are comments.

Exit status: 0 computed (whatever the verdict), 1 bad input, 2 I/O failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import sweep as sw
from . import witnesses as w
from .gaussian import InvalidStateError
from .scattering import ChannelParams, DegenerateSpectrumError, c_series
from ._tolerances import DEFAULT_LMAX, MONOTONE_TOL

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("trace", "classify", "witness", "sweep")


class ConfigError(ValueError):
    pass


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_number(text) -> float:
    """Parse a float, allowing simple arithmetic with ``pi`` (``pi/2``, ``3*pi/4``)."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"cannot parse number {text!r}")

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


@dataclass
class JobConfig:
    command: str
    r1: float = 0.5
    r2: float = 0.4
    phi: float = 0.0
    nt: float = 0.0
    lmax: int = DEFAULT_LMAX
    witness: str = "divisibility"
    xi: float = 1.0
    xi1: float = 1.0
    xi2: float = 0.5
    probes: str = "squeezed"
    delta: Optional[int] = None
    axis1: str = "r1:0:1"
    axis2: str = "r2:0:1"
    res: int = 101
    out: Optional[str] = None
    boundary: Optional[str] = None
    format: str = "csv"
    tol: float = MONOTONE_TOL
    seed: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("r1", "r2", "phi", "nt", "xi", "xi1", "xi2", "tol"):
            setattr(self, name, parse_number(getattr(self, name)))
        for name in ("lmax", "res", "delta", "seed"):
            value = getattr(self, name)
            if value is not None:
                number = parse_number(value)
                if number != int(number):
                    raise ConfigError(f"{name} must be an integer, got {value!r}")
                setattr(self, name, int(number))
        if self.lmax < 0:
            raise ConfigError("lmax must be >= 0")
        if self.res < 2:
            raise ConfigError("res must be >= 2")
        if self.tol < 0:
            raise ConfigError("tol must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.witness not in w.WITNESS_KINDS:
            raise ConfigError(f"witness must be one of {w.WITNESS_KINDS}")
        if self.probes not in ("squeezed", "coherent"):
            raise ConfigError("probes must be squeezed or coherent")
        self.params()

    def params(self) -> ChannelParams:
        return ChannelParams(self.r1, self.r2, self.phi, self.nt)

    @classmethod
    def from_mapping(cls, data: dict) -> "JobConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def as_dict(self) -> dict:
        return asdict(self)


def read_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


# -- output helpers ---------------------------------------------------------


def fmt(x) -> str:
    """Shortest representation that round-trips (at most 17 significant digits)."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _sibling(out: Optional[str], suffix: str) -> Optional[str]:
    if out in (None, "-"):
        return None
    p = Path(out)
    return str(p.with_name(p.stem + suffix + p.suffix))


# -- commands ---------------------------------------------------------------


def cmd_trace(cfg: JobConfig) -> int:
    series = c_series(cfg.lmax, cfg.params())
    lines = ["L,re_c,im_c,abs_c"]
    for L, c in enumerate(series.values):
        lines.append(f"{L},{fmt(c.real)},{fmt(c.imag)},{fmt(abs(c))}")
    _emit("\n".join(lines) + "\n", cfg.out)
    if cfg.delta is not None:
        grains = w.coarse_grain(series, cfg.delta)
        text = "n,abs_c_grain\n" + "".join(f"{n},{fmt(v)}\n" for n, v in enumerate(grains, 1))
        target = _sibling(cfg.out, "_coarse")
        if target is not None:
            Path(target).write_text(text)
    return EXIT_OK


def classify_report(cfg: JobConfig) -> dict:
    series = c_series(max(cfg.lmax, 1), cfg.params())
    result = w.classify_divisibility(series, tol=cfg.tol)
    return {
        "config": cfg.as_dict(),
        "params": cfg.params().as_dict(),
        "horizon": result.horizon,
        "tol": cfg.tol,
        "verdict": result.verdict.value,
        "violation_steps": list(result.violation_steps),
        "singular_steps": list(result.singular_steps),
    }


def cmd_classify(cfg: JobConfig) -> int:
    _emit(json.dumps(classify_report(cfg), sort_keys=True, indent=1) + "\n", cfg.out)
    return EXIT_OK


def cmd_witness(cfg: JobConfig) -> int:
    probe = dict(xi=cfg.xi, xi1=cfg.xi1, xi2=cfg.xi2, probes=cfg.probes)
    result = sw.evaluate_cell(cfg.params(), cfg.witness, max(cfg.lmax, 1), cfg.tol, **probe)
    if cfg.witness == "entanglement":
        probe_text = f"xi={fmt(cfg.xi)}"
    elif cfg.witness in ("fidelity", "relative_entropy"):
        probe_text = f"probes={cfg.probes} xi1={fmt(cfg.xi1)} xi2={fmt(cfg.xi2)}"
    else:
        probe_text = "probes=none"
    flagged = set(result.violation_steps)
    lines = [
        f"# witness={cfg.witness} {probe_text} horizon={result.horizon} verdict={result.verdict.value}",
        "L,value,violation_flag",
    ]
    for L, value in enumerate(result.values):
        lines.append(f"{L},{fmt(value)},{int(L in flagged)}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_sweep(cfg: JobConfig) -> int:
    axis1 = sw.Axis.parse(cfg.axis1, cfg.res)
    axis2 = sw.Axis.parse(cfg.axis2, cfg.res)
    fixed = {"r1": cfg.r1, "r2": cfg.r2, "phi": cfg.phi, "n_T": cfg.nt}
    region = sw.scan(
        axis1,
        axis2,
        fixed,
        witness=cfg.witness,
        L_max=max(cfg.lmax, 1),
        tol=cfg.tol,
        workers=sw.default_workers(),
        xi=cfg.xi,
        xi1=cfg.xi1,
        xi2=cfg.xi2,
        probes=cfg.probes,
    )
    _emit(region.to_json() if cfg.format == "json" else region.to_csv(), cfg.out)
    if cfg.boundary:
        Path(cfg.boundary).write_text(
            sw.extract_boundary(region).to_csv((axis1.name, axis2.name))
        )
    return EXIT_OK


_HANDLERS = {"trace": cmd_trace, "classify": cmd_classify, "witness": cmd_witness, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    for name, help_text in [
        ("r1", "BS1 reflectivity"),
        ("r2", "BS2 reflectivity (memory)"),
        ("phi", "phase shift in radians; 'pi/2' style input accepted"),
        ("nt", "thermal photon number of the environment"),
        ("lmax", "number of collisions (horizon)"),
        ("witness", "divisibility | entanglement | concurrence | fidelity | relative_entropy"),
        ("xi", "TMSV squeezing for the entanglement witness"),
        ("xi1", "first probe parameter"),
        ("xi2", "second probe parameter"),
        ("probes", "squeezed | coherent"),
        ("delta", "grain size for coarse-grained traces"),
        ("axis1", "sweep axis name:min:max[:n]"),
        ("axis2", "sweep axis name:min:max[:n]"),
        ("res", "default points per sweep axis"),
        ("out", "output path (default stdout)"),
        ("boundary", "sweep only: also write the extracted boundary here"),
        ("format", "csv | json (sweep)"),
        ("tol", "monotonicity tolerance"),
        ("seed", "random seed, recorded in reports"),
    ]:
        common.add_argument(f"--{name}", default=None, help=help_text)

    parser = argparse.ArgumentParser(prog="bscollision", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HANDLERS[name].__doc__ or name)
    return parser


def load_config(argv=None) -> JobConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
        values.pop("command", None)
    for key, value in vars(ns).items():
        if key in ("config", "command") or value is None:
            continue
        values[key] = value
    values["command"] = ns.command
    return JobConfig.from_mapping(values)


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except OSError as exc:
        print(f"bscollision: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"bscollision: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return _HANDLERS[cfg.command](cfg)
    except (InvalidStateError, DegenerateSpectrumError, w.SingularStepError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"bscollision: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"bscollision: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"bscollision: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: classification, spectra, windings, sweeps.

Commands
    classify   canonical class of a boundary condition
    spectrum   edge-mode branches as CSV rows (kx, omega, branch_id)
    winding    one of the three scattering windings (chern|levinson|infinity)
    verify     the full identity check C_+ = n_b + w_inf plus the oracle
    sweep      randomized per-class verification summary

Configuration precedence: command-line flags > config file (--config, flat
``key = value`` lines) > environment variables (prefix HALFDIRAC_, e.g.
HALFDIRAC_EPS) > built-in defaults (m = 1, eps = 0.1).  All numeric output
is serialized with 17 significant digits, so identical inputs reproduce
byte-identical files.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .anomaly import sample_class_params, verify_identity, ALL_CLASS_TAGS
from .boundary import BoundaryCondition, classify, make_class
from .bulk import ModelParams, chern
from .edge import spectrum_rows
from .errors import HalfDiracError, NotRank2, NotSelfAdjoint
from .scattering import (
    chern_via_scattering,
    n_b_levinson,
    w_infinity,
    winding_trace,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SELF_ADJOINT = 2
EXIT_NOT_RANK2 = 3

ENV_PREFIX = "HALFDIRAC_"

_DEFAULTS = {"m": 1.0, "eps": 0.1, "seed": 0, "samples": 5, "format": "json"}


# ---------------------------------------------------------------------------
# serialization: floats at fixed 17 significant digits


def _fmt_float(x):
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(float(x), ".17g")


def _dumps(obj, indent=0):
    pad = "  " * indent
    pad1 = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad1}{json.dumps(str(k))}: {_dumps(v, indent + 1)}"
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad1}{_dumps(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _jsonable(obj):
    """Rewrite nested results into plain JSON-ready structures."""
    if obj is None or isinstance(obj, (bool, int, str, np.integer)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return str(obj)


def _write_output(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _emit(payload, args):
    if getattr(args, "format", "json") == "csv":
        raise SystemExit("this command only supports --format json")
    _write_output(_dumps(_jsonable(payload)), args.out)


def _csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            elif isinstance(v, (float, np.floating)):
                cells.append(format(float(v), ".17g"))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# configuration


def read_config_file(path):
    """Flat ``key = value`` lines; '#' starts a comment; keys lowercased."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(
                    f"{path}:{lineno}: expected 'key = value', got {raw!r}"
                )
            key, _, value = line.partition("=")
            values[key.strip().lower()] = value.strip()
    return values


def _layered(args, key, cast):
    flag = getattr(args, key, None)
    if flag is not None:
        return cast(flag)
    if args.config:
        file_values = read_config_file(args.config)
        if key in file_values:
            return cast(file_values[key])
    env = os.environ.get(ENV_PREFIX + key.upper())
    if env is not None:
        return cast(env)
    return cast(_DEFAULTS[key])


def model_from_args(args) -> ModelParams:
    return ModelParams(
        m=_layered(args, "m", float), eps=_layered(args, "eps", float)
    )


def _parse_param(text):
    if "=" not in text:
        raise SystemExit(f"--param expects name=value, got {text!r}")
    name, _, value = text.partition("=")
    try:
        z = complex(value.replace(" ", ""))
    except ValueError:
        raise SystemExit(f"cannot parse parameter value {value!r}") from None
    return name.strip(), (z.real if z.imag == 0.0 else z)


def bc_from_args(args, p: ModelParams) -> BoundaryCondition:
    if args.bc and getattr(args, "cls", None):
        raise SystemExit("give either --bc or --class, not both")
    if args.bc:
        with open(args.bc) as fh:
            return BoundaryCondition.from_dict(json.load(fh))
    if getattr(args, "cls", None):
        params = dict(_parse_param(s) for s in (args.param or []))
        return make_class(args.cls, params, p)
    raise SystemExit("a boundary condition is required: --bc or --class")


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args):
    p = model_from_args(args)
    bc = bc_from_args(args, p)
    label = classify(p, bc)
    _emit(label.to_dict(), args)
    return EXIT_OK


def cmd_spectrum(args):
    p = model_from_args(args)
    bc = bc_from_args(args, p)
    rows, branches = spectrum_rows(p, bc)
    if _layered(args, "format", str) == "json":
        payload = {
            "n_branches": len(branches),
            "branches": [
                {"start_event": b.start_event, "end_event": b.end_event,
                 "n_samples": len(b.samples)}
                for b in branches
            ],
            "rows": [list(r) for r in rows],
        }
        _write_output(_dumps(_jsonable(payload)), args.out)
    else:
        _write_output(_csv_text(("kx", "omega", "branch_id"), rows), args.out)
    return EXIT_OK


def cmd_winding(args):
    p = model_from_args(args)
    bc = bc_from_args(args, p)
    kind = args.kind
    if _layered(args, "format", str) == "csv":
        rows = winding_trace(p, bc, kind)
        _write_output(
            _csv_text(("t", "kx", "kappa", "re_s", "im_s", "cumulative_arg"),
                      rows),
            args.out,
        )
        return EXIT_OK
    if kind == "chern":
        res = chern_via_scattering(p, bc)
    elif kind == "levinson":
        res = n_b_levinson(p, bc)
    else:
        res = w_infinity(p, bc)
    payload = {
        "kind": kind,
        "phase_integral": res.phase_integral,
        "snapped": res.snapped,
        "max_step_arg": res.max_step_arg,
        "diagnostics": _jsonable(res.diagnostics),
    }
    _emit(payload, args)
    return EXIT_OK


def cmd_verify(args):
    p = model_from_args(args)
    bc = bc_from_args(args, p)
    report = verify_identity(p, bc)
    _emit(report, args)
    return EXIT_OK if report["consistent"] else EXIT_ERROR


def run_sweep(p: ModelParams, samples: int, seed: int) -> dict:
    """Randomized per-class identity sweep; sequential and order-stable."""
    rng = np.random.default_rng(seed)
    runs = []
    for tag in ALL_CLASS_TAGS:
        for index in range(samples):
            params = sample_class_params(tag, rng, p)
            bc = make_class(tag, params, p)
            report = verify_identity(p, bc)
            runs.append({
                "tag": tag,
                "index": index,
                "drawn_params": {k: _jsonable(complex(v))
                                 for k, v in params.items()},
                "report": report,
            })
    convergent = [
        r for r in runs
        if r["report"]["n_b"] is not None
        and r["report"]["w_inf"] is not None
        and r["report"]["C_plus"] is not None
    ]
    identity_ok = [
        r for r in convergent
        if r["report"]["C_plus"] == r["report"]["n_b"] + r["report"]["w_inf"]
    ]
    predicted_ok = [
        r for r in convergent
        if r["report"]["predicted"] in ("threshold", r["report"]["w_inf"])
    ]
    n_conv = len(convergent)
    return {
        "samples_per_class": samples,
        "seed": seed,
        "n_runs": len(runs),
        "n_convergent": n_conv,
        "identity_match_rate": (len(identity_ok) / n_conv) if n_conv else None,
        "prediction_match_rate": (len(predicted_ok) / n_conv) if n_conv else None,
        "nonconvergent": [
            {"tag": r["tag"], "index": r["index"],
             "diagnostics": r["report"]["diagnostics"]}
            for r in runs if r not in convergent
        ],
        "failures": [
            {"tag": r["tag"], "index": r["index"], "report": r["report"]}
            for r in convergent
            if r not in identity_ok or r not in predicted_ok
        ],
        "runs": runs,
    }


def cmd_sweep(args):
    p = model_from_args(args)
    samples = _layered(args, "samples", int)
    seed = _layered(args, "seed", int)
    summary = run_sweep(p, samples, seed)
    _emit(summary, args)
    ok = (
        summary["identity_match_rate"] == 1.0
        and summary["prediction_match_rate"] is not None
        and summary["prediction_match_rate"] >= 0.95
    )
    return EXIT_OK if ok else EXIT_ERROR


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub):
    sub.add_argument("--m", type=float, default=None, help="mass parameter")
    sub.add_argument("--eps", type=float, default=None,
                     help="quadratic regularization strength")
    sub.add_argument("--config", default=None,
                     help="flat key = value config file")
    sub.add_argument("--out", default=None,
                     help="output path ('-' or omitted: stdout)")
    sub.add_argument("--format", dest="format", choices=("json", "csv"),
                     default=None, help="output format")


def _add_bc(sub):
    sub.add_argument("--bc", default=None,
                     help="boundary condition JSON file {A0, A1}")
    sub.add_argument("--class", dest="cls", default=None,
                     choices=ALL_CLASS_TAGS,
                     help="build the condition from a canonical class tag")
    sub.add_argument("--param", action="append", default=None,
                     metavar="NAME=VALUE",
                     help="canonical class parameter (repeatable; complex "
                          "values as e.g. b12=0.5-1j)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="halfdirac",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            f"Environment overrides: {ENV_PREFIX}M, {ENV_PREFIX}EPS, "
            f"{ENV_PREFIX}SEED, {ENV_PREFIX}SAMPLES, {ENV_PREFIX}FORMAT.\n"
            "Exit codes: 0 success; 1 failed check or other error; "
            "2 boundary condition not self-adjoint; 3 constraint matrix "
            "not rank 2."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("classify", help="canonical class of a condition")
    _add_common(s)
    _add_bc(s)
    s.set_defaults(fn=cmd_classify)

    s = subs.add_parser("spectrum", help="edge-spectrum branches as CSV")
    _add_common(s)
    _add_bc(s)
    s.set_defaults(fn=cmd_spectrum)

    s = subs.add_parser("winding", help="one scattering winding number")
    s.add_argument("kind", choices=("chern", "levinson", "infinity"))
    _add_common(s)
    _add_bc(s)
    s.set_defaults(fn=cmd_winding)

    s = subs.add_parser("verify", help="full identity check C_+ = n_b + w_inf")
    _add_common(s)
    _add_bc(s)
    s.set_defaults(fn=cmd_verify)

    s = subs.add_parser("sweep", help="randomized per-class verification")
    _add_common(s)
    s.add_argument("--samples", type=int, default=None,
                   help="samples per class")
    s.add_argument("--seed", type=int, default=None, help="RNG seed")
    s.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NotSelfAdjoint as exc:
        print(f"not self-adjoint: {exc}", file=sys.stderr)
        return EXIT_NOT_SELF_ADJOINT
    except NotRank2 as exc:
        print(f"not rank 2: {exc}", file=sys.stderr)
        return EXIT_NOT_RANK2
    except HalfDiracError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

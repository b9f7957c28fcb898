"""Command-line front end.

Exit codes: 0 success or definite material, 1 indefinite material or solver
failure, 2 marginal material, 64 usage error or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from importlib import resources
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .constitutive import (
    MaterialError,
    MaterialParams,
    coupled_coordinates,
    gamma_blocks,
    gammas,
    voigt_blocks,
)
from .stability import BOUNDARY_BAND, report as stability_report
from .tensor_core import (
    TensorError,
    check_symtri,
    decompose,
    norm,
    pack_symtri,
    recompose,
    sym_skew,
    symtri_basis,
    unpack_symtri,
)
from .torsion import (
    CrossSectionMesh,
    MeshError,
    TorsionError,
    annulus_mesh,
    annulus_solution,
    elementary_cube_state,
    warp_solve,
)

EXIT_OK, EXIT_FAIL, EXIT_MARGINAL, EXIT_USAGE = 0, 1, 2, 64
STATUS_EXIT = {"definite": EXIT_OK, "marginal": EXIT_MARGINAL, "indefinite": EXIT_FAIL}

# default resolution when an annulus is meshed for the warping solver
ANNULUS_N_THETA = 96


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# serialization


def _num(x):
    x = float(x) + 0.0  # no negative zero
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if x == int(x) and "e" not in s and "." not in s:
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        body = (",\n" + pad).join(dumps(v, indent, _level + 1) for v in obj)
        return "[\n" + pad + body + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (json.dumps(k) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items())
        return "{\n" + pad + (",\n" + pad).join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _flatten(prefix, obj, rows):
    obj = _plain(obj)
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, float) else ("" if v is None else v) for v in r])
    return buf.getvalue()


@dataclass
class RunReport:
    command: list
    inputs: dict
    results: dict
    diagnostics: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    table: tuple | None = None  # (header, rows) for plot-ready csv

    def to_dict(self):
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "inputs": self.inputs,
            "results": self.results,
            "diagnostics": self.diagnostics,
        }

    def render(self, fmt):
        if fmt == "json":
            return dumps(self.to_dict()) + "\n"
        if self.table is not None:
            return _csv_text(*self.table)
        rows = []
        _flatten("", {"results": self.results, "diagnostics": self.diagnostics}, rows)
        return _csv_text(("key", "value"), rows)


# --------------------------------------------------------------------------
# inputs


def _read(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc
    return data, hashlib.sha256(raw).hexdigest()


def _material(args, inputs):
    if not args.material:
        raise UsageError("--material is required")
    data, digest = _read(args.material)
    inputs[args.material] = digest
    return MaterialParams.from_dict(data)


def _annulus_arg(text):
    try:
        r_int, r_ext = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--annulus expects RINT,REXT, got {text!r}") from exc
    return _radii(r_int, r_ext)


def _radii(r_int, r_ext):
    if not (math.isfinite(r_ext) and 0.0 <= r_int < r_ext):
        raise UsageError(f"degenerate radii r_int={r_int}, r_ext={r_ext}")
    return r_int, r_ext


def _geometry(args, inputs):
    """('annulus', (r_int, r_ext)) or ('mesh', CrossSectionMesh)."""
    if args.annulus and args.mesh:
        raise UsageError("give either --annulus or --mesh, not both")
    if args.annulus:
        return "annulus", _annulus_arg(args.annulus)
    if not args.mesh:
        raise UsageError("a geometry is required: --annulus RINT,REXT or --mesh FILE")
    data, digest = _read(args.mesh)
    inputs[args.mesh] = digest
    if isinstance(data, dict) and "annulus" in data:
        try:
            a = data["annulus"]
            radii = float(a["r_int"]), float(a["r_ext"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.mesh}: malformed annulus entry") from exc
        return "annulus", _radii(*radii)
    if not isinstance(data, dict):
        raise UsageError(f"{args.mesh}: mesh must be a JSON object")
    return "mesh", CrossSectionMesh.from_dict(data)


def _tensor(args, inputs):
    """Third-order tensor from --tensor FILE, or a seeded random one."""
    if args.tensor:
        data, digest = _read(args.tensor)
        inputs[args.tensor] = digest
        try:
            if isinstance(data, dict) and "packed" in data:
                K = unpack_symtri(np.asarray(data["packed"], dtype=float))
            else:
                K = np.asarray(data["K"] if isinstance(data, dict) else data, dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.tensor}: expected {{'K': 3x3x3}} or {{'packed': [18]}}") from exc
        if K.shape != (3, 3, 3) or not np.all(np.isfinite(K)):
            raise UsageError(f"{args.tensor}: tensor must be a finite 3x3x3 array")
        check_symtri(K)
        return K
    rng = np.random.default_rng(args.seed)
    return unpack_symtri(rng.standard_normal(18))


# --------------------------------------------------------------------------
# commands


def cmd_check(args):
    inputs = {}
    m = _material(args, inputs)
    rep = stability_report(m, args.tolerance)
    return RunReport(args.argv, inputs, rep.to_dict(), seed=args.seed), STATUS_EXIT[rep.status]


def cmd_report(args):
    inputs = {}
    m = _material(args, inputs)
    rep = stability_report(m, args.tolerance)
    g = gammas(m)
    G1, G2 = voigt_blocks(m)
    Gamma1, Gamma2 = gamma_blocks(g)
    results = {
        "material": m.to_dict(),
        "gammas": {k: getattr(g, k) for k in ("gamma1", "gamma2", "gamma3", "gamma4", "gamma5")},
        "blocks": {"G1": G1, "G2": G2, "Gamma1": Gamma1, "Gamma2": Gamma2},
        "stability": rep.to_dict(),
        "sokolowski": rep.sokolowski,
        "sokolowski_reduction": rep.sokolowski is not None,
    }
    return RunReport(args.argv, inputs, results, seed=args.seed), STATUS_EXIT[rep.status]


def _refuse_indefinite(m, tol):
    rep = stability_report(m, tol)
    if rep.status == "indefinite":
        raise TorsionError("material is indefinite; refusing to solve")
    return rep


def cmd_kt(args):
    inputs = {}
    m = _material(args, inputs)
    kind, geo = _geometry(args, inputs)
    rep = _refuse_indefinite(m, args.tolerance)
    if kind == "annulus":
        sol = annulus_solution(m, args.theta, *geo, check=False)
        results = {
            "geometry": {"kind": "annulus", "r_int": geo[0], "r_ext": geo[1]},
            "K_t": sol.K_t,
            "mu_IP": sol.diagnostics["mu_IP"],
            "gradient_correction": sol.diagnostics["gradient_correction"],
            "torque": sol.K_t * args.theta,
        }
        diag = {"method": "closed form"}
    else:
        sol = warp_solve(geo, m, args.theta)
        mu_ip = m.mu * geo.polar_moment
        results = {
            "geometry": {"kind": "mesh", "elements": len(geo.triangles), "area": geo.area},
            "K_t": sol.K_t,
            "mu_IP": mu_ip,
            "gradient_correction": sol.K_t - mu_ip,
            "torque": sol.K_t * args.theta,
        }
        diag = {"method": "warp_solve", **sol.diagnostics}
    diag["stability"] = rep.status
    return RunReport(args.argv, inputs, results, diag, seed=args.seed), EXIT_OK


def cmd_warp(args):
    inputs = {}
    m = _material(args, inputs)
    kind, geo = _geometry(args, inputs)
    _refuse_indefinite(m, args.tolerance)
    if kind == "annulus":
        r_int, r_ext = geo
        n_r = max(2, round(ANNULUS_N_THETA * (r_ext - r_int) / (np.pi * (r_int + r_ext))))
        geo = annulus_mesh(r_int, r_ext, ANNULUS_N_THETA, n_r)
    sol = warp_solve(geo, m, args.theta)
    nodes = geo.nodes
    w = sol.w_nodes
    results = {
        "K_t": sol.K_t,
        "max_abs_w": float(np.abs(w).max()),
        "nodes": nodes,
        "w": w,
    }
    table = (("x1", "x2", "w"), [(float(x), float(y), float(v)) for (x, y), v in zip(nodes, w)])
    return RunReport(args.argv, inputs, results, sol.diagnostics, seed=args.seed, table=table), EXIT_OK


def cmd_decompose(args):
    inputs = {}
    K = _tensor(args, inputs)
    tilde, hat = decompose(K)
    back = recompose(tilde, hat)
    cc = coupled_coordinates(K)
    results = {
        "K": K,
        "packed": pack_symtri(K),
        "tilde": tilde,
        "hat": hat,
        "sym_skew_hat": sym_skew(hat),
        "coupled_coordinates": {k: v for k, v in cc.items()},
    }
    scale = max(norm(K), 1.0)
    diag = {
        "roundtrip_error": float(np.max(np.abs(back - K)) / scale),
        "orthogonality": float(abs(np.sum(tilde * sym_skew(hat))) / scale ** 2),
    }
    return RunReport(args.argv, inputs, results, diag, seed=args.seed), EXIT_OK


def cmd_elementary(args):
    inputs = {}
    m = _material(args, inputs)
    if args.basis is not None:
        if not 0 <= args.basis < 18:
            raise UsageError("--basis must be an index in 0..17")
        K = symtri_basis()[args.basis]
    elif args.tensor:
        K = _tensor(args, inputs)
    else:
        raise UsageError("give --basis IDX or --tensor FILE")
    st = elementary_cube_state(K, m, args.half_width)
    X, u = st.grid(args.grid)
    faces = {k: {"normal": n, "tau": tau, "t_hyperstress": t} for k, (n, tau, t) in st.faces.items()}
    edges = [{"faces": [a, b], "direction": d, "f": f} for a, b, d, f in st.edges]
    results = {
        "half_width": st.a,
        "strain_gradient": st.K,
        "C": st.C,
        "P": st.P,
        "faces": faces,
        "edges": edges,
        "mean_strain": st.mean_strain,
        "grid": {"points": X, "u": u},
    }
    rows = [("u", "", *x, *v) for x, v in zip(X, u)]
    for k, (n, tau, _) in st.faces.items():
        rows.append(("tau", k, *(st.a * n), *tau))
    for a, b, d, f in st.edges:
        na = dict(zip(st.faces, (v[0] for v in st.faces.values())))
        mid = st.a * (na[a] + na[b])
        rows.append(("f", f"{a}|{b}", *mid, *f))
    table = (("kind", "label", "x1", "x2", "x3", "v1", "v2", "v3"),
             [(r[0], r[1], *map(float, r[2:])) for r in rows])
    return RunReport(args.argv, inputs, results, seed=args.seed, table=table), EXIT_OK


def load_schema(command):
    """JSON schema that the output of ``command`` validates against."""
    ref = resources.files("gradhooke") / "schemas" / f"{command}.schema.json"
    return json.loads(ref.read_text())


COMMANDS = {
    "check": cmd_check,
    "kt": cmd_kt,
    "warp": cmd_warp,
    "decompose": cmd_decompose,
    "elementary": cmd_elementary,
    "report": cmd_report,
}


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--material", metavar="FILE")
    common.add_argument("--mesh", metavar="FILE")
    common.add_argument("--annulus", metavar="RINT,REXT")
    common.add_argument("--theta", type=float, default=1.0, help="twist per unit length")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=BOUNDARY_BAND,
                        help="relative band around the semidefinite boundary")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="gradhooke", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="positive-definiteness of a material")
    sub.add_parser("report", parents=[common], help="gamma moduli, blocks, stability")
    sub.add_parser("kt", parents=[common], help="torsional stiffness")
    sub.add_parser("warp", parents=[common], help="warping function on a mesh")
    d = sub.add_parser("decompose", parents=[common], help="tensor decomposition")
    d.add_argument("--tensor", metavar="FILE")
    e = sub.add_parser("elementary", parents=[common], help="elementary cube state")
    e.add_argument("--tensor", metavar="FILE")
    e.add_argument("--basis", type=int)
    e.add_argument("--half-width", type=float, default=1.0)
    e.add_argument("--grid", type=int, default=5)
    return p


def _execute(args):
    try:
        rep, code = COMMANDS[args.command](args)
    except (UsageError, MaterialError, MeshError, TensorError) as exc:
        return EXIT_USAGE, None, f"error: {exc}\n"
    except TorsionError as exc:
        return EXIT_FAIL, None, f"error: {exc}\n"
    return code, rep.render(args.format), ""


def run(argv):
    """Execute a command without touching stdout; returns ``(code, text)``.

    ``text`` is the rendered report, or the error message on failure.
    """
    args = build_parser().parse_args(argv)
    args.argv = ["gradhooke", *argv]
    code, text, err = _execute(args)
    return code, text if text is not None else err


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = ["gradhooke", *argv]
    code, text, err = _execute(args)
    if text is None:
        sys.stderr.write(err)
        return code
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

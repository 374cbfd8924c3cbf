"""Command-line front end: ``tricomi {eval,field,identities,verify,selftest}``.

Flags may also come from a TOML file (``--config``) whose keys mirror the
long flag names; flags given on the command line win.  Exit codes: 0 on
success, 1 when a check fails, 2 on usage errors.
"""
import argparse
import io
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fundsol as fs
from . import geometry as geo
from . import verify as vf
from .bump import BumpTestFunction
from .errors import TricomiError
from .specfun import Branch

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
IDENTITY_THRESHOLD = 1e-11
EVAL_KERNELS = vf.KERNELS
VERIFY_KERNELS = vf.KERNELS + ("EtildeNull",)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved settings of one invocation."""

    command: str
    n: list = field(default_factory=lambda: [1])
    b: float = -1.0
    kernel: str | None = None
    branch: Branch = Branch.LOWER
    continuation: str | None = None
    points: list = field(default_factory=list)
    grid: tuple | None = None
    tol: float | None = None
    out: str | None = None
    jobs: int = 1


# ------------------------------------------------------------- parsing


def _parse_n(text):
    try:
        values = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--n expects integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError("--n needs positive dimensions")
    return values


def _parse_point(text):
    try:
        return np.array([float(v) for v in str(text).split(",")])
    except ValueError:
        raise UsageError(f"--point expects comma separated numbers, got {text!r}") from None


def _parse_grid(text):
    """``xmin:xmax:nx,ymin:ymax:ny`` -> ((xmin, xmax, nx), (ymin, ymax, ny))."""
    try:
        axes = []
        for part in str(text).split(","):
            lo, hi, count = part.split(":")
            axes.append((float(lo), float(hi), int(count)))
    except ValueError:
        raise UsageError(f"--grid expects xmin:xmax:nx,ymin:ymax:ny, got {text!r}") from None
    if len(axes) != 2 or any(c < 1 for _, _, c in axes):
        raise UsageError("--grid needs two axes with at least one node each")
    return tuple(axes)


def build_parser():
    parser = argparse.ArgumentParser(prog="tricomi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with defaults for the flags")
    common.add_argument("--n", help="dimension(s) n, comma separated")
    common.add_argument("--b", type=float, help="source height b < 0")
    common.add_argument("--branch", choices=["upper", "lower"], help="side of the cut above y = 0")
    common.add_argument("--continuation", choices=list(fs.CONTINUATIONS),
                        help="how Eplus and Etilde are continued into y > 0")
    common.add_argument("--out", help="CSV output path")
    common.add_argument("--jobs", type=int, help="worker processes")

    p = sub.add_parser("eval", parents=[common], help="kernel values at points")
    p.add_argument("--kernel", choices=EVAL_KERNELS)
    p.add_argument("--point", action="append", help="x1,...,xn,y (repeatable)")

    p = sub.add_parser("field", parents=[common], help="kernel values on a grid, as CSV")
    p.add_argument("--kernel", choices=EVAL_KERNELS)
    p.add_argument("--grid", help="xmin:xmax:nx,ymin:ymax:ny (other x coordinates are 0)")

    sub.add_parser("identities", parents=[common], help="constant identities")

    p = sub.add_parser("verify", parents=[common], help="weak-form checks")
    p.add_argument("--kernel", choices=VERIFY_KERNELS)
    p.add_argument("--tol", type=float, help="pass threshold relative to the sup norm of φ")

    sub.add_parser("selftest", parents=[common], help="fast end-to-end sanity checks")
    return parser


def resolve(args):
    """Merge flags over the TOML file into a :class:`RunConfig`."""
    file_values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                file_values = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None

    def pick(name, default=None):
        value = getattr(args, name, None)
        return file_values.get(name, default) if value is None else value

    cfg = RunConfig(args.command)
    cfg.n = _parse_n(pick("n", "1"))
    cfg.b = float(pick("b", -1.0))
    if not cfg.b < 0:
        raise UsageError("--b must be negative")
    cfg.kernel = pick("kernel")
    cfg.branch = Branch.parse(pick("branch", "lower"))
    cfg.continuation = pick("continuation")
    if cfg.continuation is not None and cfg.continuation not in fs.CONTINUATIONS:
        raise UsageError(f"--continuation must be one of {fs.CONTINUATIONS}")
    raw_points = pick("point", [])
    raw_points = [raw_points] if isinstance(raw_points, str) else raw_points
    cfg.points = [_parse_point(p) if isinstance(p, str) else np.asarray(p, dtype=float)
                  for p in raw_points]
    grid = pick("grid")
    cfg.grid = _parse_grid(grid) if grid is not None else None
    cfg.tol = pick("tol")
    cfg.out = pick("out")
    cfg.jobs = max(1, int(pick("jobs", 1)))
    return cfg


# ---------------------------------------------------------- evaluation


def _region(kernel, r, y, source):
    """Region tags: relative to (0, b) for the cone kernels, to the origin for F±."""
    if kernel in ("Fminus", "Fplus"):
        q = geo.origin_form_radial(r, y)
        tags = np.full(np.shape(q), geo.RegionTag.DPlus, dtype=object)
        tags[np.asarray(y) > 0] = geo.RegionTag.EllipticHalf
        tags[q < 0] = geo.RegionTag.DMinusInterior
        tags[q == 0] = geo.RegionTag.DMinusBoundary
        return tags
    return geo.classify_radial(r, y, source)


def kernel_values(kernel, n, r, y, source, branch, continuation=None):
    """Complex kernel values for arrays of (|x|, y)."""
    continuation = continuation or "principal"
    if kernel in ("Eplus", "Etilde") and n != 1:
        raise UsageError(f"{kernel} is only available for n = 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        if kernel == "Eminus":
            return fs.E_minus_radial(n, r, y, source.a).astype(complex)
        if kernel == "Fminus":
            return fs.F_minus_radial(n, r, y).astype(complex)
        if kernel == "Fplus":
            return fs.F_plus_radial(n, r, y).astype(complex)
        if kernel == "Eplus":
            return np.asarray(fs.E_plus_radial(r, y, source.a, branch, continuation), dtype=complex)
        return np.asarray(fs.tilde_E_radial(r, y, source.a, branch, continuation), dtype=complex)


def _fmt(value):
    return f"{value:.17g}"


def _header(n):
    xs = ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]
    return ",".join(xs + ["y", "value_re", "value_im", "region"])


def _rows(n, points, values, tags):
    for point, value, tag in zip(points, values, tags):
        cells = [_fmt(c) for c in point] + [_fmt(value.real), _fmt(value.imag), tag.value]
        yield ",".join(cells)


def _need_kernel(cfg):
    if cfg.kernel is None:
        raise UsageError("--kernel is required")
    if len(cfg.n) != 1:
        raise UsageError("this command takes a single --n")
    return cfg.kernel, cfg.n[0]


def cmd_eval(cfg, out):
    kernel, n = _need_kernel(cfg)
    if not cfg.points:
        raise UsageError("eval needs at least one --point")
    if any(p.shape != (n + 1,) for p in cfg.points):
        raise UsageError(f"points need {n + 1} coordinates for n = {n}")
    pts = np.array(cfg.points)
    source = geo.SourcePoint(cfg.b)
    r = np.linalg.norm(pts[:, :n], axis=1)
    values = kernel_values(kernel, n, r, pts[:, n], source, cfg.branch, cfg.continuation)
    tags = _region(kernel, r, pts[:, n], source)
    branch = "none"
    if kernel in ("Eplus", "Etilde"):
        branch = f"{cfg.branch.name.lower()} continuation={cfg.continuation or 'principal'}"
    for point, value, tag in zip(pts, values, tags):
        coords = ",".join(_fmt(c) for c in point)
        imag = f" value_im={_fmt(value.imag)}" if kernel in ("Eplus", "Etilde") else ""
        print(f"kernel={kernel} n={n} b={_fmt(cfg.b)} point=({coords}) "
              f"value={_fmt(value.real)}{imag} region={tag.value} branch={branch}", file=out)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(_header(n) + "\n")
            for row in _rows(n, pts, values, tags):
                fh.write(row + "\n")
    return EXIT_OK


def _grid_chunk(task):
    kernel, n, b, branch, continuation, pts = task
    source = geo.SourcePoint(b)
    r = np.linalg.norm(pts[:, :n], axis=1)
    values = kernel_values(kernel, n, r, pts[:, n], source, branch, continuation)
    return list(_rows(n, pts, values, _region(kernel, r, pts[:, n], source)))


def cmd_field(cfg, out):
    kernel, n = _need_kernel(cfg)
    if cfg.grid is None:
        raise UsageError("field needs --grid")
    (x0, x1, nx), (y0, y1, ny) = cfg.grid
    xs, ys = np.linspace(x0, x1, nx), np.linspace(y0, y1, ny)
    # lexicographic order: x outer, y inner
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.zeros((xx.size, n + 1))
    pts[:, 0], pts[:, n] = xx.ravel(), yy.ravel()
    chunks = np.array_split(pts, max(1, min(cfg.jobs * 4, len(pts))))
    tasks = [(kernel, n, cfg.b, cfg.branch, cfg.continuation, c) for c in chunks if len(c)]
    rows = _map(_grid_chunk, tasks, cfg.jobs)
    text = _header(n) + "\n" + "".join(row + "\n" for chunk in rows for row in chunk)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(pts)} rows to {cfg.out}", file=out)
    else:
        out.write(text)
    return EXIT_OK


def _map(fn, tasks, jobs):
    """Ordered map, in worker processes when ``jobs > 1``."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


# ----------------------------------------------------------- identities


def cmd_identities(cfg, out):
    status = EXIT_OK
    for n in cfg.n:
        rec = fs.constants(n)
        print(f"n={n}", file=out)
        for name in ("A", "A_gauss", "C_minus", "C_plus", "ratio", "C_plus_fundamental", "c_n", "A_m"):
            value = getattr(rec, name)
            if value is not None:
                print(f"  {name}={_fmt(value)}", file=out)
        for res in fs.constant_identities(n):
            if res.checked:
                verdict = "PASS" if res.value <= IDENTITY_THRESHOLD else "FAIL"
                if verdict == "FAIL":
                    status = EXIT_FAIL
            else:
                verdict = "INFO"
            print(f"  {res.name}={_fmt(res.value)} {verdict}", file=out)
    return status


# --------------------------------------------------------------- verify


def verification_cases(kernel, n, b):
    """(KernelChoice, bump) pairs: a bump at the pole, an offset one and a disjoint one.

    Bumps that cross y = 0 away from the pole use the analytic continuation;
    the principal one is not smooth across y = 0 and fails there.
    """
    if kernel == "EtildeNull":
        choice = vf.KernelChoice("Etilde", 1, b)
        imag = vf.KernelChoice("Etilde", 1, b, part="imag")
        a = choice.spec.source.a
        across = dict(continuation="analytic")
        # the first three straddle both characteristics through (0, b)
        return [(choice, BumpTestFunction([a + 0.3, -0.4], [0.5, 0.4])),
                (choice, BumpTestFunction([-(a + 0.3), -0.4], [0.5, 0.4])),
                (imag, BumpTestFunction([a + 0.3, -0.4], [0.5, 0.4])),
                (vf.KernelChoice("Etilde", 1, b, **across), BumpTestFunction([0.0, 0.0], [0.4, 0.3])),
                (vf.KernelChoice("Etilde", 1, b, part="imag", **across),
                 BumpTestFunction([a + 0.6, 0.0], [0.4, 0.3]))]
    pole = np.append(np.zeros(n), b if kernel in ("Eminus", "Eplus") else 0.0)
    shift = np.full(n + 1, 0.07)
    shift[n] = -0.1
    width = np.full(n + 1, 0.5)
    near = BumpTestFunction(pole + shift, width)
    offset = BumpTestFunction(pole + np.append(np.full(n, 0.35), -0.3), np.full(n + 1, 0.3))
    disjoint = BumpTestFunction(pole + np.append(np.full(n, 0.2), 1.5), np.full(n + 1, 0.3))
    cases = [(vf.KernelChoice(kernel, n, b), phi) for phi in (near, offset, disjoint)]
    if kernel == "Eplus":
        # the imaginary part is a null solution; test it below and across y = 0
        a = vf.KernelChoice(kernel, n, b).spec.source.a
        cases.append((vf.KernelChoice(kernel, n, b, part="imag"),
                      BumpTestFunction([a + 0.3, -0.4], [0.5, 0.4])))
        cases.append((vf.KernelChoice(kernel, n, b, part="imag", continuation="analytic"),
                      BumpTestFunction([a + 0.6, 0.0], [0.4, 0.3])))
    return cases


def _verify_one(task):
    choice, phi, tol = task
    return vf.weak_form_residual(choice, phi, vf.QuadConfig(tol=tol))


def default_matrix(n, b):
    """Kernels checked by ``verify`` without ``--kernel``."""
    kernels = ["Eminus", "Fminus", "Fplus"]
    if n == 1:
        kernels += ["Eplus", "EtildeNull"]
    return kernels


def cmd_verify(cfg, out):
    tasks = []
    for n in cfg.n:
        kernels = [cfg.kernel] if cfg.kernel else default_matrix(n, cfg.b)
        for kernel in kernels:
            if kernel in ("Eplus", "Etilde", "EtildeNull") and n != 1:
                raise UsageError(f"{kernel} is only available for n = 1")
            for choice, phi in verification_cases(kernel, n, cfg.b):
                if choice.name in ("Eplus", "Etilde"):
                    choice = vf.KernelChoice(choice.name, n, cfg.b, cfg.branch, choice.part,
                                             cfg.continuation or choice.continuation)
                tasks.append((choice, phi, cfg.tol))
    reports = _map(_verify_one, tasks, cfg.jobs)
    status = EXIT_OK
    for (choice, phi, _), rep in zip(tasks, reports):
        print(f"# {choice.label} with {phi!r}", file=out)
        print(rep.as_record(), file=out)
        print(file=out)
        if not rep.passed:
            status = EXIT_FAIL
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(vf.VerifyReport.CSV_HEADER + "\n")
            for rep in reports:
                fh.write(rep.csv_row() + "\n")
    passed = sum(r.passed for r in reports)
    print(f"{passed}/{len(reports)} passed", file=out)
    return status


# ------------------------------------------------------------- selftest


def cmd_selftest(cfg, out):
    """Seconds-scale checks touching every module."""
    from .specfun import HypTriple, hyp2f1, pfaff_transform

    checks = []

    def check(name, ok, detail=""):
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip(), file=out)

    g = fs.gamma_identity_residual()
    check("gamma identity", g <= 1e-13, f"residual={g:.2e}")
    worst = max(r.value for n in (2, 3, 4) for r in fs.constant_identities(n) if r.checked)
    check("constant identities n=2,3,4", worst <= IDENTITY_THRESHOLD, f"worst={worst:.2e}")
    p = HypTriple(0.3, 0.7, 1.9)
    a, b = complex(hyp2f1(p, -0.6)), complex(pfaff_transform(p, -0.6))
    check("hyp2f1 vs Pfaff", abs(a - b) <= 1e-12 * abs(a), f"diff={abs(a - b):.2e}")
    spec = fs.KernelSpec.make(2, -1.0)
    xy = fs.eval_E_minus(spec, np.array([0.1, 0.2]), -2.0)
    t = 2.0 * 2.0 ** 1.5 / 3.0
    xt = fs.eval_E_xt(2, np.array([0.1, 0.2]), t, spec.source.a)
    check("two-path E_- n=2", abs(xy - xt) <= 1e-12 * abs(xy), f"diff={abs(xy - xt):.2e}")
    start = time.perf_counter()
    rep = vf.weak_form_residual(vf.KernelChoice("Eminus", 1, -1.0),
                                BumpTestFunction([0.1, -1.1], [0.6, 0.5]))
    check("weak form E_- n=1", rep.passed,
          f"residual={rep.residual:.2e} ({time.perf_counter() - start:.1f}s)")
    return EXIT_OK if all(checks) else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "field": cmd_field, "identities": cmd_identities,
            "verify": cmd_verify, "selftest": cmd_selftest}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"tricomi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TricomiError as exc:
        print(f"tricomi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv):
    """Run ``main`` capturing stdout; returns (exit code, text)."""
    buffer = io.StringIO()
    code = main(argv, buffer)
    return code, buffer.getvalue()


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: scene in, tables and reports out.

Every command writes its outputs plus a ``<out>.manifest.json`` recording
the command, parameters and seed.  Exit status is 0 on success, 2 for bad
input and 3 for numerical failure.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from importlib import metadata

import numpy as np

from . import analysis, geodesics, models
from .errors import ConresError, InputError, InvariantViolation, NumericalError
from .scene import DeltaCircleScene, DeltaLineScene, PolygonScene, load_scene

log = logging.getLogger("conres")

PREDICTIONS = ("delta_obstacle", "conic_free", "conic_band")


def _version():
    try:
        return metadata.version("conres")
    except metadata.PackageNotFoundError:
        return "unknown"


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _manifest(args, outputs):
    if args.out in (None, "-"):
        return
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "command", "seed", "out", "verbose")}
    doc = {"command": args.command, "scene": getattr(args, "scene", None), "parameters": params,
           "seed": args.seed, "version": _version(), "outputs": [p for p in outputs if p]}
    with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sibling(path, suffix):
    return None if path in (None, "-") else path + suffix


def _fmt(x):
    # repr keeps "5.0" and round-trips every float
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


# -- commands ------------------------------------------------------------------

def cmd_geodesics(args):
    scene = load_scene(args.scene)
    if not isinstance(scene, PolygonScene):
        raise InputError("geodesics needs a polygon scene")
    segs = geodesics.reflected_geodesics(scene, args.max_reflections)
    dmax = geodesics.d_max(segs)
    dplus = geodesics.d_plus_max(scene, segs)
    written = [_write(args.out, geodesics.segments_to_csv(segs))]
    summary = f"D_max>={_fmt(dmax)} (cap={args.max_reflections})\nD_plus={_fmt(dplus)}\n"
    # keep stdout a clean CSV when it carries the table
    (sys.stderr if args.out in (None, "-") else sys.stdout).write(summary)
    _manifest(args, written)
    return 0


def cmd_resonances(args):
    scene = load_scene(args.scene)
    re, im = tuple(args.re), tuple(args.im)
    if isinstance(scene, DeltaLineScene):
        found = models.scan_resonances(models.DeltaLineModel(scene), re, im, tol=args.tol,
                                       seed=args.seed)
    elif isinstance(scene, DeltaCircleScene):
        found = models.circle_resonances(scene, re, im, range(args.modes + 1), tol=args.tol,
                                         seed=args.seed)
    else:
        raise InputError("resonances needs a delta_line or delta_circle scene")
    written = [_write(args.out, models.resonances_to_csv(found))]
    _manifest(args, written)
    return 0


def _read_resonances(path):
    with open(path, encoding="utf-8") as fh:
        return models.resonances_from_csv(fh.read())


def _prediction(scene, kind, args):
    delta = args.delta
    if kind == "delta_obstacle":
        if isinstance(scene, PolygonScene):
            raise InputError("delta_obstacle prediction needs a delta scene")
        return analysis.delta_obstacle_strip(scene.diameter, delta)
    if not isinstance(scene, PolygonScene):
        raise InputError(f"{kind} prediction needs a polygon scene")
    segs = geodesics.reflected_geodesics(scene, args.max_reflections)
    if kind == "conic_free":
        return analysis.conic_strip(2, geodesics.d_max(segs), delta)
    return analysis.conic_band(2, geodesics.d_plus_max(scene, segs), delta)


def _scaled(pred, factor):
    if factor == 1.0 or isinstance(pred, analysis.EmptyBand):
        return pred
    return analysis.StripPrediction(pred.width * factor, pred.delta, pred.source,
                                    pred.lambda0, pred.asymptote,
                                    dict(pred.params, scale=factor), pred.notes)


def cmd_verify(args):
    scene = load_scene(args.scene)
    res = _read_resonances(args.resonances)
    pred = _scaled(_prediction(scene, args.prediction, args), args.scale)
    report = analysis.verify_band(res, pred, args.lambda0)
    doc = report.to_dict()
    doc["prediction"] = (pred.to_dict() if isinstance(pred, analysis.StripPrediction)
                         else {"source": pred.source, "width": None, "notes": [pred.reason]})
    written = [_write(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")]
    if isinstance(pred, analysis.StripPrediction):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("re", "neg_im", "bound_curve"))
        for row in analysis.bound_curve_rows(res, pred.width):
            w.writerow([format(v, ".17g") for v in row])
        plot = _sibling(args.out, ".plot.csv")
        if plot:
            written.append(_write(plot, buf.getvalue()))
    _manifest(args, written)
    sys.stderr.write("PASS\n" if report.passed else
                     f"FAIL ({len(report.violators)} violators)\n")
    return 0


def cmd_trace(args):
    res = _read_resonances(args.resonances)
    if not args.dt > 0 or not args.tmax > 0:
        raise InputError("--tmax and --dt must be positive")
    t = np.arange(0.0, args.tmax + 0.5 * args.dt, args.dt)
    s = analysis.poisson_trace(res, t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "abs_s"))
    for ti, si in zip(t, np.abs(s)):
        w.writerow([format(float(ti), ".17g"), format(float(si), ".17g")])
    written = [_write(args.out, buf.getvalue())]
    _manifest(args, written)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="conres", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geodesics", help="cone-to-cone geodesics and D_max, D_plus")
    g.add_argument("scene")
    g.add_argument("--max-reflections", type=int, default=geodesics.DEFAULT_REFLECTIONS)
    g.add_argument("--out", help="segment CSV path (default stdout)")
    g.set_defaults(func=cmd_geodesics)

    r = sub.add_parser("resonances", help="resonances of a delta model in a box")
    r.add_argument("scene")
    r.add_argument("--re", type=float, nargs=2, required=True, metavar=("A", "B"))
    r.add_argument("--im", type=float, nargs=2, required=True, metavar=("C", "D"))
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--modes", type=int, default=models.MAX_MODE,
                   help="highest angular mode for delta_circle")
    r.add_argument("--out")
    r.set_defaults(func=cmd_resonances)

    v = sub.add_parser("verify", help="check resonances against a strip prediction")
    v.add_argument("scene")
    v.add_argument("resonances")
    v.add_argument("--prediction", choices=PREDICTIONS, required=True)
    v.add_argument("--scale", type=float, default=1.0, help="multiply the predicted width")
    v.add_argument("--lambda0", type=float, default=1.0)
    v.add_argument("--delta", type=float, default=0.0)
    v.add_argument("--max-reflections", type=int, default=geodesics.DEFAULT_REFLECTIONS)
    v.add_argument("--out", help="JSON report path; plot data goes to <out>.plot.csv")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("trace", help="Poisson wave trace |s(t)| of a resonance set")
    t.add_argument("resonances")
    t.add_argument("--tmax", type=float, required=True)
    t.add_argument("--dt", type=float, required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return 2
    except (InputError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ConresError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

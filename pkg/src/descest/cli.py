"""Command-line driver.

Exit status: 0 on success, 2 when inputs fail validation (missing or
malformed files, dimension or definiteness diagnostics), 3 when a numerical
routine fails. Outputs are written atomically; nothing is written on failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import continuous, demo, discrete, io, oracle
from .errors import ContractError, NumericalError
from .model import validate, validate_measurements

COMMANDS = (
    "estimate", "ellipsoid", "index", "continuous-apriori",
    "continuous-aposteriori", "oracle", "demo",
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class _Invalid(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="descest", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model")
    p.add_argument("--measurements")
    dirs = p.add_mutually_exclusive_group()
    dirs.add_argument("--direction", help="comma-separated components of ell")
    dirs.add_argument("--all-basis", action="store_true",
                      help="estimate every coordinate direction")
    p.add_argument("--rank-tol", type=float, default=0.0)
    p.add_argument("--obs-tol", type=float, default=discrete.OBS_TOL)
    p.add_argument("--out", help="output file (demo: output directory)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=32)
    return p


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise _Invalid(f"--{name} is required for '{args.command}'")
    return value


def _load_discrete(args):
    model, w = io.load_model(_need(args, "model"))
    y = io.read_measurements(_need(args, "measurements"))
    diags = validate(model, w) + validate_measurements(model, y)
    if diags:
        raise _Invalid("\n".join(diags))
    return model, w, y


def _direction(args, n):
    if args.direction is None:
        return None
    try:
        ell = np.array([float(v) for v in args.direction.split(",")])
    except ValueError as exc:
        raise _Invalid(f"--direction: {exc}") from exc
    if ell.size != n:
        raise _Invalid(f"--direction has {ell.size} components, state dimension is {n}")
    return ell


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) if not isinstance(v, str) else v for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _estimate(args):
    model, w, y = _load_discrete(args)
    state = discrete.run(model, w, y, args.rank_tol)[-1]
    ell = _direction(args, model.n)
    if ell is not None and not args.all_basis:
        est = discrete.estimate(state, ell, args.obs_tol)
        doc = {"value": est.value, "error": est.error, "observable": est.observable}
        rows = [[est.value, est.error, str(est.observable).lower()]]
        return doc, _csv(["value", "error", "observable"], rows)
    ests = [discrete.estimate(state, e, args.obs_tol) for e in np.eye(model.n)]
    doc = {
        "center": [e.value for e in ests],
        "error": [e.error for e in ests],
        "observable": [e.observable for e in ests],
    }
    rows = [[str(i), e.value, e.error, str(e.observable).lower()] for i, e in enumerate(ests)]
    return doc, _csv(["i", "value", "error", "observable"], rows)


def _ellipsoid(args):
    model, w, y = _load_discrete(args)
    ell = discrete.posterior_ellipsoid(discrete.run(model, w, y, args.rank_tol)[-1])
    doc = {"Q": ell.Q.tolist(), "center": ell.center.tolist(), "alpha": ell.alpha,
           "radius": ell.radius}
    rows = [[str(i), c] + list(row) for i, (c, row) in enumerate(zip(ell.center, ell.Q))]
    header = ["i", "center"] + [f"Q{j}" for j in range(model.n)]
    return doc, _csv(header, rows)


def _index(args):
    model, w, y = _load_discrete(args)
    state = discrete.run(model, w, y, args.rank_tol)[-1]
    I_N = discrete.noncausality_index(state)
    doc = {"I_N": I_N, "causal": I_N == model.n}
    return doc, f"I_N,causal\n{I_N},{str(I_N == model.n).lower()}\n"


def _oracle(args):
    model, w, y = _load_discrete(args)
    sol = oracle.stacked_minimize(model, w, y, args.rank_tol)
    doc = {
        "x_stack": sol.states.tolist(),
        "min_cost": sol.min_cost,
        "marginal_Q": sol.marginal_Q.tolist(),
        "marginal_center": sol.marginal_center.tolist(),
        "marginal_alpha": sol.marginal_alpha,
    }
    ell = _direction(args, model.n)
    if ell is not None:
        iv = oracle.direction_interval(sol, ell, args.obs_tol)
        doc["interval"] = [iv.lo, iv.hi]
    rows = [[str(k)] + list(x) for k, x in enumerate(sol.states)]
    return doc, _csv(["k"] + [f"x{i}" for i in range(model.n)], rows)


def _grid_rows(t, *arrays):
    return [[tk] + [v for a in arrays for v in a[k]] for k, tk in enumerate(t)]


def _continuous_model(args):
    model, K = io.continuous_model_from_dict(io.load_json(_need(args, "model")))
    return model, continuous.Grid(model.t0, model.T, K)


def _apriori(args):
    model, grid = _continuous_model(args)
    sol = continuous.apriori_solve(model, grid, args.rank_tol)
    doc = {"sigma2": sol.sigma2, "t": grid.nodes.tolist(), "p": sol.p.tolist(),
           "z": sol.z.tolist(), "d": sol.d.tolist(), "u_hat": sol.u_hat.tolist()}
    header = (["t"] + [f"p{i}" for i in range(model.n)] + [f"z{i}" for i in range(model.m)]
              + [f"u{i}" for i in range(sol.u_hat.shape[1])])
    return doc, _csv(header, _grid_rows(grid.nodes, sol.p, sol.z, sol.u_hat))


def _aposteriori(args):
    model, grid = _continuous_model(args)
    t, Y = io.read_continuous_measurements(_need(args, "measurements"))
    if t.size != grid.K + 1 or not np.allclose(t, grid.nodes, rtol=0, atol=1e-9 * grid.h):
        raise _Invalid("measurement times must be the model grid nodes t0 + k h")
    sol = continuous.aposteriori_solve(model, Y, grid, args.rank_tol)
    ell = model.sample("ell", grid.nodes)
    doc = {"estimate": continuous.functional_estimate(sol, ell), "t": grid.nodes.tolist(),
           "x_hat": sol.x_hat.tolist(), "q": sol.q.tolist()}
    header = ["t"] + [f"x{i}" for i in range(model.n)]
    return doc, _csv(header, _grid_rows(grid.nodes, sol.x_hat))


def _demo(args):
    data = demo.demo_generate(args.seed, args.steps)
    report = demo.run_demo(data)
    doc = report.as_dict()
    if args.out:
        doc["files"] = demo.write_demo(data, args.out)
    rows = [[str(k), p, yk[0], ph] for k, (p, yk, ph) in enumerate(zip(data.phi, data.y, report.phi_hat))]
    return doc, _csv(["k", "phi", "y", "phi_hat"], rows)


HANDLERS = {
    "estimate": _estimate,
    "ellipsoid": _ellipsoid,
    "index": _index,
    "oracle": _oracle,
    "continuous-apriori": _apriori,
    "continuous-aposteriori": _aposteriori,
    "demo": _demo,
}


def run(args) -> int:
    try:
        doc, csv_text = HANDLERS[args.command](args)
    except (_Invalid, ContractError, FileNotFoundError) as exc:
        print(f"descest: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"descest: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = io.dumps(doc) if args.format == "json" else csv_text
    if args.out and args.command != "demo":
        io.atomic_write(args.out, text)
    elif args.command == "demo" and args.out:
        io.atomic_write(f"{args.out}/summary.{args.format}", text)
        sys.stdout.write(io.dumps(doc))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())

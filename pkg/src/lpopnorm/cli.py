"""Command-line front end: a thin client over the HTTP service.

Without --server the requests are dispatched to the service in-process, so
the CLI works standalone; with --server they go over the wire to a running
instance (`lpopnorm serve`). Either way the formatting happens here, from
the JSON responses, and identical flags plus seed give byte-identical output.

Exit status: 0 success, 1 inequality violation or certificate failure,
2 usage error.

Set LPOPNORM_LOG (e.g. DEBUG, INFO) for diagnostic verbosity.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys

import httpx

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _post(path: str, payload: dict, server: str | None) -> tuple[int, dict]:
    async def go() -> tuple[int, dict]:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                resp = await client.post(path, json=payload)
        else:
            from .service import app

            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://lpopnorm.internal", timeout=600.0
            ) as client:
                resp = await client.post(path, json=payload)
        try:
            body = resp.json()
        except ValueError:
            body = {"detail": resp.text}
        return resp.status_code, body

    return asyncio.run(go())


def _emit_json(body: dict) -> None:
    print(json.dumps(body, sort_keys=True))


def _fail_usage(body: dict) -> int:
    print(f"error: {body.get('detail')}", file=sys.stderr)
    return EXIT_USAGE


def _kernel_payload(args) -> dict:
    if args.coeffs is not None:
        return {"type": "explicit", "coeffs": _float_list(args.coeffs)}
    if args.q is None:
        raise SystemExit("error: give a kernel via --q or --coeffs")
    return {"type": "geometric", "ratio": args.q, "scale": 1.0}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise SystemExit(f"error: expected a comma-separated list of numbers, got {text!r}")


def cmd_constants(args) -> int:
    status, body = _post(
        "/constants", {"p": args.p, "q": args.q, "alpha": args.alpha}, args.server
    )
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    else:
        print(f"hardy_constant    (p/(p-1))^p   = {body['hardy_constant']!r}")
        print(f"q_hardy_constant  (1-q)^(-p)    = {body['q_hardy_constant']!r}")
        print(f"integral_constant bracket^(-p)  = {body['integral_constant']!r}")
        print(f"coefficient_sum   1/(1-q)       = {body['coefficient_sum']!r}")
    return EXIT_OK


def cmd_certify(args) -> int:
    payload = {
        "kernel": _kernel_payload(args),
        "p": args.p,
        "n": args.n,
        "rel_tol": args.rel_tol,
        "max_iter": args.max_iter,
    }
    status, body = _post("/certify", payload, args.server)
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    else:
        if body["valid"]:
            cert = body["certificate"]
            print(f"upper        = {cert['upper']!r}  ({cert['method_upper']})")
            print(f"lower        = {cert['lower']!r}  ({cert['method_lower']})")
            print(f"gap          = {cert['gap']!r}")
            print(f"N            = {cert['N']}")
            print(f"iterations   = {cert['iterations']}")
        else:
            print(f"certificate failed: {body['error']}")
    return EXIT_OK if body["valid"] else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    payload = {
        "kernel": _kernel_payload(args),
        "p": args.p,
        "n_list": [int(v) for v in _float_list(args.n)],
        "rel_tol": args.rel_tol,
        "max_iter": args.max_iter,
    }
    status, body = _post("/sweep", payload, args.server)
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    else:
        # CSV, columns versioned in the header comment.
        print("# lpopnorm sweep v1")
        print("N,indicator_lower,power_lower,upper,gap")
        for row in body["rows"]:
            print(
                f"{row['N']},{row['indicator_lower']!r},{row['power_lower']!r},"
                f"{row['upper']!r},{row['gap']!r}"
            )
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.mode == "discrete":
        payload = {
            "p_values": _float_list(args.p),
            "q_values": _float_list(args.q),
            "trials": args.trials,
            "seed": args.seed,
        }
        status, body = _post("/verify/discrete", payload, args.server)
    else:
        payload = {
            "p_values": _float_list(args.p),
            "q_values": _float_list(args.q),
            "trials": args.trials,
            "seed": args.seed,
        }
        status, body = _post("/verify/theorem1", payload, args.server)
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    elif args.mode == "discrete":
        print(f"trials     = {body['total_trials']}")
        print(f"violations = {body['total_violations']}")
        print(f"min_margin = {body['min_margin']!r}")
        for point in body["grid"]:
            print(
                f"  p={point['p']} q={point['q']}: {point['violations']} violations, "
                f"min relative margin {point['min_relative_margin']!r}"
            )
        for bad in body["violating_inputs"]:
            print(f"  VIOLATION: {json.dumps(bad, sort_keys=True)}")
    else:
        print(f"cases               = {body['cases']}")
        print(f"violations          = {body['violations']}")
        print(f"min_relative_margin = {body['min_relative_margin']!r}")
        print(f"max_reduction_err   = {body['max_reduction_rel_err']!r}")
        for bad in body["failing_cases"]:
            print(f"  VIOLATION: {json.dumps(bad, sort_keys=True)}")
    return EXIT_OK if body["ok"] else EXIT_VIOLATION


def cmd_jackson(args) -> int:
    payload = {"q": args.q, "base": args.base, "power": args.power}
    if args.n is not None:
        payload["K"] = args.n
    status, body = _post("/jackson", payload, args.server)
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    else:
        print(f"value         = {body['value']!r}")
        print(f"tail_residual = {body['tail_residual']!r}")
        print(f"K             = {body['K']}")
    return EXIT_OK


def cmd_search(args) -> int:
    payload = {"kernel": _kernel_payload(args), "p": args.p, "eps": args.eps}
    status, body = _post("/witness-search", payload, args.server)
    if status != 200:
        return _fail_usage(body)
    if args.format == "json":
        _emit_json(body)
    elif body["ok"]:
        print(f"M     = {body['M']}")
        print(f"ratio = {body['ratio']!r}")
    else:
        print(f"search failed: {body['error']}")
    return EXIT_OK if body["ok"] else EXIT_VIOLATION


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--server", default=None, help="base URL of a running service; in-process if omitted")
    sub.add_argument("--format", choices=["text", "json", "csv"], default="text")


def _add_kernel_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--q", type=float, default=None, help="geometric kernel ratio (q-Hardy operator)")
    sub.add_argument("--coeffs", default=None, help="explicit kernel coefficients, comma separated")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpopnorm",
        description="Certified l^p operator-norm bounds and Hardy-type inequality verification",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("constants", help="print the sharp constants for given (p, q, alpha)")
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--q", type=float, required=True)
    sub.add_argument("--alpha", type=float, default=0.0)
    _add_common(sub)
    sub.set_defaults(func=cmd_constants)

    sub = subs.add_parser("certify", help="two-sided norm certificate for a Toeplitz kernel")
    _add_kernel_flags(sub)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--n", type=_positive_int, default=1000, help="truncation size")
    sub.add_argument("--rel-tol", type=float, default=1e-10)
    sub.add_argument("--max-iter", type=_positive_int, default=1000)
    _add_common(sub)
    sub.set_defaults(func=cmd_certify)

    sub = subs.add_parser("sweep", help="convergence sweep over truncation sizes (CSV)")
    _add_kernel_flags(sub)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--n", required=True, help="ascending truncation sizes, comma separated")
    sub.add_argument("--rel-tol", type=float, default=1e-10)
    sub.add_argument("--max-iter", type=_positive_int, default=1000)
    _add_common(sub)
    sub.set_defaults(func=cmd_sweep, format="csv")

    sub = subs.add_parser("verify-discrete", help="randomized check of the discrete inequality")
    sub.add_argument("--p", default="1.5,2,3", help="exponent grid, comma separated")
    sub.add_argument("--q", default="0.1,0.5,0.9", help="ratio grid, comma separated")
    sub.add_argument("--trials", type=_positive_int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    _add_common(sub)
    sub.set_defaults(func=cmd_verify, mode="discrete")

    sub = subs.add_parser("verify-theorem1", help="grid check of the q-integral inequality and its discrete reduction")
    sub.add_argument("--p", default="1.5,2,3")
    sub.add_argument("--q", default="0.25,0.5,0.9")
    sub.add_argument("--trials", type=_positive_int, default=3, help="random sample functions per grid point")
    sub.add_argument("--seed", type=int, default=0)
    _add_common(sub)
    sub.set_defaults(func=cmd_verify, mode="theorem1")

    sub = subs.add_parser("jackson", help="geometric-grid quadrature of t^m over [0, base]")
    sub.add_argument("--q", type=float, required=True)
    sub.add_argument("--power", type=float, default=0.0, help="integrate f(t) = t^power")
    sub.add_argument("--base", type=float, default=1.0)
    sub.add_argument("--n", type=int, default=None, help="truncation K (defaults to tail threshold)")
    _add_common(sub)
    sub.set_defaults(func=cmd_jackson)

    sub = subs.add_parser("search", help="double M until the indicator witness ratio exceeds S - eps")
    _add_kernel_flags(sub)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--eps", type=float, required=True)
    _add_common(sub)
    sub.set_defaults(func=cmd_search)

    sub = subs.add_parser("serve", help="run the HTTP service")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8000)
    sub.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("LPOPNORM_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_USAGE
        raise
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

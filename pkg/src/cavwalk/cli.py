"""Command-line client for the walk service.

Subcommands assemble a JSON request, post it to the service (an in-process
ASGI instance by default, or a remote base URL via --server) and render the
{meta, rows} payload as CSV or JSON.  All numbers are formatted at 12
significant digits in both formats; files are written atomically.

Exit codes: 0 success, 2 parameter or connection errors, 3 internal
invariant violations reported by the service.
"""

from __future__ import annotations

import argparse
import asyncio
import contextlib
import json
import math
import os
import re
import sys
import tempfile
from typing import Any

import httpx

_PI_PATTERN = re.compile(
    r"^([+-]?)(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$",
    re.IGNORECASE,
)


def parse_angle(text: str) -> float:
    """Radians, given either as a float or as a literal fraction of pi.

    Accepts forms like `0.5`, `pi`, `pi/4`, `3pi/4`, `-pi/2`; the literal
    forms keep resonance points exact to the last ulp.
    """
    raw = text.strip()
    try:
        return float(raw)
    except ValueError:
        pass
    match = _PI_PATTERN.match(raw)
    if not match:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}: use radians or a pi literal like pi/4")
    sign = -1.0 if match.group(1) == "-" else 1.0
    numerator = float(match.group(2)) if match.group(2) else 1.0
    denominator = float(match.group(3)) if match.group(3) else 1.0
    return sign * numerator * math.pi / denominator


def parse_cavity_spec(text: str) -> dict[str, Any]:
    """Parse `model=jcm|id|2ph|mph,r=INT[,m=INT][,lambda=REAL][,t=REAL]`.

    The interaction time accepts pi literals; the coupling does not.
    """
    spec: dict[str, Any] = {}
    for part in text.split(","):
        key, eq, value = part.strip().partition("=")
        if not eq or not value:
            raise argparse.ArgumentTypeError(f"bad cavity field {part!r}: expected key=value")
        try:
            if key == "model":
                spec["model"] = value
            elif key in ("r", "m"):
                spec[key] = int(value)
            elif key == "lambda":
                spec["lambda"] = float(value)
            elif key == "t":
                spec["t"] = parse_angle(value)
            else:
                raise argparse.ArgumentTypeError(f"unknown cavity field {key!r}")
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad cavity field {part!r}: {exc}") from exc
    if "model" not in spec:
        raise argparse.ArgumentTypeError("cavity spec must include model=jcm|id|2ph|mph")
    return spec


def format_number(value: Any) -> str:
    """Canonical 12-significant-digit rendering shared by CSV and JSON."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def _canonical(value: Any) -> Any:
    """Round floats to their 12-digit rendering so JSON equals CSV."""
    if isinstance(value, float):
        return float(format_number(value))
    if isinstance(value, list):
        return [_canonical(v) for v in value]
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    return value


def render_csv(payload: dict[str, Any]) -> str:
    meta, rows = payload["meta"], payload["rows"]
    lines = []
    for key, value in meta.items():
        if key == "columns":
            continue
        if isinstance(value, list):
            rendered = " ".join(format_number(v) for v in value)
        else:
            rendered = format_number(value)
        lines.append(f"# {key} = {rendered}")
    columns = meta.get("columns", [])
    if columns:
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(format_number(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(_canonical(payload), indent=2) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file and rename, so readers never see partial output."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".cavwalk-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.remove(tmp)
        raise


def post_request(server: str | None, path: str, payload: dict[str, Any]) -> tuple[int, Any]:
    """POST the request to a remote server or the in-process app."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
            return resp.status_code, resp.json()

    from .service.app import app

    async def go() -> tuple[int, Any]:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://cavwalk.internal") as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()

    return asyncio.run(go())


def _describe_error(body: Any) -> str:
    if isinstance(body, dict) and "detail" in body:
        detail = body["detail"]
        if isinstance(detail, str):
            return detail
        # pydantic validation errors: list of {loc, msg, ...}
        if isinstance(detail, list):
            parts = []
            for item in detail:
                loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
                parts.append(f"{loc}: {item.get('msg', 'invalid')}" if loc else str(item.get("msg", "invalid")))
            return "; ".join(parts)
    return str(body)


def _load_config_section(path: str | None, section: str) -> dict[str, Any]:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise ValueError("config file must hold a JSON object keyed by subcommand")
    part = config.get(section, {})
    if not isinstance(part, dict):
        raise ValueError(f"config section {section!r} must be a JSON object")
    return dict(part)


def _merge_payload(args: argparse.Namespace, fields: list[str]) -> dict[str, Any]:
    payload = _load_config_section(args.config, args.subcommand)
    for name in fields:
        value = getattr(args, name)
        if value is not None:
            payload[name] = value
    return payload


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    parser.add_argument("--out", help="output file (default: stdout); written atomically")
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    parser.add_argument("--config", help="JSON config file with per-subcommand defaults")


def _flat_cavity(args: argparse.Namespace) -> dict[str, Any] | None:
    spec = {
        key: value
        for key, value in (
            ("model", getattr(args, "model", None)),
            ("r", getattr(args, "r", None)),
            ("m", getattr(args, "m", None)),
            ("lambda", getattr(args, "lam", None)),
            ("t", getattr(args, "t", None)),
        )
        if value is not None
    }
    return spec or None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavwalk",
        description="Coined quantum walks on the line with a cavity-driven coin.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    walk = sub.add_parser("walk", help="evolve the walk and emit the position distribution")
    walk.add_argument("--steps", type=int, help="number of walk steps (>= 0)")
    walk.add_argument("--k", type=int, help="substeps per walk step (default 2)")
    walk.add_argument("--chi", type=parse_angle, help="coin angle in radians (pi literals allowed)")
    walk.add_argument("--cavity", type=parse_cavity_spec, help="cavity spec model=...,r=...[,m=...][,lambda=...][,t=...]")
    _add_common(walk)

    limit = sub.add_parser("limit", help="emit the limit probability density on its support")
    limit.add_argument("--chi", type=parse_angle, help="coin angle in radians")
    limit.add_argument("--samples", type=int, help="number of interior sample points (default 201)")
    limit.add_argument("--cavity", type=parse_cavity_spec, help="cavity spec model=...,r=...[,m=...][,lambda=...][,t=...]")
    _add_common(limit)

    cavity = sub.add_parser("cavity", help="send a coin state through a cavity channel")
    cavity.add_argument("--model", choices=("jcm", "id", "2ph", "mph"), help="interaction variant")
    cavity.add_argument("--r", type=int, help="field Fock level (default 0)")
    cavity.add_argument("--m", type=int, help="photon multiplicity (mph only)")
    cavity.add_argument("--lambda", dest="lam", type=float, help="coupling strength (default 1)")
    cavity.add_argument("--t", type=parse_angle, help="interaction time (pi literals allowed)")
    cavity.add_argument("--chi", type=parse_angle, help="coin angle in radians")
    _add_common(cavity)

    resonance = sub.add_parser("resonance", help="list interaction times where the walk turns classical")
    resonance.add_argument("--model", choices=("jcm", "id", "2ph", "mph"), help="interaction variant")
    resonance.add_argument("--r", type=int, help="field Fock level (default 0)")
    resonance.add_argument("--m", type=int, help="photon multiplicity (mph only)")
    resonance.add_argument("--lambda", dest="lam", type=float, help="coupling strength (default 1)")
    resonance.add_argument("--chi", type=parse_angle, help="coin angle in radians")
    resonance.add_argument("--count", type=int, help="how many resonance times to emit (default 1)")
    _add_common(resonance)

    converge = sub.add_parser("converge", help="convergence of the walk to its limit law over a list of n")
    converge.add_argument("--steps", type=int, nargs="+", help="list of step counts")
    converge.add_argument("--k", type=int, help="substeps per walk step (default 2)")
    converge.add_argument("--chi", type=parse_angle, help="coin angle in radians")
    converge.add_argument("--cavity", type=parse_cavity_spec, help="cavity spec model=...,r=...[,m=...][,lambda=...][,t=...]")
    _add_common(converge)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _emit(args: argparse.Namespace, payload: dict[str, Any]) -> None:
    text = render_json(payload) if args.format == "json" else render_csv(payload)
    if args.out:
        write_text_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.subcommand == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        if args.subcommand == "walk":
            request = _merge_payload(args, ["steps", "k", "chi", "cavity"])
        elif args.subcommand == "limit":
            request = _merge_payload(args, ["chi", "samples", "cavity"])
        elif args.subcommand == "converge":
            request = _merge_payload(args, ["steps", "k", "chi", "cavity"])
        elif args.subcommand == "cavity":
            request = _load_config_section(args.config, "cavity")
            if args.chi is not None:
                request["chi"] = args.chi
            flat = _flat_cavity(args)
            if flat:
                request["cavity"] = {**request.get("cavity", {}), **flat}
        else:  # resonance
            request = _load_config_section(args.config, "resonance")
            for name in ("chi", "count"):
                value = getattr(args, name)
                if value is not None:
                    request[name] = value
            flat = _flat_cavity(args)
            if flat:
                request["cavity"] = {**request.get("cavity", {}), **flat}
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"cavwalk: config error: {exc}", file=sys.stderr)
        return 2

    try:
        status, body = post_request(args.server, f"/{args.subcommand}", request)
    except httpx.HTTPError as exc:
        print(f"cavwalk: cannot reach service: {exc}", file=sys.stderr)
        return 2

    if status == 200:
        _emit(args, body)
        return 0
    message = _describe_error(body)
    if status in (400, 422):
        print(f"cavwalk: invalid parameters: {message}", file=sys.stderr)
        return 2
    print(f"cavwalk: service error ({status}): {message}", file=sys.stderr)
    return 3


if __name__ == "__main__":
    sys.exit(main())

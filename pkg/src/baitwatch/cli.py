"""Thin command-line client for the pipeline service.

Every subcommand turns into an HTTP call. Without --server the app runs
in-process behind an ASGI transport (batch mode against a local store);
with --server the same requests go to a remote instance.

Exit codes: 0 success, 1 stage/request failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from datetime import date
from pathlib import Path

import httpx

from .config import load_config
from .errors import ConfigError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baitwatch",
        description="Measurement pipeline for hosts distributing SEO-bait PDFs",
    )
    parser.add_argument("--config", "-C", help="key=value config file")
    parser.add_argument("--server", help="base URL of a running service; "
                        "default runs the service in-process")
    parser.add_argument("--base-dir", default=".",
                        help="directory anchoring relative store paths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse PDFs and register their backlinks")
    p.add_argument("files", nargs="+")
    p.add_argument("--day", default=date.today().isoformat())
    p.add_argument("--source", default="seed", choices=("seed", "extracted"))

    p = sub.add_parser("probe", help="daily URL monitoring")
    probe_sub = p.add_subparsers(dest="probe_command", required=True)
    pr = probe_sub.add_parser("run")
    pr.add_argument("--day", required=True)
    probe_sub.add_parser("report")

    p = sub.add_parser("netmeta", help="DNS/WHOIS enrichment")
    net_sub = p.add_subparsers(dest="netmeta_command", required=True)
    ne = net_sub.add_parser("enrich")
    ne.add_argument("--input", required=True, help="file with one URL per line")

    p = sub.add_parser("hosting", help="hosting-type identification")
    host_sub = p.add_subparsers(dest="hosting_command", required=True)
    host_sub.add_parser("classify")
    hr = host_sub.add_parser("report")
    hr.add_argument("--by", default="fqdn", choices=("fqdn", "pdf"))

    p = sub.add_parser("ioc", help="indicators of compromise")
    ioc_sub = p.add_subparsers(dest="ioc_command", required=True)
    sc = ioc_sub.add_parser("scan")
    sc.add_argument("--plan", action="store_true", default=True)
    ac = ioc_sub.add_parser("acl")
    ac.add_argument("--buckets", required=True,
                    help="comma-separated bucket names")

    p = sub.add_parser("cluster", help="visual-bait clustering")
    cluster_sub = p.add_subparsers(dest="cluster_command", required=True)
    cr = cluster_sub.add_parser("run")
    cr.add_argument("--embeddings", required=True)
    cr.add_argument("--anchors", required=True)

    p = sub.add_parser("embed", help="delegate to the embedding trainer package")
    p.add_argument("args", nargs=argparse.REMAINDER)

    p = sub.add_parser("notify", help="notification study")
    notify_sub = p.add_subparsers(dest="notify_command", required=True)
    np_ = notify_sub.add_parser("plan")
    np_.add_argument("--day", required=True)
    np_.add_argument("--seed", type=int)
    notify_sub.add_parser("render")
    na = notify_sub.add_parser("analyze")
    na.add_argument("--deadline", required=True)

    sub.add_parser("stats")

    p = sub.add_parser("run-day", help="execute the daily stage DAG")
    p.add_argument("--day", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8199)

    return parser


def make_client(args) -> httpx.AsyncClient:
    if args.server:
        return httpx.AsyncClient(base_url=args.server, timeout=300.0)
    from .pipeline import PipelineEnv
    from .probe import HttpxTransport
    from .service import create_app

    config = load_config(args.config).resolve(Path(args.base_dir))
    env = PipelineEnv(transport=HttpxTransport(
        config.user_agent(), proxies=config.vantage_proxies()))
    app = create_app(config, env)
    return httpx.AsyncClient(transport=httpx.ASGITransport(app=app),
                             base_url="http://baitwatch.local", timeout=300.0)


def _print(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


async def _call(client, method: str, path: str, payload=None, params=None) -> int:
    response = await client.request(method, path, json=payload, params=params)
    if response.status_code >= 500:
        print(f"error: {response.text}", file=sys.stderr)
        return EXIT_FAILURE
    body = response.json()
    _print(body)
    if response.status_code >= 400:
        return EXIT_FAILURE
    if isinstance(body, dict) and body.get("failed"):
        return EXIT_FAILURE
    return EXIT_OK


def _call_sync(client, method, path, payload=None, params=None) -> int:
    async def run():
        async with client:
            return await _call(client, method, path, payload, params)
    return asyncio.run(run())


def dispatch(args, client) -> int:
    cmd = args.command
    if cmd == "ingest":
        return _call_sync(client, "POST", "/ingest", {
            "pdf_paths": [str(Path(f).resolve()) for f in args.files],
            "day": args.day, "source": args.source,
        })
    if cmd == "probe":
        if args.probe_command == "run":
            return _call_sync(client, "POST", "/probe/run", {"day": args.day})
        return _call_sync(client, "GET", "/probe/report")
    if cmd == "netmeta":
        urls = [line.strip() for line in Path(args.input).read_text().splitlines()
                if line.strip()]
        return _call_sync(client, "POST", "/netmeta/enrich", {"urls": urls})
    if cmd == "hosting":
        if args.hosting_command == "classify":
            return _call_sync(client, "POST", "/hosting/classify")
        return _call_sync(client, "GET", "/hosting/report", params={"by": args.by})
    if cmd == "ioc":
        if args.ioc_command == "scan":
            return _call_sync(client, "POST", "/ioc/scan", {"plan_only": True})
        buckets = [b.strip() for b in args.buckets.split(",") if b.strip()]
        return _call_sync(client, "POST", "/ioc/acl", {"buckets": buckets})
    if cmd == "cluster":
        return _call_sync(client, "POST", "/cluster/run", {
            "embeddings": str(Path(args.embeddings).resolve()),
            "anchors": str(Path(args.anchors).resolve()),
        })
    if cmd == "notify":
        if args.notify_command == "plan":
            payload = {"day": args.day}
            if args.seed is not None:
                payload["seed"] = args.seed
            return _call_sync(client, "POST", "/notify/plan", payload)
        if args.notify_command == "render":
            return _call_sync(client, "POST", "/notify/render")
        return _call_sync(client, "POST", "/notify/analyze",
                     {"deadline": args.deadline})
    if cmd == "stats":
        return _call_sync(client, "GET", "/stats")
    if cmd == "run-day":
        return _call_sync(client, "POST", "/run-day", {"day": args.day})
    raise AssertionError(f"unhandled command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .pipeline import PipelineEnv
        from .probe import HttpxTransport
        from .service import create_app

        try:
            config = load_config(args.config).resolve(Path(args.base_dir))
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        env = PipelineEnv(transport=HttpxTransport(
            config.user_agent(), proxies=config.vantage_proxies()))
        uvicorn.run(create_app(config, env), host=args.host, port=args.port)
        return EXIT_OK

    if args.command == "embed":
        try:
            from visualbait.cli import main as embedder_main
        except ImportError:
            print("embedding trainer package is not installed "
                  "(pip install ./embedder)", file=sys.stderr)
            return EXIT_CONFIG
        return embedder_main(args.args)

    try:
        client = make_client(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return dispatch(args, client)
    except httpx.HTTPError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

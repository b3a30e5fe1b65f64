"""Command-line client for the service.

Each subcommand resolves its parameters (flags take precedence over the
--config JSON file, which takes precedence over defaults), posts one request
to the service -- in-process by default, remote with --server -- and formats
the response as CSV or JSON. Exit codes: 0 success, 2 domain error, 3 budget
error.
"""

from __future__ import annotations

import json
import sys

import click

from .errors import BudgetError, DomainError

TABLE1_COLUMNS = ("k", "lambda_star")
GRID_COLUMNS = ("k", "lambda", "d_lower", "d_ks", "d_upper", "below_ks_detectable")


class _ErrorMappingGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except DomainError as exc:
            click.echo(f"domain error: {exc}", err=True)
            ctx.exit(2)
        except BudgetError as exc:
            click.echo(f"budget error: {exc}", err=True)
            ctx.exit(3)


class ServiceClient:
    """POSTs to a remote server when given a URL, otherwise mounts the app
    in-process."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        r = self._client.post(path, json=payload)
        if r.status_code == 200:
            return json.loads(r.text)
        try:
            body = json.loads(r.text)
        except ValueError:
            body = {}
        detail = body.get("detail", r.text)
        if body.get("error") == "budget":
            raise BudgetError(str(detail))
        raise DomainError(str(detail))


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise DomainError("--config must contain a JSON object")
    return cfg


def _resolve(cfg: dict, key: str, flag, default=None):
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved.get(k) is None]
    if missing:
        raise DomainError(f"missing required parameter(s): {', '.join(missing)}")


def _parse_list(value, kind):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [kind(v) for v in value]
    return [kind(tok) for tok in str(value).split(",") if tok.strip()]


def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _emit_json(payload: dict, out: str | None) -> None:
    _write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n", out)


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _emit_csv(columns, rows, config: dict, out: str | None) -> None:
    lines = ["# config: " + json.dumps(config, sort_keys=True, allow_nan=True)]
    lines.append(",".join(columns))
    lines.extend(",".join(_csv_cell(row[c]) for c in columns) for row in rows)
    _write_text("\n".join(lines) + "\n", out)


def _format_edge_list(n: int, edges) -> str:
    lines = [f"{n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def _parse_edge_list(path: str) -> dict:
    with open(path) as fh:
        rows = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not rows:
        raise DomainError(f"empty edge-list file {path}")
    head = rows[0].split()
    if len(head) != 2:
        raise DomainError(f"bad edge-list header {rows[0]!r}")
    edges = [[int(a), int(b)] for a, b in (ln.split() for ln in rows[1:])]
    return {"n": int(head[0]), "edges": edges}


def _params_payload(resolved: dict) -> dict:
    return {
        "k": resolved.get("k"),
        "n": resolved.get("n"),
        "c_in": resolved.get("c_in"),
        "c_out": resolved.get("c_out"),
        "d": resolved.get("d"),
        "lambda": resolved.get("lambda"),
    }


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                      help="JSON file with defaults for this subcommand")(fn)
    fn = click.option("--server", default=None, help="service URL; default runs in-process")(fn)
    fn = click.option("--out", default=None, type=click.Path(), help="output file (default stdout)")(fn)
    return fn


def _model_options(fn):
    fn = click.option("--k", type=int, default=None)(fn)
    fn = click.option("--n", type=int, default=None)(fn)
    fn = click.option("--c-in", "c_in", type=float, default=None)(fn)
    fn = click.option("--c-out", "c_out", type=float, default=None)(fn)
    fn = click.option("--d", type=float, default=None)(fn)
    fn = click.option("--lambda", "lam", type=float, default=None)(fn)
    return fn


@click.group(cls=_ErrorMappingGroup)
def main():
    """Detectability thresholds and experiments for the stochastic block model."""


@main.command()
@click.option("--k", type=int, default=None)
@click.option("--lambda", "lam", type=float, default=None)
@_common_options
def thresholds(k, lam, config_path, server, out):
    """Bounds d_lower, d_KS, d_upper at one (k, lambda)."""
    cfg = _load_config(config_path)
    resolved = {"k": _resolve(cfg, "k", k), "lambda": _resolve(cfg, "lambda", lam)}
    _require(resolved, "k", "lambda")
    body = ServiceClient(server).post("/thresholds", resolved)
    _emit_json({"config": resolved, **body}, out)


@main.command()
@click.option("--ks", default=None, help="comma-separated k values")
@_common_options
def table1(ks, config_path, server, out):
    """lambda* per k as CSV (columns k, lambda_star)."""
    cfg = _load_config(config_path)
    kl = _parse_list(_resolve(cfg, "ks", ks), int)
    resolved = {"ks": kl}
    body = ServiceClient(server).post("/table1", resolved)
    _emit_csv(TABLE1_COLUMNS, body["rows"], resolved, out)


@main.command()
@click.option("--ks", default=None, help="comma-separated k values")
@click.option("--lambdas", default=None, help="comma-separated lambda values")
@click.option("--lambda-range", "lambda_range", default=None,
              help="min:max:steps, inclusive linear grid")
@_common_options
def grid(ks, lambdas, lambda_range, config_path, server, out):
    """Threshold report over a (k, lambda) grid as CSV."""
    cfg = _load_config(config_path)
    kl = _parse_list(_resolve(cfg, "ks", ks), int)
    ll = _parse_list(_resolve(cfg, "lambdas", lambdas), float)
    rng_spec = _resolve(cfg, "lambda_range", lambda_range)
    if ll is not None and rng_spec is not None:
        raise DomainError("give --lambdas or --lambda-range, not both")
    if ll is None and rng_spec is not None:
        try:
            lo, hi, steps = str(rng_spec).split(":")
            lo, hi, steps = float(lo), float(hi), int(steps)
        except ValueError:
            raise DomainError(f"bad --lambda-range {rng_spec!r}, expected min:max:steps")
        if steps < 1:
            raise DomainError("lambda-range needs at least one step")
        ll = [lo + (hi - lo) * i / (steps - 1) for i in range(steps)] if steps > 1 else [lo]
    resolved = {"ks": kl, "lambdas": ll}
    _require(resolved, "ks", "lambdas")
    body = ServiceClient(server).post("/grid", resolved)
    _emit_csv(GRID_COLUMNS, body["rows"], resolved, out)


@main.command()
@_model_options
@click.option("--model", default=None,
              type=click.Choice(["planted", "er", "er_fixed_m", "sbm_fixed_m"]))
@click.option("--m", type=int, default=None, help="edge count for fixed-m models")
@click.option("--seed", type=int, default=None)
@click.option("--stream-id", "stream_id", type=int, default=None)
@_common_options
def generate(k, n, c_in, c_out, d, lam, model, m, seed, stream_id, config_path, server, out):
    """Sample a graph; writes an edge list and, for planted models, a
    .partition label sidecar next to --out."""
    cfg = _load_config(config_path)
    resolved = {
        "k": _resolve(cfg, "k", k),
        "n": _resolve(cfg, "n", n),
        "c_in": _resolve(cfg, "c_in", c_in),
        "c_out": _resolve(cfg, "c_out", c_out),
        "d": _resolve(cfg, "d", d),
        "lambda": _resolve(cfg, "lambda", lam),
        "model": _resolve(cfg, "model", model, "planted"),
        "m": _resolve(cfg, "m", m),
        "seed": _resolve(cfg, "seed", seed, 0),
        "stream_id": _resolve(cfg, "stream_id", stream_id, 0),
    }
    _require(resolved, "k", "n")
    body = ServiceClient(server).post(
        "/generate",
        {
            "params": _params_payload(resolved),
            "model": resolved["model"],
            "m": resolved["m"],
            "seed": resolved["seed"],
            "stream_id": resolved["stream_id"],
        },
    )
    text = _format_edge_list(body["n"], body["edges"])
    _write_text(text, out)
    if out and body.get("labels") is not None:
        with open(out + ".partition", "w") as fh:
            fh.write("\n".join(str(x) for x in body["labels"]) + "\n")


@main.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None,
              help="edge-list file to search")
@_model_options
@click.option("--budget", type=float, default=None)
@click.option("--partition-out", "partition_out", type=click.Path(), default=None)
@_common_options
def detect(graph_path, k, n, c_in, c_out, d, lam, budget, partition_out, config_path, server, out):
    """Exhaustive search for a good balanced partition of a graph."""
    cfg = _load_config(config_path)
    path = _resolve(cfg, "graph", graph_path)
    if path is None:
        raise DomainError("missing required parameter(s): graph")
    resolved = {
        "graph": str(path),
        "k": _resolve(cfg, "k", k),
        "c_in": _resolve(cfg, "c_in", c_in),
        "c_out": _resolve(cfg, "c_out", c_out),
        "d": _resolve(cfg, "d", d),
        "lambda": _resolve(cfg, "lambda", lam),
        "budget": _resolve(cfg, "budget", budget, 1e9),
    }
    _require(resolved, "k")
    g = _parse_edge_list(resolved["graph"])
    body = ServiceClient(server).post(
        "/detect",
        {
            "graph": g,
            "k": resolved["k"],
            "c_in": resolved["c_in"],
            "c_out": resolved["c_out"],
            "d": resolved["d"],
            "lambda": resolved["lambda"],
            "budget": resolved["budget"],
        },
    )
    _emit_json({"config": resolved, **body}, out)
    if partition_out and body.get("found"):
        with open(partition_out, "w") as fh:
            fh.write("\n".join(str(x) for x in body["labels"]) + "\n")


@main.command()
@click.option("--k", type=int, default=None)
@click.option("--d", type=float, default=None)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--stream-id", "stream_id", type=int, default=None)
@_common_options
def phi(k, d, lam, restarts, seed, stream_id, config_path, server, out):
    """Maximize Phi over doubly stochastic matrices and certify its sign."""
    cfg = _load_config(config_path)
    resolved = {
        "k": _resolve(cfg, "k", k),
        "d": _resolve(cfg, "d", d),
        "lambda": _resolve(cfg, "lambda", lam),
        "restarts": _resolve(cfg, "restarts", restarts, 8),
        "seed": _resolve(cfg, "seed", seed, 0),
        "stream_id": _resolve(cfg, "stream_id", stream_id, 0),
    }
    _require(resolved, "k", "d", "lambda")
    body = ServiceClient(server).post("/phi", resolved)
    _emit_json({"config": resolved, **body}, out)


@main.command()
@click.option("--k", type=int, default=None)
@click.option("--d", type=float, default=None)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--stream-id", "stream_id", type=int, default=None)
@_common_options
def secondmoment(k, d, lam, n, trials, seed, stream_id, config_path, server, out):
    """Monte Carlo estimate of the annealed second moment E_Q (P/Q)^2."""
    cfg = _load_config(config_path)
    resolved = {
        "k": _resolve(cfg, "k", k),
        "d": _resolve(cfg, "d", d),
        "lambda": _resolve(cfg, "lambda", lam),
        "n": _resolve(cfg, "n", n),
        "trials": _resolve(cfg, "trials", trials, 1000),
        "seed": _resolve(cfg, "seed", seed, 0),
        "stream_id": _resolve(cfg, "stream_id", stream_id, 0),
    }
    _require(resolved, "k", "d", "lambda", "n")
    body = ServiceClient(server).post("/secondmoment", resolved)
    _emit_json({"config": resolved, **body}, out)


@main.command()
@_model_options
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--stream-id", "stream_id", type=int, default=None)
@click.option("--budget", type=float, default=None)
@click.option("--workers", type=int, default=None)
@_common_options
def distinguish(k, n, c_in, c_out, d, lam, trials, seed, stream_id, budget, workers,
                config_path, server, out):
    """Good-partition rates on planted vs null graphs, plus detection overlap."""
    cfg = _load_config(config_path)
    resolved = {
        "k": _resolve(cfg, "k", k),
        "n": _resolve(cfg, "n", n),
        "c_in": _resolve(cfg, "c_in", c_in),
        "c_out": _resolve(cfg, "c_out", c_out),
        "d": _resolve(cfg, "d", d),
        "lambda": _resolve(cfg, "lambda", lam),
        "trials": _resolve(cfg, "trials", trials, 100),
        "seed": _resolve(cfg, "seed", seed, 0),
        "stream_id": _resolve(cfg, "stream_id", stream_id, 0),
        "budget": _resolve(cfg, "budget", budget, 1e9),
        "workers": _resolve(cfg, "workers", workers, 1),
    }
    _require(resolved, "k", "n", "trials")
    body = ServiceClient(server).post(
        "/distinguish",
        {
            "params": _params_payload(resolved),
            "trials": resolved["trials"],
            "seed": resolved["seed"],
            "stream_id": resolved["stream_id"],
            "budget": resolved["budget"],
            "workers": resolved["workers"],
        },
    )
    _emit_json({"config": resolved, **body}, out)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service under uvicorn."""
    import uvicorn

    uvicorn.run("sbmbounds.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

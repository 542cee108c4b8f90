"""Command-line front end.

Each command is a thin client of the HTTP service: by default the app is
mounted in-process, `--server URL` targets a remote instance.  Every output
file gets a `<file>.manifest.json` sidecar recording the command, input
hashes, the fully resolved configuration, tool version, and timestamp.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .circuit import Waveform, waveforms_to_csv
from .footprint import format_report
from .manifest import RunManifest

EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class NumericalFailure(RuntimeError):
    pass


class InputFailure(RuntimeError):
    pass


class _Client:
    """Sync client for the service, in-process unless a server is given."""

    def __init__(self, server: str | None):
        if server:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service import create_app
            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code == 422 and "detail" in resp.json():
            detail = resp.json()["detail"]
            # pydantic validation errors also use 422; treat structured
            # validation output as an input problem, plain text as numerical
            if isinstance(detail, str):
                raise NumericalFailure(detail)
            raise InputFailure(json.dumps(detail))
        if resp.status_code >= 400:
            raise InputFailure(str(resp.json().get("detail", resp.text)))
        return resp.json()


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputFailure(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFailure(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputFailure(f"{path}: config must be a JSON object")
    return doc


def _resolve(flag_value, config: dict, key: str, default):
    """Flag beats config beats default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _card_doc(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputFailure(f"cannot read card {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFailure(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    return doc


def _parse_sweep(text: str) -> list:
    """'start:stop:step' range (inclusive endpoints) or comma list."""
    import numpy as np
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputFailure(f"bad sweep {text!r}; want start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise InputFailure(f"non-numeric sweep bound in {text!r}") from None
        if step == 0 or (stop - start) * step < 0:
            raise InputFailure(f"empty sweep range {text!r}")
        n = int(round((stop - start) / step))
        return [start + k * step for k in range(n + 1)]
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputFailure(f"non-numeric value in list {text!r}") from None
    if not values:
        raise InputFailure(f"empty sweep list {text!r}")
    return values


def _parse_list(text: str, kind=float) -> list:
    try:
        values = [kind(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputFailure(f"non-numeric value in list {text!r}") from None
    if not values:
        raise InputFailure(f"empty list {text!r}")
    return values


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out_file: Path, command: str, inputs, config: dict):
    m = RunManifest(command=command, config=config)
    for p in inputs:
        if p is not None:
            m.add_input(p)
    m.write_beside(out_file)


def _common(f):
    f = click.option("--server", default=None, metavar="URL",
                     help="Remote service URL (default: in-process).")(f)
    f = click.option("--config", "config_path", default=None, metavar="JSON",
                     help="JSON config file; flags override its values.")(f)
    f = click.option("--seed", default=None, type=int,
                     help="Seed for any randomized step.")(f)
    f = click.option("--out", "out", required=True, metavar="DIR",
                     help="Output directory.")(f)
    return f


@click.group()
@click.version_option(__version__)
def cli():
    """Vertical-nanowire FET modeling toolkit."""


@cli.command("iv")
@click.option("--card", "card_path", default=None, metavar="FILE",
              help="Model-card JSON (default: shipped calibrated card).")
@click.option("--vgs", default=None, metavar="SWEEP",
              help="Gate sweep, 'start:stop:step' or comma list [V].")
@click.option("--vds", default=None, metavar="SWEEP",
              help="Drain sweep, 'start:stop:step' or comma list [V].")
@_common
def cmd_iv(card_path, vgs, vds, out, seed, config_path, server):
    """Terminal-current grid over a (vgs x vds) sweep -> iv.csv."""
    config = _load_config(config_path)
    vgs = _parse_sweep(str(_resolve(vgs, config, "vgs", "0:-1.2:-0.05")))
    vds = _parse_sweep(str(_resolve(vds, config, "vds", "-1.0")))
    card_path = _resolve(card_path, config, "card", None)
    client = _Client(server)
    data = client.post("/iv", {"card": _card_doc(card_path),
                               "vgs": vgs, "vds": vds})
    out_file = _out_dir(out) / "iv.csv"
    lines = ["vgs_v,vds_v,id_a"]
    for g, d, i in zip(data["vgs_v"], data["vds_v"], data["id_a"]):
        lines.append(f"{g!r},{d!r},{i!r}")
    out_file.write_text("\n".join(lines) + "\n")
    _write_manifest(out_file, "iv", [card_path, config_path],
                    {"card": card_path or "builtin default", "vgs": vgs,
                     "vds": vds, "seed": seed})
    click.echo(f"wrote {out_file}")


@cli.command("sim")
@click.option("--topology", default=None,
              type=click.Choice(["passive_load", "active_load", "complementary"]))
@click.option("--netlist", "netlist_path", default=None, metavar="FILE",
              help="Netlist JSON (alternative to --topology).")
@click.option("--card", "card_path", default=None, metavar="FILE")
@click.option("--nf", default=None, metavar="INT", help="Drive nanowire count.")
@click.option("--vdd", default=None, type=float, help="Supply voltage [V].")
@click.option("--freq", default=None, type=float, help="Input frequency [Hz].")
@click.option("--fanout", default=None, type=float, help="Load fanout.")
@click.option("--periods", default=None, type=float, help="Simulated periods.")
@click.option("--dt", default=None, type=float, help="Time step [s].")
@_common
def cmd_sim(topology, netlist_path, card_path, nf, vdd, freq, fanout,
            periods, dt, out, seed, config_path, server):
    """Transient-simulate a cell or netlist -> waveforms.csv."""
    config = _load_config(config_path)
    topology = _resolve(topology, config, "topology", None)
    netlist_path = _resolve(netlist_path, config, "netlist", None)
    card_path = _resolve(card_path, config, "card", None)
    nf = int(_resolve(nf, config, "nf", 1))
    resolved = {
        "vdd": float(_resolve(vdd, config, "vdd", 1.0)),
        "freq": float(_resolve(freq, config, "freq", 1e9)),
        "fanout": float(_resolve(fanout, config, "fanout", 1.0)),
        "periods": float(_resolve(periods, config, "periods", 2.0)),
        "dt": float(_resolve(dt, config, "dt", 0.1e-12)),
    }
    payload = {
        "nf": nf,
        "transient": {"n_periods": resolved["periods"], "dt_s": resolved["dt"]},
        "cell": {"vdd": resolved["vdd"], "freq": resolved["freq"],
                 "fanout": resolved["fanout"]},
    }
    if netlist_path is not None:
        try:
            payload["netlist"] = json.loads(Path(netlist_path).read_text())
        except OSError as exc:
            raise InputFailure(f"cannot read netlist {netlist_path}: {exc}")
        except json.JSONDecodeError as exc:
            raise InputFailure(f"{netlist_path}:{exc.lineno}: invalid JSON: "
                               f"{exc.msg}") from exc
    else:
        payload["topology"] = topology
        payload["card"] = _card_doc(card_path)
    client = _Client(server)
    data = client.post("/simulate", payload)
    out_file = _out_dir(out) / "waveforms.csv"
    import numpy as np
    times = np.asarray(data["time_s"])
    wfs = [Waveform(times, np.asarray(v), label)
           for label, v in data["columns"].items()]
    waveforms_to_csv(out_file, wfs)
    _write_manifest(out_file, "sim", [card_path, netlist_path, config_path],
                    {"topology": topology, "netlist": netlist_path,
                     "card": card_path or "builtin default", "nf": nf,
                     **resolved, "seed": seed})
    click.echo(f"wrote {out_file}")


@cli.command("metrics")
@click.option("--card", "card_path", default=None, metavar="FILE")
@click.option("--nf", "nf_list", default=None, metavar="LIST",
              help="Comma list of nanowire counts.")
@click.option("--fanout", "fanout_list", default=None, metavar="LIST",
              help="Comma list of fanouts for the feasibility matrix.")
@click.option("--vdd", default=None, type=float)
@click.option("--freq", default=None, type=float)
@click.option("--topology", default=None,
              type=click.Choice(["passive_load", "active_load", "complementary"]))
@click.option("--static-only", is_flag=True, help="Skip transient metrics.")
@_common
def cmd_metrics(card_path, nf_list, fanout_list, vdd, freq, topology,
                static_only, out, seed, config_path, server):
    """Static + dynamic figures of merit and fanout matrix -> metrics.json."""
    config = _load_config(config_path)
    card_path = _resolve(card_path, config, "card", None)
    nfs = _parse_list(str(_resolve(nf_list, config, "nf", "10,30,100,300")), int)
    fanouts = _parse_list(str(_resolve(fanout_list, config, "fanout", "1")))
    resolved = {
        "vdd": float(_resolve(vdd, config, "vdd", 1.0)),
        "freq": float(_resolve(freq, config, "freq", 1e9)),
        "topology": _resolve(topology, config, "topology", "complementary"),
        "dynamic": not static_only,
    }
    client = _Client(server)
    data = client.post("/metrics", {"card": _card_doc(card_path),
                                    "nf_list": nfs, "fanout_list": fanouts,
                                    **resolved})
    out_file = _out_dir(out) / "metrics.json"
    out_file.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _write_manifest(out_file, "metrics", [card_path, config_path],
                    {"card": card_path or "builtin default", "nf": nfs,
                     "fanout": fanouts, **resolved, "seed": seed})
    click.echo(f"wrote {out_file}")


@cli.command("fit")
@click.option("--card", "card_path", default=None, metavar="FILE",
              help="Starting card (default: shipped calibrated card).")
@click.option("--data", "data_path", required=True, metavar="CSV",
              help="Measured I-V data, header vgs_v,vds_v,id_a.")
@click.option("--free", default=None, metavar="LIST",
              help="Comma list of free parameters (e.g. eta,mu0).")
@click.option("--weighting", default=None,
              type=click.Choice(["log_current", "linear", "mixed"]))
@_common
def cmd_fit(card_path, data_path, free, weighting, out, seed, config_path,
            server):
    """Fit free card parameters to measured data -> fitted_card.json."""
    from .calibrate import load_iv_csv, IvDataError
    config = _load_config(config_path)
    card_path = _resolve(card_path, config, "card", None)
    free_names = [p.strip() for p in
                  str(_resolve(free, config, "free", "eta,mu0")).split(",")
                  if p.strip()]
    resolved = {
        "weighting": _resolve(weighting, config, "weighting", "mixed"),
        "seed": int(seed if seed is not None else config.get("seed", 0)),
        "free": free_names,
    }
    try:
        data = load_iv_csv(data_path)
    except (IvDataError, OSError) as exc:
        raise InputFailure(str(exc)) from exc
    client = _Client(server)
    result = client.post("/fit", {
        "card0": _card_doc(card_path),
        "vgs_v": data.vgs.tolist(), "vds_v": data.vds.tolist(),
        "id_a": data.id.tolist(),
        "fitspec": {"free": free_names, "weighting": resolved["weighting"],
                    "seed": resolved["seed"]}})
    out_dir = _out_dir(out)
    card_file = out_dir / "fitted_card.json"
    card_file.write_text(json.dumps(result["card"], indent=2) + "\n")
    res_file = out_dir / "residuals.csv"
    rows = ["vgs_v,vds_v,id_a,residual"]
    for g, d, i, r in zip(data.vgs, data.vds, data.id, result["residuals"]):
        rows.append(f"{g!r},{d!r},{i!r},{r!r}")
    res_file.write_text("\n".join(rows) + "\n")
    for f in (card_file, res_file):
        _write_manifest(f, "fit", [card_path, data_path, config_path],
                        {"card": card_path or "builtin default",
                         "data": str(data_path), **resolved,
                         "rms_decades": result["rms_decades"],
                         "converged": result["converged"],
                         "pinned": result["pinned"]})
    click.echo(f"wrote {card_file} (rms {result['rms_decades']:.4g} decades)")


@cli.command("footprint")
@click.option("--ruleset", "ruleset_path", default=None, metavar="FILE",
              help="VNWFET lambda-ruleset JSON override.")
@click.option("--lambda-nm", "lambda_nm", default=None, type=float,
              help="VNWFET lambda value override [nm].")
@_common
def cmd_footprint(ruleset_path, lambda_nm, out, seed, config_path, server):
    """Lambda-rule footprint comparison -> footprint.json (+ table)."""
    config = _load_config(config_path)
    ruleset_path = _resolve(ruleset_path, config, "ruleset", None)
    lambda_nm = _resolve(lambda_nm, config, "lambda_nm", None)
    payload = {}
    if ruleset_path is not None:
        try:
            payload["vnwfet_ruleset"] = json.loads(Path(ruleset_path).read_text())
        except OSError as exc:
            raise InputFailure(f"cannot read ruleset {ruleset_path}: {exc}")
        except json.JSONDecodeError as exc:
            raise InputFailure(f"{ruleset_path}:{exc.lineno}: invalid JSON: "
                               f"{exc.msg}") from exc
    elif lambda_nm is not None:
        payload["vnwfet_lambda_nm"] = float(lambda_nm)
    client = _Client(server)
    report = client.post("/footprint", payload)
    out_file = _out_dir(out) / "footprint.json"
    out_file.write_text(json.dumps(report, indent=2) + "\n")
    _write_manifest(out_file, "footprint", [ruleset_path, config_path],
                    {"ruleset": ruleset_path, "lambda_nm": lambda_nm,
                     "seed": seed})
    click.echo(format_report(report))
    click.echo(f"wrote {out_file}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except (InputFailure, click.ClickException, click.UsageError) as exc:
        msg = exc.format_message() if isinstance(exc, click.ClickException) else str(exc)
        click.echo(f"error: {msg}", err=True)
        return EXIT_INPUT
    except NumericalFailure as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

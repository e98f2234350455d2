"""Command-line front end.

    separatrix kernels  --f "6x^2-10x+4"
    separatrix seq      --f "9x^8" --pmax 4096 --out seq.csv
    separatrix spectrum --f "13x^12" --strict
    separatrix limit    --f "6x^2-10x+4" --pmax 20000
    separatrix verify   --f "9x^8" --A 30 --B 0.5
    separatrix fit      --f "9x^8" --pmax 20000 --p-lo 1000 --out fit.csv
    separatrix report   --f "9x^8" --pmax 4096 --outdir out/

Exit status: 0 success, 1 usage or parse error, 2 assumption failure under
--strict, 3 numerical failure.  Errors are printed as a single line
``error: <code>: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from functools import cached_property
from pathlib import Path

import numpy as np

from . import __version__, asymptotics, emit, engine
from .errors import AssumptionError, DegenerateFit, SeparatrixError
from .kernels import build_kernels, check_positivity
from .polyalg import parse_poly, render
from .spectrum import build_spectrum

log = logging.getLogger("separatrix")

SUBCOMMANDS = ("kernels", "seq", "spectrum", "limit", "verify", "fit", "report")
DEFAULT_A = 10.0
DEFAULT_B = 0.5


class UsageError(SeparatrixError):
    code = "usage"
    exit_status = 1


@dataclass
class RunConfig:
    command: str = ""
    f: str | None = None
    pmax: int = 4096
    out: str | None = None
    outdir: str = "report"
    format: str = "csv"
    threads: int = 0
    deterministic: bool = True
    strict: bool = False
    p_lo: int | None = None
    p_hi: int | None = None
    A: float = DEFAULT_A
    B: float = DEFAULT_B
    delta: float | None = None
    basis: str = "f1"

    def validate(self):
        if self.f is None:
            raise UsageError("no kernel given (use --f or a config file with 'f = ...')")
        if self.pmax < 2:
            raise UsageError("pmax must be >= 2")
        if self.threads < 0:
            raise UsageError("threads must be >= 0")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.basis not in ("f1", "f"):
            raise UsageError("basis must be f1 or f")


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; keys mirror the long flags."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in types or key == "command":
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            t = str(types[key])
            try:
                if "bool" in t:
                    out[key] = _BOOL[val.lower()]
                elif "int" in t:
                    out[key] = int(val)
                elif "float" in t:
                    out[key] = float(val)
                else:
                    out[key] = val
            except (KeyError, ValueError):
                raise UsageError(f"{path}:{lineno}: bad value {val!r} for {key}") from None
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--f", dest="f", help="kernel, e.g. '6x^2-10x+4' or 'coeffs:4,-10,6'")
    common.add_argument("--config", help="flat key = value file mirroring the flags")
    common.add_argument("--pmax", type=int)
    common.add_argument("--out")
    common.add_argument("--outdir")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", type=int, help="worker threads (0 = auto); env SEPARATRIX_THREADS")
    common.add_argument("--deterministic", dest="deterministic", action="store_true", default=None)
    common.add_argument("--no-deterministic", dest="deterministic", action="store_false")
    common.add_argument("--strict", action="store_true", default=None)
    common.add_argument("--p-lo", dest="p_lo", type=int)
    common.add_argument("--p-hi", dest="p_hi", type=int)
    common.add_argument("--A", dest="A", type=float)
    common.add_argument("--B", dest="B", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--basis", choices=("f1", "f"), help="build f2, f3 from f1 (default) or from f")

    parser = _Parser(prog="separatrix", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"separatrix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "kernels": "print f, f1, f2, f3, K and the positivity verdict",
        "seq": "write the sequence table CSV",
        "spectrum": "write the characteristic spectrum JSON",
        "limit": "estimate the limit a_inf",
        "verify": "check the inductive inequalities",
        "fit": "log-periodic fit of b_p",
        "report": "run everything and write plot-ready files",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        values.update(read_config(ns.config))
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            values[f.name] = v
    if "threads" not in values:
        env = os.environ.get("SEPARATRIX_THREADS")
        if env:
            try:
                values["threads"] = int(env)
            except ValueError:
                raise UsageError(f"SEPARATRIX_THREADS={env!r} is not an integer") from None
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


class Run:
    """Lazily computed products for one configuration."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    @cached_property
    def f_raw(self):
        return parse_poly(self.cfg.f)

    @cached_property
    def kernels(self):
        return build_kernels(self.f_raw, basis=self.cfg.basis)

    @cached_property
    def positivity(self):
        rep = check_positivity(self.kernels.f1)
        if not rep.passed:
            msg = f"f1 positivity not certified ({rep.status}; min {rep.min_value:.6g} at x = {rep.min_location:.6g})"
            if self.cfg.strict:
                raise AssumptionError(msg)
            log.warning("%s; continuing with dynamic checks", msg)
        return rep

    @cached_property
    def table(self):
        self.positivity
        return engine.compute_sequence(
            self.kernels, self.cfg.pmax, threads=self.cfg.threads,
            deterministic=self.cfg.deterministic, force=True,
        )

    @cached_property
    def spectrum(self):
        s = build_spectrum(self.kernels)
        if self.cfg.strict and s.assumption3 == "Fails":
            bad = max((r for r in s.all_roots if r is not s.trivial_root), key=lambda r: r.re)
            raise AssumptionError(
                f"Assumption 3 fails: root {bad.re:.6g}{bad.im:+.6g}i has positive real part"
            )
        return s

    @cached_property
    def meta(self) -> dict:
        cfg = self.cfg
        m = {
            "tool": "separatrix",
            "version": __version__,
            "kernel": render(self.f_raw),
            "kernel_normalized": render(self.kernels.f),
            "basis": cfg.basis,
            "pmax": cfg.pmax,
            "backend": engine.BACKEND,
            "deterministic": cfg.deterministic,
            "delta_rule": "delta = min(1/4, -sigma1/2); delta = 1/4 and sigma1 = -1/2 when Sigma' is empty",
            "p_lo": cfg.p_lo if cfg.p_lo is not None else asymptotics.default_p_lo(cfg.pmax),
            "p_hi": cfg.p_hi if cfg.p_hi is not None else cfg.pmax,
            "A": cfg.A,
            "B": cfg.B,
            "delta": cfg.delta if cfg.delta is not None else "auto",
        }
        if not cfg.deterministic:
            m["threads"] = engine.resolve_threads(cfg.threads)
        return m

    # products -----------------------------------------------------------

    def kernels_payload(self) -> dict:
        k, rep = self.kernels, self.positivity
        return {
            "f": render(k.f), "f1": render(k.f1), "f2": render(k.f2), "f3": render(k.f3), "K": k.K,
            "basis": k.basis,
            "positivity": {
                "passed": rep.passed, "status": rep.status, "min_value": rep.min_value,
                "min_location": rep.min_location, "certified_lower_bound": rep.lower_bound,
            },
        }

    def seq_csv(self) -> str:
        t = self.table
        p = t.p[1:]
        return emit.csv_text(self.meta, ["p", "log_lambda", "a", "b"], [p, t.log_lambda[1:], t.a[1:], t.b[1:]])

    def spectrum_payload(self) -> dict:
        s = self.spectrum

        def root(r):
            return {"re": r.re, "im": r.im, "residual": r.residual, "multiplicity": r.multiplicity}

        return {
            "char_poly": list(s.char_poly.coeffs),
            "roots": [root(r) for r in s.all_roots],
            "sigma_prime": [root(r) for r in s.sigma_prime],
            "sigma1": s.sigma1,
            "delta": s.delta,
            "assumption3": s.assumption3,
            "strip": "Re sigma > -1",
            "notes": s.notes,
        }

    def limit_estimate(self):
        return asymptotics.estimate_a_inf(self.table, self.spectrum)

    def limit_payload(self) -> dict:
        e = self.limit_estimate()
        return {"raw": e.raw, "extrapolated": e.extrapolated, "uncertainty": e.uncertainty,
                "model": e.model, "window": list(e.window)}

    def verify_payload(self) -> dict:
        delta = self.cfg.delta if self.cfg.delta is not None else self.spectrum.delta
        if delta is None:
            return {"status": "skipped", "reason": "no admissible delta (sigma1 >= 0); pass --delta"}
        try:
            rep = asymptotics.verify_inductive(self.table, self.cfg.A, self.cfg.B, delta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return {
            "status": "checked", "A": rep.A, "B": rep.B, "delta": rep.delta, "p0": rep.p0,
            "passed": rep.passed, "minimal_A": rep.minimal_A, "argmax_p": rep.argmax_p,
            "violation_count": len(rep.violations),
            "violations": [asdict(v) for v in rep.violations[:1000]],
        }

    def fit_products(self) -> tuple[str, str, bool]:
        try:
            fit = asymptotics.fit_log_periodic(self.table, self.spectrum, self.cfg.p_lo, self.cfg.p_hi)
        except DegenerateFit as exc:
            csv = emit.csv_text(self.meta, ["p", "b_rescaled", "cos_ref"], [[], [], []])
            return csv, emit.json_text(self.meta, {"status": "degenerate", "reason": str(exc)}), False
        csv = emit.csv_text(self.meta, ["p", "b_rescaled", "cos_ref"], [fit.p, fit.b_rescaled, fit.cos_ref])
        summary = {
            "status": "fitted", "sigma": fit.sigma, "amplitude": fit.amplitude, "phase": fit.phase,
            "rms_error": fit.rms_error, "zero_interlacing": fit.zero_interlacing,
            "window": [fit.p_lo, fit.p_hi], "zeros_b_rescaled": fit.zeros_b, "zeros_cos_ref": fit.zeros_ref,
        }
        return csv, emit.json_text(self.meta, summary), True

    def residuals_csv(self) -> str:
        t, k = self.table, self.kernels
        rl = asymptotics.residual_linearized(t, k, threads=self.cfg.threads)
        ra = asymptotics.residual_a_recurrence(t, k, threads=self.cfg.threads)
        meta = dict(self.meta)
        meta["decay_exponent_linearized"] = emit.fmt(rl.fitted_decay_exponent)
        meta["decay_exponent_a_recurrence"] = emit.fmt(ra.fitted_decay_exponent)
        return emit.csv_text(meta, ["p", "residual_linearized", "residual_a_recurrence"], [rl.p, rl.values, ra.values])


PLOTS = {
    "plot_a.gp": ("a_p versus p", "seq.csv", "a_p", "plot_a.png", '"seq.csv" using 1:3 with lines title "a_p"'),
    "plot_pb.gp": ("p*b_p versus p", "seq.csv", "p b_p", "plot_pb.png",
                   '"seq.csv" using 1:($1*$4) with lines title "p b_p"'),
    "plot_fit.gp": ("rescaled b_p and cosine reference", "fit.csv", "b_p p^{-Re sigma_1}", "plot_fit.png",
                    '"fit.csv" using 1:2 with lines title "rescaled b_p", '
                    '"fit.csv" using 1:3 with lines title "cos(Im sigma_1 ln p)"'),
}


def plot_script(name: str) -> str:
    title, _, ylabel, png, plot = PLOTS[name]
    return "\n".join([
        f"# {title}; render with: gnuplot {name}",
        'set datafile separator ","',
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f'set output "{png}"',
        "set logscale x",
        'set xlabel "p"',
        f'set ylabel "{ylabel}"',
        f"plot {plot}",
        "",
    ])


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        emit.write(cfg.out, text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        r = Run(cfg)
        cmd = cfg.command
        if cmd == "kernels":
            payload = r.kernels_payload()
            if cfg.format == "json" or cfg.out:
                _emit(cfg, emit.json_text(r.meta, payload))
            else:
                for key in ("f", "f1", "f2", "f3"):
                    print(f"{key}: {payload[key]}")
                print(f"K: {emit.fmt(payload['K'])}")
                pos = payload["positivity"]
                print(f"positivity: {pos['status']} (min {emit.fmt(pos['min_value'])} at x = {emit.fmt(pos['min_location'])})")
        elif cmd == "seq":
            if cfg.format == "json":
                t = r.table
                _emit(cfg, emit.json_text(r.meta, {"p": t.p[1:].tolist(), "log_lambda": t.log_lambda[1:].tolist(),
                                                    "a": t.a[1:].tolist(), "b": t.b[1:].tolist()}))
            else:
                _emit(cfg, r.seq_csv())
        elif cmd == "spectrum":
            _emit(cfg, emit.json_text(r.meta, r.spectrum_payload()))
        elif cmd == "limit":
            payload = r.limit_payload()
            if cfg.out:
                emit.write(cfg.out, emit.json_text(r.meta, payload))
            print(f"a_inf (extrapolated): {emit.fmt(payload['extrapolated'])}")
            print(f"a_inf (raw, p = {cfg.pmax}): {emit.fmt(payload['raw'])}")
            print(f"uncertainty: {emit.fmt(payload['uncertainty'])}")
        elif cmd == "verify":
            _emit(cfg, emit.json_text(r.meta, r.verify_payload()))
        elif cmd == "fit":
            csv, summary, ok = r.fit_products()
            if cfg.out:
                emit.write(cfg.out, csv)
                emit.write(Path(cfg.out).with_suffix(".json"), summary)
            else:
                sys.stdout.write(summary)
            if not ok:
                raise DegenerateFit("Sigma' is empty or b_p vanishes; nothing to fit")
        elif cmd == "report":
            out = Path(cfg.outdir)
            files = {
                "kernels.json": emit.json_text(r.meta, r.kernels_payload()),
                "seq.csv": r.seq_csv(),
                "spectrum.json": emit.json_text(r.meta, r.spectrum_payload()),
                "limit.json": emit.json_text(r.meta, r.limit_payload()),
                "verify.json": emit.json_text(r.meta, r.verify_payload()),
            }
            if cfg.pmax >= 64:
                files["residuals.csv"] = r.residuals_csv()
            fit_csv, fit_json, _ = r.fit_products()
            files["fit.csv"] = fit_csv
            files["fit.json"] = fit_json
            for name in PLOTS:
                files[name] = plot_script(name)
            for name, text in files.items():
                emit.write(out / name, text)
            print(f"wrote {len(files)} files to {out}")
        return 0
    except SeparatrixError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except (ValueError, OSError) as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s", stream=sys.stderr)
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

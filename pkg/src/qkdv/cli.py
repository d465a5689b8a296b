"""Command-line driver: tables, spectra, verifiers and Hodge integrals."""
from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import click

from .exact import fmt_q
from .hierarchy import ENGINE_VERSION, Hierarchy


@dataclass
class RunConfig:
    kmax: int = 6
    jmax: int | None = None          # defaults to kmax + 1
    nmax: int = 6
    mmax: int = 1
    kset: tuple[int, ...] = (1, 2, 3)
    cache: str | None = None
    format: str = "json"
    qtrunc: int = 40
    jobs: int = 1
    gmax: int = 6

    def __post_init__(self):
        self.kset = tuple(self.kset)
        if self.jmax is None:
            self.jmax = self.kmax + 1
        self.validate()

    def validate(self):
        for name in ("kmax", "jmax", "nmax", "mmax", "qtrunc", "gmax"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.jmax > self.kmax + 1:
            raise ValueError("jmax must not exceed kmax + 1")
        if not self.kset or min(self.kset) < 0:
            raise ValueError("kset must be a non-empty set of levels >= 0")
        if self.format not in ("json", "csv"):
            raise ValueError("format is json or csv")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kset"] = list(self.kset)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def hierarchy(self) -> Hierarchy:
        return Hierarchy(cache_dir=self.cache)


def _parse_kset(text):
    if text is None:
        return None
    return tuple(sorted({int(x) for x in text.replace(" ", "").split(",") if x}))


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _lam(lam) -> str:
    return "(" + ",".join(map(str, lam.parts)) + ")"


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run configuration.")
@click.option("--kmax", type=int)
@click.option("--jmax", type=int)
@click.option("--nmax", type=int)
@click.option("--mmax", type=int)
@click.option("--kset", help="Comma separated levels used to separate eigenvalues.")
@click.option("--cache", envvar="QKDV_CACHE", type=click.Path(file_okay=False), help="Table cache directory.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]))
@click.option("--jobs", type=int)
@click.option("--qtrunc", type=int)
@click.option("--gmax", type=int)
@click.pass_context
def main(ctx, config_path, kmax, jmax, nmax, mmax, kset, cache, fmt, jobs, qtrunc, gmax):
    """Exact quantum KdV spectra on the bosonic Fock space."""
    base = RunConfig.load(config_path).to_dict() if config_path else {}
    over = {"kmax": kmax, "jmax": jmax, "nmax": nmax, "mmax": mmax, "kset": _parse_kset(kset),
            "cache": cache, "format": fmt, "jobs": jobs, "qtrunc": qtrunc, "gmax": gmax}
    base.update({k: v for k, v in over.items() if v is not None})
    if kmax is not None and jmax is None and "jmax" in base and base["jmax"] > kmax + 1:
        base["jmax"] = None
    try:
        ctx.obj = RunConfig.from_dict(base)
    except (ValueError, TypeError) as e:
        raise click.BadParameter(str(e))


@main.command("config")
@click.option("--save", type=click.Path(dir_okay=False))
@click.pass_obj
def cmd_config(cfg: RunConfig, save):
    """Print (or save) the effective configuration."""
    if save:
        cfg.save(save)
    click.echo(_dump(cfg.to_dict()), nl=False)


@main.command("tables")
@click.option("--out", type=click.Path(dir_okay=False), help="Manifest destination (default: cache/manifest.json).")
@click.option("--show", is_flag=True, help="Also print the differential polynomials.")
@click.pass_obj
def cmd_tables(cfg: RunConfig, out, show):
    """Compute and cache g_k^[j] for k <= kmax, j <= jmax."""
    if not cfg.cache:
        raise click.UsageError("tables needs --cache or QKDV_CACHE")
    H = cfg.hierarchy()
    keys = [(k, j) for k in range(cfg.kmax + 1) for j in range(min(cfg.jmax, k + 1) + 1)]
    for k, j in keys:
        H.table(k, j)
    manifest = H.manifest(keys)
    text = _dump(manifest)
    target = out or str(Path(cfg.cache) / "manifest.json")
    _emit(text, target)
    summary = {"engine": ENGINE_VERSION, "tables": len(keys), **H.stats, "manifest": target}
    if show:
        summary["differentialPolynomials"] = {
            str(k): repr(H.differential_polynomial(k, min(cfg.jmax, k + 1))) for k in range(-1, cfg.kmax + 1)}
    click.echo(_dump(summary), nl=False)


@main.command("spectrum")
@click.option("--c", "cval", default="0", help="Value of the zero mode (rational).")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for per-degree files.")
@click.pass_obj
def cmd_spectrum(cfg: RunConfig, cval, out):
    """Eigenvalues E_k^[m] (k <= kmax, m <= mmax) and eigenvectors on B_n for n <= nmax."""
    from fractions import Fraction

    from .spectral import InsufficientFamily, PerturbationInconsistency, perturb
    H = cfg.hierarchy()
    c = Fraction(cval)
    chunks = []
    for n in range(cfg.nmax + 1):
        try:
            data = perturb(n, cfg.mmax, kset=cfg.kset, ks=range(cfg.kmax + 1), c=c, hierarchy=H)
        except InsufficientFamily as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        except PerturbationInconsistency as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(1)
        if cfg.format == "csv":
            rows = [["n", "lambda", "k", "m", "E"]]
            rows += [[n, _lam(e.lam), k, m, fmt_q(v)] for e in data.entries for (k, m), v in sorted(e.E.items())]
            text = _csv(rows)
        else:
            text = _dump(data.to_json())
        if out:
            _emit(text, str(Path(out) / f"eigen-n{n}.{cfg.format}"))
        else:
            chunks.append(text)
    if chunks:
        click.echo("".join(chunks), nl=False)


@main.command("verify")
@click.argument("which", type=click.Choice(["thm1", "thm2", "commute", "oracle", "quasimod", "appendix"]))
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_obj
def cmd_verify(cfg: RunConfig, which, out):
    """Run one verifier; exit code 0 iff it passes."""
    H = cfg.hierarchy()
    reports = []
    extra = None
    if which == "thm1":
        from .spectral import verify_theorem1
        reports = [verify_theorem1(n, cfg.kmax, hierarchy=H) for n in range(cfg.nmax + 1)]
    elif which == "thm2":
        from .spectral import verify_theorem2
        reports = [verify_theorem2(n, hierarchy=H, kset=cfg.kset) for n in range(cfg.nmax + 1)]
    elif which == "commute":
        from .checks import verify_commute
        reports = [verify_commute(cfg.kmax, cfg.nmax, hierarchy=H)]
    elif which == "oracle":
        from .checks import verify_dubrovin, verify_oracle
        reports = [verify_dubrovin(cfg.kmax, cfg.nmax, H), verify_oracle(cfg.kmax, cfg.nmax, H)]
    elif which == "quasimod":
        ok, extra = _verify_quasimod(cfg)
    else:
        ok, extra = _verify_reference(cfg)
    if reports:
        ok = all(r.ok for r in reports)
    if cfg.format == "csv" and which == "appendix":
        text = extra["csv"]
    else:
        body = {"which": which, "ok": ok, "config": cfg.to_dict(), "engine": ENGINE_VERSION,
                "reports": [r.to_json() for r in reports]}
        if extra:
            body.update({k: v for k, v in extra.items() if k != "csv"})
        text = _dump(body)
    _emit(text, out)
    click.echo("PASS" if ok else "FAIL", err=True)
    sys.exit(0 if ok else 1)


def _fits(cfg: RunConfig, kmax: int, mmax: int):
    from .lab import eigenvalue_tables, fit_eigenvalues
    T = eigenvalue_tables(kmax, mmax, cfg.nmax, kset=cfg.kset, cache=cfg.cache, jobs=cfg.jobs)
    return fit_eigenvalues(T, kmax, mmax)


def _verify_quasimod(cfg: RunConfig):
    from .lab import q_bracket, quasimodular_check
    from .shifted import QExpr
    top = max(cfg.kmax, cfg.mmax)
    fits = _fits(cfg, cfg.kmax, cfg.mmax)
    rows = []
    ok = True
    for (k, m), f in sorted(fits.items()):
        if k + m > top:
            continue
        if not isinstance(f, QExpr):
            rows.append({"k": k, "m": m, "ok": False, "detail": f"fit falsified at {f.witness}"})
            ok = False
            continue
        res = quasimodular_check(q_bracket(f, cfg.qtrunc), k + 2 + m)
        ok &= res.ok
        rows.append({"k": k, "m": m, "fit": f.to_json(), **res.to_json()})
    return ok, {"series": rows}


def _verify_reference(cfg: RunConfig):
    from .lab import compare_reference, fit_fdnu, records_csv, shape_check
    fits = _fits(cfg, cfg.kmax, cfg.mmax)
    records, shapes = [], []
    for m in range(cfg.mmax + 1):
        fm = {k: fits[(k, m)] for k in range(cfg.kmax + 1)}
        sc = shape_check(fm, m)
        shapes.append({"m": m, "ok": sc.ok, "kChecked": sc.checked,
                       "violations": [[str(x) for x in v] for v in sc.violations]})
        records += fit_fdnu(fm, m)
    rows = compare_reference(records, cfg.mmax)
    covered = [r for r in rows if r.status != "NOT-COVERED"]
    ok = (all(s["ok"] for s in shapes) and all(r.status == "PASS" for r in covered)
          and not any(r.status == "FALSIFIED" for r in records))
    return ok, {"shape": shapes, "records": [r.to_json() for r in records],
                "rows": [r.to_json() for r in rows],
                "coverage": {"covered": len(covered), "listed": len(rows)},
                "csv": records_csv(records)}


@main.command("hodge")
@click.option("--source", type=click.Choice(["tables", "conjecture", "both"]), default="tables")
@click.option("--gmax", type=int, help="Overrides the group-level --gmax.")
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_obj
def cmd_hodge(cfg: RunConfig, source, gmax, out):
    """Integrals of lambda_s lambda_g psi^{2g-2-s} over M_{g,1}, 2 <= g <= gmax."""
    if gmax is not None:
        cfg.gmax = gmax
    from .lab import hodge_lambda2_closed
    from .spectral import hodge_closed_form_s1, hodge_integral
    H = cfg.hierarchy()
    srcs = ["tables", "conjecture"] if source == "both" else [source]
    rows = []
    ok = True
    for g in range(2, cfg.gmax + 1):
        for s in range(1, g):
            for src in srcs:
                if src == "conjecture" and s > 5:
                    continue
                r = hodge_integral(g, s, hierarchy=H, source=src)
                row = {"g": g, "s": s, "value": fmt_q(r.value), "rigor": r.label}
                closed = hodge_closed_form_s1(g) if s == 1 else (hodge_lambda2_closed(g) if s == 2 and g > 2 else None)
                if closed is not None:
                    row["closedForm"] = fmt_q(closed)
                    row["matches"] = closed == r.value
                    if s == 1 and src == "tables":
                        ok &= row["matches"]
                if src == "conjecture":
                    row["agreesWithTables"] = r.value == hodge_integral(g, s, hierarchy=H).value
                rows.append(row)
    if cfg.format == "csv":
        text = _csv([["g", "s", "value", "rigor"]] + [[r["g"], r["s"], r["value"], r["rigor"]] for r in rows])
    else:
        text = _dump({"rows": rows})
    _emit(text, out)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()

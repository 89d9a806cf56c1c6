"""Command-line front end.

Exit codes
    0   success
    2   verify: homomorphism or vertex-stabilizer check failed
    3   verify: stabilizers do not commute
    4   verify: logical operator check failed
    5   verify: sector operator check failed
    6   verify: padding or logical-count accounting failed
    64  bad command line or configuration
    70  internal decoder consistency failure
    74  file I/O error
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import assembler, decoder, verifier
from .config import ConfigError, RunConfig, config_from_dict, format_config, read_config_dict
from .pauli import format_check_matrix

EXIT_USAGE = 64
EXIT_INTERNAL = 70
EXIT_IO = 74

SUBCOMMANDS = ("build", "verify", "distance", "sample", "export")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fermicode", description="Concatenated fermion-to-qubit codes.")
    ap.add_argument("command", choices=SUBCOMMANDS)
    ap.add_argument("--config", type=Path, help="config file (key=value lines or JSON)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key; may repeat")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--p", help="comma-separated physical error rates")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--quiet", action="store_true")
    return ap


def load_config(args) -> RunConfig:
    data = read_config_dict(args.config.read_text()) if args.config else {}
    data.update(read_config_dict("\n".join(args.set)))
    for flag in ("out", "seed", "trials", "p", "threads"):
        val = getattr(args, flag)
        if val is not None:
            data[flag] = str(val)
    return config_from_dict(data)


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, flush=True)


def _build(cfg: RunConfig) -> assembler.ConcatenatedCode:
    return assembler.assemble(cfg.layout())


def cmd_build(cfg, out: Path, args) -> int:
    code = _build(cfg)
    (out / "code.json").write_text(assembler.export_bundle(code))
    _say(args, f"built N_F={code.N_F} on {code.n_qubits} qubits; wrote {out / 'code.json'}")
    return 0


def cmd_verify(cfg, out: Path, args) -> int:
    code = _build(cfg)
    rep = verifier.check_code(code)
    if code.lattice.dim == 3:
        proj = verifier.check_projection(code)
        for k, (good, total) in proj.items():
            rep.add(f"projection {k}", good == total, f"{good}/{total}", 4)
    (out / "report.json").write_text(rep.to_json())
    (out / "report.txt").write_text(rep.to_text())
    _say(args, rep.to_text().rstrip())
    return rep.exit_code


def cmd_distance(cfg, out: Path, args) -> int:
    code = _build(cfg)
    est = verifier.exact_distance_milp(code, cfg.distance_time_limit)
    upper = min(lg.op.weight for lg in code.logicals) if code.logicals else None
    row = {"d_Ff": code.d_Ff, "d_fq": code.d_fq, "N_F": code.N_F, "n_qubits": code.n_qubits,
           "lower": est.lower, "upper": est.upper, "exact": est.exact, "logical_image_bound": upper}
    (out / "distance.json").write_text(json.dumps(row, indent=1))
    _say(args, "d_Ff d_fq N_F n_qubits lower upper exact")
    _say(args, f"{code.d_Ff} {code.d_fq} {code.N_F} {code.n_qubits} {est.lower} {est.upper} {est.exact}")
    return 0


def write_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=decoder.CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def read_csv(path: Path) -> list[dict]:
    conv = {"d_fq": int, "d_Ff": int, "N_F": int, "trials": int, "seed": int}
    with path.open(newline="") as fh:
        return [{k: conv.get(k, float)(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def cmd_sample(cfg, out: Path, args) -> int:
    code = _build(cfg)
    rows, summary = [], []
    for p in cfg.p:
        t0 = time.time()

        def progress(done, total, p=p):
            _say(args, f"  p={p:g}: {done}/{total}")

        st = decoder.run_montecarlo(code, cfg.noise_model(p), cfg.trials, threads=cfg.threads,
                                    include_sector=cfg.include_sector, progress=progress)
        if st.aborts:
            _say(args, f"internal consistency aborts: {st.aborts}")
            return EXIT_INTERNAL
        rows.append(st.csv_row())
        lo, hi = st.P_b_interval()
        summary.append({"p": p, "P_b": st.P_b, "P_b_ci95": [lo, hi], "P_L": st.P_L,
                        "predicted_P_L": st.predicted_P_L(), "independence_z": st.independence_z(),
                        "seconds": round(time.time() - t0, 2)})
    write_csv(out / "samples.csv", rows)
    (out / "fit.json").write_text(json.dumps({"d_Ff": code.d_Ff, "N_F": code.N_F, "points": summary}, indent=1))
    _say(args, f"wrote {out / 'samples.csv'}")
    return 0


def cmd_export(cfg, out: Path, args) -> int:
    code = _build(cfg)
    (out / "stabilizers.txt").write_text(format_check_matrix(code.stabilizers, code.n_qubits))
    (out / "logicals.txt").write_text(format_check_matrix([lg.op for lg in code.logicals], code.n_qubits))
    (out / "code.json").write_text(assembler.export_bundle(code))
    _say(args, f"wrote check matrices to {out}")
    return 0


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "distance": cmd_distance,
            "sample": cmd_sample, "export": cmd_export}


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(format_config(cfg))
        return COMMANDS[args.command](cfg, out, args)
    except decoder.DecoderBug as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

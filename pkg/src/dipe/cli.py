"""Command-line entry point: ``dipe {estimate,variance-sweep,upsilon,reproduce}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .ensembles import EnsembleSpec
from .errors import ConfigError, ResourceCapError
from .experiments import SCENARIOS, SweepConfig, parse_int_list, run_scenario, run_variance_sweep, summary_lines
from .pauli import PauliString
from .protocol import run_protocol, variance_stderr
from .states import StatePair, inner_product, parse_state
from .tensornet import ORACLE_CAP, upsilon_mps, upsilon_oracle

EXIT_CONFIG = 2
EXIT_CAP = 3


def _ensemble_label(text: str, depth: int | None) -> str:
    t = text.strip().lower()
    aliases = {"local": "local-clifford", "global": "global-clifford"}
    t = aliases.get(t, t)
    if t == "brickwork":
        if depth is None:
            raise ConfigError("brickwork needs --depth (or brickwork:<d>)")
        t = f"brickwork:{depth}"
    return t


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def cmd_estimate(args) -> int:
    rho = parse_state(args.state_a)
    sigma = rho if args.state_b in (None, args.state_a) else parse_state(args.state_b)
    pair = StatePair(rho, sigma)
    spec = EnsembleSpec.parse(_ensemble_label(args.ensemble, args.depth), pair.n)
    rep = run_protocol(spec, pair, args.rounds, args.shots, args.seed, args.workers)
    header = "ensemble,n,m,rounds,seed,omega_hat,stderr,empirical_variance,variance_stderr\n"
    line = (
        f"{spec.label},{pair.n},{args.shots},{args.rounds},{args.seed},{rep.omega_hat!r},{rep.stderr!r},"
        f"{rep.empirical_variance!r},{variance_stderr(rep.x_values)!r}\n"
    )
    print(f"omega_hat = {rep.omega_hat:.6g} +/- {rep.stderr:.3g}  (Var X_m = {rep.empirical_variance:.6g})")
    if args.exact:
        print(f"exact tr[rho sigma] = {inner_product(pair):.6g}")
    if args.out:
        _write_text(args.out, header + line)
    return 0


def cmd_variance_sweep(args) -> int:
    labels = tuple(_ensemble_label(e, args.depth) for e in args.ensemble.split(","))
    m_values = parse_int_list(args.shots)
    result = run_variance_sweep(labels, args.state_a, args.state_b or args.state_a, m_values, args.rounds, args.seed, args.workers)
    if args.out:
        result.write(args.out)
    else:
        sys.stdout.write(result.to_csv())
    return 0


def cmd_upsilon(args) -> int:
    p = PauliString.from_label(args.pauli)
    if p.n != args.n:
        raise ConfigError(f"Pauli {args.pauli!r} has {p.n} sites, expected --n {args.n}")
    values = {}
    if args.method in ("mps", "both"):
        values["mps"] = upsilon_mps(p, args.depth, args.n)
    if args.method in ("oracle", "both"):
        values["oracle"] = upsilon_oracle(p, args.depth, args.n, cap=ORACLE_CAP)
    for name, v in values.items():
        print(f"{name}: {v!r}")
    if len(values) == 2:
        print(f"discrepancy: {abs(values['mps'] - values['oracle'])!r}")
    return 0


def cmd_reproduce(args) -> int:
    if args.config:
        config = SweepConfig.from_file(args.config, args.scenario)
    else:
        config = SweepConfig.default(args.scenario)
    config = config.with_overrides(rounds=args.rounds, seed=args.seed, workers=args.workers, out=args.out)
    config.validate()
    result = run_scenario(config)
    notes = summary_lines(config, result)
    for line in notes:
        print(line)
    out = config.out or f"{args.scenario}.csv"
    csv_path, dat_path = result.write(out, notes)
    print(f"wrote {csv_path} and {dat_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dipe", description="Distributed inner product estimation with random Clifford measurements.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="output path (CSV)")

    states = argparse.ArgumentParser(add_help=False)
    states.add_argument("--ensemble", default="local-clifford", help="local-clifford, global-clifford or brickwork:<d>")
    states.add_argument("--depth", type=int, help="brickwork depth when --ensemble brickwork")
    states.add_argument("--state-a", required=True, help="ghz:n, plus:n, zero:n, sstate:n:k:theta or haar:n:seed")
    states.add_argument("--state-b", help="defaults to --state-a")
    states.add_argument("--rounds", type=int, default=1000, help="number of rounds N")

    p = sub.add_parser("estimate", parents=[common, states], help="run the protocol once")
    p.add_argument("--shots", type=int, default=100, help="shots m per device per round")
    p.add_argument("--exact", action="store_true", help="also print the exact overlap")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("variance-sweep", parents=[common, states], help="empirical Var(X_m) over ensembles and shot counts")
    p.add_argument("--shots", default="10,100,1000", help="list of m, e.g. 10,100 or 10..50:10")
    p.set_defaults(func=cmd_variance_sweep)

    p = sub.add_parser("upsilon", help="brickwork weight Upsilon_d(P)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--pauli", required=True, help="string over I, X, Y, Z")
    p.add_argument("--method", choices=("mps", "oracle", "both"), default="mps")
    p.set_defaults(func=cmd_upsilon)

    p = sub.add_parser("reproduce", help="run a predefined sweep")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    p.add_argument("--out", help="output CSV path; a .dat file is written next to it")
    p.add_argument("--config", help="INI file with a section named after the scenario")
    p.add_argument("--rounds", type=int, help="override the number of rounds per point")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:  # ConfigError and malformed labels
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

import argparse
import csv
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any, Dict, Iterator, List, NoReturn, Sequence

from . import __version__, util
from .certificate import FeasibilityCertificate
from .channels import Noise
from .config import RunConfig
from .detectors import npt_all_cuts, npt_min_over_cuts, npt_threshold
from .partitions import Partition
from .solver import ThresholdResult, max_threshold
from .states import NamedState, parse_state
from .structure import ALL, ClassTag, DissociationClass
from .tables import CLASS_COLUMNS, NPT_COLUMNS, Cell, render, rows, table_noise
from .util import SolverGaveUp, UserError, VerificationFailed, log_step
from .verify import verify_certificate

DEFAULTS = RunConfig(
    state="ghz",
    noise="local",
    resolution=1e-3,
    seed=0,
    threads=1,
    format="csv",
    cert_dir="certificates",
    solver="sdp",
)


def parse_classes(text: str | Sequence[str] | None, n: int) -> List[DissociationClass]:
    "classes named in `text`, or every class defined for n"
    if text is None:
        tags = [t for t in ClassTag if n % 2 == 0 or t in (ClassTag.EA, ClassTag.ONE_DETACHED)]
        return [DissociationClass(t, n) for t in tags]
    names = text.split(",") if isinstance(text, str) else list(text)
    return [DissociationClass.parse(name.strip(), n) for name in names if name.strip()]


def parse_n_range(text: str) -> List[int]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as e:
        raise UserError(f"Error: bad qubit range {text!r}; use e.g. 3-6 or 3,4,6") from e


def parse_sizes(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as e:
        raise UserError(f"Error: bad cut shape {text!r}; use e.g. 1,3") from e


def input_state(spec: str, n: int) -> "NamedState | str":
    if spec.strip().lower() == ALL:
        return ALL
    return parse_state(spec, n)


@contextmanager
def output(path: str | None) -> Iterator[IO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def emit(records: List[Dict[str, Any]], fmt: str, path: str | None) -> None:
    with output(path) as f:
        if fmt == "json":
            json.dump(records, f, indent=2)
            f.write("\n")
        elif fmt == "csv":
            if not records:
                return
            writer = csv.DictWriter(f, fieldnames=list(records[0]))
            writer.writeheader()
            writer.writerows(records)
        else:
            raise UserError(f"Error: unknown format {fmt!r}; use csv or json")
    if path not in (None, "-"):
        log_step(f"results written {path}")


def certificate_name(r: ThresholdResult) -> str:
    state = r.state.replace(":", "-")
    return f"{r.cls.name}-{r.cls.n}-{state}-{r.noise.value}.json"


class Main:

    tool = "entdiss"

    def parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", help="read defaults from a RunConfig YAML file")
        common.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
        common.add_argument("--format", choices=["csv", "json"])
        common.add_argument("--out", help="write results here instead of stdout")

        solve = argparse.ArgumentParser(add_help=False)
        solve.add_argument("--noise", help="local or global")
        solve.add_argument("--classes", help="comma separated: ea,b,c,d,dge")
        solve.add_argument("--resolution", type=float)
        solve.add_argument("--seed", type=int)
        solve.add_argument("--threads", type=int)
        solve.add_argument("--solver", choices=["sdp", "multistart"])
        solve.add_argument("--cert-dir", dest="cert_dir")

        parser = argparse.ArgumentParser(
            self.tool, description="noise thresholds for multiqubit entanglement dissociation"
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        subs = parser.add_subparsers(dest="command")

        p = subs.add_parser(
            "thresholds", parents=[common, solve], help="largest q per decomposition class"
        )
        p.add_argument("--n", type=int)
        p.add_argument("--state", help="ghz, w, cluster, upb, maxmixed, random:SEED or all")

        p = subs.add_parser("table", parents=[common, solve], help="reproduce a reference table")
        p.add_argument("--which", default="I", help="I (local noise) or II (global noise)")
        p.add_argument("--scope", choices=["quick", "full"], default="quick")

        p = subs.add_parser("scaling", parents=[common, solve], help="thresholds against N")
        p.add_argument("--n-range", dest="n_range", default="3-6")
        p.add_argument("--state")

        p = subs.add_parser("npt", parents=[common], help="partial-transpose thresholds")
        p.add_argument("--n", type=int)
        p.add_argument("--state")
        p.add_argument("--noise")
        p.add_argument("--sizes", help="cut shape, e.g. 1,3; minimum over all such cuts")
        p.add_argument("--cut", help="a single cut, e.g. A|BCD")
        p.add_argument("--all-cuts", action="store_true", help="one row per cut of the shape")

        p = subs.add_parser("verify", parents=[common], help="re-verify a certificate")
        p.add_argument("path")
        p.add_argument("--restarts", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        return parser

    def settings(self, args: argparse.Namespace) -> RunConfig:
        "defaults, then the --config file, then explicit flags"
        config = DEFAULTS
        if args.config:
            try:
                with open(args.config, "r") as f:
                    config = config.merged(RunConfig.load(f))
            except OSError as e:
                raise UserError(f"Error: cannot read {args.config}: {e.strerror}") from e
        given = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
        if isinstance(given.get("classes"), str):
            given["classes"] = [c.strip() for c in given["classes"].split(",") if c.strip()]
        return config.merged(RunConfig(**given))

    def main(self, argv: Sequence[str] | None) -> None:
        parser = self.parser()
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage()
            return
        util.quiet = args.quiet
        if args.command == "verify":
            self.verify(args)
            return
        config = self.settings(args)
        if args.command == "thresholds":
            self.thresholds(config)
        if args.command == "table":
            self.table(config, args.which, args.scope)
        if args.command == "scaling":
            self.scaling(config, parse_n_range(args.n_range))
        if args.command == "npt":
            self.npt(config, args)

    def solve(
        self, config: RunConfig, cls: DissociationClass, state: "NamedState | str"
    ) -> ThresholdResult:
        assert config.noise is not None and config.resolution is not None
        return max_threshold(
            cls,
            state,
            Noise.parse(config.noise),
            resolution=config.resolution,
            engine="multistart" if config.solver == "multistart" else "sdp",
            seed=config.seed or 0,
            workers=config.threads or 1,
        )

    def save(self, r: ThresholdResult, cert_dir: Path) -> str:
        if r.certificate is None:
            return ""
        cert_dir.mkdir(parents=True, exist_ok=True)
        path = cert_dir / certificate_name(r)
        with open(path, "w") as f:
            r.certificate.dump(f)
        log_step(f"certificate written {path}")
        return str(path)

    def thresholds(self, config: RunConfig) -> None:
        if config.n is None:
            raise UserError("Error: --n is required")
        assert config.state is not None and config.cert_dir is not None
        n = config.n
        classes = parse_classes(config.classes, n)
        state = input_state(config.state, n)
        cert_dir = Path(config.cert_dir)
        cert_dir.mkdir(parents=True, exist_ok=True)
        with open(cert_dir / "run.yaml", "w") as f:
            config.dump(f)

        records = []
        gave_up = []
        for cls in classes:
            r = self.solve(config, cls, state)
            records.append(self.record(r, cert_dir))
            if r.gave_up:
                gave_up.append(cls.name)
        emit(records, config.format or "csv", config.out)
        if gave_up:
            raise SolverGaveUp(f"Error: no certificate above q=0 for {', '.join(gave_up)}")

    def record(self, r: ThresholdResult, cert_dir: Path) -> Dict[str, Any]:
        "the result row, pointing at its saved certificate"
        row = r.as_row()
        row["certificate"] = self.save(r, cert_dir)
        return row

    def table(self, config: RunConfig, which: str, scope: str) -> None:
        noise = table_noise(which)
        config = config.merged(RunConfig(noise=noise.value))
        assert config.cert_dir is not None
        cert_dir = Path(config.cert_dir)
        records = []
        for row in rows(noise, max_n=6 if scope == "full" else 4):
            state = input_state(row.state, row.n)
            for column in CLASS_COLUMNS:
                expected = row.cell(column)
                if expected is None:
                    continue
                r = self.solve(config, DissociationClass.parse(column, row.n), state)
                cell = self.cell(row.n, row.state, column, r.q_star, expected)
                cell["status"] = r.status
                cell["certificate"] = self.save(r, cert_dir)
                records.append(cell)
            if isinstance(state, str):
                continue
            for column in NPT_COLUMNS:
                expected = row.cell(column)
                if expected is None:
                    continue
                sizes = (1, row.n - 1) if column == "npt1" else (row.n // 2, row.n // 2)
                found = npt_min_over_cuts(state, noise, sizes).q_threshold
                records.append(self.cell(row.n, row.state, column, found, expected))
        emit(records, config.format or "csv", config.out)

    def cell(self, n: int, state: str, column: str, found: float | None, expected: Cell) -> Dict:
        deviation = None
        if isinstance(expected, float) and found is not None:
            deviation = round(found - expected, 4)
        return {
            "n": n,
            "state": state,
            "column": column,
            "q": "never NPT" if found is None else round(found, 4),
            "reference": render(expected),
            "deviation": "" if deviation is None else deviation,
            "status": "",
            "certificate": "",
        }

    def scaling(self, config: RunConfig, ns: List[int]) -> None:
        assert config.state is not None and config.cert_dir is not None
        cert_dir = Path(config.cert_dir)
        names = config.classes or ["ea", "dge"]
        records = []
        for n in ns:
            state = input_state(config.state, n)
            for cls in parse_classes(names, n):
                r = self.solve(config, cls, state)
                records.append(self.record(r, cert_dir))
        emit(records, config.format or "csv", config.out)

    def npt(self, config: RunConfig, args: argparse.Namespace) -> None:
        if config.n is None:
            raise UserError("Error: --n is required")
        assert config.state is not None and config.noise is not None
        n = config.n
        state = parse_state(config.state, n)
        noise = Noise.parse(config.noise)
        if args.cut:
            results = [npt_threshold(state, noise, Partition.parse(args.cut))]
        else:
            sizes = parse_sizes(args.sizes) if args.sizes else [1, n - 1]
            if args.all_cuts:
                results = npt_all_cuts(state, noise, sizes)
            else:
                # entangled once any cut of the shape is NPT
                results = [npt_min_over_cuts(state, noise, sizes)]
        records = [
            {
                "state": r.state,
                "n": n,
                "noise": r.noise.value,
                "cut": r.partition.render(),
                "q_threshold": r.describe(),
            }
            for r in results
        ]
        emit(records, config.format or "csv", config.out)

    def verify(self, args: argparse.Namespace) -> None:
        try:
            with open(args.path, "r") as f:
                cert = FeasibilityCertificate.load(f)
        except OSError as e:
            raise UserError(f"Error: cannot read {args.path}: {e.strerror}") from e
        report = verify_certificate(cert, restarts=args.restarts, seed=args.seed)
        print(report)
        if not report.ok:
            raise VerificationFailed(f"Error: {args.path} does not verify")

    def __call__(self, argv: Sequence[str] | None = None) -> NoReturn:
        try:
            self.main(argv)
        except UserError as e:
            print(e, file=sys.stderr)
            sys.exit(2)
        except VerificationFailed as e:
            print(e, file=sys.stderr)
            sys.exit(3)
        except SolverGaveUp as e:
            print(e, file=sys.stderr)
            sys.exit(4)
        sys.exit(0)


main = Main()

if __name__ == "__main__":
    main()

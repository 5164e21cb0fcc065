"""Command-line front end: codebooks, encoding, indexes, queries, simulations.

Every command takes explicit file paths, validates dimensions before doing
work, and derives all randomness from --seed, so identical invocations
produce byte-identical outputs. Failures print one machine-parseable line
(``error code=<n> kind=<slug>: <message>``) and exit with a code listed in
--help.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .codebook import Codebook
from .core import SpaceConfig, as_vector
from .errors import DimensionMismatchError, FileFormatError, MbatError
from .jsonenc import EncodingConfig, encode_value, parse_json
from .query import VectorIndex, probe_role
from .sims import (
    CapacityParams,
    DriftParams,
    capacity_run,
    drift_run,
    report_json,
    write_capacity_csv,
    write_drift_csv,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_DIMENSION = 5
EXIT_INVALID = 6

_EXIT_CODES_HELP = """\
exit codes:
  0  success
  1  internal error
  2  usage error (unknown subcommand or bad flags)
  3  I/O failure
  4  malformed codebook/index/vector file
  5  dimension mismatch between codebook, index, or vectors
  6  invalid input data (bad JSON document or config, bad parameters)
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbat",
        description="Fixed-length vector representations with orthogonal matrix binding.",
        epilog=_EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # codebook
    codebook = sub.add_parser("codebook", help="create, extend, or inspect codebooks")
    cb_sub = codebook.add_subparsers(dest="subcommand", required=True)

    cb_init = cb_sub.add_parser("init", help="create a codebook file")
    cb_init.add_argument("--dim", type=int, required=True, help="vector dimension")
    cb_init.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    cb_init.add_argument("--entry-kind", choices=["gaussian_unit", "signed_binary"],
                         default="gaussian_unit", help="raw random vector distribution")
    cb_init.add_argument("--out", required=True, help="output codebook path")
    cb_init.set_defaults(func=_cmd_codebook_init)

    cb_import = cb_sub.add_parser("import", help="import word vectors from a text table")
    cb_import.add_argument("--codebook", required=True, help="input codebook path")
    cb_import.add_argument("--table", required=True, help="text table: word followed by n floats per line")
    cb_import.add_argument("--verbatim", action="store_true", help="keep imported vectors unnormalized")
    cb_import.add_argument("--out", required=True, help="output codebook path")
    cb_import.set_defaults(func=_cmd_codebook_import)

    cb_info = cb_sub.add_parser("info", help="print codebook header as JSON")
    cb_info.add_argument("--codebook", required=True)
    cb_info.add_argument("--out", help="write the report here instead of stdout")
    cb_info.set_defaults(func=_cmd_codebook_info)

    # encode
    encode = sub.add_parser("encode", help="encode a JSON document to a vector")
    encode.add_argument("--codebook", required=True)
    encode.add_argument("--config", help="encoding config JSON (defaults apply if omitted)")
    encode.add_argument("--in", dest="input", required=True, help="JSON document path")
    encode.add_argument("--out", required=True, help="output vector path")
    encode.add_argument("--format", choices=["binary", "json"], default="binary",
                        help="binary: n little-endian f64; json: array of numbers")
    encode.set_defaults(func=_cmd_encode)

    # index
    index = sub.add_parser("index", help="build, extend, or inspect vector indexes")
    ix_sub = index.add_subparsers(dest="subcommand", required=True)

    ix_build = ix_sub.add_parser("build", help="create an index from vector files")
    ix_build.add_argument("--dim", type=int, help="dimension (inferred from the first vector if omitted)")
    ix_build.add_argument("--vec", action="append", default=[], metavar="ID=PATH",
                          help="record to add (repeatable)")
    ix_build.add_argument("--out", required=True)
    ix_build.set_defaults(func=_cmd_index_build)

    ix_add = ix_sub.add_parser("add", help="add records to an existing index")
    ix_add.add_argument("--index", required=True)
    ix_add.add_argument("--vec", action="append", default=[], metavar="ID=PATH", required=True)
    ix_add.add_argument("--out", required=True)
    ix_add.set_defaults(func=_cmd_index_add)

    ix_info = ix_sub.add_parser("info", help="print index header as JSON")
    ix_info.add_argument("--index", required=True)
    ix_info.add_argument("--out", help="write the report here instead of stdout")
    ix_info.set_defaults(func=_cmd_index_info)

    # query
    query = sub.add_parser("query", help="k-nearest-neighbor search against an index")
    query.add_argument("--index", required=True)
    query.add_argument("--k", type=int, required=True)
    query.add_argument("--in", dest="input", help="JSON document to encode as the probe")
    query.add_argument("--codebook", help="codebook for --in")
    query.add_argument("--config", help="encoding config for --in")
    query.add_argument("--vec", help="raw vector file to use as the probe")
    query.add_argument("--format", choices=["json", "csv"], default="json")
    query.add_argument("--out", help="write the report here instead of stdout")
    query.set_defaults(func=_cmd_query)

    # probe-role
    probe = sub.add_parser("probe-role", help="rank index records for one role of a document")
    probe.add_argument("--codebook", required=True)
    probe.add_argument("--index", required=True, help="candidate vectors")
    probe.add_argument("--role", required=True)
    probe.add_argument("--vec", required=True, help="document vector file")
    probe.add_argument("--k", type=int, help="keep only the top k rows")
    probe.add_argument("--format", choices=["json", "csv"], default="json")
    probe.add_argument("--out", help="write the report here instead of stdout")
    probe.set_defaults(func=_cmd_probe_role)

    # simulate
    simulate = sub.add_parser("simulate", help="capacity and norm-drift experiments")
    sim_sub = simulate.add_subparsers(dest="subcommand", required=True)

    sim_cap = sim_sub.add_parser("capacity", help="bundle membership capacity")
    sim_cap.add_argument("--dim", type=int, required=True)
    sim_cap.add_argument("--members", type=int, required=True)
    sim_cap.add_argument("--distractors", type=int, required=True)
    sim_cap.add_argument("--trials", type=int, required=True)
    sim_cap.add_argument("--seed", type=int, default=0)
    sim_cap.add_argument("--entry-kind", choices=["signed_binary", "gaussian_unit"],
                         default="signed_binary")
    sim_cap.add_argument("--format", choices=["json", "csv"], default="json")
    sim_cap.add_argument("--out", help="write the report here instead of stdout")
    sim_cap.add_argument("--plot", help="also render a figure to this path")
    sim_cap.set_defaults(func=_cmd_simulate_capacity)

    sim_drift = sim_sub.add_parser("drift", help="norm drift along binding chains")
    sim_drift.add_argument("--dim", type=int, required=True)
    sim_drift.add_argument("--depth", type=int, required=True)
    sim_drift.add_argument("--kind", choices=["orthogonal", "gaussian"], required=True)
    sim_drift.add_argument("--trials", type=int, required=True)
    sim_drift.add_argument("--seed", type=int, default=0)
    sim_drift.add_argument("--unscaled", action="store_true",
                           help="skip the 1/sqrt(n) scaling of Gaussian matrices")
    sim_drift.add_argument("--format", choices=["json", "csv"], default="json")
    sim_drift.add_argument("--out", help="write the report here instead of stdout")
    sim_drift.add_argument("--plot", help="also render a figure to this path")
    sim_drift.set_defaults(func=_cmd_simulate_drift)

    return parser


# -- shared helpers -----------------------------------------------------------


def _load_codebook(path: str) -> Codebook:
    with open(path, "rb") as fh:
        return Codebook.load(fh)


def _load_index(path: str) -> VectorIndex:
    with open(path, "rb") as fh:
        return VectorIndex.load(fh)


def _read_vector_file(path: str) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) % 8 != 0:
        raise FileFormatError(f"vector file {path} has {len(data)} bytes, not a multiple of 8")
    if not data:
        raise FileFormatError(f"vector file {path} is empty")
    vec = np.frombuffer(data, dtype="<f8").astype(np.float64)
    return as_vector(vec)


def _write_vector_file(path: str, vec: np.ndarray, fmt: str) -> None:
    if fmt == "binary":
        Path(path).write_bytes(np.asarray(vec, dtype=np.float64).astype("<f8").tobytes())
    else:
        Path(path).write_text(json.dumps([float(x) for x in vec]) + "\n")


def _load_encoding_config(path: str | None) -> EncodingConfig:
    if path is None:
        return EncodingConfig()
    return EncodingConfig.from_json(Path(path).read_text(encoding="utf-8"))


def _parse_vec_args(items: list[str]) -> list[tuple[str, str]]:
    out = []
    for item in items:
        record_id, sep, path = item.partition("=")
        if not sep or not record_id or not path:
            raise ValueError(f"--vec wants ID=PATH, got {item!r}")
        out.append((record_id, path))
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json_report(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# -- command implementations ----------------------------------------------------


def _cmd_codebook_init(args) -> int:
    space = SpaceConfig(dimension=args.dim, master_seed=args.seed & (2**64 - 1),
                        entry_kind=args.entry_kind)
    book = Codebook(space)
    with open(args.out, "wb") as fh:
        book.save(fh)
    return EXIT_OK


def _cmd_codebook_import(args) -> int:
    book = _load_codebook(args.codebook)
    with open(args.table, "r", encoding="utf-8") as fh:
        count = book.import_text_table(fh, verbatim=args.verbatim)
    with open(args.out, "wb") as fh:
        book.save(fh)
    sys.stdout.write(f"imported {count} vectors\n")
    return EXIT_OK


def _cmd_codebook_info(args) -> int:
    book = _load_codebook(args.codebook)
    payload = {
        "dimension": book.space.dimension,
        "master_seed": book.space.master_seed,
        "entry_kind": book.space.entry_kind,
        "imported": book.imported_counts(),
    }
    _emit(_json_report(payload), args.out)
    return EXIT_OK


def _cmd_encode(args) -> int:
    book = _load_codebook(args.codebook)
    cfg = _load_encoding_config(args.config)
    document = parse_json(Path(args.input).read_text(encoding="utf-8"))
    vec = encode_value(document, cfg, book)
    _write_vector_file(args.out, vec, args.format)
    return EXIT_OK


def _cmd_index_build(args) -> int:
    records = _parse_vec_args(args.vec)
    vectors = [(rid, _read_vector_file(path)) for rid, path in records]
    if args.dim is not None:
        dimension = args.dim
    elif vectors:
        dimension = vectors[0][1].shape[0]
    else:
        raise ValueError("--dim is required when building an empty index")
    index = VectorIndex(int(dimension))
    for rid, vec in vectors:
        index.add(rid, vec)
    with open(args.out, "wb") as fh:
        index.save(fh)
    return EXIT_OK


def _cmd_index_add(args) -> int:
    index = _load_index(args.index)
    for rid, path in _parse_vec_args(args.vec):
        index.add(rid, _read_vector_file(path))
    with open(args.out, "wb") as fh:
        index.save(fh)
    return EXIT_OK


def _cmd_index_info(args) -> int:
    index = _load_index(args.index)
    _emit(_json_report({"dimension": index.dimension, "records": len(index)}), args.out)
    return EXIT_OK


def _cmd_query(args) -> int:
    index = _load_index(args.index)
    if (args.input is None) == (args.vec is None):
        raise ValueError("query wants exactly one of --in (JSON document) or --vec (vector file)")
    if args.input is not None:
        if args.codebook is None:
            raise ValueError("--in needs --codebook")
        book = _load_codebook(args.codebook)
        if book.space.dimension != index.dimension:
            raise DimensionMismatchError(
                f"codebook dimension {book.space.dimension} != index dimension {index.dimension}"
            )
        cfg = _load_encoding_config(args.config)
        probe = encode_value(parse_json(Path(args.input).read_text(encoding="utf-8")), cfg, book)
    else:
        probe = _read_vector_file(args.vec)
        if probe.shape[0] != index.dimension:
            raise DimensionMismatchError(
                f"probe dimension {probe.shape[0]} != index dimension {index.dimension}"
            )
    results = index.knn(probe, args.k)
    if args.format == "json":
        payload = {"k": args.k, "results": [{"id": rid, "cosine": score} for rid, score in results]}
        _emit(_json_report(payload), args.out)
    else:
        lines = ["id,cosine"] + [f"{rid},{score!r}" for rid, score in results]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_probe_role(args) -> int:
    book = _load_codebook(args.codebook)
    index = _load_index(args.index)
    if book.space.dimension != index.dimension:
        raise DimensionMismatchError(
            f"codebook dimension {book.space.dimension} != index dimension {index.dimension}"
        )
    doc = _read_vector_file(args.vec)
    if doc.shape[0] != index.dimension:
        raise DimensionMismatchError(
            f"document dimension {doc.shape[0]} != index dimension {index.dimension}"
        )
    ranked = probe_role(doc, args.role, index.items(), book)
    if args.k is not None:
        if args.k < 1:
            raise ValueError("--k must be >= 1")
        ranked = ranked[: args.k]
    if args.format == "json":
        payload = {"role": args.role, "results": [{"id": rid, "score": s} for rid, s in ranked]}
        _emit(_json_report(payload), args.out)
    else:
        lines = ["id,score"] + [f"{rid},{score!r}" for rid, score in ranked]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_simulate_capacity(args) -> int:
    params = CapacityParams(
        dimension=args.dim, members=args.members, distractors=args.distractors,
        trials=args.trials, entry_kind=args.entry_kind, seed=args.seed & (2**64 - 1),
    )
    report = capacity_run(params)
    if args.format == "json":
        _emit(report_json(report), args.out)
    else:
        import io

        buf = io.StringIO()
        write_capacity_csv(report, buf)
        _emit(buf.getvalue(), args.out)
    if args.plot:
        from .plots import save_capacity_figure

        save_capacity_figure(report, args.plot)
    return EXIT_OK


def _cmd_simulate_drift(args) -> int:
    kind = "random_orthogonal" if args.kind == "orthogonal" else "random_gaussian"
    params = DriftParams(
        dimension=args.dim, depth=args.depth, matrix_kind=kind, trials=args.trials,
        seed=args.seed & (2**64 - 1), scale_gaussian=not args.unscaled,
    )
    report = drift_run(params)
    if args.format == "json":
        _emit(report_json(report), args.out)
    else:
        import io

        buf = io.StringIO()
        write_drift_csv(report, buf)
        _emit(buf.getvalue(), args.out)
    if args.plot:
        from .plots import save_drift_figure

        save_drift_figure(report, args.plot)
    return EXIT_OK


# -- entry points ---------------------------------------------------------------


def _fail(code: int, kind: str, exc: BaseException) -> int:
    message = " ".join(str(exc).split())
    sys.stderr.write(f"error code={code} kind={kind}: {message}\n")
    return code


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return int(args.func(args) or 0)
    except FileFormatError as exc:
        return _fail(EXIT_FORMAT, "file-format", exc)
    except DimensionMismatchError as exc:
        return _fail(EXIT_DIMENSION, "dimension-mismatch", exc)
    except OSError as exc:
        return _fail(EXIT_IO, "io", exc)
    except ValueError as exc:
        return _fail(EXIT_INVALID, "invalid-input", exc)
    except MbatError as exc:
        return _fail(EXIT_INTERNAL, "internal", exc)


def main() -> None:
    sys.exit(run())

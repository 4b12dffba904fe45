"""``lzcomm`` command line.

Results go to stdout as JSON (experiments print CSV unless ``--out`` is
given), diagnostics go to stderr, and the exit status is 0 only on
success. Output depends on nothing but the arguments, the inputs and the
seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from lzcomm import avl, experiments
from lzcomm.factorize import Mode, decompress, dumps, factorize, factorize_lzn, loads
from lzcomm.fingerprint import SEED_ENV, default_seed
from lzcomm.protocol import ProtocolConfig, ProtocolError, Speaker, hamming_protocol, lcp_protocol
from lzcomm.symbols import parse, render


class CliError(Exception):
    """A user-facing failure; the message goes to stderr and the exit code is 1."""


# -- input helpers ---------------------------------------------------------------

def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    try:
        return Path(arg).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {arg}: {exc.strerror}") from exc


def _strip_newline(text: str) -> str:
    if text.endswith("\r\n"):
        return text[:-2]
    return text[:-1] if text.endswith("\n") else text


def load_string(arg: str, args) -> "object":
    """A string operand: literal with ``--literal``, else a file (one trailing newline dropped)."""
    raw = arg if args.literal else _strip_newline(_read(arg))
    try:
        return parse(raw, args.format)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def load_factorization(arg: str):
    try:
        return loads(_read(arg))
    except (ValueError, KeyError) as exc:
        raise CliError(f"{arg}: {exc}") from exc


def load_grammar(arg: str, pool=None):
    try:
        return avl.loads(_read(arg), pool)
    except avl.GrammarError as exc:
        raise CliError(f"{arg}: {exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _seed(args) -> int:
    return default_seed() if args.seed is None else args.seed & ((1 << 64) - 1)


# -- factorize / decompress ----------------------------------------------------------

def cmd_factorize(args) -> int:
    s = load_string(args.input, args)
    f = factorize(s, args.mode)
    result = {"mode": f.mode.value, "n": f.original_length, "size": f.size,
              "truncated": f.truncated}
    as_text = args.format == "text"
    result["triples"] = [list(t) for t in f.copy_triples(as_text=as_text)]
    if args.out:
        _write(args.out, dumps(f))
        result["out"] = args.out
    else:
        result["factorization"] = dumps(f)
    emit(result)
    return 0


def cmd_decompress(args) -> int:
    f = load_factorization(args.input)
    try:
        s = decompress(f)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = render(s, args.format)
    result = {"mode": f.mode.value, "n": len(s)}
    if args.out:
        _write(args.out, text + "\n")
        result["out"] = args.out
    else:
        result["string"] = text
    emit(result)
    return 0


# -- grammar -------------------------------------------------------------------------

def _grammar_summary(g) -> dict:
    return {"size": g.size, "height": g.height, "length": g.length}


def _emit_grammar(g, args, extra=None) -> int:
    result = _grammar_summary(g)
    result.update(extra or {})
    if args.out:
        _write(args.out, avl.dumps(g))
        result["out"] = args.out
    else:
        result["grammar"] = avl.dumps(g)
    emit(result)
    return 0


def cmd_grammar(args) -> int:
    op = args.grammar_cmd
    if op == "build":
        s = load_string(args.input, args)
        try:
            g = avl.build(s)
        except avl.GrammarError as exc:
            raise CliError(str(exc)) from exc
        return _emit_grammar(g, args)
    if op == "concat":
        pool = avl.Pool()
        g1 = load_grammar(args.left, pool)
        g2 = load_grammar(args.right, pool)
        return _emit_grammar(avl.concat(g1, g2), args)
    if op == "split":
        g = load_grammar(args.input)
        try:
            prefix, suffix = avl.split(g, args.position)
        except avl.GrammarError as exc:
            raise CliError(str(exc)) from exc
        result = {"position": args.position, "prefix": _grammar_summary(prefix),
                  "suffix": _grammar_summary(suffix)}
        if args.out:
            _write(args.out + ".prefix", avl.dumps(prefix))
            _write(args.out + ".suffix", avl.dumps(suffix))
            result["out"] = [args.out + ".prefix", args.out + ".suffix"]
        else:
            result["prefix"]["grammar"] = avl.dumps(prefix)
            result["suffix"]["grammar"] = avl.dumps(suffix)
        emit(result)
        return 0
    if op == "validate":
        report = avl.validate(load_grammar(args.input))
        emit(report.to_json())
        return 0 if report.ok else 1
    if op == "expand":
        g = load_grammar(args.input)
        try:
            if args.range:
                s = avl.expand_range(g, *args.range)
            else:
                s = avl.expand(g)
        except avl.GrammarError as exc:
            raise CliError(str(exc)) from exc
        text = render(s, args.format)
        if args.out:
            _write(args.out, text + "\n")
            emit({"length": len(s), "out": args.out})
        else:
            emit({"length": len(s), "string": text})
        return 0
    raise CliError(f"unknown grammar command {op}")


# -- protocol -------------------------------------------------------------------------

def _protocol_config(args) -> ProtocolConfig:
    try:
        return ProtocolConfig(seed=_seed(args), width=args.width, epsilon=args.epsilon,
                              sentinel=not args.no_sentinel, verify=args.verify)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _party_input(arg: str, args):
    if args.factorized:
        f = load_factorization(arg)
        if f.mode is not Mode.LZN:
            raise CliError(f"{arg}: protocol inputs must be LZN factorizations")
        return f
    return factorize_lzn(load_string(arg, args))


def _outcome_json(kind: str, out, config: ProtocolConfig) -> dict:
    result = {"protocol": kind, "rounds": out.rounds, "bits": out.bits,
              "error_bound": out.error_bound, "within_budget": out.error_bound <= config.epsilon}
    if kind == "lcp":
        result.update(value=out.lcp_length, matching_factors=out.matching_factor_count,
                      z_ell=out.z_ell)
    else:
        result.update(value=out.distance, raw_distance=out.raw_distance,
                      positions=out.mismatch_positions, gap_max=out.gap_max,
                      lcp_invocations=out.lcp_invocations,
                      suffix_factor_counts=out.suffix_factor_counts)
    return result


def _parse_endpoint(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise CliError(f"expected host:port, got {text!r}")
    return host or "127.0.0.1", int(port)


def cmd_protocol(args) -> int:
    from lzcomm.protocol import transport

    kind = args.protocol_cmd
    config = _protocol_config(args)
    networked = args.listen is not None or args.connect is not None
    if args.listen is not None and args.connect is not None:
        raise CliError("--listen and --connect are mutually exclusive")
    if networked:
        if len(args.inputs) != 1:
            raise CliError("a networked party takes exactly one input")
        if args.listen is not None:
            me = Speaker(args.role or "alice")

            def announce(port):
                sys.stderr.write(json.dumps({"listening": port}) + "\n")
                sys.stderr.flush()

            sock = transport.listen(args.listen, args.host, on_ready=announce)
        else:
            me = Speaker(args.role or "bob")
            sock = transport.connect(*_parse_endpoint(args.connect))
        fact = _party_input(args.inputs[0], args)
        with sock:
            run = transport.run_lcp_party if kind == "lcp" else transport.run_hamming_party
            out = run(me, fact, sock, config)
        result = _outcome_json(kind, out, config)
        result["role"] = me.value
    else:
        if len(args.inputs) != 2:
            raise CliError("in-process runs take two inputs: Alice's then Bob's")
        a, b = (_party_input(x, args) for x in args.inputs)
        if kind == "lcp":
            out = lcp_protocol(a, b, config)
        else:
            try:
                out = hamming_protocol(a, b, config)
            except ValueError as exc:
                raise CliError(str(exc)) from exc
        result = _outcome_json(kind, out, config)
    if args.transcript:
        _write(args.transcript, out.transcript.to_jsonl())
        result["transcript"] = args.transcript
    emit(result)
    return 0


# -- experiments ----------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        out = []
        for part in text.split(","):
            if "-" in part.strip("-") and not part.startswith("-"):
                lo, hi = part.split("-")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        return out
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _corpus(args):
    """Strings named by the corpus flags, with a label per string."""
    labels, strings = [], []
    for sigma in args.family or []:
        h_values = [1] + sorted({2, sigma // 2, sigma}) if args.run_variants else [1]
        for h in h_values:
            strings.append(experiments.gen_family(sigma, h))
            labels.append(f"family:sigma={sigma}:h={h}")
    if args.random:
        for k, s in enumerate(experiments.random_strings(args.random, args.max_len,
                                                         seed=_seed(args))):
            strings.append(s)
            labels.append(f"random:{k}")
    if args.exhaustive:
        alphabet, max_len = args.exhaustive
        for s in experiments.all_strings(alphabet, max_len):
            strings.append(s)
            labels.append("exhaustive:" + "".join(map(str, s.tolist())))
    for path in args.files or []:
        strings.append(load_string(path, args))
        labels.append(f"file:{path}")
    if not strings:
        raise CliError("no corpus given (use --family, --random, --exhaustive or files)")
    return labels, strings


def _emit_csv(rows, args, summary: dict, fieldnames=None) -> int:
    text = experiments.to_csv(rows, fieldnames)
    if args.out:
        _write(args.out, text)
        summary["out"] = args.out
        summary["rows"] = len(rows)
        emit(summary)
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    op = args.experiment_cmd
    if op == "family":
        sigmas = [s for s in range(args.sigma_min, args.sigma_max + 1) if s % 2 == 0]
        if args.run_variants:
            rows = experiments.verify_run_variant(sigmas)
            ok = all(r["ok"] for r in rows)
            return _emit_csv(rows, args, {"experiment": "family-runs", "all_ok": ok})
        rows = experiments.verify_lower_bound(sigmas)
        return _emit_csv(rows, args, {"experiment": "family",
                                      "all_ok": all(r["ok"] for r in rows)})
    if op == "zeta":
        labels, strings = _corpus(args)
        report = experiments.zeta_scan(strings, args.mode, with_zs=args.zs, labels=labels)
        summary = {"experiment": "zeta", "mode": report.mode.value, "strings": report.strings,
                   "witnesses": report.witnesses, "bound_violations": report.bound_violations,
                   "max_ratio": report.max_ratio}
        return _emit_csv(report.rows, args, summary)
    if op == "avl-chain":
        _, strings = _corpus(args)
        report = experiments.avl_chain_scan(strings, samples=args.samples, seed=_seed(args))
        summary = {"experiment": "avl-chain", "strings": report.strings,
                   "chain_violations": report.chain_violations,
                   "balance_violations": len(report.balance_violations),
                   "worst_split_growth": report.worst_split}
        return _emit_csv(report.rows, args, summary)
    if op == "bench":
        bench = experiments.protocol_bench(n=args.n, ds=args.d, trials=args.trials,
                                           sigma=args.sigma, seed=_seed(args), width=args.width,
                                           family_sigma=args.family_sigma)
        summary = {"experiment": "bench", "slope": bench["slope"],
                   "intercept": bench["intercept"],
                   "errors": sum(r["errors"] for r in bench["rows"])}
        return _emit_csv(bench["rows"], args, summary)
    raise CliError(f"unknown experiment {op}")


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "ints"), default="text",
                        help="string encoding: UTF-8 text or whitespace-separated integers")
    common.add_argument("--literal", action="store_true",
                        help="treat string operands as the strings themselves, not file paths")
    common.add_argument("--seed", type=int, default=None,
                        help=f"64-bit public-coin seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--out", help="write the main artifact here instead of stdout")

    parser = argparse.ArgumentParser(prog="lzcomm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", parents=[common], help="LZN, LZS or CN factorization")
    p.add_argument("input")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="LZN")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("decompress", parents=[common], help="expand a factorization file")
    p.add_argument("input")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("grammar", help="AVL-grammar operations")
    gsub = p.add_subparsers(dest="grammar_cmd", required=True)
    g = gsub.add_parser("build", parents=[common])
    g.add_argument("input")
    g = gsub.add_parser("concat", parents=[common])
    g.add_argument("left")
    g.add_argument("right")
    g = gsub.add_parser("split", parents=[common],
                        help="prefix S[1..i-1] and suffix S[i..]; --out is a path stem")
    g.add_argument("input")
    g.add_argument("position", type=int)
    g = gsub.add_parser("validate", parents=[common])
    g.add_argument("input")
    g = gsub.add_parser("expand", parents=[common])
    g.add_argument("input")
    g.add_argument("--range", type=int, nargs=2, metavar=("I", "J"),
                   help="1-based inclusive range")
    p.set_defaults(func=cmd_grammar)

    p = sub.add_parser("protocol", help="run the LCP or Hamming protocol")
    psub = p.add_subparsers(dest="protocol_cmd", required=True)
    for name in ("lcp", "hamming"):
        q = psub.add_parser(name, parents=[common])
        q.add_argument("inputs", nargs="+", help="Alice's and Bob's strings (one when networked)")
        q.add_argument("--factorized", action="store_true",
                       help="inputs are LZN factorization files")
        q.add_argument("--width", type=int, default=64, help="bits per fingerprint message")
        q.add_argument("--epsilon", type=float, default=2.0 ** -20, help="error budget")
        q.add_argument("--no-sentinel", action="store_true",
                       help="do not frame the strings with '#'/'$' end markers")
        q.add_argument("--verify", action="store_true",
                       help="re-check each located boundary with an independent base")
        q.add_argument("--listen", type=int, metavar="PORT",
                       help="serve one party on PORT (0 picks a free port)")
        q.add_argument("--connect", metavar="HOST:PORT", help="connect to a listening party")
        q.add_argument("--host", default="127.0.0.1", help="address to listen on")
        q.add_argument("--role", choices=("alice", "bob"),
                       help="party played (default: the listener is Alice)")
        q.add_argument("--transcript", help="write the transcript as JSON lines")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("experiment", help="CSV experiments")
    esub = p.add_subparsers(dest="experiment_cmd", required=True)

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("files", nargs="*", help="extra corpus files")
    corpus.add_argument("--family", type=_int_list, help="family sizes, e.g. 4,8,16 or 4-12")
    corpus.add_argument("--run-variants", action="store_true",
                        help="also use each family with 0 replaced by a run")
    corpus.add_argument("--random", type=int, default=0, help="number of random strings")
    corpus.add_argument("--max-len", type=int, default=512)
    corpus.add_argument("--exhaustive", type=int, nargs=2, metavar=("ALPHABET", "MAXLEN"))

    e = esub.add_parser("family", parents=[common])
    e.add_argument("--sigma-min", type=int, default=4)
    e.add_argument("--sigma-max", type=int, default=128)
    e.add_argument("--run-variants", action="store_true",
                   help="report the run-length variant with h in {2, sigma/2, sigma}")
    e = esub.add_parser("zeta", parents=[common, corpus])
    e.add_argument("--mode", choices=("LZN", "LZS"), default="LZN")
    e.add_argument("--zs", action="store_true", help="also report self-referencing sizes")
    e = esub.add_parser("avl-chain", parents=[common, corpus])
    e.add_argument("--samples", type=int, default=50)
    e = esub.add_parser("bench", parents=[common])
    e.add_argument("--n", type=int, default=1 << 14)
    e.add_argument("--d", type=_int_list, default=[0, 1, 2, 5, 16, 32])
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--sigma", type=int, default=4)
    e.add_argument("--width", type=int, default=64)
    e.add_argument("--family-sigma", type=int, default=None,
                   help="tile a family string instead of random text")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"lzcomm: {exc}\n")
        return 1
    except ProtocolError as exc:
        sys.stderr.write(f"lzcomm: protocol failed: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"lzcomm: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

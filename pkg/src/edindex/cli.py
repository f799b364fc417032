"""Command-line interface.

Every flag can also come from the environment as EDINDEX_<FLAG>, e.g.
EDINDEX_SEED=7 or EDINDEX_DP_CUTOFF=8192; explicit flags win.
Exit codes: 0 success, 1 domain failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import seeding
from .bench import run_bench, scaling_gate, summary_table
from .blockcode import BlockCodebook, gen_codebook
from .channel import MODES, CorruptionRecord, corrupt, verify_record
from .codes import (
    ListInsdelCode,
    UniqueInsdelCode,
    build_unique_code,
    candidate_lists,
    convert_lr_to_insdel,
    encode_list,
    encode_unique,
    list_decode_insdel,
    recover_word,
)
from .errors import DecodeFailure, EdIndexError
from .indexing import IndexingScheme, build_indexing_scheme, build_two_layer_scheme, graph_stats, run_ed_approx
from .strings import IndexedString
from .sync import SyncString, count_misdecodings, gen_sync, self_matching_bound, verify_sync

ENV_PREFIX = "EDINDEX_"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _floats(s: str) -> float:
    # accepts plain decimals and fractions such as 1/21
    if "/" in s:
        a, b = s.split("/", 1)
        return float(a) / float(b)
    return float(s)


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.replace(",", " ").split()]


def _load_code(path):
    d = json.loads(Path(path).read_text())
    if d.get("format") == "edindex-unique-code":
        return UniqueInsdelCode.from_dict(d)
    if d.get("format") == "edindex-list-code":
        return ListInsdelCode.from_dict(d)
    raise ValueError(f"{path} is not a code bundle")


# -- subcommands -----------------------------------------------------------


def cmd_gen_sync(a):
    s = gen_sync(a.n, a.eps, a.seed, c=a.c, q=a.q)
    _write(a.out, s.to_text())
    return 0


def cmd_gen_scheme(a):
    if a.layers == 2:
        sch = build_two_layer_scheme(a.n, a.eps, N1=a.N1, N2=a.N2, q1=a.q, q2=a.q, seed=a.seed)
    else:
        sch = build_indexing_scheme(a.n, a.eps, N=a.N, q=a.q, seed=a.seed)
    _write(a.out, sch.to_json() + "\n")
    return 0


def cmd_gen_code(a):
    if a.kind == "unique":
        code = build_unique_code(a.n, a.delta, a.eps, seed=a.seed)
    else:
        lr = gen_codebook(a.M, a.N, a.q, a.sep if a.sep is not None else a.N - a.N % 2, seed=a.seed)
        code = convert_lr_to_insdel(lr, a.eps, a.gamma, a.l, a.alpha, seed=a.seed)
    _write(a.out, code.to_json() + "\n")
    if a.params:
        _write(a.params, _dump(code.params()) + "\n")
    return 0


def _load_string(path) -> IndexedString:
    # sync string files carry a one-line header; everything else is a plain string file
    text = Path(path).read_text()
    if text.startswith("epsilon="):
        return SyncString.from_text(text).as_indexed()
    return IndexedString.from_text(text)


def _source_for(sch: IndexingScheme, x: IndexedString) -> IndexedString:
    width = sch.index.alphabet.k
    if x.alphabet.k > width and len(x) == sch.n and np.array_equal(x.data[:, -width:], sch.index.data):
        return x
    return sch.attach(x)


def cmd_ed_approx(a):
    sch = IndexingScheme.load(a.scheme)
    if a.layers and a.layers != sch.layers:
        raise ValueError(f"--layers {a.layers} but the scheme has {sch.layers} layer(s)")
    s = _source_for(sch, _load_string(a.source))
    t = _load_string(a.target)
    if t.alphabet.k == s.alphabet.k - sch.index.alphabet.k:
        raise ValueError("target must carry the index component(s) too")
    run = run_ed_approx(s, t, sch)
    out = {"script": run.script.to_dict()}
    if a.stats:
        out["stats"] = graph_stats(run)
    _write(a.out, _dump(out) + "\n")
    return 0


def cmd_corrupt(a):
    s = _load_string(a.input)
    if a.scheme:
        s = _source_for(IndexingScheme.load(a.scheme), s)
    if a.sent_out:
        s.save(a.sent_out)
    r, rec = corrupt(s, a.delta, a.gamma, a.mode, a.seed, a.block_len)
    r.save(a.out) if a.out not in (None, "-") else sys.stdout.write(r.to_text())
    if a.record:
        Path(a.record).write_text(rec.to_json() + "\n")
    return 0


def cmd_encode(a):
    code = _load_code(a.code)
    if isinstance(code, UniqueInsdelCode):
        if a.message:
            msg = _ints(Path(a.message).read_text())
        else:
            msg = seeding.rng(a.seed, "message").integers(0, code.rs.p, code.k).tolist()
        x = encode_unique(code, msg)
    else:
        m = int(Path(a.message).read_text()) if a.message else \
            int(seeding.rng(a.seed, "message").integers(0, code.lr.M))
        msg = [m]
        x = encode_list(code, m)
    if a.message_out:
        Path(a.message_out).write_text(" ".join(map(str, msg)) + "\n")
    _write(a.out, x.to_text())
    return 0


def _trial_unique(args):
    code, t, seed, delta, gamma, mode, timing = args
    ts = seeding.child_seed(seed, "trial", t)
    msg = seeding.rng(ts, "message").integers(0, code.rs.p, code.k)
    x = encode_unique(code, msg)
    y, rec = corrupt(x, delta, gamma, mode, ts)
    t0 = time.perf_counter()
    got = recover_word(code, y)
    row = {"trial": t, "seed": ts, "deletions": rec.deletions, "insertions": rec.insertions,
           "misdecodings": count_misdecodings(rec, got.positions),
           "multiplicity": got.positions.multiplicity(), "erasures": int(got.erased.sum())}
    try:
        out = code.rs.decode(np.where(got.erased, 0, got.word), np.nonzero(got.erased)[0])
        row["decoded"] = True
        row["recovered"] = bool(np.array_equal(out, msg))
    except DecodeFailure:
        row["decoded"] = row["recovered"] = False
    if timing:
        row["time"] = time.perf_counter() - t0
    return row


def _trial_list(args):
    code, t, seed, delta, gamma, mode, timing = args
    ts = seeding.child_seed(seed, "trial", t)
    m = int(seeding.rng(ts, "message").integers(0, code.lr.M))
    y, rec = corrupt(encode_list(code, m), delta, gamma, mode, ts)
    t0 = time.perf_counter()
    lists, dec = candidate_lists(code, y)
    out = list_decode_insdel(code, y)
    row = {"trial": t, "seed": ts, "deletions": rec.deletions, "insertions": rec.insertions,
           "misdecodings": count_misdecodings(rec, dec), "max_candidates": lists.max_size,
           "list_size": len(out), "recovered": m in out}
    if timing:
        row["time"] = time.perf_counter() - t0
    return row


def _run_trials(fn, code, a):
    tasks = [(code, t, a.seed, a.delta, a.gamma, a.mode, a.timing) for t in range(a.trials)]
    if a.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            rows = list(ex.map(fn, tasks))
    else:
        rows = [fn(t) for t in tasks]
    _write(a.out, "".join(_dump(r) + "\n" for r in rows))
    return 0 if all(r["recovered"] for r in rows) else 1


def _single_row(code, a, decode_fn):
    y = _load_string(a.input)
    t0 = time.perf_counter()
    row, dec = decode_fn(code, y)
    if a.record:
        row["misdecodings"] = count_misdecodings(CorruptionRecord.from_json(Path(a.record).read_text()), dec)
    if a.timing:
        row["time"] = time.perf_counter() - t0
    return row


def cmd_decode(a):
    code = _load_code(a.code)
    if not isinstance(code, UniqueInsdelCode):
        raise ValueError("decode needs a unique-code bundle; use list-decode for list codes")
    if a.trials:
        return _run_trials(_trial_unique, code, a)
    if not a.input:
        raise ValueError("give --input or --trials")
    truth = _ints(Path(a.message).read_text()) if a.message else None

    def dec(code, y):
        got = recover_word(code, y)
        row = {"erasures": int(got.erased.sum()), "multiplicity": got.positions.multiplicity()}
        try:
            msg = code.rs.decode(np.where(got.erased, 0, got.word), np.nonzero(got.erased)[0])
            row.update(decoded=True, message=msg.tolist())
        except DecodeFailure as exc:
            row.update(decoded=False, message=None, error=str(exc))
        row["recovered"] = None if truth is None else row["message"] == truth
        return row, got.positions

    row = _single_row(code, a, dec)
    _write(a.out, _dump(row) + "\n")
    return 0 if row["decoded"] and row["recovered"] is not False else 1


def cmd_list_decode(a):
    code = _load_code(a.code)
    if not isinstance(code, ListInsdelCode):
        raise ValueError("list-decode needs a list-code bundle")
    if a.trials:
        return _run_trials(_trial_list, code, a)
    if not a.input:
        raise ValueError("give --input or --trials")
    truth = int(Path(a.message).read_text()) if a.message else None

    def dec(code, y):
        lists, d = candidate_lists(code, y)
        out = list_decode_insdel(code, y)
        return {"list": out, "list_size": len(out), "max_candidates": lists.max_size,
                "recovered": None if truth is None else truth in out}, d

    row = _single_row(code, a, dec)
    _write(a.out, _dump(row) + "\n")
    return 0 if row["recovered"] is not False else 1


def cmd_bench(a):
    rep = run_bench(_ints(a.sizes), a.eps, a.trials, a.seed, layers=(1, 2) if a.layers == 0 else (a.layers,),
                    dp_cutoff=a.dp_cutoff, delta=a.delta, gamma=a.gamma, mode=a.mode, N=a.N,
                    repeats=a.repeats, jobs=a.jobs)
    _write(a.out, rep.to_jsonl(timing=not a.no_timing))
    if a.tsv:
        Path(a.tsv).write_text(rep.to_tsv(timing=not a.no_timing))
    if a.no_timing:
        return 0
    gate = scaling_gate(rep)
    if gate.status != "pass":
        sys.stderr.write("scaling gate: " + gate.status + "\n" + "\n".join(gate.messages) + "\n")
        sys.stderr.write(summary_table(rep))
    return 1 if gate.status == "regression" else 0


def cmd_verify(a):
    checks = []
    if a.sync:
        s = SyncString.load(a.sync)
        res = verify_sync(s, s.epsilon)
        ok = bool(res) and self_matching_bound(s) <= s.epsilon * len(s)
        checks.append({"sync": a.sync, "ok": ok, "triple": res.triple})
    if a.codebook:
        cb = BlockCodebook.load(a.codebook)
        checks.append({"codebook": a.codebook, "ok": True, "L": cb.L})
    if a.scheme:
        sch = IndexingScheme.load(a.scheme)
        flat = sch.codebook.codewords.ravel()[:sch.n]
        checks.append({"scheme": a.scheme, "ok": bool(np.array_equal(sch.index.project(0), flat))})
    if a.record:
        if not (a.sent and a.received):
            raise ValueError("--record needs --sent and --received")
        res = verify_record(_load_string(a.sent), _load_string(a.received),
                            CorruptionRecord.from_json(Path(a.record).read_text()))
        checks.append({"record": a.record, "ok": res.ok, "reason": res.reason})
    if not checks:
        raise ValueError("nothing to verify; pass --sync, --codebook, --scheme or --record")
    _write(a.out, "".join(_dump(c) + "\n" for c in checks))
    return 0 if all(c["ok"] for c in checks) else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edindex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output file (stdout if omitted)")
        return sp

    sp = add("gen-sync", cmd_gen_sync, "generate a verified synchronization string")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=_floats, required=True)
    sp.add_argument("--c", type=float, default=4.0)
    sp.add_argument("--q", type=int, default=None)

    sp = add("gen-scheme", cmd_gen_scheme, "build an indexing scheme")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=_floats, default=1 / 21)
    sp.add_argument("--layers", type=int, choices=(1, 2), default=1)
    sp.add_argument("--N", type=int, default=12)
    sp.add_argument("--N1", type=int, default=48)
    sp.add_argument("--N2", type=int, default=8)
    sp.add_argument("--q", type=int, default=1 << 16)

    sp = add("gen-code", cmd_gen_code, "build a unique or list insdel code bundle")
    sp.add_argument("--kind", choices=("unique", "list"), default="unique")
    sp.add_argument("--n", type=int, default=255)
    sp.add_argument("--delta", type=_floats, default=0.1)
    sp.add_argument("--eps", type=_floats, default=0.3)
    sp.add_argument("--gamma", type=_floats, default=0.1)
    sp.add_argument("--M", type=int, default=64)
    sp.add_argument("--N", type=int, default=32)
    sp.add_argument("--q", type=int, default=256)
    sp.add_argument("--sep", type=int, default=None)
    sp.add_argument("--l", type=int, default=12)
    sp.add_argument("--alpha", type=_floats, default=0.3)
    sp.add_argument("--params", default=None, help="also write the parameter ledger here")

    sp = add("ed-approx", cmd_ed_approx, "approximate edit script between two strings")
    sp.add_argument("--scheme", required=True)
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--layers", type=int, choices=(1, 2), default=None)
    sp.add_argument("--stats", action="store_true")

    sp = add("corrupt", cmd_corrupt, "apply budgeted insertions and deletions")
    sp.add_argument("--input", required=True)
    sp.add_argument("--delta", type=_floats, default=0.0)
    sp.add_argument("--gamma", type=_floats, default=0.0)
    sp.add_argument("--mode", choices=MODES, default="uniform")
    sp.add_argument("--block-len", type=int, default=8)
    sp.add_argument("--record", default=None)
    sp.add_argument("--scheme", default=None, help="attach this scheme's index before corrupting")
    sp.add_argument("--sent-out", default=None, help="write the (indexed) sent string here")

    sp = add("encode", cmd_encode, "encode a message with a code bundle")
    sp.add_argument("--code", required=True)
    sp.add_argument("--message", default=None, help="message file (random from --seed if omitted)")
    sp.add_argument("--message-out", default=None)

    for name, fn, help_ in (("decode", cmd_decode, "unique decoding, single word or trial harness"),
                            ("list-decode", cmd_list_decode, "list decoding, single word or trial harness")):
        sp = add(name, fn, help_)
        sp.add_argument("--code", required=True)
        sp.add_argument("--input", default=None)
        sp.add_argument("--message", default=None, help="true message, to report recovery")
        sp.add_argument("--record", default=None, help="corruption record, to count misdecodings")
        sp.add_argument("--trials", type=int, default=0)
        sp.add_argument("--delta", type=_floats, default=0.1)
        sp.add_argument("--gamma", type=_floats, default=0.0)
        sp.add_argument("--mode", choices=MODES, default="uniform")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--timing", action="store_true", help="add wall time (not reproducible)")

    sp = add("bench", cmd_bench, "runtime scaling of ed_approx against the exact DP")
    sp.add_argument("--sizes", default="4096,8192,16384")
    sp.add_argument("--eps", type=_floats, default=1 / 21)
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--layers", type=int, choices=(0, 1, 2), default=1, help="0 runs both")
    sp.add_argument("--delta", type=_floats, default=0.05)
    sp.add_argument("--gamma", type=_floats, default=0.05)
    sp.add_argument("--mode", choices=MODES, default="uniform")
    sp.add_argument("--N", type=int, default=16)
    sp.add_argument("--dp-cutoff", type=int, default=16384)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--tsv", default=None)
    sp.add_argument("--no-timing", action="store_true", help="omit wall times for reproducible output")

    sp = add("verify", cmd_verify, "check saved artifacts")
    sp.add_argument("--sync", default=None)
    sp.add_argument("--codebook", default=None)
    sp.add_argument("--scheme", default=None)
    sp.add_argument("--record", default=None)
    sp.add_argument("--sent", default=None)
    sp.add_argument("--received", default=None)
    return p


def _apply_env(parser: argparse.ArgumentParser, env) -> None:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                _apply_env(sp, env)
            continue
        if not action.option_strings or action.dest in ("help", "func"):
            continue
        val = env.get(ENV_PREFIX + action.dest.upper())
        if val is None:
            continue
        if action.nargs == 0:
            action.default = val.lower() in ("1", "true", "yes", "on")
        else:
            action.default = action.type(val) if action.type else val
            action.required = False


def main(argv=None, env=None) -> int:
    parser = build_parser()
    _apply_env(parser, os.environ if env is None else env)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (EdIndexError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"edindex {args.command}: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

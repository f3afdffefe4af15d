"""Command-line interface tying the pipeline together.

Subcommands: train, complete, eval, serve, make-wlac.  Exit codes: 0 on
success, 2 for usage or configuration errors, 3 when completion found no
match, 1 for internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .core import (ContextCase, DecodeConfig, WlacInstance, instance_from_json,
                   is_han_lang, read_instances, write_instances)
from .completion import complete as run_complete
from .decoder import RngState
from .evalkit import (SweepSpec, rows_to_tsv, run_sweep, synthesize_instances)
from .model import LexBigramModel, corpus_log_likelihood, train_lexbigram
from .tokenization import load_lexicon, train_subwords
from .translit import load_default_table

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NO_MATCH = 3


class CliError(Exception):
    """Usage or configuration error; maps to exit code 2."""


def _load_package_lexicon() -> frozenset:
    from importlib import resources
    path = resources.files("wlac").joinpath("data/zh_words.txt")
    with resources.as_file(path) as real_path:
        return load_lexicon(real_path)


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")


def _read_parallel(args) -> List[Tuple[str, str]]:
    if args.tsv:
        pairs = []
        for lineno, line in enumerate(_read_lines(args.tsv), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CliError(f"{args.tsv}:{lineno}: expected two tab-separated columns")
            pairs.append((parts[0], parts[1]))
        return pairs
    if not (args.source_corpus and args.target_corpus):
        raise CliError("provide either --tsv or both --source-corpus and --target-corpus")
    src = [l for l in _read_lines(args.source_corpus)]
    tgt = [l for l in _read_lines(args.target_corpus)]
    if len(src) != len(tgt):
        raise CliError(f"corpus line counts differ: {len(src)} vs {len(tgt)}")
    return [(s, t) for s, t in zip(src, tgt) if s.strip() and t.strip()]


def _decode_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beam-size", type=int, default=1)
    parser.add_argument("--sampling-topk", type=int, default=0)
    parser.add_argument("--num-hypotheses", type=int, default=10)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--temperature", type=float, default=1.0)
    parser.add_argument("--temperature-max", type=float, default=None)
    parser.add_argument("--max-decode-len", type=int, default=64)
    parser.add_argument("--detok", dest="detok", action="store_true", default=True)
    parser.add_argument("--no-detok", dest="detok", action="store_false")
    parser.add_argument("--seed", type=int, default=0)


def _config_from_args(args) -> DecodeConfig:
    try:
        return DecodeConfig(
            beam_size=args.beam_size, sampling_topk=args.sampling_topk,
            num_hypotheses=args.num_hypotheses, max_runs=args.runs,
            temperature=args.temperature, temperature_max=args.temperature_max,
            max_decode_len=args.max_decode_len, seed=args.seed, detok=args.detok)
    except ValueError as exc:
        raise CliError(str(exc))


def _cmd_train(args) -> int:
    pairs = _read_parallel(args)
    if not pairs:
        raise CliError("training corpus is empty")
    corpus_lines = [s for s, _ in pairs] + [t for _, t in pairs]
    controls = [args.dialect_token] if args.dialect_token else []
    try:
        vocab = train_subwords(corpus_lines, args.vocab_size, control_tokens=controls)
        encoded = [(vocab.encode(s), vocab.encode(t)) for s, t in pairs]
        model = train_lexbigram(encoded, vocab, em_iterations=args.em_iterations,
                                alpha=args.alpha, mix_epsilon=args.mix_epsilon,
                                src_lang=args.src_lang, tgt_lang=args.tgt_lang,
                                dialect_token=args.dialect_token)
    except ValueError as exc:
        raise CliError(str(exc))
    model.save(args.out_dir)
    final = corpus_log_likelihood(model, encoded)
    print(f"model written to {args.out_dir}")
    print(f"final corpus log-likelihood: {final:.6f}")
    return EXIT_OK


def _load_model(model_dir: str) -> LexBigramModel:
    path = Path(model_dir)
    if not path.is_dir() or not (path / "meta.json").exists():
        raise CliError(f"{model_dir} is not a model directory")
    return LexBigramModel.load(path)


def _cmd_complete(args) -> int:
    model = _load_model(args.model_dir)
    config = _config_from_args(args)
    if args.instance:
        line = Path(args.instance).read_text(encoding="utf-8").strip()
        try:
            instance = instance_from_json(line)
        except (ValueError, json.JSONDecodeError) as exc:
            raise CliError(f"bad instance file: {exc}")
    else:
        if not args.source or not args.typed:
            raise CliError("--source and --typed are required without --instance")
        try:
            instance = WlacInstance(
                id="cli", source=args.source, left_context=args.left or "",
                right_context=args.right or "", typed=args.typed,
                src_lang=model.src_lang, tgt_lang=model.tgt_lang)
        except ValueError as exc:
            raise CliError(str(exc))
    pinyin = load_default_table() if is_han_lang(instance.tgt_lang) else None
    lexicon = _load_package_lexicon() if is_han_lang(instance.tgt_lang) else None
    rng = RngState.derive(args.seed, instance.id)
    prediction = run_complete(model, instance, config, rng,
                              pinyin=pinyin, lexicon=lexicon)
    if prediction is None:
        print("NO_MATCH")
        return EXIT_NO_MATCH
    print(prediction.word)
    return EXIT_OK


def _cmd_eval(args) -> int:
    model = _load_model(args.model_dir)
    if args.sweep:
        try:
            spec = SweepSpec.from_json(args.sweep)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise CliError(f"bad sweep spec: {exc}")
        if spec.dataset is None and args.dataset is None:
            raise CliError("sweep spec names no dataset; pass --dataset")
    else:
        config = _config_from_args(args)
        spec = SweepSpec(cells=(config,), seeds=(args.seed,), dataset=args.dataset)
    if args.dataset is None and spec.dataset is None:
        raise CliError("--dataset is required")
    dataset = args.dataset or spec.dataset
    try:
        instances = list(read_instances(dataset))
    except OSError as exc:
        raise CliError(f"cannot read dataset: {exc}")
    if not instances:
        raise CliError(f"dataset {dataset} is empty")
    han = is_han_lang(instances[0].tgt_lang)
    rows, table = run_sweep(model, SweepSpec(cells=spec.cells, seeds=spec.seeds),
                            instances,
                            pinyin=load_default_table() if han else None,
                            lexicon=_load_package_lexicon() if han else None)
    print(table, end="")
    if args.out_tsv:
        Path(args.out_tsv).write_text(rows_to_tsv(rows), encoding="utf-8")
        print(f"TSV written to {args.out_tsv}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn
    from .service import ModelRegistry, ServiceConfig, create_app

    registry = ModelRegistry()
    for model_dir in args.model_dir:
        model = _load_model(model_dir)
        registry.add(model.src_lang, model.tgt_lang, model)
        if is_han_lang(model.src_lang) or is_han_lang(model.tgt_lang):
            registry.lexicon = _load_package_lexicon()
    service_config = ServiceConfig(seed=args.seed, legacy_keys=args.legacy_keys,
                                   default_source=args.default_source)
    if args.sampling_topk is not None or args.num_hypotheses is not None:
        topk = args.sampling_topk if args.sampling_topk is not None else 10
        hyp = args.num_hypotheses if args.num_hypotheses is not None else 10
        service_config.suggest_config = DecodeConfig(
            sampling_topk=topk, num_hypotheses=hyp, max_decode_len=64)
        service_config.complete_config = DecodeConfig(
            sampling_topk=topk, num_hypotheses=hyp, max_runs=5, max_decode_len=64)
    app = create_app(registry, service_config)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        raise CliError(f"cannot serve on port {args.port}: {exc}")
    return EXIT_OK


def _parse_counts(text: str) -> dict:
    counts = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, value = part.split("=")
            counts[ContextCase[name.strip().upper()]] = int(value)
        except (ValueError, KeyError):
            raise CliError(f"bad counts entry {part!r}; "
                           "expected e.g. EMPTY=5,LEFT_ONLY=5")
    if not counts:
        raise CliError("no counts given")
    return counts


def _cmd_make_wlac(args) -> int:
    references = _read_parallel(args)
    if not references:
        raise CliError("reference corpus is empty")
    counts = _parse_counts(args.counts)
    han = is_han_lang(args.tgt_lang)
    rng = RngState.derive(args.seed, "make-wlac")
    try:
        instances = synthesize_instances(
            references, counts, args.min_typed, rng,
            src_lang=args.src_lang, tgt_lang=args.tgt_lang,
            lexicon=_load_package_lexicon() if han else None,
            pinyin=load_default_table() if han else None)
    except ValueError as exc:
        raise CliError(str(exc))
    write_instances(args.out, instances)
    print(f"wrote {len(instances)} instances to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wlac",
        description="Word-level auto-completion for interactive translation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a subword vocab and translation model")
    p_train.add_argument("--source-corpus")
    p_train.add_argument("--target-corpus")
    p_train.add_argument("--tsv", help="two-column source<TAB>target corpus")
    p_train.add_argument("--src-lang", default="xx")
    p_train.add_argument("--tgt-lang", default="en")
    p_train.add_argument("--vocab-size", type=int, default=400)
    p_train.add_argument("--em-iterations", type=int, default=5)
    p_train.add_argument("--alpha", type=float, default=0.1)
    p_train.add_argument("--mix-epsilon", type=float, default=1e-4)
    p_train.add_argument("--dialect-token", default=None,
                         help="control token prepended to encoded source, e.g. >>cmn_Hans<<")
    p_train.add_argument("--out-dir", required=True)
    p_train.set_defaults(func=_cmd_train)

    p_complete = sub.add_parser("complete", help="complete one typed word")
    p_complete.add_argument("--model-dir", required=True)
    p_complete.add_argument("--instance", help="path to a one-line instance JSON file")
    p_complete.add_argument("--source")
    p_complete.add_argument("--left", default="")
    p_complete.add_argument("--right", default="")
    p_complete.add_argument("--typed")
    _decode_flags(p_complete)
    p_complete.set_defaults(func=_cmd_complete)

    p_eval = sub.add_parser("eval", help="evaluate configurations on a dataset")
    p_eval.add_argument("--model-dir", required=True)
    p_eval.add_argument("--dataset", help="JSONL instance file")
    p_eval.add_argument("--sweep", help="JSON sweep spec")
    p_eval.add_argument("--out-tsv")
    _decode_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--model-dir", action="append", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--default-source", default="en")
    p_serve.add_argument("--legacy-keys", action="store_true")
    p_serve.add_argument("--sampling-topk", type=int, default=None)
    p_serve.add_argument("--num-hypotheses", type=int, default=None)
    p_serve.set_defaults(func=_cmd_serve)

    p_make = sub.add_parser("make-wlac", help="synthesize labeled instances")
    p_make.add_argument("--source-corpus")
    p_make.add_argument("--target-corpus")
    p_make.add_argument("--tsv")
    p_make.add_argument("--src-lang", default="xx")
    p_make.add_argument("--tgt-lang", default="en")
    p_make.add_argument("--counts", required=True,
                        help="per-case counts, e.g. EMPTY=5,LEFT_ONLY=5")
    p_make.add_argument("--min-typed", type=int, default=1)
    p_make.add_argument("--seed", type=int, default=0)
    p_make.add_argument("--out", required=True)
    p_make.set_defaults(func=_cmd_make_wlac)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    # Environment defaults for the service, mirrored as flags.
    import os
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "serve":
        env_port = os.environ.get("WLAC_PORT")
        env_model = os.environ.get("WLAC_MODEL_DIR")
        env_seed = os.environ.get("WLAC_SEED")
        if env_port and "--port" not in argv:
            argv += ["--port", env_port]
        if env_model and "--model-dir" not in argv:
            argv += ["--model-dir", env_model]
        if env_seed and "--seed" not in argv:
            argv += ["--seed", env_seed]
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

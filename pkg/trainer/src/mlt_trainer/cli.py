"""CLI: synthesize a toy corpus, train, and verify a checkpoint."""

from __future__ import annotations

import argparse
import sys

from . import synth
from .corpus import load_triples, prepare_corpus, render_text
from .errors import TrainerError
from .modeling import build_model, parameter_count
from .templates import load_template
from .tokenizing import extend_vocab, train_base_tokenizer
from .training import TrainConfig, train
from .verification import verify_toy


def _cmd_synth(args: argparse.Namespace) -> None:
    synth.write_synthetic_dataset(args.out_dir, n=args.n, seed=args.seed)
    print(f"wrote dmlt.jsonl, held_out_prompts.txt, template.json to {args.out_dir}")


def _cmd_train(args: argparse.Namespace) -> None:
    config = TrainConfig.from_file(args.config)
    template = load_template(args.template)
    triples = load_triples(args.dmlt)

    # the base tokenizer never sees the length tokens; extension adds them
    base_texts = (render_text(t, template).replace(t.mlt, "", 1) for t in triples)
    tokenizer = train_base_tokenizer(base_texts, vocab_size=config.vocab_size)
    model = build_model(
        config.base_model_id, len(tokenizer), tokenizer.eos_token_id, seed=config.seed
    )
    model, tokenizer = extend_vocab(model, tokenizer)
    print(f"model: {config.base_model_id}, {parameter_count(model) / 1e6:.2f}M parameters")

    corpus = prepare_corpus(triples, tokenizer, template, max_seq_len=config.max_seq_len)
    _, log = train(config, corpus, model, tokenizer, args.out)
    print(f"trained {config.epochs} epochs; loss {log[0].loss:.4f} -> {log[-1].loss:.4f}")
    print(f"checkpoint written to {args.out}")


def _cmd_verify(args: argparse.Namespace) -> None:
    template = load_template(args.template)
    with open(args.prompts, encoding="utf-8") as fh:
        prompts = [line.rstrip("\n") for line in fh if line.strip()]
    report = verify_toy(args.checkpoint, prompts, template)
    report.save(args.out)
    print(f"first-token rate {report.first_token_mlt_rate:.2f}, "
          f"ordering {'ok' if report.ordering_ok else 'VIOLATED'}")
    for surface, mean in report.mean_lengths.items():
        print(f"  {surface}: mean {mean:.1f} words")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlt-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic toy corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="fine-tune on a triples file")
    p.add_argument("--dmlt", required=True, help="triples JSONL from the corpus builder")
    p.add_argument("--template", required=True, help="template config JSON")
    p.add_argument("--config", required=True, help="train config JSON")
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("verify", help="measure a checkpoint on held-out prompts")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--prompts", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--out", required=True, help="verification report JSON")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except TrainerError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

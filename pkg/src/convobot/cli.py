"""Command-line entry point.

Subcommands: train-intent, train-ner, eval-ner, chat, serve, validate-kb.
Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys

from dataclasses import replace

from .errors import ConvobotError, DataError
from .net.mlp import MlpConfig

log = logging.getLogger("convobot")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); remap to usage=1
        raise UsageError(message)


def _add_hyperparams(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hidden1", type=int, default=128, help="first hidden layer size")
    p.add_argument("--hidden2", type=int, default=64, help="second hidden layer size")
    p.add_argument("--learning-rate", type=float, default=None, help="SGD step size")
    p.add_argument("--l2", type=float, default=1e-4, help="L2 penalty weight")
    p.add_argument("--max-epochs", type=int, default=500)
    p.add_argument("--patience", type=int, default=None, help="early stopping patience")
    p.add_argument("--batch-size", type=int, default=32)


def build_parser() -> _Parser:
    parser = _Parser(prog="convobot", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("train-intent", parents=[], help="train the intent classifier from a knowledge base")
    p.add_argument("--kb", required=True, help="knowledge base JSON file")
    p.add_argument("--out", required=True, help="where to write the model")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--threshold", type=float, default=0.5, help="fallback probability threshold")
    _add_hyperparams(p)
    p.set_defaults(func=cmd_train_intent)

    p = sub.add_parser("train-ner", help="train the entity recognizer from CoNLL files or a knowledge base")
    p.add_argument("--train", help="CoNLL-format training file")
    p.add_argument("--valid", help="CoNLL-format validation file")
    p.add_argument("--kb", help="knowledge base JSON file (alternative to --train/--valid)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.5)
    _add_hyperparams(p)
    p.set_defaults(func=cmd_train_ner)

    p = sub.add_parser("eval-ner", help="evaluate a NER model on a CoNLL-format test file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_eval_ner)

    p = sub.add_parser("chat", help="interactive chat on stdin/stdout")
    p.add_argument("--kb", required=True)
    p.add_argument("--intent-model", required=True)
    p.add_argument("--ner-model", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--fallback", default=None, help="fallback reply text")
    p.set_defaults(func=cmd_chat)

    p = sub.add_parser("serve", help="run the HTTP chat service")
    p.add_argument("--config", required=True, help="service config JSON file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate-kb", help="check a knowledge base file")
    p.add_argument("--kb", required=True)
    p.set_defaults(func=cmd_validate_kb)

    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(32)
        log.info("no --seed given, using random seed %d", seed)
    return seed


def _config_from_args(args, learning_rate: float, patience: int) -> MlpConfig:
    return MlpConfig(
        layer_sizes=(1, args.hidden1, args.hidden2, 1),  # in/out rebound by the trainer
        learning_rate=args.learning_rate if args.learning_rate is not None else learning_rate,
        l2_lambda=args.l2,
        max_epochs=args.max_epochs,
        patience=args.patience if args.patience is not None else patience,
        batch_size=args.batch_size,
        seed=0,
    )


def cmd_train_intent(args) -> int:
    from .intent import save_intent_model, train_intent_model
    from .kb import load_kb_file

    seed = _resolve_seed(args.seed)
    kb = load_kb_file(args.kb)
    cfg = _config_from_args(args, learning_rate=0.1, patience=10)
    model, stats = train_intent_model(
        kb, cfg, test_fraction=args.test_fraction, seed=seed, threshold=args.threshold
    )
    save_intent_model(model, args.out)
    print(f"train accuracy: {stats.train_accuracy:.4f}")
    print(f"test accuracy: {stats.test_accuracy:.4f}")
    print(f"epochs run: {stats.report.epochs_run} (best epoch {stats.report.best_epoch})")
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_train_ner(args) -> int:
    from .conll import extract_entity_words, parse_conll_file
    from .kb import load_kb_file
    from .ner import save_ner_model, train_ner_from_conll, train_ner_from_kb

    if bool(args.kb) == bool(args.train or args.valid):
        raise UsageError("give either --kb or both --train and --valid")
    seed = _resolve_seed(args.seed)

    if args.kb:
        kb = load_kb_file(args.kb)
        cfg = replace(_config_from_args(args, learning_rate=0.3, patience=30), seed=seed)
        model = train_ner_from_kb(kb, cfg, threshold=args.threshold)
        print(f"trained on {sum(len(ex.entities) for ex in kb.inputs)} knowledge-base entities")
    else:
        if not (args.train and args.valid):
            raise UsageError("--train and --valid must be given together")
        train_words = extract_entity_words(parse_conll_file(args.train))
        valid_words = extract_entity_words(parse_conll_file(args.valid))
        cfg = replace(_config_from_args(args, learning_rate=0.1, patience=10), seed=seed)
        model, report = train_ner_from_conll(train_words, valid_words, cfg, threshold=args.threshold)
        print(f"trained on {len(train_words)} entity words, validated on {len(valid_words)}")
        print(
            f"epochs run: {report.epochs_run} (best epoch {report.best_epoch}, "
            f"validation accuracy {max(report.valid_accuracy):.4f}, "
            f"stopped early: {report.stopped_early})"
        )
    save_ner_model(model, args.out)
    print(f"model written to {args.out}")
    return EXIT_OK


def cmd_eval_ner(args) -> int:
    from .conll import evaluate, extract_entity_words, parse_conll_file, render_report
    from .ner import load_ner_model

    model = load_ner_model(args.model)
    gold = extract_entity_words(parse_conll_file(args.test))
    report = evaluate(model, gold)
    print(render_report(report, args.format))
    return EXIT_OK


def cmd_chat(args) -> int:
    from .dialogue import DEFAULT_FALLBACK, Session, respond
    from .intent import load_intent_model
    from .kb import load_kb_file
    from .ner import load_ner_model

    kb = load_kb_file(args.kb)
    intent_model = load_intent_model(args.intent_model)
    ner_model = load_ner_model(args.ner_model)
    seed = _resolve_seed(args.seed)
    fallback = args.fallback if args.fallback is not None else DEFAULT_FALLBACK
    session = Session("cli", seed)

    interactive = sys.stdin.isatty()
    if interactive:
        print("convobot ready. Ctrl-D to exit.")
    for line in sys.stdin:
        text = line.rstrip("\n")
        if interactive and not text:
            continue
        reply = respond(session, kb, intent_model, ner_model, text, fallback)
        print(f"bot> {reply.text}")
        intent_part = reply.intent if reply.intent else "(fallback)"
        ents = ", ".join(f"{e.word}/{e.entity_type} {e.probability:.2f}" for e in reply.entities)
        print(f"     [intent: {intent_part} | entities: {ents if ents else '-'}]")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import load_service_config, run_service

    config = load_service_config(args.config)
    run_service(config)
    return EXIT_OK


def cmd_validate_kb(args) -> int:
    from .kb import entity_inventory, load_kb_file

    kb = load_kb_file(args.kb)
    intents = kb.intent_inventory()
    inventory = entity_inventory(kb)
    print(
        f"knowledge base OK: {len(kb.inputs)} examples, {len(intents)} intents, "
        f"{len(inventory)} entity bindings, {len(kb.ne_values)} lookup locations"
    )
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "command", None) is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvobotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - last-resort CLI boundary
        log.exception("unexpected failure")
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

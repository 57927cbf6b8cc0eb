"""tutorstack command line: serve, ingest, train-kt, eval-kt, simulate, ask.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="tutorstack", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default=".")
    serve.add_argument("--backend", choices=["mock", "remote"], default="mock")

    ingest = sub.add_parser("ingest", help="add a page or file to the knowledge base")
    ingest.add_argument("--data-dir", default=".")
    group = ingest.add_mutually_exclusive_group(required=True)
    group.add_argument("--url")
    group.add_argument("--file")
    ingest.add_argument("--title", help="title for --file ingestion")

    train = sub.add_parser("train-kt", help="train the knowledge-tracing model")
    train.add_argument("--data", required=True, help="interaction CSV")
    train.add_argument("--out", required=True, help="output directory for the checkpoint")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--epochs", type=int, default=30)
    train.add_argument("--dim", type=int, default=64)
    train.add_argument("--layers", type=int, default=2)
    train.add_argument("--heads", type=int, default=4)

    evalp = sub.add_parser("eval-kt", help="evaluate a checkpoint on held-out students")
    evalp.add_argument("--model", required=True, help="checkpoint directory")
    evalp.add_argument("--data", required=True, help="test interaction CSV")
    evalp.add_argument("--ground-truth", help="ground_truth.csv from the simulator")

    sim = sub.add_parser("simulate", help="generate a synthetic interaction log")
    sim.add_argument("--out", required=True)
    sim.add_argument("--students", type=int, default=200)
    sim.add_argument("--skills", type=int, default=20)
    sim.add_argument("--questions", type=int, default=100)
    sim.add_argument("--steps", type=int, default=200)
    sim.add_argument("--seed", type=int, default=42)

    ask = sub.add_parser("ask", help="one-shot question against a data directory")
    ask.add_argument("--data-dir", default=".")
    ask.add_argument("--student", required=True)
    ask.add_argument("--question", required=True)
    ask.add_argument("--backend", choices=["mock", "remote"], default="mock")

    return parser


def cmd_serve(args) -> int:
    import uvicorn

    from tutorstack.service.app import create_app
    from tutorstack.service.state import AppState

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((args.host, args.port))
    host, port = sock.getsockname()[:2]
    state = AppState(args.data_dir, backend=args.backend)
    app = create_app(state)
    print(f"tutorstack serving on http://{host}:{port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def cmd_ingest(args) -> int:
    from tutorstack.service.state import AppState

    state = AppState(args.data_dir)
    if args.url:
        result = state.ingest_url(args.url)
    else:
        path = Path(args.file)
        title = args.title or path.stem
        result = state.ingest_text(title, path.read_text(encoding="utf-8"))
    status = "created" if result.created else "already ingested"
    print(f"{result.doc_id}: {result.n_chunks} chunks ({status})")
    return 0


def cmd_train(args) -> int:
    from tutorstack.interactions import load_interactions
    from tutorstack.model.checkpoint import save_checkpoint
    from tutorstack.model.train import TrainHyper, train_model

    interactions = load_interactions(args.data)
    result = train_model(
        interactions,
        config_overrides=dict(embed_dim=args.dim, num_layers=args.layers, num_heads=args.heads),
        hyper=TrainHyper(epochs=args.epochs, seed=args.seed),
    )
    out = Path(args.out)
    save_checkpoint(
        out, result.net, result.config, result.vocab, result.latent,
        train_students=result.train_students + result.val_students,
    )
    report = result.report
    (out / "train_report.json").write_text(
        json.dumps(
            {
                "seed": report.seed,
                "best_epoch": report.best_epoch,
                "wall_seconds": report.wall_seconds,
                "epochs": [vars(e) for e in report.epochs],
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    best = report.epochs[report.best_epoch]
    print(
        f"trained {len(result.train_students)}+{len(result.val_students)} students, "
        f"best epoch {report.best_epoch}: val_loss={best.val_loss:.4f} "
        f"val_auc={best.val_auc:.4f}"
    )
    print(f"checkpoint written to {out}")
    return 0


def cmd_eval(args) -> int:
    from tutorstack.sim.evaluate import eval_kt
    from tutorstack.sim.simulate import load_ground_truth

    truth = load_ground_truth(args.ground_truth) if args.ground_truth else None
    report = eval_kt(args.model, args.data, ground_truth=truth)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_simulate(args) -> int:
    from tutorstack.sim.simulate import SimConfig, simulate, write_simulation

    config = SimConfig(
        num_students=args.students,
        num_skills=args.skills,
        num_questions=args.questions,
        steps=args.steps,
        seed=args.seed,
    )
    interactions_path, truth_path = write_simulation(simulate(config), args.out)
    print(f"wrote {interactions_path} and {truth_path}")
    return 0


def cmd_ask(args) -> int:
    from tutorstack.service.state import AppState

    state = AppState(args.data_dir, backend=args.backend)
    result = state.ask(args.student, args.question)
    print(result.answer)
    if result.citations:
        print()
        print("citations: " + ", ".join(c["tag"] for c in result.citations))
    return 0


COMMANDS = {
    "serve": cmd_serve,
    "ingest": cmd_ingest,
    "train-kt": cmd_train,
    "eval-kt": cmd_eval,
    "simulate": cmd_simulate,
    "ask": cmd_ask,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if not args.command:
        parser.print_help(sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # runtime failure contract
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""CLI: serve the embed endpoint or export a fixture store."""

from __future__ import annotations

import argparse
import sys

from .app import ServiceConfig, create_app
from .export import export_fixture
from .model import DEFAULT_MODEL_ID, SentenceTransformerModel


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="embed-service")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--model", default=DEFAULT_MODEL_ID)
    p_serve.add_argument("--host", default=ServiceConfig.host)
    p_serve.add_argument("--port", type=int, default=ServiceConfig.port)
    p_serve.add_argument("--max-batch", type=int,
                         default=ServiceConfig.max_batch_size)

    p_export = sub.add_parser("export", help="write a TSV embedding store")
    p_export.add_argument("phrases", help="text file, one phrase per line")
    p_export.add_argument("out_tsv")
    p_export.add_argument("--model", default=DEFAULT_MODEL_ID)

    args = parser.parse_args(argv)
    try:
        model = SentenceTransformerModel(args.model)
    except Exception as exc:
        print(f"error: could not load model {args.model!r}: {exc}",
              file=sys.stderr)
        return 1

    if args.command == "serve":
        import uvicorn

        uvicorn.run(create_app(model, args.max_batch),
                    host=args.host, port=args.port)
        return 0

    count = export_fixture(model, args.phrases, args.out_tsv)
    print(f"wrote {count} embeddings to {args.out_tsv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

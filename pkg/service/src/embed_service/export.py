"""Export model embeddings into the TSV store format.

The format is the interchange point with the comparison toolkit's file
provider: a `#dim=<d>\\t#provider=<id>` header, then one
`phrase<TAB>v1<TAB>...<TAB>vd` line per phrase, UTF-8 decimal floats.
"""

from __future__ import annotations

from pathlib import Path


def read_phrases(path: str | Path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def export_fixture(model, phrases_path: str | Path, out_tsv: str | Path) -> int:
    """Embed every phrase in the input file and write the TSV store.

    Returns the number of phrases written. An empty phrase list still
    produces a valid, header-only store.
    """
    phrases = read_phrases(phrases_path)
    vectors = model.encode(phrases)
    lines = [f"#dim={model.dim}\t#provider={model.model_id}"]
    for phrase, vector in zip(phrases, vectors):
        lines.append(phrase + "\t" + "\t".join(repr(float(x)) for x in vector))
    Path(out_tsv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(phrases)

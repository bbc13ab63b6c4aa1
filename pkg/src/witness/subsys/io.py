from __future__ import annotations

from pathlib import Path

from ..certify import certificate_to_text
from ..errors import ModelSyntaxError, ValidationError
from ..model.io import model_digest, write_model


def write_mask(states, path):
    Path(path).write_text(" ".join(str(s) for s in sorted(states)) + "\n")


def read_mask(path, state_count: int | None = None) -> frozenset:
    """Whitespace-separated state indices.

    :raises ValidationError: for indices outside ``0 .. state_count-1``
    """
    out = set()
    for tok in Path(path).read_text().split():
        try:
            s = int(tok)
        except ValueError:
            raise ModelSyntaxError(f"mask entry {tok!r} is not a state index", 1) from None
        if s < 0 or (state_count is not None and s >= state_count):
            raise ValidationError(f"mask entry {s} is not a state of the model")
        out.add(s)
    return frozenset(out)


def write_result(result, rf, directory, stem: str = "subsys") -> dict:
    """Write ``<stem>.tra``, ``.lab``, ``.cert``, ``.mask`` and ``.summary``.

    The certificate header carries the digest of the reachability form it
    was computed on. Returns the written paths by suffix.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {ext: d / f"{stem}.{ext}" for ext in ("tra", "lab", "cert", "mask", "summary")}
    write_model(result.subsystem, paths["tra"], paths["lab"])
    paths["cert"].write_text(certificate_to_text(result.certificate, model_digest(rf.system)))
    write_mask(result.state_mask, paths["mask"])
    paths["summary"].write_text(result.summary() + "\n")
    return paths

"""JSON-lines rankings files.

One object per query, in input order::

    {"gallery_ids": [...], "query_id": "q00000", "scores": [...]}

Lists are truncated to the requested top-M; scores are the normalised
scores of the listed gallery items.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from src.models.errors import FormatError, IoError, ValidationError
from src.models.ranking import Ranking
from .atomic import atomic_write_text

logger = logging.getLogger(__name__)

DEFAULT_TOPK_OUTPUT = 100


@dataclass(frozen=True)
class RankedList:
    """One line of a rankings file."""

    query_id: str
    gallery_ids: Tuple[str, ...]
    scores: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "gallery_ids": list(self.gallery_ids),
            "scores": list(self.scores),
        }


def ranked_lists(
    query_ids: Sequence[str],
    gallery_ids: Sequence[str],
    rankings: Sequence[Ranking],
    top_m: int = DEFAULT_TOPK_OUTPUT,
) -> List[RankedList]:
    """Map index rankings to id lists truncated to ``top_m`` (no padding)."""
    if len(query_ids) != len(rankings):
        raise ValidationError(f"Got {len(rankings)} rankings for {len(query_ids)} query ids")
    out = []
    for qid, ranking in zip(query_ids, rankings):
        top = ranking.top(top_m)
        out.append(
            RankedList(
                query_id=qid,
                gallery_ids=tuple(gallery_ids[j] for j in top),
                scores=tuple(float(v) for v in np.asarray(ranking.scores)[top]),
            )
        )
    return out


class RankingsHandler:
    """Reader/writer for JSON-lines rankings."""

    def write(self, lists: Sequence[RankedList], path: Path) -> Path:
        lines = [json.dumps(item.to_dict(), sort_keys=True) for item in lists]
        written = atomic_write_text(Path(path), "".join(line + "\n" for line in lines))
        logger.info("Wrote %d rankings to %s", len(lines), path)
        return written

    def iter_read(self, path: Path) -> Iterator[RankedList]:
        """Yield rankings line by line.

        Raises:
            IoError: If the file cannot be read
            FormatError: On invalid JSON or a missing field
        """
        path = Path(path)
        try:
            handle = path.open("r", encoding="utf-8")
        except OSError as e:
            raise IoError(f"Cannot read {path}: {e.strerror or e}") from e

        with handle:
            for lineno, line in enumerate(handle, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    item = RankedList(
                        query_id=str(obj["query_id"]),
                        gallery_ids=tuple(str(g) for g in obj["gallery_ids"]),
                        scores=tuple(float(s) for s in obj.get("scores", ())),
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                    raise FormatError(f"{path}:{lineno}: invalid ranking line ({e})") from e
                if len(set(item.gallery_ids)) != len(item.gallery_ids):
                    raise FormatError(f"{path}:{lineno}: repeated gallery id")
                yield item

    def read(self, path: Path) -> List[RankedList]:
        items = list(self.iter_read(path))
        seen = set()
        for item in items:
            if item.query_id in seen:
                raise FormatError(f"{path}: duplicate query id {item.query_id!r}")
            seen.add(item.query_id)
        return items

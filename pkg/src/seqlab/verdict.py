from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class LemmaVerdict:
    lemma_id: str
    range_checked: tuple
    status: str  # "pass" | "fail"
    first_counterexample: tuple | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError(f"bad status {self.status!r}")
        if (self.status == "fail") != (self.first_counterexample is not None):
            raise ValueError("a failing verdict needs a counterexample and vice versa")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        cx = self.first_counterexample
        return {
            "lemma_id": self.lemma_id,
            "N": self.range_checked[1],
            "status": self.status,
            "counterexample": list(cx) if cx is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LemmaVerdict":
        cx = data.get("counterexample")
        return cls(lemma_id=data["lemma_id"], range_checked=(1, data["N"]),
                   status=data["status"],
                   first_counterexample=tuple(cx) if cx is not None else None)


def verdict(lemma_id, N, bad_mask, labels, detail=""):
    """Build a verdict from a boolean failure mask over ``labels``; the
    counterexample is the first failing label."""
    import numpy as np

    bad = np.flatnonzero(np.asarray(bad_mask))
    if bad.size == 0:
        return LemmaVerdict(lemma_id, (1, int(N)), "pass", None, detail)
    first = labels[int(bad[0])]
    if not isinstance(first, tuple):
        first = (int(first),) if not hasattr(first, "__len__") else tuple(int(v) for v in first)
    return LemmaVerdict(lemma_id, (1, int(N)), "fail", first, detail)

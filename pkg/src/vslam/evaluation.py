"""Precision/recall/F1 scoring and learning curves."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

from .core import Demonstration, GroundModel
from .errors import CollapsedSpace, VslamError
from .extract import Label, Model, extract_complete, extract_sound, label
from .oracle import oracle_consistent_models  # noqa: F401  (re-exported)
from .simulator import as_ratio, sample_negatives, visited_states
from .version_space import Learner

DEFAULT_RATIOS = (0, 0.5, 1, 2, 5)
CSV_COLUMNS = ["ratio", "positives", "negatives", "model", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "status"]


@dataclass(frozen=True)
class Score:
    """Confusion counts with exact metrics.

    Empty denominators give precision or recall 1; F1 is 0 when both are 0.
    """

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def precision(self) -> Fraction:
        d = self.tp + self.fp
        return Fraction(self.tp, d) if d else Fraction(1)

    @property
    def recall(self) -> Fraction:
        d = self.tp + self.fn
        return Fraction(self.tp, d) if d else Fraction(1)

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else Fraction(0)


def score(model: Model, demos: Iterable[Demonstration]) -> Score:
    """Label each demonstration with ``model`` against its true polarity."""
    tp = fp = fn = tn = 0
    for i, d in enumerate(demos):
        try:
            predicted = label(model, d) is Label.POSITIVE
        except VslamError as exc:
            exc.index = i
            raise
        if d.post is not None:
            if predicted:
                tp += 1
            else:
                fn += 1
        elif predicted:
            fp += 1
        else:
            tn += 1
    return Score(tp, fp, fn, tn)


@dataclass(frozen=True)
class CurvePoint:
    ratio: Fraction
    positives: int
    negatives: int
    model: str  # SOUND | COMPLETE
    score: Score | None
    status: str = "ok"

    def row(self) -> dict:
        sc = self.score
        out = {
            "ratio": _fmt(self.ratio),
            "positives": self.positives,
            "negatives": self.negatives,
            "model": self.model,
            "status": self.status,
        }
        if sc is None:
            out.update(dict.fromkeys(["tp", "fp", "fn", "tn", "precision", "recall", "f1"], ""))
        else:
            out.update(
                tp=sc.tp, fp=sc.fp, fn=sc.fn, tn=sc.tn,
                precision=_fmt(sc.precision), recall=_fmt(sc.recall), f1=_fmt(sc.f1),
            )
        return out


def _fmt(x: Fraction) -> str:
    return str(int(x)) if x.denominator == 1 else f"{float(x):.6f}"


def _points(learner: Learner, test: Sequence[Demonstration], ratio, pos: int, neg: int) -> list[CurvePoint]:
    out = []
    for kind, extract in (("SOUND", extract_sound), ("COMPLETE", extract_complete)):
        try:
            model = extract(learner.spaces, learner.universe)
        except CollapsedSpace as exc:
            out.append(CurvePoint(ratio, pos, neg, kind, None, f"collapsed:{exc.action}:{exc.component}"))
            continue
        out.append(CurvePoint(ratio, pos, neg, kind, score(model, test)))
    return out


def learning_curve(
    true_model: GroundModel,
    train: Sequence[Demonstration],
    test: Sequence[Demonstration],
    ratios: Iterable = DEFAULT_RATIOS,
    seed: int = 0,
    every: int = 1,
    dedupe: bool = False,
) -> list[CurvePoint]:
    """Score both extracted models as training positives are consumed.

    For each ratio ``r`` a fresh learner sees the positives of ``train`` in
    order; after the ``k``-th positive it has also seen ``ceil(r * k)``
    negatives, drawn once per ratio from the true model over the states
    the training positives visit. A point is emitted before any training and
    after every ``every``-th positive (always including the last).
    """
    positives = [d for d in train if d.post is not None]
    visited = visited_states(positives)
    points: list[CurvePoint] = []
    for idx, r in enumerate(ratios):
        r = as_ratio(r)
        negatives = (
            sample_negatives(true_model, visited, r, len(positives), seed, dedupe, role=f"curve-{idx}")
            if positives and r
            else []
        )
        learner = Learner(true_model.universe, true_model.action_names, on_collapse="skip")
        used = 0
        points += _points(learner, test, r, 0, 0)
        for k, d in enumerate(positives, start=1):
            learner.observe(d)
            target = min(math.ceil(r * k), len(negatives))
            while used < target:
                learner.observe(negatives[used])
                used += 1
            if k % every == 0 or k == len(positives):
                points += _points(learner, test, r, k, used)
    return points


def write_curve_csv(points: Iterable[CurvePoint], out: IO[str]) -> None:
    w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for p in points:
        w.writerow(p.row())


def curve_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    write_curve_csv(points, buf)
    return buf.getvalue()

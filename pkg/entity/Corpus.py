from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from entity.Measures import MeasureVector
from entity.Score import Label


@dataclass(frozen=True)
class CorpusEntry:
    path: Path
    label: Label = Label.UNLABELED


@dataclass(frozen=True)
class Corpus:
    """
    Labelled collection of image files.

    Attributes:
        entries (tuple): CorpusEntry items, sorted by path, paths unique.
        source_tag (str): Free-form model or dataset name.
    """
    entries: Tuple[CorpusEntry, ...]
    source_tag: str = ""

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda e: str(e.path)))
        if not entries:
            raise ValueError("Corpus must contain at least one entry")
        paths = [str(e.path) for e in entries]
        if len(set(paths)) != len(paths):
            raise ValueError("Corpus paths must be unique")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def paths(self) -> List[Path]:
        return [e.path for e in self.entries]

    def merged_with(self, other: "Corpus", source_tag: Optional[str] = None) -> "Corpus":
        return Corpus(self.entries + other.entries, source_tag or self.source_tag)


@dataclass(frozen=True)
class ScoreRecord:
    """
    Outcome of scoring one corpus file.

    A failed file keeps its path, label and error text; its measures, radii,
    IRS and verdict are None.
    """
    path: str
    label: Label = Label.UNLABELED
    measure_vector: Optional[MeasureVector] = None
    radii: Optional[Tuple[float, ...]] = None
    irs: Optional[float] = None
    verdict: Optional[Label] = None
    source_tag: str = ""
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "label": self.label.value,
            "source_tag": self.source_tag,
            "measure_vector": self.measure_vector.to_dict() if self.measure_vector else None,
            "radii": list(self.radii) if self.radii is not None else None,
            "irs": self.irs,
            "verdict": self.verdict.value if self.verdict else None,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScoreRecord":
        measures = data.get("measure_vector")
        radii = data.get("radii")
        verdict = data.get("verdict")
        return cls(
            path=str(data["path"]),
            label=Label(data.get("label") or Label.UNLABELED.value),
            measure_vector=MeasureVector.from_dict(measures) if measures else None,
            radii=tuple(float(r) for r in radii) if radii is not None else None,
            irs=float(data["irs"]) if data.get("irs") is not None else None,
            verdict=Label(verdict) if verdict else None,
            source_tag=data.get("source_tag") or "",
            error=data.get("error"),
        )


@dataclass(frozen=True)
class EvalSummary:
    """
    Detection metrics with Fake as the positive class.

    A metric whose denominator is zero is None and its name is listed in `undefined`.
    """
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    undefined: Tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "accuracy": self.accuracy, "precision": self.precision,
            "recall": self.recall, "f1": self.f1,
            "undefined": list(self.undefined),
        }


@dataclass(frozen=True)
class RotationReport:
    """
    IRS deviation of each image under rotation.

    Attributes:
        rows (list): One dict per (path, rotation) with the base and rotated IRS.
        max_deviation (float): Largest relative deviation over the quarter-turns.
        mean_deviation (float): Mean relative deviation over the quarter-turns.
        angle_max_deviation (float, optional): Largest deviation over free angles, informational.
    """
    rows: List[Dict[str, Any]] = field(default_factory=list)
    max_deviation: float = 0.0
    mean_deviation: float = 0.0
    angle_max_deviation: Optional[float] = None
    failures: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "images": len({row["path"] for row in self.rows}),
            "max_deviation": self.max_deviation,
            "mean_deviation": self.mean_deviation,
            "angle_max_deviation": self.angle_max_deviation,
            "failures": list(self.failures),
        }

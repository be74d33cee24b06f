import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn

from entity.Corpus import Corpus, CorpusEntry, RotationReport, ScoreRecord
from entity.Image import GrayImage
from entity.Measures import MeasureVector
from entity.Profile import CalibrationProfile
from entity.Score import Label
from model.errors import IoError, IrsError, NoImagesFound
from model.harness import benchmark_table, rotation_deviations
from model.imgproc import SUPPORTED_SUFFIXES, load_gray
from model.measures import measure_vector
from model.scoring import classify, irs

logger = logging.getLogger(__name__)

T = TypeVar("T")

ROTATION_TOLERANCE = 1e-3


def ingest_corpus(directory: Path, label: Label = Label.UNLABELED, source_tag: str = "") -> Corpus:
    """
    Collect the PNG, JPEG and BMP files under a directory tree.

    Files with other suffixes are skipped and counted. Entries are sorted by path.

    Raises:
        IoError: The directory does not exist or cannot be listed.
        NoImagesFound: No supported image file was found.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise IoError(f"Corpus directory not found: {directory}")

    images, skipped = [], 0
    try:
        for path in sorted(p for p in directory.rglob("*") if p.is_file()):
            if path.suffix.lower() in SUPPORTED_SUFFIXES:
                images.append(CorpusEntry(path, label))
            else:
                skipped += 1
                logger.debug("Skipping non-image file %s", path)
    except OSError as e:
        raise IoError(f"Cannot list {directory}: {e}") from e

    if skipped:
        logger.warning("Skipped %d non-image files under %s", skipped, directory)
    if not images:
        raise NoImagesFound(f"No PNG, JPEG or BMP files under {directory}")

    corpus = Corpus(tuple(images), source_tag or directory.name)
    logger.info("Ingested %d images from %s as %s", len(corpus), directory, corpus.source_tag)
    return corpus


def load_corpus_image(path: Path) -> GrayImage:
    """Read, decode and standardize one corpus file."""
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}") from e
    return load_gray(data)


def analyze_file(path: Path) -> MeasureVector:
    return measure_vector(load_corpus_image(path))


def _describe(error: Exception) -> str:
    """Error text for a per-file failure; unexpected exceptions keep their type name."""
    if isinstance(error, IrsError):
        return str(error)
    return f"{type(error).__name__}: {error}"


class CorpusController:
    """Runs per-file analysis over a corpus on a bounded thread pool"""

    def __init__(self, workers: int = 1, show_progress: bool = False):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self.show_progress = show_progress

    def _map(self, func: Callable[[CorpusEntry], T], entries: Sequence[CorpusEntry], description: str) -> List[T]:
        """Apply func to every entry, returning results in entry order."""
        progress = Progress(
            TextColumn("{task.description}"), BarColumn(), MofNCompleteColumn(),
            console=Console(stderr=True), transient=True, disable=not self.show_progress,
        )
        with progress:
            task = progress.add_task(description, total=len(entries))

            def tracked(entry: CorpusEntry) -> T:
                result = func(entry)
                progress.advance(task)
                return result

            if self.workers == 1:
                return [tracked(e) for e in entries]
            with ThreadPoolExecutor(max_workers=min(self.workers, len(entries) or 1)) as pool:
                # map() yields in submission order, whatever order the workers finish in
                return list(pool.map(tracked, entries))

    def measure_corpus(self, corpus: Corpus) -> List[Optional[MeasureVector]]:
        """Raw measure vectors in path order; None for files that fail to decode."""
        def measure(entry: CorpusEntry) -> Optional[MeasureVector]:
            try:
                return analyze_file(entry.path)
            except Exception as e:
                logger.warning("Skipping %s: %s", entry.path, _describe(e))
                return None

        return self._map(measure, corpus.entries, f"Measuring {corpus.source_tag}")

    def score_corpus(self, corpus: Corpus, profile: CalibrationProfile) -> List[ScoreRecord]:
        """
        One ScoreRecord per corpus entry, in path order.

        A file that cannot be analysed yields a record carrying the error text
        instead of measures.
        """
        def score(entry: CorpusEntry) -> ScoreRecord:
            try:
                v = analyze_file(entry.path)
                result = irs(v, profile)
                verdict = classify(result, profile.threshold)
            except Exception as e:
                logger.warning("Failed to score %s: %s", entry.path, _describe(e))
                return ScoreRecord(path=str(entry.path), label=entry.label,
                                   source_tag=corpus.source_tag, error=_describe(e))
            return ScoreRecord(
                path=str(entry.path),
                label=entry.label,
                measure_vector=v,
                radii=result.radii.values,
                irs=result.value,
                verdict=verdict.label,
                source_tag=corpus.source_tag,
            )

        records = self._map(score, corpus.entries, f"Scoring {corpus.source_tag}")
        failed = sum(1 for r in records if not r.ok)
        if failed:
            logger.warning("%d of %d files in %s could not be scored", failed, len(records), corpus.source_tag)
        return records

    def benchmark_models(self, corpora: Sequence[Corpus], profile: CalibrationProfile):
        """Per-source mean, std and count of IRS; see model.harness.benchmark_table."""
        if not corpora:
            raise ValueError("benchmark_models needs at least one corpus")
        records = [r for c in corpora for r in self.score_corpus(c, profile)]
        return benchmark_table(records)

    def rotation_check(self, corpus: Corpus, profile: CalibrationProfile,
                       quarter_turns: Sequence[int] = (1, 2, 3),
                       angles: Sequence[float] = ()) -> RotationReport:
        """
        IRS deviation of every image under quarter-turns and optional free angles.

        Only quarter-turn deviations count toward max_deviation and the failures
        list; free-angle rows are informational.
        """
        def check(entry: CorpusEntry) -> List[Dict[str, object]]:
            try:
                rows = rotation_deviations(load_corpus_image(entry.path), profile, quarter_turns, angles)
            except Exception as e:
                logger.warning("Skipping %s in rotation check: %s", entry.path, _describe(e))
                return []
            return [{"path": str(entry.path), **row} for row in rows]

        rows = [row for rows in self._map(check, corpus.entries, "Rotating") for row in rows]
        quarter = np.array([row["deviation"] for row in rows if row["kind"] == "quarter"])
        angle = [row["deviation"] for row in rows if row["kind"] == "angle"]
        failures = sorted({row["path"] for row in rows
                           if row["kind"] == "quarter" and row["deviation"] > ROTATION_TOLERANCE})
        return RotationReport(
            rows=rows,
            max_deviation=float(quarter.max()) if quarter.size else 0.0,
            mean_deviation=float(quarter.mean()) if quarter.size else 0.0,
            angle_max_deviation=max(angle) if angle else None,
            failures=tuple(failures),
        )


def score_corpus(corpus: Corpus, profile: CalibrationProfile, workers: int = 1) -> List[ScoreRecord]:
    return CorpusController(workers).score_corpus(corpus, profile)


def measure_corpus(corpus: Corpus, workers: int = 1) -> List[Optional[MeasureVector]]:
    return CorpusController(workers).measure_corpus(corpus)


def benchmark_models(corpora: Sequence[Corpus], profile: CalibrationProfile, workers: int = 1):
    return CorpusController(workers).benchmark_models(corpora, profile)


def rotation_check(corpus: Corpus, profile: CalibrationProfile, angles: Sequence[float] = (),
                   workers: int = 1) -> RotationReport:
    return CorpusController(workers).rotation_check(corpus, profile, angles=angles)

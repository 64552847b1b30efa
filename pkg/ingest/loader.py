# ingest/loader.py
"""
Corpus assembly from a manifest directory plus a labels CSV.
"""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Tuple, Union

from artifacts.fingerprint import fingerprint_files
from config import LABELS_HEADER, MANIFEST_SUFFIX
from errors import DuplicateAppId, LabelFileMissing, ManifestFileMissing
from .corpus import AppSample, Corpus, Label
from .manifest import parse_manifest

logger = logging.getLogger("INGEST")


def read_labels(labels_file: Union[str, Path]) -> List[Tuple[str, Label, int]]:
    """
    Read ``app_id,label`` rows.

    Returns:
        List of (app_id, label, line_number)
    """
    path = Path(labels_file)
    if not path.is_file():
        raise LabelFileMissing("Labels file not found", file=str(path))

    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or not any(cell.strip() for cell in header):
            raise LabelFileMissing("Labels file is empty", file=str(path))
        if tuple(cell.strip().lower() for cell in header[:2]) != LABELS_HEADER:
            raise LabelFileMissing(
                f"Labels file header must be '{','.join(LABELS_HEADER)}'", file=str(path), line=1)

        rows = []
        seen = set()
        for line_no, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            app_id = row[0].strip()
            raw_label = row[1] if len(row) > 1 else ""
            label = Label.parse(raw_label, file=str(path), line=line_no, app_id=app_id)
            if app_id in seen:
                raise DuplicateAppId(f"Duplicate app_id '{app_id}'", file=str(path), line=line_no)
            seen.add(app_id)
            rows.append((app_id, label, line_no))
    return rows


def _parse_file(job: Tuple[str, str, str]) -> AppSample:
    path, app_id, label_value = job
    data = Path(path).read_bytes()
    return parse_manifest(data, app_id=app_id, label=Label(label_value), source_path=path)


def load_corpus(
    manifest_dir: Union[str, Path],
    labels_file: Union[str, Path],
    workers: int = 1,
) -> Corpus:
    """
    Build a Corpus with one AppSample per labels row, in labels-file order.

    Manifest files without a labels row are ignored and counted in
    ``Corpus.ignored_files``.
    """
    manifest_dir = Path(manifest_dir)
    rows = read_labels(labels_file)

    jobs = []
    for app_id, label, line_no in rows:
        path = manifest_dir / f"{app_id}{MANIFEST_SUFFIX}"
        if not path.is_file():
            raise ManifestFileMissing(app_id, path=str(path))
        jobs.append((str(path), app_id, label.value))

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_parse_file, jobs, chunksize=max(1, len(jobs) // (workers * 4))))
    else:
        samples = [_parse_file(job) for job in jobs]

    labeled = {f"{app_id}{MANIFEST_SUFFIX}" for app_id, _, _ in rows}
    on_disk = sorted(manifest_dir.glob(f"*{MANIFEST_SUFFIX}")) if manifest_dir.is_dir() else []
    ignored = sum(1 for p in on_disk if p.name not in labeled)
    if ignored:
        logger.warning(f"{ignored} manifest file(s) without a label row were ignored")

    fingerprint = fingerprint_files([Path(j[0]) for j in jobs] + [Path(labels_file)])
    corpus = Corpus(samples=samples, ignored_files=ignored, fingerprint=fingerprint)
    logger.info(f"Loaded {len(corpus)} samples from {manifest_dir} "
                f"({corpus.label_counts[Label.MALICIOUS]} malicious, "
                f"{corpus.label_counts[Label.BENIGN]} benign)")
    return corpus


def load_unlabeled(manifest_dir: Union[str, Path], workers: int = 1) -> Corpus:
    """Parse every manifest in a directory as an unlabeled sample, sorted by file name."""
    manifest_dir = Path(manifest_dir)
    if not manifest_dir.is_dir():
        raise ManifestFileMissing(str(manifest_dir), path=str(manifest_dir))
    paths = sorted(manifest_dir.glob(f"*{MANIFEST_SUFFIX}"))
    jobs = [(str(p), p.stem, Label.UNLABELED.value) for p in paths]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_parse_file, jobs))
    else:
        samples = [_parse_file(job) for job in jobs]
    fingerprint = fingerprint_files(paths) if paths else ""
    return Corpus(samples=samples, fingerprint=fingerprint)

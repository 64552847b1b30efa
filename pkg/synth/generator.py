# synth/generator.py
"""
Synthetic labeled manifest corpora with controllable class contrast.

Each app's intents are drawn independently per key: the key is present
with its class's emission probability, and when present it is declared
once (or 1..max_repeat times). Output uses the same manifests/ +
labels.csv layout that load_corpus reads, plus ground_truth.json holding
the exact emission matrix.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from lxml import etree

from config import ANDROID_NS, LABELS_HEADER, MANIFEST_SUFFIX, SYNTH
from errors import ConfigError, IoFailure
from ingest import IntentKey, IntentKind, Label

logger = logging.getLogger("SYNTH")

ANDROID = "{%s}" % ANDROID_NS

_RAW_PREFIX = {
    IntentKind.ACTION: "android.intent.action.",
    IntentKind.CATEGORY: "android.intent.category.",
    IntentKind.EXTRA: "android.intent.extra.",
}


def synthetic_keys(vocab_size: int) -> List[IntentKey]:
    """Three actions for every category and extra: A A A C E A A A C E ..."""
    pattern = (IntentKind.ACTION, IntentKind.ACTION, IntentKind.ACTION, IntentKind.CATEGORY, IntentKind.EXTRA)
    keys = []
    for i in range(vocab_size):
        kind = pattern[i % len(pattern)]
        name = f"SYNTH_{kind.value.upper()}_{i:03d}"
        keys.append(IntentKey(kind=kind, name=name, raw=_RAW_PREFIX[kind] + name))
    return keys


@dataclass
class GeneratorSpec:
    n_mal: int
    n_ben: int
    p_mal: np.ndarray
    p_ben: np.ndarray
    keys: List[IntentKey] = field(default_factory=list)
    seed: int = 0
    max_repeat: int = SYNTH["max_repeat"]
    package_prefix: str = SYNTH["package_prefix"]

    def __post_init__(self):
        self.p_mal = np.asarray(self.p_mal, dtype=np.float64).reshape(-1)
        self.p_ben = np.asarray(self.p_ben, dtype=np.float64).reshape(-1)
        if not self.keys:
            self.keys = synthetic_keys(len(self.p_mal))
        if self.n_mal < 1 or self.n_ben < 1:
            raise ConfigError("Both classes need at least one app", n_mal=self.n_mal, n_ben=self.n_ben)
        if self.vocab_size < 2:
            raise ConfigError("vocab_size must be >= 2", vocab_size=self.vocab_size)
        if len(self.p_mal) != self.vocab_size or len(self.p_ben) != self.vocab_size:
            raise ConfigError("Emission vectors must match the key list",
                              keys=self.vocab_size, p_mal=len(self.p_mal), p_ben=len(self.p_ben))
        for name, p in (("p_mal", self.p_mal), ("p_ben", self.p_ben)):
            if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
                raise ConfigError(f"{name} must lie in [0, 1]")
        if len(set(self.keys)) != self.vocab_size:
            raise ConfigError("Generator keys must be distinct")
        if self.max_repeat < 1:
            raise ConfigError("max_repeat must be >= 1", max_repeat=self.max_repeat)

    @property
    def vocab_size(self) -> int:
        return len(self.keys)

    @classmethod
    def contrastive(
        cls,
        n_mal: int = SYNTH["n_mal"],
        n_ben: int = SYNTH["n_ben"],
        vocab_size: int = SYNTH["vocab_size"],
        n_informative: int = SYNTH["n_informative"],
        gap: float = SYNTH["gap"],
        base_rate: float = SYNTH["base_rate"],
        seed: int = 0,
        max_repeat: int = SYNTH["max_repeat"],
    ) -> "GeneratorSpec":
        """
        The first ``n_informative`` keys separate the classes by ``gap``
        (alternately favouring malicious and benign apps); the rest share
        one probability per key drawn from [0.05, 0.5].
        """
        if not 0 <= n_informative <= vocab_size:
            raise ConfigError("n_informative must be within [0, vocab_size]",
                              n_informative=n_informative, vocab_size=vocab_size)
        high = base_rate + gap
        if base_rate < 0.0 or gap < 0.0 or high > 1.0:
            raise ConfigError("base_rate + gap must stay within [0, 1]", base_rate=base_rate, gap=gap)

        rng = np.random.default_rng(seed)
        shared = rng.uniform(0.05, 0.5, size=vocab_size)
        p_mal = shared.copy()
        p_ben = shared.copy()
        for j in range(n_informative):
            if j % 2 == 0:
                p_mal[j], p_ben[j] = high, base_rate
            else:
                p_mal[j], p_ben[j] = base_rate, high
        return cls(n_mal=n_mal, n_ben=n_ben, p_mal=p_mal, p_ben=p_ben, seed=seed, max_repeat=max_repeat)

    def to_dict(self) -> dict:
        return {
            "n_mal": self.n_mal,
            "n_ben": self.n_ben,
            "keys": [k.to_dict() for k in self.keys],
            "p_mal": self.p_mal.tolist(),
            "p_ben": self.p_ben.tolist(),
            "seed": self.seed,
            "max_repeat": self.max_repeat,
            "package_prefix": self.package_prefix,
        }


@dataclass
class GeneratedCorpus:
    """Paths written by generate_corpus plus the emission ground truth."""
    root: Path
    manifest_dir: Path
    labels_file: Path
    ground_truth_file: Path
    app_ids: List[str]
    labels: List[Label]
    keys: List[IntentKey]
    emissions: np.ndarray

    def totals(self, label: Label) -> np.ndarray:
        """Per-key occurrence totals for one class."""
        rows = np.array([lab is label for lab in self.labels], dtype=bool)
        return self.emissions[rows].sum(axis=0)


def sample_emissions(spec: GeneratorSpec) -> tuple:
    """
    Returns (labels, counts) with counts of shape (n_apps, vocab_size).
    Class order is shuffled so app ids do not reveal the label.
    """
    rng = np.random.default_rng(spec.seed)
    labels = np.array([Label.MALICIOUS] * spec.n_mal + [Label.BENIGN] * spec.n_ben, dtype=object)
    labels = labels[rng.permutation(len(labels))]

    probs = np.stack([spec.p_mal if lab is Label.MALICIOUS else spec.p_ben for lab in labels])
    present = rng.random(probs.shape) < probs
    if spec.max_repeat > 1:
        repeats = rng.integers(1, spec.max_repeat + 1, size=probs.shape)
        counts = np.where(present, repeats, 0)
    else:
        counts = present.astype(np.int64)
    return list(labels), counts.astype(np.int64)


def build_manifest(package: str, keys: List[IntentKey], counts: np.ndarray) -> bytes:
    """apktool-style manifest declaring each key ``counts[j]`` times."""
    root = etree.Element("manifest", nsmap={"android": ANDROID_NS})
    root.set("package", package)
    root.set(f"{ANDROID}versionCode", "1")
    app = etree.SubElement(root, "application")
    app.set(f"{ANDROID}label", package.rsplit(".", 1)[-1])

    receiver = etree.SubElement(app, "receiver")
    receiver.set(f"{ANDROID}name", f"{package}.SynthReceiver")
    receiver.set(f"{ANDROID}exported", "true")

    for key, n in zip(keys, counts):
        for _ in range(int(n)):
            if key.kind is IntentKind.EXTRA:
                meta = etree.SubElement(app, "meta-data")
                meta.set(f"{ANDROID}name", key.raw)
                meta.set(f"{ANDROID}value", "true")
            else:
                flt = etree.SubElement(receiver, "intent-filter")
                child = etree.SubElement(flt, key.kind.value)
                child.set(f"{ANDROID}name", key.raw)

    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="utf-8")


def generate_corpus(spec: GeneratorSpec, out_dir: Union[str, Path]) -> GeneratedCorpus:
    """
    Write ``out_dir/manifests/<app_id>.xml``, ``out_dir/labels.csv`` and
    ``out_dir/ground_truth.json``.

    Raises:
        IoFailure: any filesystem error
    """
    out_dir = Path(out_dir)
    manifest_dir = out_dir / "manifests"
    labels_file = out_dir / "labels.csv"
    truth_file = out_dir / "ground_truth.json"

    labels, counts = sample_emissions(spec)
    app_ids = [f"app{i:05d}" for i in range(len(labels))]

    try:
        manifest_dir.mkdir(parents=True, exist_ok=True)
        for i, app_id in enumerate(app_ids):
            xml = build_manifest(f"{spec.package_prefix}{i:05d}", spec.keys, counts[i])
            (manifest_dir / f"{app_id}{MANIFEST_SUFFIX}").write_bytes(xml)

        with open(labels_file, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(LABELS_HEADER)
            for app_id, label in zip(app_ids, labels):
                writer.writerow([app_id, label.value])

        with open(truth_file, "w", encoding="utf-8") as f:
            json.dump({
                "spec": spec.to_dict(),
                "keys": [k.label for k in spec.keys],
                "app_ids": app_ids,
                "labels": [lab.value for lab in labels],
                "counts": counts.tolist(),
            }, f, indent=2)
    except OSError as e:
        raise IoFailure(f"Cannot write synthetic corpus: {e.strerror or e}", path=str(out_dir)) from e

    logger.info(f"Generated {len(app_ids)} apps ({spec.n_mal} malicious, {spec.n_ben} benign) "
                f"over {spec.vocab_size} keys in {out_dir}")
    return GeneratedCorpus(root=out_dir, manifest_dir=manifest_dir, labels_file=labels_file,
                           ground_truth_file=truth_file, app_ids=app_ids, labels=labels,
                           keys=list(spec.keys), emissions=counts)


def load_ground_truth(path: Union[str, Path]) -> dict:
    """ground_truth.json with ``counts`` as an int array and keys as IntentKeys."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise IoFailure(f"Cannot read ground truth: {e.strerror or e}", path=str(path)) from e
    data["counts"] = np.asarray(data["counts"], dtype=np.int64)
    data["keys"] = [IntentKey.from_label(label) for label in data["keys"]]
    data["labels"] = [Label(v) for v in data["labels"]]
    return data

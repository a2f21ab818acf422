"""Dataset loading, normalization, partitioning, and corpus assembly.

A corpus stacks the truncated frequency representations of every series from
a collection of datasets into one [N, m, 2] array, with per-row provenance
so each row resolves back to (dataset, sample, label, split).  Corpora are
immutable once built and can be cached to a versioned binary file.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BoundsError,
    ClassArityError,
    ComponentCountError,
    EmptyGroupError,
    EmptyInputError,
    InvalidInputError,
    ParseError,
    SerializationError,
)
from .fourier import FrequencyRepresentation, TimeSeries, forward_spectrum, truncate_normalize

CORPUS_MAGIC = b"FFADCORP"
CORPUS_VERSION = 1

NORMALIZATION_MODES = ("none", "per_series_z")

# Partition group keys in report order.
GROUP_KEYS = ("train-0", "train-1", "test-0", "test-1")


@dataclass(frozen=True)
class LabeledDataset:
    """A named set of equal-length labeled series from one split."""

    name: str
    series: tuple[TimeSeries, ...]
    split: str = "train"
    normalization: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if self.split not in ("train", "test"):
            raise InvalidInputError(f"split must be 'train' or 'test', got {self.split!r}")
        if self.normalization not in NORMALIZATION_MODES:
            raise InvalidInputError(f"unknown normalization mode {self.normalization!r}")
        lengths = {len(s) for s in self.series}
        if len(lengths) > 1:
            raise InvalidInputError(
                f"dataset {self.name!r} mixes series lengths {sorted(lengths)}"
            )
        missing = [i for i, s in enumerate(self.series) if s.label is None]
        if missing:
            raise InvalidInputError(
                f"dataset {self.name!r} has unlabeled series at indices {missing[:5]}"
            )

    def __len__(self) -> int:
        return len(self.series)

    @property
    def length(self) -> int:
        return len(self.series[0]) if self.series else 0

    @property
    def class_values(self) -> set:
        return {s.label for s in self.series}


@dataclass(frozen=True)
class CorpusRow:
    """Provenance of one corpus row."""

    dataset_id: str
    sample_index: int
    label: str
    split: str
    original_length: int


@dataclass(frozen=True)
class SkippedDataset:
    """A dataset excluded from a corpus by the length bound."""

    name: str
    split: str
    length: int
    n_series: int


@dataclass(frozen=True)
class Corpus:
    """Stacked frequency representations with per-row provenance."""

    data: np.ndarray  # [N, m, 2]
    provenance: tuple[CorpusRow, ...]
    m: int
    normalization: str
    skipped: tuple[SkippedDataset, ...] = field(default=())

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 2:
            raise InvalidInputError(f"corpus data must be [N, m, 2], got {data.shape}")
        if data.shape[1] != self.m:
            raise InvalidInputError(
                f"corpus m={self.m} does not match data shape {data.shape}"
            )
        provenance = tuple(self.provenance)
        if len(provenance) != data.shape[0]:
            raise InvalidInputError(
                f"{len(provenance)} provenance rows for {data.shape[0]} data rows"
            )
        keys = {(r.dataset_id, r.split, r.sample_index) for r in provenance}
        if len(keys) != len(provenance):
            raise InvalidInputError("corpus provenance rows are not unique")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "skipped", tuple(self.skipped))

    def __len__(self) -> int:
        return self.data.shape[0]

    def row_representation(self, i: int) -> FrequencyRepresentation:
        return FrequencyRepresentation(
            coeffs=self.data[i], original_length=self.provenance[i].original_length
        )

    def split_indices(self, split: str) -> np.ndarray:
        return np.array(
            [i for i, r in enumerate(self.provenance) if r.split == split], dtype=np.intp
        )


def _infer_name_split(path: Path) -> tuple[str, str]:
    stem = path.stem
    upper = stem.upper()
    if upper.endswith("_TRAIN"):
        return stem[: -len("_TRAIN")], "train"
    if upper.endswith("_TEST"):
        return stem[: -len("_TEST")], "test"
    return stem, "train"


def load_delimited(
    path,
    delimiter: str | None = None,
    label_column: int = 0,
    name: str | None = None,
    split: str | None = None,
) -> LabeledDataset:
    """Load a label-first delimited file into a LabeledDataset.

    The first column is the class label; the rest are samples.  The
    delimiter defaults to tab when the first data line contains one, comma
    otherwise.  Split is taken from a _TRAIN/_TEST filename suffix unless
    given explicitly.  Row order in the file is preserved.
    """
    path = Path(path)
    inferred_name, inferred_split = _infer_name_split(path)
    name = name if name is not None else inferred_name
    split = split if split is not None else inferred_split

    raw_lines = path.read_text().splitlines()
    rows = [(i + 1, line) for i, line in enumerate(raw_lines) if line.strip()]
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    if delimiter is None:
        delimiter = "\t" if "\t" in rows[0][1] else ","

    n_fields = None
    series = []
    bad_rows = []
    for line_no, line in rows:
        tokens = [t.strip() for t in line.split(delimiter)]
        if n_fields is None:
            n_fields = len(tokens)
            if n_fields < 3:
                raise ParseError(
                    f"{path}: line {line_no}: need a label plus >= 2 samples, "
                    f"got {n_fields} fields"
                )
        elif len(tokens) != n_fields:
            raise ParseError(
                f"{path}: ragged row at line {line_no}: expected {n_fields} "
                f"fields, got {len(tokens)}"
            )
        label = tokens[label_column]
        sample_tokens = tokens[:label_column] + tokens[label_column + 1 :]
        try:
            values = np.array([float(t) for t in sample_tokens])
        except ValueError:
            bad_rows.append(line_no)
            continue
        if not label or not np.all(np.isfinite(values)):
            bad_rows.append(line_no)
            continue
        series.append(TimeSeries(values=values, label=label, dataset_id=name))
    if bad_rows:
        raise ParseError(
            f"{path}: non-numeric or missing values at lines {bad_rows}"
        )
    return LabeledDataset(name=name, series=tuple(series), split=split)


def normalize(dataset: LabeledDataset, mode: str) -> LabeledDataset:
    """Normalize each series independently.

    ``per_series_z`` subtracts the sample mean and divides by the population
    standard deviation (ddof=0).  A series whose std is zero (to rounding of
    the mean) maps to all zeros instead of dividing by zero.  ``none`` is
    the identity.  The mode is recorded on the returned dataset.
    """
    if mode not in NORMALIZATION_MODES:
        raise InvalidInputError(f"unknown normalization mode {mode!r}")
    if mode == "none":
        return dataset
    normalized = []
    for s in dataset.series:
        mu = float(s.values.mean())
        sd = float(s.values.std())
        if sd <= 1e-12 * max(1.0, abs(mu)):
            values = np.zeros_like(s.values)
        else:
            values = (s.values - mu) / sd
        normalized.append(TimeSeries(values=values, label=s.label, dataset_id=s.dataset_id))
    return replace(dataset, series=tuple(normalized), normalization=mode)


def featurize(series_list: Sequence[TimeSeries], m: int, origin: str | None = None):
    """Truncated, normalized frequency representations of a list of series."""
    reps = []
    for i, s in enumerate(series_list):
        where = f"{origin}[{i}]" if origin else (s.dataset_id or f"series[{i}]")
        spectrum = forward_spectrum(s)
        reps.append(truncate_normalize(spectrum, m, len(s), origin=where))
    return reps


def build_corpus(
    datasets: Iterable[LabeledDataset], m: int, on_short: str = "skip"
) -> Corpus:
    """Transform every series of every dataset and stack the results.

    Rows are concatenated in dataset order then sample order.  Datasets with
    series shorter than 2m-1 samples are skipped and counted (or rejected
    when on_short='error').  All inputs must share one normalization mode.
    """
    if on_short not in ("skip", "error"):
        raise InvalidInputError(f"on_short must be 'skip' or 'error', got {on_short!r}")
    datasets = list(datasets)
    if not datasets:
        raise EmptyInputError("no datasets given")
    modes = {d.normalization for d in datasets}
    if len(modes) > 1:
        raise InvalidInputError(f"datasets mix normalization modes {sorted(modes)}")

    blocks = []
    provenance = []
    skipped = []
    for ds in datasets:
        if ds.length < 2 * m - 1:
            if on_short == "error":
                raise ComponentCountError(
                    f"dataset {ds.name!r} ({ds.split}): length {ds.length} < "
                    f"2m-1 = {2 * m - 1} for m={m}"
                )
            skipped.append(
                SkippedDataset(
                    name=ds.name, split=ds.split, length=ds.length, n_series=len(ds)
                )
            )
            continue
        reps = featurize(ds.series, m, origin=f"{ds.name}({ds.split})")
        blocks.append(np.stack([r.coeffs for r in reps]))
        provenance.extend(
            CorpusRow(
                dataset_id=ds.name,
                sample_index=i,
                label=s.label,
                split=ds.split,
                original_length=ds.length,
            )
            for i, s in enumerate(ds.series)
        )
    if not blocks:
        raise EmptyInputError(
            f"all {len(datasets)} datasets were skipped by the length bound for m={m}"
        )
    return Corpus(
        data=np.concatenate(blocks, axis=0),
        provenance=tuple(provenance),
        m=m,
        normalization=datasets[0].normalization,
        skipped=tuple(skipped),
    )


def _label_sort_key(label: str):
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


def partition_binary(
    train: LabeledDataset, test: LabeledDataset
) -> dict[str, LabeledDataset]:
    """Split a binary train/test pair into {train-0, train-1, test-0, test-1}.

    The two observed labels map to class 0 and 1 in ascending order (numeric
    when both labels parse as numbers), so the grouping is deterministic.
    """
    labels = sorted(train.class_values | test.class_values, key=_label_sort_key)
    if len(labels) != 2:
        raise ClassArityError(
            f"binary partition needs exactly 2 classes, got {len(labels)}: {labels}"
        )
    groups = {}
    for split, ds in (("train", train), ("test", test)):
        for cls, label in enumerate(labels):
            key = f"{split}-{cls}"
            members = tuple(s for s in ds.series if s.label == label)
            if not members:
                raise EmptyGroupError(
                    f"group {key} (label {label!r}) of dataset {ds.name!r} is empty"
                )
            groups[key] = LabeledDataset(
                name=f"{ds.name}-{key}",
                series=members,
                split=split,
                normalization=ds.normalization,
            )
    return groups


def sample_rows(corpus: Corpus, count: int, seed: int) -> Corpus:
    """Uniform sample of corpus rows without replacement, seeded.

    Uses numpy's PCG64 generator, so one (corpus, count, seed) triple always
    yields the same subset.  count == len(corpus) returns a permutation of
    the full corpus.
    """
    n = len(corpus)
    if count < 1 or count > n:
        raise BoundsError(f"sample count {count} out of range 1..{n}")
    rng = np.random.default_rng(seed)
    idx = rng.permutation(n)[:count]
    return Corpus(
        data=corpus.data[idx],
        provenance=tuple(corpus.provenance[i] for i in idx),
        m=corpus.m,
        normalization=corpus.normalization,
        skipped=corpus.skipped,
    )


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus cache: header, little-endian f64 rows, JSON trailer."""
    trailer = {
        "normalization": corpus.normalization,
        "rows": [
            {
                "dataset_id": r.dataset_id,
                "sample_index": r.sample_index,
                "label": r.label,
                "split": r.split,
                "original_length": r.original_length,
            }
            for r in corpus.provenance
        ],
        "skipped": [
            {"name": s.name, "split": s.split, "length": s.length, "n_series": s.n_series}
            for s in corpus.skipped
        ],
    }
    with open(path, "wb") as fh:
        fh.write(CORPUS_MAGIC)
        fh.write(struct.pack("<IQI", CORPUS_VERSION, len(corpus), corpus.m))
        fh.write(np.ascontiguousarray(corpus.data, dtype="<f8").tobytes())
        fh.write(json.dumps(trailer, sort_keys=True).encode("utf-8"))


def load_corpus(path) -> Corpus:
    """Read a corpus cache written by :func:`save_corpus`."""
    blob = Path(path).read_bytes()
    header = struct.calcsize("<IQI")
    if len(blob) < len(CORPUS_MAGIC) + header:
        raise SerializationError(f"{path}: truncated corpus file")
    if blob[: len(CORPUS_MAGIC)] != CORPUS_MAGIC:
        raise SerializationError(f"{path}: bad magic, not a corpus cache")
    version, n, m = struct.unpack_from("<IQI", blob, len(CORPUS_MAGIC))
    if version != CORPUS_VERSION:
        raise SerializationError(
            f"{path}: corpus version {version} unsupported (expected {CORPUS_VERSION})"
        )
    offset = len(CORPUS_MAGIC) + header
    nbytes = n * m * 2 * 8
    if len(blob) < offset + nbytes:
        raise SerializationError(f"{path}: truncated corpus data block")
    data = np.frombuffer(blob, dtype="<f8", count=n * m * 2, offset=offset)
    data = data.reshape(n, m, 2).astype(np.float64)
    try:
        trailer = json.loads(blob[offset + nbytes :].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SerializationError(f"{path}: corrupt provenance trailer: {exc}") from exc
    provenance = tuple(
        CorpusRow(
            dataset_id=r["dataset_id"],
            sample_index=r["sample_index"],
            label=r["label"],
            split=r["split"],
            original_length=r["original_length"],
        )
        for r in trailer["rows"]
    )
    skipped = tuple(
        SkippedDataset(
            name=s["name"], split=s["split"], length=s["length"], n_series=s["n_series"]
        )
        for s in trailer.get("skipped", [])
    )
    return Corpus(
        data=data,
        provenance=provenance,
        m=m,
        normalization=trailer["normalization"],
        skipped=skipped,
    )

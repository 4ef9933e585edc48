"""Score and embedding ingestion.

All scores are normalised so that a higher value means "more similar": the
Euclidean measure is negated.  Scores are stored as float64 arrays.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, DegenerateInputError, DimensionError, InputError, ParseError

GENUINE = "genuine"
IMPOSTOR = "impostor"
LABELS = (GENUINE, IMPOSTOR)

COSINE = "cosine"
NEG_EUCLIDEAN = "negative-euclidean"
MEASURES = (COSINE, NEG_EUCLIDEAN)

SCORE_HEADER = ("group", "label", "score")
PAIR_HEADER = ("id_a", "id_b", "label")


def _frozen_array(values):
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Embedding:
    subject_id: str
    group: str
    vector: np.ndarray

    def __post_init__(self):
        vec = _frozen_array(self.vector)
        if vec.size == 0:
            raise DimensionError(f"embedding {self.subject_id!r} has an empty vector")
        if not np.all(np.isfinite(vec)):
            raise DataError(f"embedding {self.subject_id!r} has non-finite entries")
        if not self.group:
            raise DataError(f"embedding {self.subject_id!r} has an empty group name")
        object.__setattr__(self, "vector", vec)


@dataclass(frozen=True, eq=False)
class LabeledScoreSet:
    """Genuine and impostor similarity scores of one demographic group."""

    group: str
    genuine: np.ndarray = field(default_factory=lambda: _frozen_array([]))
    impostor: np.ndarray = field(default_factory=lambda: _frozen_array([]))

    def __post_init__(self):
        if not isinstance(self.group, str) or not self.group:
            raise DataError("group name must be a non-empty string")
        gen = _frozen_array(self.genuine)
        imp = _frozen_array(self.impostor)
        if not (np.all(np.isfinite(gen)) and np.all(np.isfinite(imp))):
            raise DataError(f"group {self.group!r} contains non-finite scores")
        object.__setattr__(self, "genuine", gen)
        object.__setattr__(self, "impostor", imp)

    def __eq__(self, other):
        if not isinstance(other, LabeledScoreSet):
            return NotImplemented
        return (self.group == other.group
                and np.array_equal(self.genuine, other.genuine)
                and np.array_equal(self.impostor, other.impostor))

    __hash__ = None

    @property
    def sizes(self):
        return self.genuine.size, self.impostor.size


def compute_similarity(a, b, measure=COSINE):
    """Similarity of two embeddings (or raw vectors); higher = more similar.

    ``cosine`` returns dot(a, b) / (|a| |b|) clipped to [-1, 1];
    ``negative-euclidean`` returns -|a - b|.
    """
    va = a.vector if isinstance(a, Embedding) else np.asarray(a, dtype=np.float64)
    vb = b.vector if isinstance(b, Embedding) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionError(f"vector lengths differ: {va.size} vs {vb.size}")
    if measure == COSINE:
        na = np.linalg.norm(va)
        nb = np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            raise DegenerateInputError("cosine similarity of an all-zero vector")
        return float(min(1.0, max(-1.0, np.dot(va, vb) / (na * nb))))
    if measure == NEG_EUCLIDEAN:
        return -float(np.linalg.norm(va - vb))
    raise ValueError(f"unknown similarity measure {measure!r}")


def _pairwise_scores(mat_a, mat_b, measure):
    if measure == COSINE:
        na = np.linalg.norm(mat_a, axis=1)
        nb = np.linalg.norm(mat_b, axis=1)
        if np.any(na == 0.0) or np.any(nb == 0.0):
            raise DegenerateInputError("cosine similarity of an all-zero vector")
        dots = np.einsum("ij,ij->i", mat_a, mat_b)
        return np.clip(dots / (na * nb), -1.0, 1.0)
    if measure == NEG_EUCLIDEAN:
        return -np.linalg.norm(mat_a - mat_b, axis=1)
    raise ValueError(f"unknown similarity measure {measure!r}")


def build_score_sets(embeddings: Iterable[Embedding], pairs: Iterable[Sequence[str]],
                     measure=COSINE):
    """Score every (id_a, id_b, label) pair and bucket the scores per group.

    Genuine pairs must stay inside one group.  An impostor pair is attributed
    to the group of its first member.  Groups appear in order of first use.
    """
    index = {}
    vectors = []
    groups = []
    dim = None
    for emb in embeddings:
        if emb.subject_id in index:
            raise DataError(f"duplicate subject id {emb.subject_id!r}")
        if dim is None:
            dim = emb.vector.size
        elif emb.vector.size != dim:
            raise DimensionError(
                f"embedding {emb.subject_id!r} has length {emb.vector.size}, expected {dim}")
        index[emb.subject_id] = len(vectors)
        vectors.append(emb.vector)
        groups.append(emb.group)

    ia, ib, labels = [], [], []
    for n, pair in enumerate(pairs):
        id_a, id_b, label = pair
        if label not in LABELS:
            raise DataError(f"pair {n}: label must be genuine or impostor, got {label!r}")
        for sid in (id_a, id_b):
            if sid not in index:
                raise DataError(f"pair {n}: unknown subject id {sid!r}")
        a, b = index[id_a], index[id_b]
        if label == GENUINE and groups[a] != groups[b]:
            raise DataError(f"pair {n}: genuine pair spans groups "
                            f"{groups[a]!r} and {groups[b]!r}")
        ia.append(a)
        ib.append(b)
        labels.append(label)

    if not labels:
        return []

    mat = np.vstack(vectors)
    scores = _pairwise_scores(mat[ia], mat[ib], measure)

    buckets = {}
    for a, label, s in zip(ia, labels, scores):
        gen, imp = buckets.setdefault(groups[a], ([], []))
        (gen if label == GENUINE else imp).append(s)
    return [LabeledScoreSet(g, gen, imp) for g, (gen, imp) in buckets.items()]


# --------------------------------------------------------------------------
# CSV

def _open_text(path):
    return open(path, "r", encoding="utf-8", newline="")


def _check_header(row, expected, path):
    if row is None or tuple(c.strip() for c in row) != tuple(expected):
        raise ParseError(f"expected header {','.join(expected)!r}", line=1, path=path)


def _parse_float(text, line, path, what="score"):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"cannot parse {what} {text!r}", line=line, path=path) from None
    if not math.isfinite(value):
        raise DataError(f"{path}:{line}: non-finite {what} {text!r}")
    return value


def read_score_rows(path):
    """Yield (line, group, label, score) from a score CSV."""
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), SCORE_HEADER, path)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=line, path=path)
            group, label, raw = (c.strip() for c in row)
            if not group:
                raise ParseError("empty group name", line=line, path=path)
            if label not in LABELS:
                raise ParseError(f"label must be genuine or impostor, got {label!r}",
                                 line=line, path=path)
            yield line, group, label, _parse_float(raw, line, path)


def parse_score_file(path):
    """Read a ``group,label,score`` CSV into one LabeledScoreSet per group.

    Groups are ordered by first appearance; scores keep file order.
    """
    buckets = {}
    for _, group, label, score in read_score_rows(path):
        gen, imp = buckets.setdefault(group, ([], []))
        (gen if label == GENUINE else imp).append(score)
    return [LabeledScoreSet(g, gen, imp) for g, (gen, imp) in buckets.items()]


def format_score(value):
    return repr(float(value))


def write_score_file(sets, path_or_file):
    """Write score sets in the ``group,label,score`` schema (lossless)."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCORE_HEADER)
        for s in sets:
            for v in s.genuine:
                writer.writerow((s.group, GENUINE, format_score(v)))
            for v in s.impostor:
                writer.writerow((s.group, IMPOSTOR, format_score(v)))
    finally:
        if own:
            fh.close()


def score_sets_to_csv(sets):
    buf = io.StringIO()
    write_score_file(sets, buf)
    return buf.getvalue()


def parse_embedding_file(path):
    """Read a ``subject_id,group,v0,...,vD-1`` CSV."""
    out = []
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if (header is None or len(header) < 3
                or [c.strip() for c in header[:2]] != ["subject_id", "group"]):
            raise ParseError("expected header 'subject_id,group,v0,...'", line=1, path=path)
        width = len(header)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != width:
                raise ParseError(f"expected {width} fields, got {len(row)}",
                                 line=line, path=path)
            sid, group = row[0].strip(), row[1].strip()
            if not sid or not group:
                raise ParseError("empty subject id or group", line=line, path=path)
            vec = [_parse_float(c, line, path, what="vector entry") for c in row[2:]]
            out.append(Embedding(sid, group, vec))
    return out


def parse_pair_file(path):
    """Read an ``id_a,id_b,label`` CSV into a list of tuples."""
    out = []
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), PAIR_HEADER, path)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", line=line, path=path)
            id_a, id_b, label = (c.strip() for c in row)
            if label not in LABELS:
                raise ParseError(f"label must be genuine or impostor, got {label!r}",
                                 line=line, path=path)
            out.append((id_a, id_b, label))
    return out


def load_score_sets(score_file=None, embedding_file=None, pair_file=None, measure=COSINE):
    if score_file is not None:
        return parse_score_file(Path(score_file))
    if embedding_file is None or pair_file is None:
        raise InputError("need a score file, or an embedding file plus a pair file")
    return build_score_sets(parse_embedding_file(Path(embedding_file)),
                            parse_pair_file(Path(pair_file)), measure)

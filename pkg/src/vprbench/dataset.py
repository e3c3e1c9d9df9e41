"""On-disk dataset layout, ground-truth CSV and external descriptor files.

Layout::

    DIR/query/*.png|jpg    queries, ordered by filename
    DIR/ref/*.png|jpg      references, ordered by filename
    DIR/ground_truth.csv   header ``query_index,ref_index``, zero-based

External descriptor files hold one global vector per image::

    vpr-desc v1 <count> <dim> <metric>
    0.12 0.5 ...
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cohog import RegionalDescriptorSet
from .errors import AlignmentError, FormatError, GroundTruthError, LayoutError, NotFound, ParseError
from .imaging import Rect
from .matching import GroundTruth

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}
DESC_MAGIC = "vpr-desc"
DESC_VERSION = "v1"
EXTERNAL_METRICS = ("cosine", "l1")


@dataclass
class Dataset:
    name: str
    query_paths: list
    ref_paths: list
    ground_truth: GroundTruth

    @property
    def n_queries(self):
        return len(self.query_paths)

    @property
    def n_refs(self):
        return len(self.ref_paths)


def list_images(directory):
    return sorted(
        (p for p in Path(directory).iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )


def read_ground_truth(path, tolerance=0):
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such ground-truth file: {path}")
    pairs = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["query_index", "ref_index"]:
            raise GroundTruthError(f"{path}: header must be 'query_index,ref_index', got {header}")
        for row in reader:
            if not row:
                continue
            try:
                q, r = (int(c) for c in row)
            except ValueError:
                raise GroundTruthError(f"{path} line {reader.line_num}: bad row {row}") from None
            if q in pairs:
                raise GroundTruthError(f"{path}: query {q} listed twice")
            pairs[q] = r
    n = len(pairs)
    if sorted(pairs) != list(range(n)):
        raise GroundTruthError(f"{path}: query indices must be exactly 0..{n - 1}")
    return GroundTruth([pairs[q] for q in range(n)], tolerance)


def write_ground_truth(mapping, path):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["query_index", "ref_index"])
        w.writerows(enumerate(mapping))


def load_dataset(directory, gt=None, tolerance=0):
    directory = Path(directory)
    if not directory.is_dir():
        raise LayoutError(f"dataset directory {directory} does not exist")
    lists = {}
    for sub in ("query", "ref"):
        d = directory / sub
        if not d.is_dir():
            raise LayoutError(f"{directory} has no '{sub}/' subdirectory")
        lists[sub] = list_images(d)
        if not lists[sub]:
            raise LayoutError(f"{d} contains no PNG/JPEG images")
    truth = read_ground_truth(gt if gt is not None else directory / "ground_truth.csv", tolerance)
    truth.validate(len(lists["query"]), len(lists["ref"]))
    return Dataset(directory.name, lists["query"], lists["ref"], truth)


def ingest_external_descriptors(path, expected_count=None):
    """Read a descriptor file; returns ``(list of 1-D arrays, metric)``."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such descriptor file: {path}")
    with path.open() as fh:
        head = fh.readline().split()
        if len(head) != 5 or head[0] != DESC_MAGIC or head[1] != DESC_VERSION:
            raise FormatError(f"{path}: header must be '{DESC_MAGIC} {DESC_VERSION} <count> <dim> <metric>'")
        try:
            count, dim = int(head[2]), int(head[3])
        except ValueError:
            raise FormatError(f"{path}: count and dim must be integers") from None
        metric = head[4]
        if metric not in EXTERNAL_METRICS:
            raise FormatError(f"{path}: unknown metric tag {metric!r}")
        vectors = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                v = np.array([float(x) for x in line.split()])
            except ValueError:
                raise ParseError("non-numeric descriptor value", lineno) from None
            if v.shape[0] != dim:
                raise FormatError(f"{path} line {lineno}: {v.shape[0]} values, header says {dim}")
            vectors.append(v)
    if len(vectors) != count:
        raise FormatError(f"{path}: header declares {count} vectors, file has {len(vectors)}")
    if expected_count is not None and count != expected_count:
        raise AlignmentError(f"{path}: {count} descriptors for {expected_count} images")
    return vectors, metric


def write_external_descriptors(vectors, metric, path):
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    dim = vectors[0].shape[0] if vectors else 0
    with Path(path).open("w") as fh:
        fh.write(f"{DESC_MAGIC} {DESC_VERSION} {len(vectors)} {dim} {metric}\n")
        for v in vectors:
            fh.write(" ".join(repr(float(x)) for x in v) + "\n")


REGIONAL_MAGIC = "vpr-rdesc"


def write_regional_descriptors(sets, path):
    """Serialise CoHOG region sets; each region line is ``x y w h v1 .. vd``."""
    dim = sets[0].matrix.shape[1] if sets else 0
    with Path(path).open("w") as fh:
        fh.write(f"{REGIONAL_MAGIC} {DESC_VERSION} {len(sets)} {dim} regional\n")
        for i, s in enumerate(sets):
            fh.write(f"image {i} {s.count}\n")
            for rect, row in zip(s.rects, s.matrix):
                fh.write(" ".join(str(c) for c in rect.as_list()) + " ")
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_regional_descriptors(path):
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such descriptor file: {path}")
    with path.open() as fh:
        lines = [(n, ln.split()) for n, ln in enumerate(fh, start=1) if ln.strip()]
    if not lines:
        raise FormatError(f"{path} is empty")
    _, head = lines[0]
    if len(head) != 5 or head[0] != REGIONAL_MAGIC or head[1] != DESC_VERSION or head[4] != "regional":
        raise FormatError(f"{path}: header must be '{REGIONAL_MAGIC} {DESC_VERSION} <count> <dim> regional'")
    count, dim = int(head[2]), int(head[3])
    sets, pos = [], 1
    try:
        for i in range(count):
            lineno, tag = lines[pos]
            if tag[0] != "image" or int(tag[1]) != i:
                raise ParseError(f"expected 'image {i} <n>'", lineno)
            n = int(tag[2])
            rows = lines[pos + 1:pos + 1 + n]
            if len(rows) != n:
                raise ParseError(f"image {i} is truncated", lineno)
            rects, mat = [], np.empty((n, dim))
            for j, (ln, tok) in enumerate(rows):
                if len(tok) != 4 + dim:
                    raise ParseError(f"expected {4 + dim} fields, got {len(tok)}", ln)
                rects.append(Rect(*(int(t) for t in tok[:4])))
                mat[j] = [float(t) for t in tok[4:]]
            sets.append(RegionalDescriptorSet(rects, mat))
            pos += 1 + n
    except (IndexError, ValueError) as exc:
        raise FormatError(f"{path}: malformed regional descriptor file ({exc})") from None
    if pos != len(lines):
        raise FormatError(f"{path}: trailing data after {count} images")
    return sets

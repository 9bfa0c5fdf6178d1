"""Manifest-checked loading of the simulator's CSV outputs.

Every figure directory holds data CSVs plus a figureN.manifest.json listing
each file with its sha256 and the hash of the physics configuration that
produced it. Loading verifies all of that before any rendering happens, so a
directory with files swapped in from a different run is rejected instead of
silently mixed.
"""

import csv
import hashlib
import json
import os

import numpy as np

from .errors import ManifestError, SchemaError


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def read_manifest(in_dir, figure):
    path = os.path.join(in_dir, "figure%d.manifest.json" % figure)
    if not os.path.isfile(path):
        raise ManifestError("no manifest for figure %d in %s" % (figure, in_dir))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def verified_paths(in_dir, figure):
    """Paths of the figure's data files, after checksum and hash checks.

    Raises ManifestError when a listed file is absent, its checksum differs
    from the manifest, or a file's embedded config_hash column disagrees with
    the manifest's configuration hash.
    """
    manifest = read_manifest(in_dir, figure)
    config_hash = manifest.get("config_hash", "")
    paths = {}
    for name, entry in sorted(manifest.get("files", {}).items()):
        path = os.path.join(in_dir, name)
        if not os.path.isfile(path):
            raise ManifestError("%s is listed in the figure %d manifest but "
                                "missing" % (name, figure))
        actual = _sha256(path)
        if actual != entry.get("sha256"):
            raise ManifestError(
                "%s does not match its manifest checksum (expected %s, got "
                "%s); refusing to mix outputs" % (name, entry.get("sha256"),
                                                  actual))
        paths[name] = path
    for name, path in paths.items():
        embedded = _embedded_hashes(path)
        if embedded and any(not config_hash.startswith(h) for h in embedded):
            raise ManifestError(
                "%s carries config hash %s but the manifest says %s; inputs "
                "come from different runs" % (name, sorted(embedded)[0],
                                              config_hash[:16]))
    return manifest, paths


def _embedded_hashes(path):
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or "config_hash" not in header:
            return set()
        col = header.index("config_hash")
        return {row[col] for row in reader if len(row) > col}


def read_table(path):
    """Column arrays of a header-row CSV; numeric where possible."""
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    out = {}
    for j, name in enumerate(header):
        values = [row[j] for row in rows]
        try:
            out[name] = np.array([float(v) for v in values])
        except ValueError:
            out[name] = np.array(values)
    return out


def require(table, path, *columns):
    for column in columns:
        if column not in table:
            raise SchemaError(path, column)
    return table


def read_matrix(path):
    """(row coords, column coords, values) of a coordinate-labeled grid CSV."""
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if len(header) < 2 or "\\" not in header[0]:
        raise SchemaError(path, "corner label")
    cols = np.array([float(v) for v in header[1:]])
    coords = np.array([float(row[0]) for row in rows])
    values = np.array([[float(v) for v in row[1:]] for row in rows])
    return coords, cols, values

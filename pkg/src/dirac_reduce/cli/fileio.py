"""Plain-text tables: one header line of column names, then numeric rows.

Every number is written with ``%.16e`` (17 significant digits), so a value
read back is bit-identical to the one written.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigError

FMT = "%.16e"


def write_table(path, names, columns, sep=" "):
    """Write equal-length 1D ``columns`` under the header ``names``."""
    cols = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    if len(cols) != len(names):
        raise ValueError("one name per column")
    n = {len(c) for c in cols}
    if len(n) > 1:
        raise ValueError("columns differ in length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(sep.join(names) + "\n")
        if cols:
            np.savetxt(fh, np.column_stack(cols), fmt=FMT, delimiter=sep)
    return path


def read_table(path, expected=None, sep=None):
    """Read a table written by :func:`write_table` and return ``(names, data)``.

    Malformed content raises :class:`ConfigError` naming the line and field.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not lines:
        raise ConfigError(f"{path}: empty file")
    names = lines[0].split(sep)
    if expected is not None and names != list(expected):
        raise ConfigError(f"{path}:1: header does not match the expected columns "
                          f"({len(names)} names, expected {len(expected)})")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(sep)
        if len(fields) != len(names):
            raise ConfigError(f"{path}:{lineno}: expected {len(names)} fields, found {len(fields)}")
        row = []
        for j, tok in enumerate(fields):
            try:
                val = float(tok)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: field {j + 1} ({names[j]}) is not a number: "
                                  f"{tok!r}") from None
            if not np.isfinite(val):
                raise ConfigError(f"{path}:{lineno}: field {j + 1} ({names[j]}) is not finite")
            row.append(val)
        rows.append(row)
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return names, np.array(rows)


POTENTIAL_COLUMNS = ["x", "y", "t"] + [f"{part}_{i}{j}" for i in range(1, 5) for j in range(1, 5)
                                       for part in ("re", "im")]


def write_potential(path, x, y, t, samples):
    """Samples ``(..., 4, 4)`` at coordinates ``x, y, t`` (same leading shape)."""
    m = np.asarray(samples).reshape(-1, 16)
    cols = [np.ravel(x), np.ravel(y), np.ravel(t)]
    for k in range(16):
        cols += [m[:, k].real, m[:, k].imag]
    return write_table(path, POTENTIAL_COLUMNS, cols)


def read_potential(path, herm_tol=1e-12):
    """Return ``(x, y, t, M)`` with ``M`` of shape ``(P, 4, 4)``; rejects non-Hermitian samples."""
    _, data = read_table(path, POTENTIAL_COLUMNS)
    x, y, t = data[:, 0], data[:, 1], data[:, 2]
    M = (data[:, 3::2] + 1j * data[:, 4::2]).reshape(-1, 4, 4)
    scale = max(1.0, float(np.max(np.abs(M))))
    defect = np.abs(M - np.conj(np.swapaxes(M, 1, 2)))
    if np.max(defect) > herm_tol * scale:
        p, i, j = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise ConfigError(f"{path}: not Hermitian at point {p} (data line {p + 2}), entry "
                          f"({i + 1},{j + 1}): defect {defect[p, i, j]:.3e}")
    return x, y, t, M


def write_spinor(out_dir, stem, grid, spinor):
    """One file per component (coordinates, Re, Im) and one density file."""
    out_dir = Path(out_dir)
    names = [ax.axis for ax in grid.axes]
    mesh = grid.mesh()
    coords = [np.ravel(mesh[n]) for n in names]
    paths = []
    for c in range(spinor.ncomp):
        comp = np.ravel(spinor.components[c])
        paths.append(write_table(out_dir / f"{stem}_c{c + 1}.dat", names + ["re", "im"],
                                 coords + [comp.real, comp.imag]))
    paths.append(write_table(out_dir / f"{stem}_density.dat", names + ["density"],
                             coords + [np.ravel(spinor.density())]))
    return paths

"""CSV/JSON readers and writers for spectra, trajectories, models and results."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .lti import IoSpectrumData, StateSpaceModel, Trajectory
from .spectra import FrequencyGrid, Spectrum

_FMT = "{:.17g}"


def write_spectrum_csv(path, S: Spectrum) -> None:
    header = ["k", "omega"]
    for i in range(S.dim):
        header += [f"re_{i}", f"im_{i}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, (om, row) in enumerate(zip(S.grid.omega, S.values)):
            fields = [str(k), _FMT.format(om)]
            for v in row:
                fields += [_FMT.format(v.real), _FMT.format(v.imag)]
            w.writerow(fields)


def read_spectrum_csv(path) -> Spectrum:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:2] != ["k", "omega"] or (len(header) - 2) % 2 or len(header) < 4:
        raise ValueError(f"{path}: not a spectrum CSV (header {header})")
    table = np.array(body, dtype=float)
    M = table.shape[0]
    if not np.array_equal(table[:, 0], np.arange(M)):
        raise ValueError(f"{path}: grid indices must run 0..{M - 1}")
    grid = FrequencyGrid(M)
    if not np.allclose(table[:, 1], grid.omega, rtol=0, atol=1e-12):
        raise ValueError(f"{path}: omega column is not the equidistant grid with M={M}")
    values = table[:, 2::2] + 1j * table[:, 3::2]
    return Spectrum(grid, values)


def save_io_data(directory, data: IoSpectrumData) -> None:
    """Write ``U.csv``, ``Y.csv`` and, when present, ``X.csv`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(d / "U.csv", data.U)
    write_spectrum_csv(d / "Y.csv", data.Y)
    if data.X is not None:
        write_spectrum_csv(d / "X.csv", data.X)


def load_io_data(directory) -> IoSpectrumData:
    d = Path(directory)
    X = read_spectrum_csv(d / "X.csv") if (d / "X.csv").exists() else None
    return IoSpectrumData(read_spectrum_csv(d / "U.csv"), read_spectrum_csv(d / "Y.csv"), X)


def write_trajectory_csv(path, traj: Trajectory) -> None:
    n_u, n_y = traj.u.shape[1], traj.y.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"u_{i}" for i in range(n_u)] + [f"y_{i}" for i in range(n_y)])
        for uk, yk in zip(traj.u, traj.y):
            w.writerow([_FMT.format(v) for v in np.concatenate([uk, yk])])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    table = np.array(rows[1:], dtype=float).reshape(len(rows) - 1, len(header))
    u_cols = [i for i, h in enumerate(header) if h.startswith("u_")]
    y_cols = [i for i, h in enumerate(header) if h.startswith("y_")]
    if not u_cols or not y_cols or len(u_cols) + len(y_cols) != len(header):
        raise ValueError(f"{path}: expected u_* and y_* columns, got {header}")
    return Trajectory(table[:, u_cols], table[:, y_cols])


def load_model_json(path) -> StateSpaceModel:
    with open(path) as fh:
        obj = json.load(fh)
    try:
        return StateSpaceModel(*(np.array(obj[name], dtype=float) for name in "ABCD"))
    except KeyError as exc:
        raise ValueError(f"{path}: model JSON lacks field {exc}") from exc


def save_model_json(path, model: StateSpaceModel) -> None:
    with open(path, "w") as fh:
        json.dump({name: getattr(model, name).tolist() for name in "ABCD"}, fh, indent=2)


def to_jsonable(obj):
    """Convert dataclasses/numpy values to JSON types; complex numbers become ``[re, im]``."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else str(f)
    return obj

"""Uniformly sampled traces, prefixes, and rolling sample windows.

A trace is a matrix of samples on a fixed time grid 0, dt, 2*dt, ...; each
column is one declared signal variable.  Monitoring works against three
views of that data:

* `SampledTrace` - the complete episode,
* `PrefixView` - the samples observed so far (everything after the prefix
  end is unknown to the online semantics),
* `WindowView` / `TauWindow` - the last k samples, left-padded with the
  first sample while fewer than k have been seen.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyTrace,
    InconsistentTimeGrid,
    TraceFormatError,
)


def _as_sample_matrix(samples) -> np.ndarray:
    m = np.asarray(samples, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("samples must form a non-empty (n, d) matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("samples must be finite")
    return m


@dataclass(frozen=True, eq=False)
class SampledTrace:
    dt: float
    names: tuple[str, ...]
    samples: np.ndarray

    def __post_init__(self):
        if self.dt <= 0 or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        m = _as_sample_matrix(self.samples)
        if m.shape[1] != len(self.names):
            raise ValueError(
                f"{len(self.names)} column names for {m.shape[1]} sample columns"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "samples", m)
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return (len(self) - 1) * self.dt

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, self.names.index(name)]

    def env_at(self, index: int) -> dict[str, float]:
        row = self.samples[index]
        return {name: float(row[j]) for j, name in enumerate(self.names)}

    def prefix(self, end_index: int) -> "PrefixView":
        return PrefixView(self, end_index)

    def window_at(self, index: int, k: int) -> "WindowView":
        """Last k samples ending at `index`, padded on the left with row 0."""
        if not 0 <= index < len(self):
            raise IndexError(f"sample index {index} outside trace of length {len(self)}")
        if k < 1:
            raise ValueError("window length must be at least 1")
        start = index - k + 1
        if start >= 0:
            block = self.samples[start : index + 1]
        else:
            pad = np.repeat(self.samples[:1], -start, axis=0)
            block = np.concatenate([pad, self.samples[: index + 1]], axis=0)
        return WindowView(self.dt, self.names, block, index * self.dt)

    def write_csv(self, path, time_column: bool = False) -> None:
        """Canonical writer: 17 significant digits, one row per sample."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            header = (("time",) if time_column else ()) + self.names
            writer.writerow(header)
            for i, row in enumerate(self.samples):
                cells = [f"{v:.17g}" for v in row]
                if time_column:
                    cells.insert(0, f"{i * self.dt:.17g}")
                writer.writerow(cells)


def load_csv(path, dt: float) -> SampledTrace:
    """Read a trace CSV: a header of variable names, then numeric rows.

    A leading `time` column is allowed and checked against the grid
    0, dt, 2*dt, ... to within 1e-9.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyTrace(f"{path}: no header row") from None
        header = [h.strip() for h in header]
        if not header or any(not h for h in header):
            raise TraceFormatError(f"{path}: malformed header")
        has_time = header[0] == "time"
        names = tuple(header[1:] if has_time else header)
        if not names:
            raise TraceFormatError(f"{path}: no variable columns")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise TraceFormatError(
                    f"{path}:{lineno}: expected {len(header)} cells, found {len(cells)}"
                )
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-numeric cell") from None
            if has_time:
                expected = (lineno - 2) * dt
                if abs(values[0] - expected) > 1e-9:
                    raise InconsistentTimeGrid(
                        f"{path}:{lineno}: time {values[0]} is not {expected}"
                    )
                values = values[1:]
            rows.append(values)
        if not rows:
            raise EmptyTrace(f"{path}: no data rows")
    return SampledTrace(dt, names, np.array(rows, dtype=float))


@dataclass(frozen=True, eq=False)
class PrefixView:
    """The first `end_index + 1` samples of a trace; the rest is unobserved."""

    base: SampledTrace
    end_index: int

    def __post_init__(self):
        if not 0 <= self.end_index < len(self.base):
            raise ValueError(
                f"prefix end {self.end_index} outside trace of length {len(self.base)}"
            )

    @property
    def dt(self) -> float:
        return self.base.dt

    @property
    def names(self) -> tuple[str, ...]:
        return self.base.names

    @property
    def end_time(self) -> float:
        return self.end_index * self.base.dt

    def observed(self, index: int) -> bool:
        return 0 <= index <= self.end_index

    @property
    def samples(self) -> np.ndarray:
        return self.base.samples[: self.end_index + 1]


@dataclass(frozen=True, eq=False)
class WindowView:
    """A block of k consecutive samples whose newest row sits at current_time."""

    dt: float
    names: tuple[str, ...]
    samples: np.ndarray
    current_time: float

    def __post_init__(self):
        m = _as_sample_matrix(self.samples)
        if m.shape[1] != len(self.names):
            raise ValueError("window arity does not match the variable names")
        if self.current_time < 0:
            raise ValueError("current_time must be >= 0")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "samples", m)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def k(self) -> int:
        return self.samples.shape[0]

    @property
    def span(self) -> float:
        return (self.k - 1) * self.dt


@dataclass(eq=False)
class TauWindow:
    """Rolling buffer of the last k raw state vectors.

    The first push replicates its sample across the whole buffer, so a
    freshly started episode reads as "the initial state, k times"; later
    pushes shift left and append.
    """

    k: int
    dim: int
    states: np.ndarray = field(init=False)
    pushes: int = field(init=False, default=0)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("window length must be at least 1")
        if self.dim < 1:
            raise ValueError("state dimension must be at least 1")
        self.states = np.zeros((self.k, self.dim), dtype=float)

    def push(self, state) -> "TauWindow":
        s = np.asarray(state, dtype=float).reshape(-1)
        if s.shape[0] != self.dim:
            raise ValueError(f"state has dimension {s.shape[0]}, buffer expects {self.dim}")
        if not np.all(np.isfinite(s)):
            raise ValueError("state must be finite")
        if self.pushes == 0:
            self.states[:] = s
        else:
            self.states[:-1] = self.states[1:]
            self.states[-1] = s
        self.pushes += 1
        return self

    def flat(self) -> np.ndarray:
        return self.states.reshape(-1).copy()

    def view(self, dt: float, names: tuple[str, ...]) -> WindowView:
        t = max(0, self.pushes - 1) * dt
        return WindowView(dt, names, self.states, t)


def project_original(windows) -> np.ndarray:
    """Map a sequence of windows back to the raw trajectory they encode.

    Each window contributes its newest row; stacking those rows recovers the
    original state sequence.
    """
    rows = []
    for w in windows:
        block = w.states if isinstance(w, TauWindow) else np.asarray(w)
        rows.append(np.asarray(block)[-1])
    return np.array(rows, dtype=float)

"""Background grids that limit conflict checks to nearby points.

Three variants:

* :class:`ReachGrid`: cells of edge ``r_min/sqrt(n)``.  Each cell lists
  every point whose disc reaches it, so a candidate only reads its own cell.
* :class:`BridsonGrid`: cells of edge ``r/sqrt(n)`` holding at most one point
  (constant radius only).
* :class:`TullekenGrid`: cells of edge ``r_max/sqrt(n)`` listing the points
  located inside them; queries scan every cell the query ball touches.

Cells keep their first ``nslot`` indices inline and spill the rest into a
linked list (see :mod:`pdisc._kernels`).
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .geometry import Domain

MAX_CELLS_PER_AXIS = 2**20
MAX_TOTAL_CELLS = 2**26


def default_tile_bits(ndim: int) -> int:
    """Tiles of 8x8 cells in 2-D, 4^n above; keeps a query neighborhood on few pages."""
    return 3 if ndim <= 2 else 2


def default_slots(ndim: int) -> int:
    """Inline slots per list cell; reach lists average ~2.4 entries in 2-D."""
    return 4 if ndim <= 2 else 8


class GridSizeError(ValueError):
    """The requested cell size would need too many cells."""


class _CellGrid:
    nslot = 1

    def __init__(self, domain: Domain, cell_edge: float,
                 max_cells_per_axis: int = MAX_CELLS_PER_AXIS,
                 max_total_cells: int = MAX_TOTAL_CELLS, tile_bits: int | None = None):
        if not cell_edge > 0:
            raise ValueError(f"cell edge must be positive, got {cell_edge}")
        self.domain = domain
        self.ndim = domain.ndim
        self.cell_edge = float(cell_edge)
        shape = [math.ceil(e / self.cell_edge) for e in domain.extent]
        if max(shape) > max_cells_per_axis:
            raise GridSizeError(
                f"{max(shape)} cells on one axis exceeds the cap of {max_cells_per_axis}; "
                "the radius bound is too small for this domain")
        total = math.prod(shape)
        if total > max_total_cells:
            raise GridSizeError(f"{total} cells exceeds the cap of {max_total_cells}")
        self.shape = np.array(shape, dtype=np.int64)
        self.lo = domain.lo_array
        self.tbits = default_tile_bits(self.ndim) if tile_bits is None else int(tile_bits)
        stored = K.storage_size(shape, self.tbits)
        self.slots = np.full(stored * self.nslot, -1, dtype=np.int32)
        self.head = np.full(stored, -1, dtype=np.int32)
        self.epoint = np.empty(0, dtype=np.int32)
        self.enext = np.empty(0, dtype=np.int32)
        self.n_entries = 0
        self.n_spilled = 0

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    def _check(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.shape != (self.ndim,):
            raise ValueError(f"point has shape {p.shape}, grid is {self.ndim}-D")
        if not (np.all(self.domain.lo_array <= p) and np.all(p < self.domain.hi_array)):
            raise ValueError(f"point {p} is outside the grid domain")
        return p

    def cell_of(self, p) -> tuple[int, ...]:
        p = self._check(p)
        out = np.empty(self.ndim, np.int64)
        K.cell_coords(p, self.lo, self.cell_edge, self.shape, out)
        return tuple(int(v) for v in out)

    def flat(self, cell) -> int:
        """Storage index of a cell given by per-axis coordinates."""
        c = np.asarray(cell, dtype=np.int64)
        if c.shape != (self.ndim,) or np.any(c < 0) or np.any(c >= self.shape):
            raise ValueError(f"cell {tuple(cell)} is outside grid shape {tuple(self.shape)}")
        return int(K.flat_index(c, self.shape, self.tbits))

    def cells_touching(self, p, r: float) -> np.ndarray:
        """Flat indices of cells whose closed box meets the closed ball B(p, r)."""
        p = self._check(p)
        return K.cells_touching(p, float(r), self.lo, self.cell_edge, self.shape, self.tbits)

    def cell_list(self, cell) -> np.ndarray:
        return K.list_cell(self.flat(cell), self.slots, self.nslot, self.head, self.epoint,
                           self.enext)

    def _push(self, cells: np.ndarray, index: int):
        cells = np.asarray(cells, dtype=np.int64)
        need = self.n_spilled + cells.size
        if need > self.epoint.size:
            self.epoint = K.grown(self.epoint, need)
            self.enext = K.grown(self.enext, need)
        self.n_spilled = int(K.push_cells(cells, cells.size, index, self.slots, self.nslot,
                                          self.head, self.epoint, self.enext, self.n_spilled))
        self.n_entries += cells.size

    @staticmethod
    def _check_index(index: int):
        if not 0 <= index <= K.INDEX_LIMIT:
            raise OverflowError("point index does not fit a 32-bit cell list")


class ReachGrid(_CellGrid):
    def __init__(self, domain: Domain, r_min: float, **caps):
        if not r_min > 0:
            raise ValueError(f"r_min must be positive, got {r_min}")
        self.r_min = float(r_min)
        self.nslot = default_slots(domain.ndim)
        super().__init__(domain, r_min / math.sqrt(domain.ndim), **caps)

    def register(self, index: int, p, r_p: float):
        """Add ``index`` to every cell that B(p, r_p) touches."""
        p = self._check(p)
        if not r_p > 0:
            raise ValueError(f"reach radius must be positive, got {r_p}")
        self._check_index(index)
        cells = self.cells_touching(p, r_p)
        self._push(cells, index)

    def candidates(self, p) -> np.ndarray:
        """Indices listed in the cell containing ``p``; no neighborhood scan."""
        return self.cell_list(self.cell_of(p))


class BridsonGrid(_CellGrid):
    def __init__(self, domain: Domain, r: float, **caps):
        if not r > 0:
            raise ValueError(f"r must be positive, got {r}")
        self.r = float(r)
        super().__init__(domain, r / math.sqrt(domain.ndim), **caps)

    def insert(self, index: int, p):
        self._check_index(index)
        c = self.flat(self.cell_of(p))
        if self.slots[c] >= 0:
            raise ValueError(f"cell already holds point {self.slots[c]}")
        self.slots[c] = index
        self.n_entries += 1

    def neighbors(self, p, r: float) -> np.ndarray:
        cells = self.cells_touching(p, r)
        held = self.slots[cells]
        return np.sort(held[held >= 0]).astype(np.int64)


class TullekenGrid(_CellGrid):
    def __init__(self, domain: Domain, r_max: float, nslot: int | None = None, **caps):
        if not r_max > 0:
            raise ValueError(f"r_max must be positive, got {r_max}")
        self.r_max = float(r_max)
        self.nslot = default_slots(domain.ndim) if nslot is None else int(nslot)
        super().__init__(domain, r_max / math.sqrt(domain.ndim), **caps)

    def insert(self, index: int, p):
        p = self._check(p)
        self._check_index(index)
        self._push(np.array([self.flat(self.cell_of(p))]), index)

    def neighbors(self, p, r_query: float) -> np.ndarray:
        lists = [K.list_cell(c, self.slots, self.nslot, self.head, self.epoint, self.enext)
                 for c in self.cells_touching(p, r_query)]
        if not lists:
            return np.empty(0, np.int64)
        return np.sort(np.concatenate(lists))


def build_reach_grid(domain: Domain, r_min: float, **caps) -> ReachGrid:
    return ReachGrid(domain, r_min, **caps)


def cell_of(grid: _CellGrid, p) -> tuple[int, ...]:
    return grid.cell_of(p)


def register_reach(grid: ReachGrid, index: int, p, r_p: float):
    grid.register(index, p, r_p)


def conflict_candidates(grid: ReachGrid, p) -> np.ndarray:
    return grid.candidates(p)


def bridson_neighbors(grid: BridsonGrid, p, r: float) -> np.ndarray:
    return grid.neighbors(p, r)


def tulleken_neighbors(grid: TullekenGrid, p, r_query: float) -> np.ndarray:
    return grid.neighbors(p, r_query)

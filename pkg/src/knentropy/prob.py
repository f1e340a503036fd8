"""Finite-alphabet probability objects: distributions, channels, joints, Markov triples.

All objects are immutable after construction and safe to share across
threads. Random generation always takes an explicit seed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

SIMPLEX_TOL = 1e-12


class SimplexError(ValueError):
    """Raised when a vector or matrix fails the probability-simplex checks."""


def _as_simplex(values, what="distribution") -> np.ndarray:
    p = np.asarray(values, dtype=float).reshape(-1)
    if p.size == 0:
        raise SimplexError(f"{what} must be non-empty")
    if not np.all(np.isfinite(p)):
        raise SimplexError(f"{what} has non-finite entries")
    if np.any(p < -SIMPLEX_TOL):
        raise SimplexError(f"{what} has a negative entry: min={p.min()}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise SimplexError(f"{what} sums to {total!r}, not 1 (tol {SIMPLEX_TOL})")
    p = p / total  # exact renormalization on ingest
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_simplex(self.probs))

    @classmethod
    def uniform(cls, n: int) -> "Dist":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, i: int, n: int) -> "Dist":
        p = np.zeros(n)
        p[i] = 1.0
        return cls(p)

    @classmethod
    def from_weights(cls, weights) -> "Dist":
        """Normalize arbitrary non-negative weights into a Dist."""
        w = np.asarray(weights, dtype=float).reshape(-1)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise SimplexError("weights must be finite and non-negative")
        total = w.sum()
        if total <= 0:
            raise SimplexError("weights sum to zero")
        return cls(w / total)

    @property
    def n(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, i) -> float:
        return float(self.probs[i])

    def __repr__(self) -> str:
        return f"Dist({np.array2string(self.probs, separator=', ')})"


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix: row x is the distribution of Y given X=x."""

    rows: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.rows, dtype=float)
        if m.ndim != 2:
            raise SimplexError("channel must be a 2-d matrix")
        m = np.vstack([_as_simplex(m[i], f"channel row {i}") for i in range(m.shape[0])])
        m.setflags(write=False)
        object.__setattr__(self, "rows", m)

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(np.eye(n))

    @property
    def n_in(self) -> int:
        return self.rows.shape[0]

    @property
    def n_out(self) -> int:
        return self.rows.shape[1]

    def compose(self, other: "Channel") -> "Channel":
        """Chain this channel with a second one: X -> Y -> Z gives X -> Z."""
        if self.n_out != other.n_in:
            raise SimplexError(
                f"cannot compose {self.n_out}-output channel with {other.n_in}-input channel"
            )
        return Channel(self.rows @ other.rows)

    def __repr__(self) -> str:
        return f"Channel({self.n_in}x{self.n_out})"


@dataclass(frozen=True, eq=False)
class Joint:
    """Joint distribution p(x, y) = prior(x) * channel(y|x) with cached marginal and posteriors.

    Outputs y with zero marginal mass are excluded from the posterior family;
    `support` lists the y indices that remain.
    """

    prior: Dist
    channel: Channel

    def __post_init__(self):
        if self.prior.n != self.channel.n_in:
            raise SimplexError(
                f"prior has {self.prior.n} states but channel expects {self.channel.n_in}"
            )
        matrix = self.prior.probs[:, None] * self.channel.rows
        marginal = Dist(matrix.sum(axis=0))
        support = marginal.support
        posteriors = matrix[:, support] / marginal.probs[support]
        matrix.setflags(write=False)
        posteriors.setflags(write=False)
        object.__setattr__(self, "_matrix", matrix)
        object.__setattr__(self, "_marginal", marginal)
        object.__setattr__(self, "_support", support)
        object.__setattr__(self, "_posteriors", posteriors)

    @property
    def matrix(self) -> np.ndarray:
        """The |X| x |Y| joint probability table."""
        return self._matrix

    @property
    def marginal(self) -> Dist:
        """Marginal distribution of Y."""
        return self._marginal

    @property
    def support(self) -> np.ndarray:
        """Indices y with p_Y(y) > 0, in increasing order."""
        return self._support

    @property
    def posterior_matrix(self) -> np.ndarray:
        """|X| x k matrix whose column j is the posterior given support[j]."""
        return self._posteriors

    def posterior(self, y: int) -> Dist:
        """Posterior of X given Y=y; raises for null-support y."""
        idx = np.flatnonzero(self._support == y)
        if idx.size == 0:
            raise SimplexError(f"output {y} has zero marginal mass")
        return Dist(self._posteriors[:, idx[0]])

    @property
    def n_x(self) -> int:
        return self.prior.n

    @property
    def n_y(self) -> int:
        return self.channel.n_out

    def __repr__(self) -> str:
        return f"Joint({self.n_x}x{self.n_y}, |support|={self._support.size})"


def make_joint(prior: Dist, channel: Channel) -> Joint:
    """Build a Joint from a prior over X and a channel X -> Y."""
    return Joint(prior, channel)


@dataclass(frozen=True, eq=False)
class MarkovTriple:
    """Markov chain X - Y - Z given by a prior and two chained channels."""

    prior: Dist
    ch_xy: Channel
    ch_yz: Channel

    def __post_init__(self):
        if self.prior.n != self.ch_xy.n_in:
            raise SimplexError("prior/channel dimension mismatch on X")
        if self.ch_xy.n_out != self.ch_yz.n_in:
            raise SimplexError("channel dimension mismatch on Y")

    def __repr__(self) -> str:
        return (
            f"MarkovTriple({self.prior.n}-{self.ch_xy.n_out}-{self.ch_yz.n_out})"
        )


def compose_markov(t: MarkovTriple) -> tuple[Joint, Joint]:
    """Return the (X,Y) and (X,Z) joints induced by a Markov triple.

    The X->Z channel is the row-stochastic product of the two stages, so Z
    depends on X only through Y.
    """
    xy = make_joint(t.prior, t.ch_xy)
    xz = make_joint(t.prior, t.ch_xy.compose(t.ch_yz))
    return xy, xz


# ---------------------------------------------------------------------------
# seeded random instances

def random_dist(rng: np.random.Generator, n: int, sparse: bool = False) -> Dist:
    """Flat-Dirichlet sample over the n-simplex; sparse mode zeroes a random subset."""
    p = rng.dirichlet(np.ones(n))
    if sparse and n > 1:
        n_zero = int(rng.integers(0, n))  # keep at least one positive entry
        if n_zero > 0:
            idx = rng.choice(n, size=n_zero, replace=False)
            p[idx] = 0.0
    return Dist.from_weights(p)


def random_channel(rng: np.random.Generator, n_in: int, n_out: int, sparse: bool = False) -> Channel:
    rows = [random_dist(rng, n_out, sparse=sparse).probs for _ in range(n_in)]
    return Channel(np.vstack(rows))


def random_joint(rng: np.random.Generator, n_x: int, n_y: int, sparse: bool = False) -> Joint:
    return make_joint(random_dist(rng, n_x, sparse=sparse), random_channel(rng, n_x, n_y, sparse=sparse))


def random_markov(rng: np.random.Generator, n_x: int, n_y: int, n_z: int, sparse: bool = False) -> MarkovTriple:
    return MarkovTriple(
        random_dist(rng, n_x, sparse=sparse),
        random_channel(rng, n_x, n_y, sparse=sparse),
        random_channel(rng, n_y, n_z, sparse=sparse),
    )


def random_instance(seed, dims, kind: str, sparse: bool = False):
    """Deterministic random instance of the requested kind.

    dims: an int for 'dist', (n_x, n_y) for 'channel'/'joint',
    (n_x, n_y, n_z) for 'markov'.
    """
    rng = np.random.default_rng(seed)
    if kind == "dist":
        n = dims if isinstance(dims, int) else dims[0]
        return random_dist(rng, n, sparse=sparse)
    if kind == "channel":
        return random_channel(rng, dims[0], dims[1], sparse=sparse)
    if kind == "joint":
        return random_joint(rng, dims[0], dims[1], sparse=sparse)
    if kind == "markov":
        return random_markov(rng, dims[0], dims[1], dims[2], sparse=sparse)
    raise ValueError(f"unknown instance kind {kind!r}")


# ---------------------------------------------------------------------------
# CSV ingestion

def _read_csv_rows(text: str) -> list[list[float]]:
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        cells = [c.strip() for c in rec if c.strip() != ""]
        if not cells or cells[0].startswith("#"):
            continue
        rows.append([float(c) for c in cells])
    return rows


def parse_dist(text: str) -> Dist:
    """Parse one comma-separated row of decimals into a Dist."""
    rows = _read_csv_rows(text)
    if len(rows) != 1:
        raise SimplexError(f"expected a single row of decimals, got {len(rows)} rows")
    return Dist(np.array(rows[0]))


def load_dist(path) -> Dist:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dist(fh.read())


def parse_channel(text: str) -> Channel:
    rows = _read_csv_rows(text)
    if not rows:
        raise SimplexError("empty channel file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SimplexError(f"ragged channel rows, widths {sorted(widths)}")
    return Channel(np.array(rows))


def load_channel(path) -> Channel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_channel(fh.read())


def load_joint(path, prior: Dist | None = None, prior_first_column: bool = False) -> Joint:
    """Load a joint from a channel CSV (row i = p(y|x_i)).

    The prior comes either from `prior` or, with prior_first_column=True,
    from the first CSV column.
    """
    with open(path, "r", encoding="utf-8") as fh:
        rows = _read_csv_rows(fh.read())
    if not rows:
        raise SimplexError("empty joint file")
    m = np.array(rows)
    if prior_first_column:
        if prior is not None:
            raise SimplexError("prior given both inline and as first column")
        prior = Dist(m[:, 0])
        m = m[:, 1:]
    if prior is None:
        raise SimplexError("joint ingestion needs a prior (inline or first column)")
    return make_joint(prior, Channel(m))

"""Random sampling of unitary matrices and bistochastic vectors.

Three families of measures:

* Haar on U(3), realized by Gram-Schmidt on complex Gaussian matrices with
  the positive-diagonal normalization that makes the factorization unique.
* The one-parameter family mu_k (k > 1/2) on the unistochastic set.  In the
  product coordinates b2 = s(1-b1), b3 = t(1-b1),
  b4 = (1-s)(1-t) + b1 s t + 2 r sqrt(b1 s t (1-s)(1-t)) the measure
  factorizes: b1 ~ Beta(k, 2k), s and t ~ Beta(k, k) independently, and
  (1+r)/2 ~ Beta(k-1/2, k-1/2).  k = 1 is the Haar pushforward; k = 3/2 is
  the flat (Lebesgue) measure on the unistochastic set.
* The flat measure on the whole bistochastic polytope, by rejection from
  the unit box in b (acceptance rate 1/8).

Streams are Philox counter-based generators addressed by (seed, index), so
any stream can be split into child streams deterministically and without
consuming state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import feasible_b_mask

__all__ = [
    "DEFAULT_SEED",
    "MeasureSpec",
    "RngStream",
    "split_stream",
    "sample_haar_unitary",
    "sample_mu_k",
    "sample_flat_b3",
    "sample_b",
]

#: default root seed used by the command line tools
DEFAULT_SEED = 75193

_SPLIT_BASE = 2**32


@dataclass(frozen=True)
class MeasureSpec:
    """One of the supported measures: Haar on U(3), mu_k, or flat on the polytope."""

    kind: str
    k: Optional[float] = None

    _KINDS = ("haar", "mu", "flat")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}; pick from {self._KINDS}")
        if self.kind == "mu":
            if self.k is None or not self.k > 0.5:
                raise ValueError(
                    f"mu_k needs k > 0.5 (the r factor is Beta(k-1/2, k-1/2)); got k = {self.k}"
                )
            object.__setattr__(self, "k", float(self.k))
        elif self.k is not None:
            raise ValueError(f"measure {self.kind!r} takes no k parameter")

    @classmethod
    def haar(cls) -> "MeasureSpec":
        return cls("haar")

    @classmethod
    def mu(cls, k: float) -> "MeasureSpec":
        return cls("mu", k)

    @classmethod
    def flat_b3(cls) -> "MeasureSpec":
        return cls("flat")

    @property
    def label(self) -> str:
        if self.kind == "mu":
            return f"mu_{self.k:g}"
        return {"haar": "haar", "flat": "flat_b3"}[self.kind]


HAAR = MeasureSpec.haar()
FLAT_B3 = MeasureSpec.flat_b3()


@dataclass(frozen=True, eq=False)
class RngStream:
    """A deterministic random stream addressed by (seed, index).

    seed = 0 asks for fresh OS entropy; the drawn value is recorded in the
    seed field so the stream and all of its children stay reproducible
    within the run.  The generator is created lazily and is stateful: treat
    each stream as a single consumable sequence and use split_stream for
    independent work.
    """

    seed: int
    index: int = 0
    _gen: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self) -> None:
        seed = int(self.seed)
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        if seed == 0:
            entropy = np.random.SeedSequence().entropy
            seed = int(entropy) % (2**63 - 1) + 1
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "index", int(self.index))

    @property
    def generator(self) -> np.random.Generator:
        if not self._gen:
            seq = np.random.SeedSequence([self.seed, self.index])
            self._gen.append(np.random.Generator(np.random.Philox(seq)))
        return self._gen[0]

    def split(self, n: int) -> tuple["RngStream", ...]:
        """n child streams; pure, does not touch this stream's generator."""
        base = self.index * _SPLIT_BASE
        return tuple(RngStream(self.seed, base + i + 1) for i in range(n))


def split_stream(stream: RngStream, n: int) -> tuple[RngStream, ...]:
    return stream.split(n)


def _as_generator(stream) -> np.random.Generator:
    if isinstance(stream, RngStream):
        return stream.generator
    if isinstance(stream, np.random.Generator):
        return stream
    raise TypeError(f"expected RngStream or numpy Generator, got {type(stream).__name__}")


def sample_haar_unitary(stream, n: int) -> np.ndarray:
    """n Haar-distributed unitaries, shape (n, 3, 3) complex.

    Gram-Schmidt on a complex Ginibre matrix; normalizing each pivot to a
    positive real number picks the unique QR representative, which is what
    makes the output exactly Haar.
    """
    g = _as_generator(stream)
    z = g.standard_normal((n, 3, 3)) + 1j * g.standard_normal((n, 3, 3))
    q = np.empty_like(z)
    for j in range(3):
        v = z[:, :, j].copy()
        for _ in range(2):  # reorthogonalize once: kills ill-conditioned draws
            for i in range(j):
                proj = np.sum(q[:, :, i].conj() * v, axis=1, keepdims=True)
                v -= proj * q[:, :, i]
        q[:, :, j] = v / np.linalg.norm(v, axis=1, keepdims=True)
    return q


def sample_mu_k(stream, n: int, k: float) -> np.ndarray:
    """n draws of b = (b1, b2, b3, b4) from mu_k, shape (n, 4).

    Requires k > 1/2.  k = 1 reproduces the Haar pushforward, k = 3/2 the
    flat measure on the unistochastic set.
    """
    k = float(k)
    if not k > 0.5:
        raise ValueError(f"mu_k needs k > 0.5, got k = {k}")
    g = _as_generator(stream)
    b1 = g.beta(k, 2.0 * k, size=n)
    s = g.beta(k, k, size=n)
    t = g.beta(k, k, size=n)
    r = 2.0 * g.beta(k - 0.5, k - 0.5, size=n) - 1.0
    b2 = s * (1.0 - b1)
    b3 = t * (1.0 - b1)
    b4 = (1.0 - s) * (1.0 - t) + b1 * s * t + 2.0 * r * np.sqrt(
        b1 * s * t * (1.0 - s) * (1.0 - t)
    )
    return np.stack([b1, b2, b3, np.clip(b4, 0.0, 1.0)], axis=1)


_REJECTION_BLOCK = 65536


def sample_flat_b3(stream, n: int) -> np.ndarray:
    """n draws from the flat measure on the polytope, shape (n, 4).

    Rejection from the unit box.  Candidates consume the stream in order,
    so the first n accepted points do not depend on how many were requested
    or on how the candidate blocks are sized (the box acceptance rate is
    1/8; blocks are sized for the remaining need, capped for memory).
    """
    g = _as_generator(stream)
    chunks = []
    have = 0
    while have < n:
        block = min(_REJECTION_BLOCK, max(512, 9 * (n - have)))
        cand = g.random((block, 4))
        keep = cand[feasible_b_mask(cand)]
        chunks.append(keep)
        have += len(keep)
    return np.concatenate(chunks)[:n]


def sample_b(spec: MeasureSpec, stream, n: int) -> np.ndarray:
    """Draw n b-vectors from the given measure (Haar draws push forward)."""
    if spec.kind == "haar":
        u = sample_haar_unitary(stream, n)
        m = np.abs(u) ** 2
        return m[:, :2, :2].reshape(n, 4).copy()
    if spec.kind == "mu":
        return sample_mu_k(stream, n, spec.k)
    return sample_flat_b3(stream, n)

"""Delta-chains, their perturbation sequences and validation records."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from .errors import ScalarModeError
from .linear_op import LinearOp
from .norms import NormSpec, norm_spec_from_json, norm_spec_to_json
from .recipe import ChainRecipe
from .scalars import Real, scalar_from_json, scalar_to_json
from .seq_vector import SeqVector


@dataclass(frozen=True, eq=False)
class DeltaChain:
    """Finite sequence ``f_0, ..., f_m`` (``m >= 1``) for an operator and tolerance.

    The chain is a delta-chain when every link error ``||f_l - T f_{l-1}||`` is
    strictly below ``delta``; construction does not check this, validation does.
    """

    vectors: tuple[SeqVector, ...]
    delta: Real
    op: LinearOp
    norm: NormSpec
    recipe: ChainRecipe | None = None
    junction_tolerance: Real | None = None

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if len(self.vectors) < 2:
            raise ValueError("A chain needs at least two vectors (length m >= 1)")
        if not self.delta > 0:
            raise ValueError(f"Chain tolerance must be positive, got {self.delta}")
        for f in self.vectors:
            if f.mode is not self.op.mode:
                raise ScalarModeError(
                    f"Chain vector in {f.mode.value} mode for a {self.op.mode.value} operator"
                )

    @property
    def length(self) -> int:
        return len(self.vectors) - 1

    @property
    def start(self) -> SeqVector:
        return self.vectors[0]

    @property
    def end(self) -> SeqVector:
        return self.vectors[-1]

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "length": self.length,
            "delta": scalar_to_json(self.delta),
            "operator": self.op.family.value,
            "norm": norm_spec_to_json(self.norm),
            "vectors": [f.to_json() for f in self.vectors],
            "recipe": self.recipe.to_json() if self.recipe else None,
        }
        if self.junction_tolerance is not None:
            doc["junction_tolerance"] = scalar_to_json(self.junction_tolerance)
        return doc


def chain_from_json(doc: Mapping[str, Any], op: LinearOp) -> DeltaChain:
    """Rebuild a chain for ``op`` from :meth:`DeltaChain.to_json` output.

    The recipe is informational and is not restored.
    """
    if doc.get("operator") not in (None, op.family.value):
        raise ValueError(f"Chain was built for {doc['operator']}, not {op.family.value}")
    tolerance = doc.get("junction_tolerance")
    return DeltaChain(
        vectors=tuple(SeqVector.from_json(v, op.mode) for v in doc["vectors"]),
        delta=scalar_from_json(doc["delta"], op.mode),
        op=op,
        norm=norm_spec_from_json(doc["norm"]),
        junction_tolerance=scalar_from_json(tolerance, op.mode) if tolerance is not None else None,
    )


@dataclass(frozen=True)
class PerturbationSeq:
    """``g_1, ..., g_m`` with ``g_l = f_l - T f_{l-1}``."""

    g: tuple[SeqVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))

    def __len__(self) -> int:
        return len(self.g)

    def nonzero_links(self) -> list[int]:
        """1-based indices ``l`` with ``g_l != 0``."""
        return [i for i, g in enumerate(self.g, start=1) if not g.is_zero()]


@dataclass(frozen=True)
class ChainValidation:
    """Outcome of checking a chain against its tolerance.

    Attributes:
        defect: ``max_l ||f_l - T f_{l-1}||``
        margin: ``delta - defect``
        valid: ``defect < delta`` (strict)
        link_defects: Every link error in order
    """

    defect: Real
    margin: Real
    valid: bool
    link_defects: tuple[Real, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "defect": scalar_to_json(self.defect),
            "margin": scalar_to_json(self.margin),
            "valid": self.valid,
            "link_defects": [scalar_to_json(d) for d in self.link_defects],
        }


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a randomized search for a chain returning to a vector.

    Attributes:
        found: Whether some sampled chain closed with a final link below ``delta``
        delta: Tolerance the chains had to respect
        perturbation_radius: Norm bound of the sampled perturbations
        trials: Chains sampled per length
        max_length: Longest chain sampled
        seed: Seed of the generator
        closest_ratio: Smallest ``||f - T f_(m-1)|| / delta`` observed
        closest_length: Chain length at which it was observed
        notes: How the perturbations were restricted to the window
    """

    found: bool
    delta: float
    perturbation_radius: float
    trials: int
    max_length: int
    seed: int
    closest_ratio: float
    closest_length: int
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "found": self.found,
            "delta": self.delta,
            "perturbation_radius": self.perturbation_radius,
            "trials": self.trials,
            "max_length": self.max_length,
            "seed": self.seed,
            "closest_ratio": self.closest_ratio,
            "closest_length": self.closest_length,
            "notes": list(self.notes),
        }

"""Sampling ensembles over the error-series Paulis and all drawing modes.

Modes:
  standard  -- one rotation total: draw a series power, then a Pauli.
  greedy    -- one independent rotation per nonzero power.
  qds       -- draw a power, then a qubit-disjoint set; emit the whole set.
  greedy+qds-- per-power set draws with per-power time weights.
  symmetric -- like standard but restricted to the nonzero-power set and
               flagged for mid-formula placement.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, PauliSum
from .series import ErrorSeries

MODES = ("standard", "greedy", "qds", "greedy+qds", "symmetric")


class EmptySeries(ValueError):
    """Every Omega_j vanishes; the correction is exactly identity."""


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class PowerEntry:
    """Pauli data of one series power: strings, signed coefficients, CDFs."""

    power: int
    strings: tuple[PauliString, ...]
    alphas: np.ndarray          # signed real coefficients, same order
    lam: float                  # sum |alpha|
    cdf: np.ndarray             # cumulative p_{r|j}
    sets: tuple[tuple[int, ...], ...] = ()   # qds: index groups into strings
    set_cdf: np.ndarray = field(default_factory=lambda: np.zeros(0))
    set_lams: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class SamplerEnsemble:
    k: int
    mode: str
    n_qubits: int
    entries: dict[int, PowerEntry]   # keyed by absolute power j
    weight_powers: tuple[int, ...]   # powers entering the time-weight sum
    nonzero_powers: tuple[int, ...]

    def time_weight(self, j: int, t: float) -> float:
        """w_j(t) = t^{j+1}/(j+1), the integral of t^j from 0."""
        return t ** (j + 1) / (j + 1)

    def total_weight(self, t: float) -> float:
        """W(t) = sum of time weights over the participating powers."""
        return sum(self.time_weight(j, t) for j in self.weight_powers)

    def power_probabilities(self, t: float) -> np.ndarray:
        w = np.array([self.time_weight(j, t) for j in self.weight_powers])
        return w / w.sum()

    def lambda_tilde(self) -> float:
        return max((e.lam for e in self.entries.values()), default=0.0)


@dataclass(frozen=True)
class SampledCorrection:
    """Rotations e^{i angle P} to append (or insert mid-formula)."""

    rotations: tuple[tuple[PauliString, float], ...]
    provenance: tuple
    mid_circuit: bool = False


def qds_partition(terms: list[tuple[PauliString, float]]) -> list[list[PauliString]]:
    """Greedy first-fit grouping of terms into qubit-disjoint sets.

    Deterministic: terms sorted by descending |weight| then label; each term
    joins the first set whose members do not touch its qubits.
    """
    ordered = sorted(terms, key=lambda sc: (-abs(sc[1]), sc[0].label()))
    sets: list[list[PauliString]] = []
    masks: list[int] = []
    for s, _ in ordered:
        sup = s.qubit_support()
        for i, mask in enumerate(masks):
            if mask & sup == 0:
                sets[i].append(s)
                masks[i] |= sup
                break
        else:
            sets.append([s])
            masks.append(sup)
    return sets


def _entry(j: int, pairs: list[tuple[PauliString, float]],
           qds_sets: list[list[PauliString]] | None) -> PowerEntry:
    strings = tuple(s for s, _ in pairs)
    alphas = np.array([a for _, a in pairs], dtype=float)
    lam = float(np.abs(alphas).sum())
    cdf = np.cumsum(np.abs(alphas)) / lam if lam > 0 else np.zeros(len(pairs))
    sets: tuple[tuple[int, ...], ...] = ()
    set_cdf = np.zeros(0)
    set_lams = np.zeros(0)
    if qds_sets is not None and lam > 0:
        index = {s: i for i, s in enumerate(strings)}
        groups = [tuple(index[s] for s in grp if s in index) for grp in qds_sets]
        groups = [g for g in groups if g]
        covered = set(i for g in groups for i in g)
        groups += [(i,) for i in range(len(strings)) if i not in covered]
        sets = tuple(groups)
        set_lams = np.array([np.abs(alphas[list(g)]).sum() for g in groups])
        set_cdf = np.cumsum(set_lams) / lam
    return PowerEntry(j, strings, alphas, lam, cdf, sets, set_cdf, set_lams)


def build_ensemble(
    e: ErrorSeries, mode: str, qds_sets: list[list[PauliString]] | None = None
) -> SamplerEnsemble:
    """Precompute all distributions for a certified error series.

    Powers with zero one-norm keep their time weight (identity-only draws)
    except in symmetric mode, where only the nonzero-power set participates.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}; choose from {MODES}")
    nonzero = tuple(e.nonzero_powers())
    if not nonzero:
        raise EmptySeries("all series powers vanish; bare formula is exact")
    wants_sets = mode in ("qds", "greedy+qds")
    entries: dict[int, PowerEntry] = {}
    for j in e.powers():
        pairs = e.alpha(j)
        sets_j = None
        if wants_sets and pairs:
            sets_j = qds_sets if qds_sets is not None else qds_partition(pairs)
        entries[j] = _entry(j, pairs, sets_j)
    weight_powers = nonzero if mode == "symmetric" else tuple(e.powers())
    return SamplerEnsemble(
        k=e.k, mode=mode, n_qubits=e.n_qubits,
        entries=entries, weight_powers=weight_powers, nonzero_powers=nonzero,
    )


def _check_t(t: float) -> None:
    if t <= 0:
        raise ValueError("t must be positive")
    if t > 1:
        warnings.warn("t > 1: the error-scaling analysis assumes t <= 1", stacklevel=3)


def _draw(cdf: np.ndarray, u: float) -> int:
    # ties broken toward the lower index for deterministic replay
    return int(np.searchsorted(cdf, u, side="right"))


def _draw_power(ens: SamplerEnsemble, t: float, u: float) -> int:
    w = np.cumsum([ens.time_weight(j, t) for j in ens.weight_powers])
    idx = int(np.searchsorted(w / w[-1], u, side="right"))
    return ens.weight_powers[min(idx, len(ens.weight_powers) - 1)]


def sample_standard(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """One rotation with angle sign(alpha) * W(t) * lambda_j."""
    _check_t(t)
    j = _draw_power(ens, t, rng.next_uniform())
    entry = ens.entries[j]
    if entry.lam == 0.0:
        return SampledCorrection((), (("power", j), ("identity", True)))
    r = _draw(entry.cdf, rng.next_uniform())
    theta = math.copysign(1.0, entry.alphas[r]) * ens.total_weight(t) * entry.lam
    return SampledCorrection(((entry.strings[r], theta),), (("power", j), ("term", r)))


def sample_greedy(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """One independent rotation per nonzero power, ascending power order."""
    _check_t(t)
    rotations = []
    prov = []
    for j in ens.nonzero_powers:
        entry = ens.entries[j]
        r = _draw(entry.cdf, rng.next_uniform())
        theta = math.copysign(1.0, entry.alphas[r]) * ens.time_weight(j, t) * entry.lam
        rotations.append((entry.strings[r], theta))
        prov.append(("power", j, "term", r))
    return SampledCorrection(tuple(rotations), tuple(prov))


def sample_qds(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """Draw a power, then a qubit-disjoint set; emit all its rotations."""
    _check_t(t)
    if ens.mode not in ("qds", "greedy+qds"):
        raise ConfigurationError("ensemble was not built with qubit-disjoint sets")
    j = _draw_power(ens, t, rng.next_uniform())
    entry = ens.entries[j]
    if entry.lam == 0.0:
        return SampledCorrection((), (("power", j), ("identity", True)))
    si = _draw(entry.set_cdf, rng.next_uniform())
    rotations = _set_rotations(entry, si, ens.total_weight(t))
    return SampledCorrection(tuple(rotations), (("power", j), ("set", si)))


def sample_greedy_qds(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """Independent set draw per nonzero power with greedy time weights."""
    _check_t(t)
    if ens.mode not in ("qds", "greedy+qds"):
        raise ConfigurationError("ensemble was not built with qubit-disjoint sets")
    rotations = []
    prov = []
    for j in ens.nonzero_powers:
        entry = ens.entries[j]
        si = _draw(entry.set_cdf, rng.next_uniform())
        rotations.extend(_set_rotations(entry, si, ens.time_weight(j, t)))
        prov.append(("power", j, "set", si))
    return SampledCorrection(tuple(rotations), tuple(prov))


def _set_rotations(entry: PowerEntry, set_index: int, weight: float):
    """Rescaled angles for every term of a drawn set.

    angle_r = alpha_r * lambda_j / (set one-norm) * time-weight.
    """
    group = entry.sets[set_index]
    set_lam = entry.set_lams[set_index]
    return [
        (entry.strings[r], float(entry.alphas[r]) * entry.lam / set_lam * weight)
        for r in group
    ]


def sample_symmetric(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """One rotation over the nonzero-power set, placed mid-formula."""
    _check_t(t)
    if ens.mode != "symmetric":
        raise ConfigurationError("ensemble mode is not symmetric")
    j = _draw_power(ens, t, rng.next_uniform())
    entry = ens.entries[j]
    r = _draw(entry.cdf, rng.next_uniform())
    theta = math.copysign(1.0, entry.alphas[r]) * ens.total_weight(t) * entry.lam
    return SampledCorrection(
        ((entry.strings[r], theta),), (("power", j), ("term", r)), mid_circuit=True
    )


def sample(ens: SamplerEnsemble, t: float, rng) -> SampledCorrection:
    """Dispatch on the ensemble's mode."""
    if ens.mode == "standard":
        return sample_standard(ens, t, rng)
    if ens.mode == "greedy":
        return sample_greedy(ens, t, rng)
    if ens.mode == "qds":
        return sample_qds(ens, t, rng)
    if ens.mode == "greedy+qds":
        return sample_greedy_qds(ens, t, rng)
    if ens.mode == "symmetric":
        return sample_symmetric(ens, t, rng)
    raise ConfigurationError(f"unknown mode {ens.mode!r}")


def exhaustive_expectation(ens: SamplerEnsemble, t: float) -> np.ndarray:
    """Dense matrix of E[V] over the full ensemble; no sampling, tests/oracles.

    standard/qds/symmetric: sum over powers (and terms or sets) weighted by
    their probabilities. greedy modes: product over per-power expectations.
    """
    dim = 1 << ens.n_qubits

    def rot(p: PauliString, theta: float) -> np.ndarray:
        m = p.to_matrix()
        return math.cos(theta) * np.eye(dim) + 1j * math.sin(theta) * m

    def multi_rot(rotations) -> np.ndarray:
        m = np.eye(dim, dtype=complex)
        for p, theta in rotations:
            m = rot(p, theta) @ m
        return m

    probs = ens.power_probabilities(t)
    w_total = ens.total_weight(t)
    if ens.mode in ("standard", "symmetric"):
        acc = np.zeros((dim, dim), dtype=complex)
        for pj, j in zip(probs, ens.weight_powers):
            entry = ens.entries[j]
            if entry.lam == 0.0:
                acc += pj * np.eye(dim)
                continue
            for r, s in enumerate(entry.strings):
                theta = math.copysign(1.0, entry.alphas[r]) * w_total * entry.lam
                acc += pj * (abs(entry.alphas[r]) / entry.lam) * rot(s, theta)
        return acc
    if ens.mode == "qds":
        acc = np.zeros((dim, dim), dtype=complex)
        for pj, j in zip(probs, ens.weight_powers):
            entry = ens.entries[j]
            if entry.lam == 0.0:
                acc += pj * np.eye(dim)
                continue
            for si in range(len(entry.sets)):
                p_set = entry.set_lams[si] / entry.lam
                acc += pj * p_set * multi_rot(_set_rotations(entry, si, w_total))
        return acc
    if ens.mode in ("greedy", "greedy+qds"):
        acc = np.eye(dim, dtype=complex)
        for j in ens.nonzero_powers:
            entry = ens.entries[j]
            wj = ens.time_weight(j, t)
            e_j = np.zeros((dim, dim), dtype=complex)
            if ens.mode == "greedy":
                for r, s in enumerate(entry.strings):
                    theta = math.copysign(1.0, entry.alphas[r]) * wj * entry.lam
                    e_j += (abs(entry.alphas[r]) / entry.lam) * rot(s, theta)
            else:
                for si in range(len(entry.sets)):
                    p_set = entry.set_lams[si] / entry.lam
                    e_j += p_set * multi_rot(_set_rotations(entry, si, wj))
            acc = e_j @ acc
        return acc
    raise ConfigurationError(f"unknown mode {ens.mode!r}")

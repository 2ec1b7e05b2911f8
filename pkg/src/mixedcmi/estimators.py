"""Nearest-neighbor estimators of (conditional) mutual information and entropy.

All results are in nats. Every CMI/MI estimator here is the mean of per-point
local values ``xi`` derived from one :class:`~mixedcmi.knn.ProfileTable`, so
several estimators can share a single neighbor search (see :func:`local_xi`).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from .data import Dataset, RoleAssignment
from .knn import NeighborProfile, ProfileTable, batch_profiles, chain_ok
from .numerics import digamma, lp_ball_log_volume_constant, mean


class EstimationError(ValueError):
    """Estimator cannot be evaluated on the given data or parameters."""


class TiesWarning(UserWarning):
    """A continuous-data estimator was run on data with repeated values."""


class EstimatorKind(enum.Enum):
    PROPOSED = "proposed"
    FP = "fp"
    RAVK1 = "ravk1"
    RAVK2 = "ravk2"
    KSG_MI = "ksg"
    KL_ENTROPY = "kl"

    @classmethod
    def parse(cls, token: str) -> "EstimatorKind":
        try:
            return cls(token.strip().lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown estimator {token!r} (choose from {names})") from None


@dataclass(frozen=True)
class EstimateParams:
    k: int = 7
    clamp: bool = True
    p_norm: float = math.inf
    method: str = "brute"


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    xi: np.ndarray = field(repr=False)
    clamped: bool
    kind: EstimatorKind
    params: EstimateParams
    n: int

    @property
    def raw_mean(self) -> float:
        return mean(self.xi)


def _finish(xi: np.ndarray, kind: EstimatorKind, params: EstimateParams) -> EstimateResult:
    xi = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi)):
        raise EstimationError(f"{kind.value}: non-finite local estimate")
    xi.setflags(write=False)
    value = mean(xi)
    if params.clamp:
        value = max(value, 0.0)
    return EstimateResult(value, xi, params.clamp, kind, params, len(xi))


def _check_n(ds: Dataset, k: int) -> None:
    if k < 1:
        raise EstimationError(f"k must be >= 1, got {k}")
    if ds.n < k + 1:
        raise EstimationError(f"need at least k+1={k + 1} rows, got {ds.n}")


def local_xi_proposed(profile: NeighborProfile, k: int) -> float:
    """Local CMI value: digamma form without ties, log form when k~ > k."""
    if profile.tilde_k < k or min(profile.n_xz, profile.n_yz, profile.n_z) < profile.tilde_k:
        raise EstimationError(f"neighbor profile violates its count chain: {profile}")
    if profile.tilde_k == k:
        return (
            digamma(k) - (digamma(profile.n_xz) + digamma(profile.n_yz)) + digamma(profile.n_z)
        )
    return (
        math.log(profile.tilde_k)
        - (math.log(profile.n_xz) + math.log(profile.n_yz))
        + math.log(profile.n_z)
    )


def _xi_proposed(table: ProfileTable) -> np.ndarray:
    k = table.k
    if np.any(table.tilde_k < k) or np.any(
        np.minimum(np.minimum(table.n_xz, table.n_yz), table.n_z) < table.tilde_k
    ):
        raise EstimationError("neighbor profiles violate the count chain")
    ties = table.tilde_k > k
    xi = np.empty(len(table))
    plain = ~ties
    if plain.any():
        xi[plain] = (
            digamma(float(k))
            - (digamma(table.n_xz[plain]) + digamma(table.n_yz[plain]))
            + digamma(table.n_z[plain])
        )
    if ties.any():
        xi[ties] = (
            np.log(table.tilde_k[ties].astype(float))
            - (np.log(table.n_xz[ties].astype(float)) + np.log(table.n_yz[ties].astype(float)))
            + np.log(table.n_z[ties].astype(float))
        )
    return xi


def _xi_fp(table: ProfileTable) -> np.ndarray:
    # max{n*, 1} keeps digamma defined when rho = 0 empties the strict balls.
    def term(counts):
        return digamma(np.maximum(counts, 1) + 1.0)

    return digamma(float(table.k)) - (term(table.star_xz) + term(table.star_yz)) + term(table.star_z)


def _xi_ravk(table: ProfileTable, variant: int) -> np.ndarray:
    if variant == 1:
        tilde = np.where(table.rho == 0, table.tilde_k, table.k)
    elif variant == 2:
        tilde = table.tilde_k
    else:
        raise EstimationError(f"RAVK variant must be 1 or 2, got {variant}")
    return (
        digamma(tilde.astype(float))
        - (np.log(table.n_xz + 1.0) + np.log(table.n_yz + 1.0))
        + np.log(table.n_z + 1.0)
    )


def _xi_ksg(table: ProfileTable, n: int) -> np.ndarray:
    return (
        digamma(float(table.k))
        + digamma(float(n))
        - (digamma(np.maximum(table.star_xz, 1) + 1.0) + digamma(np.maximum(table.star_yz, 1) + 1.0))
    )


def check_roles(kind: EstimatorKind, roles: RoleAssignment) -> None:
    """Raise if ``kind`` cannot be used with this role assignment."""
    if kind is EstimatorKind.KSG_MI and not roles.is_mi:
        raise EstimationError("KSG estimates MI only; drop the Z columns")
    if kind is EstimatorKind.KL_ENTROPY:
        raise EstimationError("kl is an entropy estimator, not a CMI/MI estimator")


def local_xi(kind: EstimatorKind, table: ProfileTable, n: int) -> np.ndarray:
    """Per-point local values of a CMI/MI estimator from precomputed profiles."""
    if kind is EstimatorKind.PROPOSED:
        return _xi_proposed(table)
    if kind is EstimatorKind.FP:
        return _xi_fp(table)
    if kind is EstimatorKind.RAVK1:
        return _xi_ravk(table, 1)
    if kind is EstimatorKind.RAVK2:
        return _xi_ravk(table, 2)
    if kind is EstimatorKind.KSG_MI:
        return _xi_ksg(table, n)
    raise EstimationError(f"{kind.value} is not a local CMI/MI estimator")


def _profiles(ds, roles, params, table):
    roles.validate(ds)
    _check_n(ds, params.k)
    if table is None:
        table = batch_profiles(ds, roles, params.k, method=params.method)
    elif table.k != params.k or len(table) != ds.n:
        raise EstimationError("precomputed profiles do not match the dataset or k")
    return table


def estimate_cmi_proposed(
    ds: Dataset, roles: RoleAssignment, params: EstimateParams = EstimateParams(), table=None
) -> EstimateResult:
    """Tie-aware kNN estimate of I(X;Y|Z); with no Z columns this is MI.

    Each point contributes ``psi(k) - psi(n_xz) - psi(n_yz) + psi(n_z)`` when
    its kNN ball holds exactly k others, and the log analogue with ``k~`` in
    place of ``k`` when ties push more points onto the ball's boundary.
    """
    table = _profiles(ds, roles, params, table)
    return _finish(_xi_proposed(table), EstimatorKind.PROPOSED, params)


def estimate_mi_proposed(
    ds: Dataset, roles: RoleAssignment, params: EstimateParams = EstimateParams(), table=None
) -> EstimateResult:
    """MI special case of the proposed estimator; the Z count is pinned to n."""
    if not roles.is_mi:
        raise EstimationError("MI estimation takes no Z columns")
    return estimate_cmi_proposed(ds, roles, params, table)


def estimate_fp(
    ds: Dataset, roles: RoleAssignment, params: EstimateParams = EstimateParams(), table=None
) -> EstimateResult:
    table = _profiles(ds, roles, params, table)
    return _finish(_xi_fp(table), EstimatorKind.FP, params)


def estimate_ravk(
    ds: Dataset,
    roles: RoleAssignment,
    params: EstimateParams = EstimateParams(),
    variant: int = 2,
    table=None,
) -> EstimateResult:
    """Mixed-data CMI estimate with log-count subspace terms.

    ``variant=1`` lets k~ exceed k only at zero radius (exact duplicates);
    ``variant=2`` uses the inclusive joint count at the kNN radius.
    """
    table = _profiles(ds, roles, params, table)
    kind = EstimatorKind.RAVK1 if variant == 1 else EstimatorKind.RAVK2
    return _finish(_xi_ravk(table, variant), kind, params)


def estimate_ksg_mi(
    ds: Dataset, roles: RoleAssignment, params: EstimateParams = EstimateParams(), table=None
) -> EstimateResult:
    check_roles(EstimatorKind.KSG_MI, roles)
    table = _profiles(ds, roles, params, table)
    if np.any(table.rho == 0) or np.any(table.tilde_k > table.k):
        warnings.warn(
            "KSG assumes continuous data; ties found, applying max{n*,1} guard",
            TiesWarning,
            stacklevel=2,
        )
    return _finish(_xi_ksg(table, ds.n), EstimatorKind.KSG_MI, params)


def kl_entropy(ds: Dataset, params: EstimateParams = EstimateParams()) -> float:
    """Kozachenko-Leonenko differential entropy of all columns, in nats."""
    if not ds.all_numeric:
        raise EstimationError("KL entropy needs numeric columns only")
    _check_n(ds, params.k)
    pts = ds.values
    dist, _ = cKDTree(pts).query(pts, k=params.k + 1, p=params.p_norm)
    rho = dist[:, -1]
    if np.any(rho == 0):
        raise EstimationError("KL entropy is undefined with duplicate rows (zero kNN distance)")
    n, d = ds.n, ds.d
    return (
        -digamma(float(params.k))
        + digamma(float(n))
        + lp_ball_log_volume_constant(d, params.p_norm)
        + d * mean(np.log(rho))
    )


def estimate(
    ds: Dataset,
    roles: RoleAssignment | None,
    kind: EstimatorKind = EstimatorKind.PROPOSED,
    params: EstimateParams = EstimateParams(),
    table: ProfileTable | None = None,
) -> EstimateResult:
    """Dispatch to the estimator named by ``kind``.

    For ``KL_ENTROPY`` the roles are ignored and the joint entropy of every
    column is returned as an :class:`EstimateResult` with empty ``xi``.
    """
    if kind is EstimatorKind.KL_ENTROPY:
        value = kl_entropy(ds, params)
        return EstimateResult(value, np.empty(0), False, kind, replace(params, clamp=False), ds.n)
    if roles is None:
        raise EstimationError(f"{kind.value} needs an X/Y/Z role assignment")
    if kind is EstimatorKind.PROPOSED:
        return estimate_cmi_proposed(ds, roles, params, table)
    if kind is EstimatorKind.FP:
        return estimate_fp(ds, roles, params, table)
    if kind is EstimatorKind.RAVK1:
        return estimate_ravk(ds, roles, params, 1, table)
    if kind is EstimatorKind.RAVK2:
        return estimate_ravk(ds, roles, params, 2, table)
    return estimate_ksg_mi(ds, roles, params, table)


__all__ = [
    "EstimateParams",
    "EstimateResult",
    "EstimationError",
    "EstimatorKind",
    "TiesWarning",
    "chain_ok",
    "check_roles",
    "estimate",
    "estimate_cmi_proposed",
    "estimate_fp",
    "estimate_ksg_mi",
    "estimate_mi_proposed",
    "estimate_ravk",
    "kl_entropy",
    "local_xi",
    "local_xi_proposed",
]

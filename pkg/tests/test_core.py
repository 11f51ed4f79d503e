import math
from collections.abc import Callable

import numpy as np
import pytest

from neutron_ghz.exceptions import InvalidParameterError, InvalidStateError
from neutron_ghz.quantum import (
    IDENTITY,
    Axis,
    DensityMatrix,
    DofIndex,
    ObservableSpec,
    OpKind,
    PureState,
    SingleQubitOp,
    TripleOp,
    basis_index,
    commutator,
    densify,
    embed,
    expectation,
    in_plane_observable,
    pauli,
    tensor3,
)


def test_pauli_algebra() -> None:
    x, y, z = (pauli(axis) for axis in Axis)
    assert (x @ y).allclose(SingleQubitOp(1j * z.entries))
    for op in (x, y, z):
        assert (op @ op).allclose(IDENTITY)
        assert op.is_hermitian()
        assert op.is_unitary()


def test_product_keeps_unitary_tag_only() -> None:
    product = pauli(Axis.X) @ pauli(Axis.Y)
    assert OpKind.UNITARY in product.kind
    assert OpKind.OBSERVABLE not in product.kind


def test_sum_keeps_observable_tag_only() -> None:
    total = pauli(Axis.X) + pauli(Axis.Z)
    assert total.kind == OpKind.OBSERVABLE
    assert (-pauli(Axis.X)).kind == pauli(Axis.X).kind


def test_wrong_tags_are_rejected() -> None:
    with pytest.raises(InvalidStateError, match="unitary"):
        TripleOp(2 * np.eye(8), OpKind.UNITARY)
    with pytest.raises(InvalidStateError, match="Hermitian"):
        SingleQubitOp([[0, 1], [0, 0]], OpKind.OBSERVABLE)
    with pytest.raises(InvalidStateError, match="8x8"):
        TripleOp(np.eye(4))


def test_tensor_order_is_spin_path_energy() -> None:
    state = PureState.basis(0, 0, 0)
    assert embed(pauli(Axis.X), DofIndex.SPIN).apply(state)[4] == 1
    assert embed(pauli(Axis.X), DofIndex.PATH).apply(state)[2] == 1
    assert embed(pauli(Axis.X), DofIndex.ENERGY).apply(state)[1] == 1


def test_basis_index() -> None:
    assert basis_index(0, 0, 0) == 0
    assert basis_index(1, 0, 1) == 5
    assert basis_index(1, 1, 1) == 7
    with pytest.raises(InvalidParameterError):
        basis_index(2, 0, 0)


def test_tensor3_kind_is_intersection() -> None:
    projector = SingleQubitOp(np.diag([1.0, 0.0]))
    assert tensor3(pauli(Axis.X), pauli(Axis.Y), pauli(Axis.Z)).is_unitary()
    assert tensor3(projector, IDENTITY, IDENTITY).kind == OpKind.GENERAL


def test_pure_state_must_be_normalised() -> None:
    with pytest.raises(InvalidStateError, match="not normalised"):
        PureState(np.ones(8))
    with pytest.raises(InvalidStateError, match="zero vector"):
        PureState.normalized(np.zeros(8))
    state = PureState.normalized(np.ones(8))
    assert state.fidelity(state) == pytest.approx(1.0)


def test_density_matrix_invariants() -> None:
    with pytest.raises(InvalidStateError, match="trace"):
        DensityMatrix(np.eye(8))
    with pytest.raises(InvalidStateError, match="Hermitian"):
        DensityMatrix(np.eye(8) / 8 + np.triu(np.ones((8, 8)), 1) * 0.01)
    with pytest.raises(InvalidStateError, match="negative eigenvalue"):
        DensityMatrix(np.diag([1.5, -0.5, 0, 0, 0, 0, 0, 0]))


def test_maximally_mixed_purity() -> None:
    assert DensityMatrix.maximally_mixed().purity() == pytest.approx(1 / 8)


def test_mix_weight_is_checked(plus_rho: DensityMatrix) -> None:
    mixed = plus_rho.mix(DensityMatrix.maximally_mixed(), 0.5)
    assert mixed.purity() < plus_rho.purity()
    with pytest.raises(InvalidParameterError):
        plus_rho.mix(mixed, 1.5)


def test_densify_tolerates_rounding_only() -> None:
    vector = np.zeros(8, dtype=np.complex128)
    vector[0] = 1 + 1e-10
    assert densify(vector).purity() == pytest.approx(1.0)
    vector[0] = 1.1
    with pytest.raises(InvalidStateError, match="unnormalised"):
        densify(vector)


def test_expectation_is_real_for_observables(
    random_density: Callable[[], DensityMatrix],
) -> None:
    rho = random_density()
    obs = tensor3(pauli(Axis.X), pauli(Axis.Y), pauli(Axis.Z))
    value = expectation(rho, obs)
    assert -1.0 <= value <= 1.0
    assert value == pytest.approx(np.trace(rho.entries @ obs.entries).real)


def test_expectation_rejects_non_hermitian(plus_rho: DensityMatrix) -> None:
    product = tensor3(pauli(Axis.X) @ pauli(Axis.Y), IDENTITY, IDENTITY)
    with pytest.raises(InvalidStateError, match="Hermitian"):
        expectation(plus_rho, product)


def test_in_plane_observable(angles: list[float]) -> None:
    assert in_plane_observable(0.0).allclose(pauli(Axis.X))
    assert in_plane_observable(math.pi / 2).allclose(pauli(Axis.Y))
    for theta in angles:
        assert in_plane_observable(theta).eigenvalues() == pytest.approx([-1.0, 1.0])
    with pytest.raises(InvalidParameterError, match="finite"):
        in_plane_observable(math.inf)


def test_observable_spec_builds_products() -> None:
    spec = ObservableSpec(spin=0.0, path=math.pi / 2, energy=math.pi / 2)
    expected = tensor3(pauli(Axis.X), pauli(Axis.Y), pauli(Axis.Y))
    assert spec.observable().allclose(expected)


def test_commutator_of_disjoint_dofs_vanishes() -> None:
    a = embed(pauli(Axis.X), DofIndex.SPIN)
    b = embed(pauli(Axis.Y), DofIndex.PATH)
    assert np.allclose(commutator(a, b).entries, 0)
    c = embed(pauli(Axis.Y), DofIndex.SPIN)
    assert not np.allclose(commutator(a, c).entries, 0)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def test_tensor3_is_multiplicative(rng: np.random.Generator) -> None:
    for _ in range(10):
        a, b, c, d, e, f = (
            SingleQubitOp(random_hermitian(rng, 2), OpKind.OBSERVABLE)
            for _ in range(6)
        )
        left = tensor3(a, b, c)
        assert left.trace() == pytest.approx(a.trace() * b.trace() * c.trace())
        product = left @ tensor3(d, e, f)
        assert product.allclose(tensor3(a @ d, b @ e, c @ f), tol=1e-10)


def test_expectation_is_linear(
    rng: np.random.Generator, random_density: Callable[[], DensityMatrix]
) -> None:
    for _ in range(10):
        rho, sigma = random_density(), random_density()
        first = TripleOp(random_hermitian(rng, 8), OpKind.OBSERVABLE)
        second = TripleOp(random_hermitian(rng, 8), OpKind.OBSERVABLE)
        weight, scale = float(rng.uniform()), float(rng.normal())

        mixed = rho.mix(sigma, weight)
        assert expectation(mixed, first) == pytest.approx(
            weight * expectation(rho, first) + (1 - weight) * expectation(sigma, first)
        )
        assert expectation(rho, first.scaled(scale) + second) == pytest.approx(
            scale * expectation(rho, first) + expectation(rho, second)
        )


def test_in_plane_observable_flips_sign_at_half_turn(angles: list[float]) -> None:
    for theta in angles:
        assert in_plane_observable(theta + math.pi).allclose(-in_plane_observable(theta))

import numpy as np
import pytest

from walshcs.operator import (
    CobOperator,
    MeasurementVector,
    SizeGuardError,
    write_matrix_csv,
    write_pgm,
)
from walshcs.wavelets import LevelStructure, build_basis


def haar_op(r=4, Q=None):
    return CobOperator(build_basis(1, 0), LevelStructure(J0=0, r=r), Q=Q)


def db_op(p, r=5, q=0, Q=None):
    j0 = {3: 3, 4: 3, 8: 4}[p]
    return CobOperator(build_basis(p, j0), LevelStructure(J0=j0, r=r, q=q), Q=Q)


def haar_closed_form(op):
    """|u[i, j]| from the exact Haar block structure."""
    n_rows = 1 << op.Q
    m = op.levels.M_r
    out = np.zeros((n_rows, m))
    out[0, 0] = 1.0
    for j in range(1, m):
        level = j.bit_length() - 1
        out[1 << level : 1 << (level + 1), j] = 2.0 ** (-level / 2.0)
    return out


def test_haar_entries_match_closed_form():
    op = haar_op(r=4)
    dense = np.column_stack([op.column(j) for j in range(16)])
    assert np.max(np.abs(np.abs(dense) - haar_closed_form(op))) < 1e-12


def test_entry_validation_and_consistency():
    op = db_op(4)
    with pytest.raises(ValueError):
        op.entry(1 << op.Q, 0)
    with pytest.raises(ValueError):
        op.entry(0, op.levels.M_r)
    x = np.zeros(op.levels.M_r)
    x[37] = 1.0
    assert abs(op.apply(x, np.array([555]))[0] - op.entry(555, 37)) < 1e-12


def test_zero_maps_to_zero():
    op = db_op(3)
    out = op.apply(np.zeros(op.levels.M_r), np.arange(64))
    assert np.all(out == 0.0)


@pytest.mark.parametrize("p", [1, 3, 4, 8])
def test_adjoint_identity(p):
    op = haar_op() if p == 1 else db_op(p)
    rng = np.random.default_rng(p)
    m = op.levels.M_r
    for _ in range(25):
        x = rng.standard_normal(m)
        omega = np.sort(rng.choice(1 << op.Q, 50, replace=False))
        y = rng.standard_normal(50)
        lhs = np.dot(op.apply(x, omega), y)
        rhs = np.dot(x, op.apply_adjoint(y, omega, L=m))
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


@pytest.mark.parametrize("p", [1, 4])
def test_columns_are_unit_norm(p):
    op = haar_op() if p == 1 else db_op(p)
    for j in range(0, op.levels.M_r, 7):
        assert abs(np.linalg.norm(op.column(j)) - 1.0) <= 1e-10


def test_full_omega_isometry_haar():
    op = haar_op()
    rng = np.random.default_rng(0)
    x = rng.standard_normal(op.levels.M_r)
    g = op.apply(x, np.arange(1 << op.Q))
    assert abs(np.linalg.norm(g) - np.linalg.norm(x)) < 1e-12


def test_section_dense_guard_and_shape():
    op = db_op(4)
    s = op.section_dense(16, 16)
    assert s.shape == (16, 16)
    with pytest.raises(SizeGuardError):
        op.section_dense(1 << 13, 4)
    assert np.max(np.linalg.norm(s, axis=0)) <= 1.0 + 1e-10


def test_haar_section_block_diagonal():
    op = haar_op(r=4)
    s = op.section_dense(16, 16)
    closed = haar_closed_form(op)[:16]
    assert np.max(np.abs(np.abs(s) - closed)) < 1e-12


def test_rows_match_columns():
    op = db_op(3)
    rows = op.rows_dense(np.array([3, 17, 40]), 32)
    for a, i in enumerate((3, 17, 40)):
        col_vals = np.array([op.entry(i, j) for j in range(32)])
        assert np.max(np.abs(rows[a] - col_vals)) < 1e-12


def test_dc_row_matches_refined_quadrature():
    # entry(0, j) is the integral of basis function j; cross-check against
    # quadrature of a four-octaves-finer tabulation, which agrees at the
    # O(2^-Q) rate the boundary cells allow
    from walshcs.wavelets import cascade_tabulate

    for q in (10, 12):
        op = db_op(4, r=2, Q=q)
        basis = op.basis
        for n in (0, 3, 5, 7):
            oracle = cascade_tabulate(basis, 3, n, q + 4).sum() / (1 << (q + 4))
            assert abs(op.entry(0, n) - oracle) < 8.0 * 2.0**-q
        wave = cascade_tabulate(basis, 3, 4, q + 4, kind="wavelet")
        assert abs(op.entry(0, 8 + 4) - wave.sum() / (1 << (q + 4))) < 8.0 * 2.0**-q


def test_apply_accepts_expansion():
    from walshcs.wavelets import SignalExpansion

    op = haar_op()
    exp = SignalExpansion(levels=op.levels, coeffs=np.arange(16, dtype=float))
    direct = op.apply(exp.coeffs, np.arange(8))
    assert np.array_equal(op.apply(exp, np.arange(8)), direct)


def test_entry_refinement_convergence():
    # entries recomputed with two extra octaves move by O(2^-Q)
    basis = build_basis(4, 3)
    lv = LevelStructure(J0=3, r=3, q=0)
    entries = [(0, 5), (17, 20), (40, 60), (3, 0)]
    devs = {}
    for q in (9, 11):
        op_a = CobOperator(basis, lv, Q=q)
        op_b = CobOperator(basis, lv, Q=q + 2)
        devs[q] = max(abs(op_a.entry(i, j) - op_b.entry(i, j)) for i, j in entries)
    assert devs[9] <= 64.0 * 2.0**-9
    assert devs[11] <= 64.0 * 2.0**-11


def test_no_sharpening_with_order():
    # raising the order does not collapse the off-block-diagonal mass of the
    # 256-section (in the Fourier analogue it would shrink by orders of
    # magnitude); partitions follow each basis's own level structure
    fractions = {}
    for p in (3, 8):
        op = db_op(p, r=8 - {3: 3, 8: 4}[p])
        s = op.section_dense(256, 256)
        lv = op.levels
        total = float((s**2).sum())
        diag = 0.0
        for k in range(1, lv.r + 1):
            rows = lv.sample_level_slice(k)
            cols = lv.coefficient_level_slice(k)
            diag += float((s[rows, cols.start : cols.stop] ** 2).sum())
        fractions[p] = 1.0 - diag / total
    assert fractions[8] >= 0.1
    assert fractions[8] >= 0.2 * fractions[3]


def test_measurement_vector_validation():
    with pytest.raises(ValueError):
        MeasurementVector(np.arange(3), np.zeros(2))
    with pytest.raises(ValueError):
        MeasurementVector(np.arange(2), np.zeros(2), delta=-1.0)


def test_exports(tmp_path):
    op = haar_op(r=3)
    s = op.section_dense(8, 8)
    csv_path = tmp_path / "sec.csv"
    pgm_path = tmp_path / "sec.pgm"
    write_matrix_csv(s, csv_path)
    write_pgm(s, pgm_path)
    loaded = np.loadtxt(csv_path, delimiter=",")
    assert np.max(np.abs(loaded - s)) < 1e-15
    raw = pgm_path.read_bytes()
    assert raw.startswith(b"P5\n8 8\n255\n") and len(raw) == len(b"P5\n8 8\n255\n") + 64


def test_grid_exponent_guard():
    basis = build_basis(1, 0)
    lv = LevelStructure(J0=0, r=4)
    with pytest.raises(ValueError):
        CobOperator(basis, lv, Q=5)
    assert CobOperator(basis, lv).Q == 7

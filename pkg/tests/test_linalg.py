"""Randomized properties of the exact solver and the matrix JSON interface."""

import random
from fractions import Fraction

from lsea.linalg import RationalMatrix, invert_dense, reduction_of, solve


def rand_matrix(rng, rows, cols, density=0.6):
    return RationalMatrix.from_rows(
        [
            [
                Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3]))
                if rng.random() < density
                else 0
                for _ in range(cols)
            ]
            for _ in range(rows)
        ]
    )


def test_solutions_and_kernels_are_exact():
    rng = random.Random(2718)
    for _ in range(60):
        rows, cols = rng.randint(1, 7), rng.randint(1, 7)
        a = rand_matrix(rng, rows, cols)
        x_true = [Fraction(rng.randint(-3, 3), rng.choice([1, 2])) for _ in range(cols)]
        b = a.matvec(x_true)
        res = solve(a, b)
        assert res.consistent
        assert a.matvec(res.solution) == b
        zero = [Fraction(0)] * rows
        for v in res.kernel:
            assert a.matvec(v) == zero
        red = reduction_of(a)
        assert len(res.kernel) == cols - red.rank


def test_certificates_witness_inconsistency():
    rng = random.Random(3141)
    found = 0
    for _ in range(200):
        rows, cols = rng.randint(2, 6), rng.randint(1, 4)
        a = rand_matrix(rng, rows, cols, density=0.5)
        b = [Fraction(rng.randint(-3, 3)) for _ in range(rows)]
        res = solve(a, b)
        if res.consistent:
            assert a.matvec(res.solution) == b
            continue
        found += 1
        y = res.certificate
        # y*A = 0 and y*b != 0
        for j in range(cols):
            assert sum(y[i] * a.entries[i][j] for i in range(rows)) == 0
        assert sum(yi * bi for yi, bi in zip(y, b)) != 0
    assert found >= 10


def test_inverse_round_trip():
    rng = random.Random(1618)
    done = 0
    while done < 20:
        k = rng.randint(1, 4)
        a = rand_matrix(rng, k, k, density=0.9)
        try:
            inv = invert_dense([list(r) for r in a.entries])
        except ValueError:
            continue
        done += 1
        for i in range(k):
            row = [
                sum(a.entries[i][t] * inv[t][j] for t in range(k)) for j in range(k)
            ]
            assert row == [Fraction(1) if i == j else Fraction(0) for j in range(k)]


def test_matrix_json_shape():
    a = RationalMatrix.from_rows([[Fraction(1, 2), 0], [3, Fraction(-2, 3)]])
    data = a.to_json()
    assert data == {
        "rows": 2,
        "cols": 2,
        "entries": [["1/2", "0"], ["3", "-2/3"]],
    }

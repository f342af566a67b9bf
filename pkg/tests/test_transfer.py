import random
from fractions import Fraction

from sseqlab import transfer
from sseqlab.poly import Poly
from sseqlab.transfer import (
    BASIS,
    GammaPrimeElement,
    _RING,
    gamma_poly,
    multiplication_matrix,
    normalize,
    trace,
    verify_transfer_images,
)


def test_normalize_s_is_basis_vector():
    e = normalize(gamma_poly({(0, 0, 1, 0): 1}))
    nonzero = [i for i, c in enumerate(e.coords) if not c.is_zero()]
    assert nonzero == [1]
    assert e.coords[1].terms == {(0, 0): Fraction(1)}


def test_normalize_s4_matches_relation():
    # s^4 -> 6st - a1 s^3 + 3 a1 t + 3 a3 s
    e = normalize(gamma_poly({(0, 0, 4, 0): 1}))
    assert e.coords[5].terms == {(0, 0): Fraction(6)}  # st
    assert e.coords[3].terms == {(1, 0): Fraction(-1)}  # s^3
    assert e.coords[4].terms == {(1, 0): Fraction(3)}  # t
    assert e.coords[1].terms == {(0, 1): Fraction(3)}  # s
    assert e.coords[0].is_zero() and e.coords[2].is_zero()


def test_confluence_cross_check():
    """s^4*t and s^3*t^2 reduce consistently whichever relation fires first.

    The structure-constant normal form is order-free by construction; the
    cross-check is multiplicativity: nf(x*y) = nf(nf(x)*nf(y)).
    """
    rng = random.Random(5)
    for _ in range(50):
        def rand_poly():
            out = {}
            for _ in range(rng.randint(1, 3)):
                m = (rng.randint(0, 2), rng.randint(0, 1), rng.randint(0, 4), rng.randint(0, 2))
                out[m] = rng.randint(-3, 3)
            return gamma_poly(out)

        x, y = rand_poly(), rand_poly()
        direct = normalize(x * y)
        via = normalize(_elt_poly(normalize(x)) * _elt_poly(normalize(y)))
        assert [c.terms for c in direct.coords] == [c.terms for c in via.coords]


def _elt_poly(e: GammaPrimeElement) -> Poly:
    return transfer._element_to_poly(e)


def test_normalize_idempotent_and_linear():
    x = gamma_poly({(0, 0, 4, 1): 1, (1, 0, 0, 2): 2})
    once = normalize(x)
    again = normalize(_elt_poly(once))
    assert [c.terms for c in once.coords] == [c.terms for c in again.coords]


def test_trace_symmetry():
    rng = random.Random(9)
    for _ in range(10):
        x = gamma_poly({(rng.randint(0, 1), 0, rng.randint(0, 3), rng.randint(0, 1)):
                        rng.randint(-4, 4)})
        y = gamma_poly({(0, rng.randint(0, 1), rng.randint(0, 3), rng.randint(0, 1)):
                        rng.randint(-4, 4)})
        assert trace(x * y).terms == trace(y * x).terms


def test_trace_a_linear():
    # trace(a1 * s) = a1 * trace(s) = -4 a1^2
    got = trace(gamma_poly({(1, 0, 1, 0): 1}))
    assert got.terms == {(2, 0): Fraction(-4)}


def test_full_report():
    report = verify_transfer_images()
    assert report.ok, str(report)

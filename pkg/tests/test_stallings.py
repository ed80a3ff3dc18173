import random

import pytest
from hypothesis import given, strategies as st

from trainpoly.fixtures import phi1, phi2
from trainpoly.stallings import (FreeGroupEndo, endo_from_dict, endo_to_dict, fold, fold_words,
                                 image_rank, invert_word, is_injective, is_surjective,
                                 parse_letter, random_endo, reduce_word, stable_image_index)

words = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=8)


def nielsen(rng, rank, steps):
    """Random automorphism: products of transvections, inversions and swaps."""
    e = FreeGroupEndo.identity(rank)
    for _ in range(steps):
        imgs = [list(w) for w in e.images]
        i, j = rng.sample(range(rank), 2) if rank > 1 else (0, 0)
        kind = rng.choice(["mul", "inv", "swap"] if rank > 1 else ["inv"])
        if kind == "mul":
            imgs[i] = imgs[i] + (imgs[j] if rng.random() < 0.5 else list(invert_word(imgs[j])))
        elif kind == "inv":
            imgs[i] = list(invert_word(imgs[i]))
        else:
            imgs[i], imgs[j] = imgs[j], imgs[i]
        e = FreeGroupEndo.make(imgs)
    return e


@given(words)
def test_reduce_is_idempotent(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert reduce_word(list(w) + list(invert_word(w))) == ()


def test_phi1_and_phi2():
    e1, e2 = phi1(), phi2()
    assert (e1.rank, image_rank(e1)) == (5, 5)
    assert is_injective(e1) and not is_surjective(e1)
    assert stable_image_index(e1) == (0, [5, 5])
    assert is_injective(e2) and is_surjective(e2)


def test_degenerate_endomorphisms():
    assert stable_image_index(FreeGroupEndo.make([[1], [1]])) == (1, [2, 1, 1])
    assert stable_image_index(FreeGroupEndo.make([[1], []])) == (1, [2, 1, 1])
    assert image_rank(FreeGroupEndo.make([[1, 1], [1, 1, 1]])) == 1


def test_automorphisms_are_detected():
    rng = random.Random(61)
    for _ in range(30):
        e = nielsen(rng, rng.randint(1, 4), rng.randint(1, 8))
        assert is_injective(e) and is_surjective(e)
        assert fold(e).is_rose(e.rank)


def test_squaring_a_generator_is_not_surjective():
    e = FreeGroupEndo.make([[1, 1], [2]])
    assert is_injective(e) and not is_surjective(e)


def test_membership_of_images():
    rng = random.Random(67)
    for _ in range(30):
        e = random_endo(rng, 3)
        g = fold(e)
        for _ in range(5):
            w = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(0, 5))]
            assert g.contains(e.apply(w))


def test_folding_is_confluent():
    rng = random.Random(71)
    for _ in range(100):
        e = random_endo(rng, rng.randint(1, 4))
        ref = fold(e)
        for seed in range(3):
            assert fold(e, seed=seed) == ref


def test_rank_sequences_non_increasing():
    rng = random.Random(73)
    for _ in range(50):
        e = random_endo(rng, rng.randint(1, 4))
        i, ranks = stable_image_index(e)
        assert all(a >= b for a, b in zip(ranks, ranks[1:]))
        assert ranks[i] == ranks[i + 1]


def test_power_and_compose():
    e = FreeGroupEndo.make([[2], [1, 2]])
    assert e.power(2) == e.compose(e)
    assert e.power(0) == FreeGroupEndo.identity(2)


def test_dict_round_trip():
    e = phi1()
    assert endo_from_dict(endo_to_dict(e)) == e
    assert parse_letter("-x3") == -3 and parse_letter("x2") == 2


def test_bad_words_rejected():
    with pytest.raises(ValueError):
        FreeGroupEndo.make([[3], [1]])
    with pytest.raises(ValueError):
        endo_from_dict({"rank": 3, "images": [["x1"], ["x2"]]})


def test_fold_words_subgroup():
    # <x1 x2, x2 x1> has rank 2 and misses x1
    g = fold_words([[1, 2], [2, 1]])
    assert g.betti == 2
    assert not g.contains((1,))
    assert g.contains((1, 2, 2, 1))

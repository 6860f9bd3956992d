"""Shared instances and small checkers for the test modules."""

import random

from dgtwist.dgcat import collapse_fixture, interval, random_directed_category
from dgtwist.twist import TwistedTensor, combo_compose, combo_differential

SEEDS = range(25)


def base_categories():
    """The second factors used for the projection and oracle checks."""
    out = [(f"interval({m})", interval(m)) for m in range(4)]
    out.append(("collapse", collapse_fixture()[0]))
    out += [(f"random[{s}]", random_directed_category(s)) for s in SEEDS]
    return out


def sign(k):
    return -1 if k % 2 else 1


def add_into(out, v, c=1):
    for k, x in v.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)


def composable_words(W, rng, length):
    """A random composable sequence (w_1, ..., w_length), applied in that order."""
    objs = W.objects
    for _ in range(200):
        path = sorted(rng.sample(range(len(W.order)), 1) + [rng.randrange(len(W.order)) for _ in range(length)])
        pts = [W.order[i] for i in path]
        words = []
        for x, y in zip(pts, pts[1:]):
            hom = W.hom(x, y)
            if not hom:
                break
            words.append(rng.choice(hom))
        else:
            return words
    return None


def random_leibniz_failures(W, rng, trials):
    """Failures of d(g∘f) = dg∘f + (-1)^|g| g∘df over random pairs."""
    bad = done = 0
    for _ in range(trials):
        ws = composable_words(W, rng, 2)
        if ws is None:
            continue
        f, g = ws
        lhs = combo_differential(W, W.compose(g, f))
        rhs = combo_compose(W, W.d(g), {f: 1})
        add_into(rhs, combo_compose(W, {g: 1}, W.d(f)), sign(W.degree(g)))
        done += 1
        bad += lhs != rhs
    return done, bad


def random_associativity_failures(W, rng, trials):
    bad = done = 0
    for _ in range(trials):
        ws = composable_words(W, rng, 3)
        if ws is None:
            continue
        f, g, h = ws
        left = combo_compose(W, {h: 1}, W.compose(g, f))
        right = combo_compose(W, W.compose(h, g), {f: 1})
        done += 1
        bad += left != right
    return done, bad


def random_twists(seeds=range(10), n=2):
    for s in seeds:
        yield s, TwistedTensor(n, random_directed_category(s)), random.Random(1000 + s)

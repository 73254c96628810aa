"""Slow reference implementations used to cross-check the fast paths.

Nothing here shares code with the implementations under test.
"""

import itertools


def brute_force_mixed_utility(game, p):
    """Sum of u(y) * prod_i p_i(y_i) over every pure profile, in row-major order."""
    counts = [len(s) for s in p]
    if len(counts) != len(game.action_counts):
        raise ValueError(f"strategy has {len(counts)} players, game has {len(game.action_counts)}")
    for i, (a, b) in enumerate(zip(counts, game.action_counts)):
        if a != b:
            raise ValueError(f"player {i}: strategy has {a} entries, game has {b} actions")
    u = game.utility.tolist()
    total = 0.0
    for y in itertools.product(*(range(m) for m in counts)):
        w = u
        for a in y:
            w = w[a]
        for i, a in enumerate(y):
            w *= float(p[i][a])
        total += w
    return total


def brute_force_best_response_value(game, i, belief):
    """Largest utility of player ``i`` over its pure actions, by evaluating each vertex."""
    best = None
    for a in range(game.action_counts[i]):
        vertex = [0.0] * game.action_counts[i]
        vertex[a] = 1.0
        profile = [list(s) for s in belief]
        profile[i] = vertex
        val = brute_force_mixed_utility(game, profile)
        if best is None or val > best:
            best = val
    return best


def brute_force_partition_valid(game, classes, tolerance=0.0):
    """Check the four partition conditions by direct enumeration of every swap."""
    n = len(game.action_counts)
    seen = []
    for c in classes:
        seen.extend(c)
    if len(seen) != len(set(seen)):
        return False
    if sorted(set(seen)) != list(range(n)):
        return False
    u = game.utility
    for c in classes:
        for i in c:
            for j in c:
                if i == j:
                    continue
                if game.action_counts[i] != game.action_counts[j]:
                    return False
                for y in itertools.product(*(range(m) for m in game.action_counts)):
                    z = list(y)
                    z[i], z[j] = y[j], y[i]
                    if abs(float(u[y]) - float(u[tuple(z)])) > tolerance:
                        return False
    return True

"""
Direct-formula metric implementations in plain Python, used as independent
references for the numpy/scipy/sklearn backed library code.
"""
import math


def mean(xs):
    return sum(xs) / len(xs)


def pearson(x, y):
    mx, my = mean(x), mean(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def average_ranks(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        # positions i..j share the mean of ranks i+1..j+1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x, y):
    return pearson(average_ranks(x), average_ranks(y))


def mae_and_bias(pred, gt):
    diffs = [p - g for p, g in zip(pred, gt)]
    return mean([abs(d) for d in diffs]), mean(diffs)


def cohen_kappa(a, b):
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    p_e = sum((a.count(label) / n) * (b.count(label) / n) for label in set(a) | set(b))
    if p_e == 1:
        return None
    return (p_o - p_e) / (1 - p_e)


def pairwise_accuracy(pairs, pred, gt):
    hits = sum(1 for i, j in pairs if (gt[i] - gt[j]) * (pred[i] - pred[j]) > 0)
    return hits / len(pairs)

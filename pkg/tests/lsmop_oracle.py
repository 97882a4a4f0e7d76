"""Independent scalar evaluator for the LSMOP family, used only as a test oracle.

Written separately from the library implementation: plain per-solution loops
over python floats, no shared helpers. Any agreement between the two is
therefore evidence both transcribe the published benchmark correctly.
"""

import math

N_SUBCOMPONENTS = 5


def _weights(m):
    c = [3.8 * 0.1 * (1 - 0.1)]
    for _ in range(m - 1):
        prev = c[-1]
        c.append(3.8 * prev * (1 - prev))
    return c


def _layout(m, d):
    c = _weights(m)
    total = sum(c)
    sublen = [math.floor(ci / total * (d - m + 1) / N_SUBCOMPONENTS) for ci in c]
    starts = [0]
    for s in sublen:
        starts.append(starts[-1] + s * N_SUBCOMPONENTS)
    return sublen, starts


def _sphere(block):
    return sum(v * v for v in block)


def _schwefel221(block):
    return max(abs(v) for v in block)


def _rosenbrock(block):
    total = 0.0
    for a, b in zip(block[:-1], block[1:]):
        total += 100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2
    return total


def _rastrigin(block):
    return sum(v * v - 10.0 * math.cos(2.0 * math.pi * v) + 10.0 for v in block)


def _griewank(block):
    s = sum(v * v for v in block) / 4000.0
    prod = 1.0
    for i, v in enumerate(block):
        prod *= math.cos(v / math.sqrt(i + 1.0))
    return s - prod + 1.0


def _ackley(block):
    k = len(block)
    mean_sq = sum(v * v for v in block) / k
    mean_cos = sum(math.cos(2.0 * math.pi * v) for v in block) / k
    return 20.0 - 20.0 * math.exp(-0.2 * math.sqrt(mean_sq)) - math.exp(mean_cos) + math.e


_BASES = {
    1: (_sphere, _sphere),
    2: (_griewank, _schwefel221),
    3: (_rastrigin, _rosenbrock),
    4: (_ackley, _griewank),
    5: (_sphere, _sphere),
    6: (_rosenbrock, _schwefel221),
    7: (_ackley, _rosenbrock),
    8: (_griewank, _sphere),
    9: (_sphere, _ackley),
}


def evaluate(index, m, d, x):
    """Objective vector of LSMOP<index> at decision vector x (a sequence)."""
    x = [float(v) for v in x]
    sublen, starts = _layout(m, d)
    odd_fn, even_fn = _BASES[index]

    linked = []
    for col in range(m, d + 1):  # 1-based column index of each distance variable
        factor = (1.0 + col / d) if index <= 4 else (1.0 + math.cos(col / d * math.pi / 2.0))
        linked.append(factor * x[col - 1] - 10.0 * x[0])

    g = []
    for group in range(m):
        fn = odd_fn if group % 2 == 0 else even_fn
        value = 0.0
        for sub in range(N_SUBCOMPONENTS):
            begin = starts[group] + sub * sublen[group]
            value += fn(linked[begin:begin + sublen[group]])
        g.append(value / (sublen[group] * N_SUBCOMPONENTS))

    if index <= 4:
        objs = []
        for i in range(m):
            term = 1.0 + g[i]
            for j in range(m - 1 - i):
                term *= x[j]
            if i > 0:
                term *= 1.0 - x[m - 1 - i]
            objs.append(term)
        return objs

    if index <= 8:
        objs = []
        for i in range(m):
            term = 1.0 + g[i] + (g[i + 1] if i + 1 < m else 0.0)
            for j in range(m - 1 - i):
                term *= math.cos(x[j] * math.pi / 2.0)
            if i > 0:
                term *= math.sin(x[m - 1 - i] * math.pi / 2.0)
            objs.append(term)
        return objs

    # LSMOP9
    g9 = 1.0 + sum(g)
    objs = x[:m - 1]
    acc = 0.0
    for i in range(m - 1):
        acc += objs[i] / (1.0 + g9) * (1.0 + math.sin(3.0 * math.pi * objs[i]))
    return objs + [(1.0 + g9) * (m - acc)]

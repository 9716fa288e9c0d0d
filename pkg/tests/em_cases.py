"""Randomized smooth functions with analytic derivatives, for the Euler-Maclaurin suite."""

import math
import random


def _falling(q, k):
    out = 1.0
    for i in range(k):
        out *= q - i
    return out


def exp_case(c):
    return [lambda t, k=k: c ** k * math.exp(c * t) for k in range(6)]


def power_case(q, d):
    return [lambda t, k=k: _falling(q, k) * (t + d) ** (q - k) for k in range(6)]


def log_case(d):
    derivs = [lambda t: math.log(t + d)]
    derivs += [lambda t, k=k: (-1) ** (k - 1) * math.factorial(k - 1) / (t + d) ** k for k in range(1, 6)]
    return derivs


def sin_case(w, phi):
    return [lambda t, k=k: w ** k * math.sin(w * t + phi + k * math.pi / 2) for k in range(6)]


def random_case(rng: random.Random):
    kind = rng.choice(["exp", "power", "log", "sin"])
    a = rng.randint(0, 10)
    b = a + rng.randint(1, 30)
    p = rng.choice([1, 3, 5])
    if kind == "exp":
        derivs = exp_case(rng.uniform(-1.0, 0.3))
    elif kind == "power":
        derivs = power_case(rng.uniform(-2.5, 3.5), rng.uniform(0.5, 5.0))
    elif kind == "log":
        derivs = log_case(rng.uniform(0.2, 5.0))
    else:
        derivs = sin_case(rng.uniform(0.05, 2.0), rng.uniform(0, 2 * math.pi))
    return kind, derivs, a, b, p

"""
Квадратуры для матричных элементов ступенчатого потенциала.

Внутренний интеграл произведения двух синусов берётся в замкнутом виде,
внешний - составной квадратурой Гаусса-Лежандра.
"""

from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy import special

DEFAULT_ORDER = 16


@lru_cache(maxsize=8)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(order)
    return nodes, weights


def gauss_legendre_panels(
    breakpoints: Sequence[float], n_panels: int, order: int = DEFAULT_ORDER
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Узлы и веса составной квадратуры Гаусса-Лежандра.

    Каждый отрезок [breakpoints[i], breakpoints[i+1]] делится на n_panels
    равных панелей с order узлами на каждой. Точки излома подынтегральной
    функции следует передавать как breakpoints.

    Example:
        >>> x, w = gauss_legendre_panels([0.0, 1.0], 4)
        >>> float(np.sum(w * x**2))
        0.3333...
    """
    ref_x, ref_w = _reference_rule(order)
    nodes, weights = [], []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        edges = np.linspace(lo, hi, n_panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * ref_x[None, :]).ravel())
        weights.append((half[:, None] * ref_w[None, :]).ravel())
    if not nodes:
        return np.empty(0), np.empty(0)
    return np.concatenate(nodes), np.concatenate(weights)


def sine_values(modes: np.ndarray, length: float, points: np.ndarray) -> np.ndarray:
    """
    Нормированные функции sqrt(2/L) sin(n pi x / L), форма (len(modes), len(points)).
    """
    k = np.pi * np.asarray(modes, dtype=float) / length
    return np.sqrt(2.0 / length) * np.sin(k[:, None] * np.asarray(points)[None, :])


def sine_product_tail(modes: np.ndarray, length: float, lower: np.ndarray) -> np.ndarray:
    """
    Интеграл произведения нормированных синусов от lower до length.

        I[n, m, q] = (2/L) * int_{lower_q}^{L} sin(k_n x) sin(k_m x) dx,  k_n = n pi / L

    Через sin A sin B = (cos(A-B) - cos(A+B)) / 2 и sin(k L) = 0:
    int_u^L cos(k x) dx = -sin(k u) / k при k != 0 и L - u при k = 0.

    Returns:
        Массив формы (len(modes), len(modes), len(lower)).
    """
    k = np.pi * np.asarray(modes, dtype=float) / length
    u = np.asarray(lower, dtype=float)[None, None, :]
    k_minus = (k[:, None] - k[None, :])[:, :, None]
    k_plus = (k[:, None] + k[None, :])[:, :, None]

    same = k_minus == 0.0
    safe_minus = np.where(same, 1.0, k_minus)
    cos_minus = np.where(same, length - u, -np.sin(k_minus * u) / safe_minus)
    cos_plus = -np.sin(k_plus * u) / k_plus
    return (cos_minus - cos_plus) / length

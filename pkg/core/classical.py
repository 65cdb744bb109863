"""
Классическая динамика биллиарда.

Свободный пролёт между стенками и зеркальное отражение p' = p - 2 (p.n) n.
В единицах m = 1/2 скорость равна dq/dt = 2p, поэтому время пролёта
отрезка длины s равно s / (2 |p|).

Поверх траекторий считаются показатель Ляпунова (две траектории с
перенормировкой на каждом столкновении) и временные средние
O = p_x^2 / (p_x^2 + p_y^2).
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from models import BilliardShape, LyapunovEstimate, TrajectoryState
from core.errors import CollisionError
from core.geometry import boundary_distance, boundary_normal, contains

logger = logging.getLogger(__name__)

SPEED_DRIFT_LIMIT = 1e-10
MIN_COLLISIONS = 1000
SHADOW_OFFSET = 1e-9
MAX_START_ATTEMPTS = 10_000


def _flight_time(distance: float, speed: float) -> float:
    return distance / (2.0 * speed)


def observable(momentum) -> float:
    """O_class = p_x^2 / (p_x^2 + p_y^2)."""
    px2 = momentum[0] * momentum[0]
    return float(px2 / (px2 + momentum[1] * momentum[1]))


def collide(
    shape: BilliardShape, state: TrajectoryState, reference_speed: Optional[float] = None
) -> TrajectoryState:
    """
    Пролёт до ближайшей стенки и зеркальное отражение.

    Raises:
        NoIntersectionError: Если луч не нашёл стенку.
        CollisionError: Если модуль импульса ушёл больше чем на 1e-10.
    """
    speed = state.speed
    direction = state.momentum / speed
    distance, wall = boundary_distance(shape, state.position, direction, skip_wall=state.wall)
    position = state.position + distance * direction
    normal = boundary_normal(shape, wall, position)
    momentum = state.momentum - 2.0 * float(np.dot(state.momentum, normal)) * normal

    reference = reference_speed if reference_speed is not None else speed
    new_speed = float(np.hypot(momentum[0], momentum[1]))
    if abs(new_speed - reference) > SPEED_DRIFT_LIMIT * reference:
        raise CollisionError(
            f"Модуль импульса изменился на {abs(new_speed - reference) / reference:.2e} "
            f"после столкновения №{state.collisions + 1} со стенкой {wall.value}"
        )
    return TrajectoryState(
        position=position,
        momentum=momentum,
        elapsed=state.elapsed + _flight_time(distance, speed),
        collisions=state.collisions + 1,
        wall=wall,
    )


def _check_start(shape: BilliardShape, state: TrajectoryState) -> None:
    if state.speed == 0.0:
        raise ValueError("Импульс стартового состояния не может быть нулевым")
    if state.wall is None and not contains(shape, state.position):
        raise ValueError(
            f"Стартовая точка ({state.position[0]:.6g}, {state.position[1]:.6g}) "
            f"вне биллиарда '{shape.name}'"
        )


def evolve(
    shape: BilliardShape, start: TrajectoryState, n_collisions: int
) -> List[TrajectoryState]:
    """
    Траектория из n_collisions столкновений.

    Returns:
        Состояния сразу после каждого столкновения (start не включается).

    Example:
        >>> box = BilliardShape(1.0, 1.0, 0.0, 0.5, 0.0, 0.5, test_mode=True)
        >>> path = evolve(box, TrajectoryState((0.5, 0.3), (1.0, 0.0)), 4)
        >>> [round(s.position[1], 12) for s in path]
        [0.3, 0.3, 0.3, 0.3]
    """
    _check_start(shape, start)
    speed = start.speed
    states = []
    state = start
    for _ in range(n_collisions):
        state = collide(shape, state, reference_speed=speed)
        states.append(state)
    return states


def advance(shape: BilliardShape, state: TrajectoryState, duration: float) -> TrajectoryState:
    """
    Состояние через время duration (с учётом всех столкновений по пути).
    """
    if duration < 0:
        raise ValueError(f"duration должен быть >= 0, получено {duration}")
    speed = state.speed
    target = state.elapsed + duration
    while True:
        direction = state.momentum / speed
        distance, _ = boundary_distance(shape, state.position, direction, skip_wall=state.wall)
        remaining = target - state.elapsed
        if _flight_time(distance, speed) > remaining:
            return TrajectoryState(
                position=state.position + 2.0 * speed * remaining * direction,
                momentum=state.momentum,
                elapsed=target,
                collisions=state.collisions,
                wall=None,
            )
        state = collide(shape, state, reference_speed=speed)


def _integrate_observable(
    shape: BilliardShape, state: TrajectoryState, horizon: float
) -> float:
    """int_0^horizon O_class dt вдоль траектории, точно по отрезкам."""
    speed = state.speed
    total = 0.0
    elapsed = 0.0
    while elapsed < horizon:
        direction = state.momentum / speed
        distance, _ = boundary_distance(shape, state.position, direction, skip_wall=state.wall)
        flight = min(_flight_time(distance, speed), horizon - elapsed)
        total += flight * observable(state.momentum)
        elapsed += flight
        if elapsed < horizon:
            state = collide(shape, state, reference_speed=speed)
    return total


def time_average_O(shape: BilliardShape, start: TrajectoryState, n_collisions: int) -> float:
    """
    (1/T) int_0^T O_class dt по траектории из n_collisions столкновений.

    Подынтегральное выражение постоянно на каждом отрезке, поэтому среднее
    равно средневзвешенному по временам пролёта.

    Raises:
        ValueError: Если n_collisions < 1000.
    """
    if n_collisions < MIN_COLLISIONS:
        raise ValueError(f"n_collisions должен быть >= {MIN_COLLISIONS}, получено {n_collisions}")
    _check_start(shape, start)
    speed = start.speed
    state = start
    weighted = 0.0
    for _ in range(n_collisions):
        following = collide(shape, state, reference_speed=speed)
        weighted += (following.elapsed - state.elapsed) * observable(state.momentum)
        state = following
    average = weighted / (state.elapsed - start.elapsed)
    return float(min(max(average, 0.0), 1.0))


def finite_tau_average(shape: BilliardShape, state: TrajectoryState, tau: float) -> float:
    """
    (1 / 2 tau) int_{-tau}^{tau} O_class dt по траектории через точку state.

    Прошлое получается движением вперёд из состояния с обращённым импульсом;
    O_class чётен по импульсу, поэтому обе половины складываются.
    """
    if not tau > 0:
        raise ValueError(f"tau должен быть > 0, получено {tau}")
    _check_start(shape, state)
    forward = _integrate_observable(shape, state, tau)
    backward = _integrate_observable(shape, state.reversed(), tau)
    return float((forward + backward) / (2.0 * tau))


def classical_hamiltonian(
    shape: BilliardShape, state: TrajectoryState, epsilon: float, tau: float
) -> float:
    """H_class = p^2 + eps * (усреднённый O) внутри биллиарда, inf вне его."""
    if not contains(shape, state.position):
        return math.inf
    return float(state.speed**2 + epsilon * finite_tau_average(shape, state, tau))


def random_start(
    shape: BilliardShape, rng: np.random.Generator, speed: float = 1.0
) -> TrajectoryState:
    """Равномерная точка внутри биллиарда и равномерное направление импульса."""
    for _ in range(MAX_START_ATTEMPTS):
        point = rng.uniform((0.0, 0.0), (shape.width, shape.height))
        if contains(shape, point):
            angle = rng.uniform(0.0, 2.0 * math.pi)
            return TrajectoryState(point, speed * np.array([math.cos(angle), math.sin(angle)]))
    raise CollisionError(f"Не удалось выбрать стартовую точку внутри '{shape.name}'")


def _midpoint(shape: BilliardShape, state: TrajectoryState, speed: float) -> TrajectoryState:
    """Середина следующего пролёта из состояния на стенке."""
    direction = state.momentum / speed
    distance, _ = boundary_distance(shape, state.position, direction, skip_wall=state.wall)
    return TrajectoryState(
        position=state.position + 0.5 * distance * direction,
        momentum=state.momentum,
        elapsed=state.elapsed + _flight_time(0.5 * distance, speed),
        collisions=state.collisions,
        wall=None,
    )


def _separation(
    reference: TrajectoryState, shadow: TrajectoryState, scale: float, speed: float
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Отклонение в фазовом пространстве: (dq, scale * d(p/|p|))."""
    dq = shadow.position - reference.position
    dv = (shadow.momentum - reference.momentum) / speed
    return dq, dv, float(math.sqrt(np.dot(dq, dq) + scale * scale * np.dot(dv, dv)))


def lyapunov(
    shape: BilliardShape,
    start: TrajectoryState,
    n_collisions: int,
    offset: float = SHADOW_OFFSET,
) -> LyapunovEstimate:
    """
    Старший показатель Ляпунова по двум траекториям.

    Теневая траектория стартует со смещением offset по нормали к импульсу.
    Отклонение измеряется в середине каждого пролёта опорной траектории,
    суммируется log растяжения и тень возвращается на расстояние offset.

    Returns:
        LyapunovEstimate: exponent = sum log / T, per_collision = sum log / n;
        трасса записывается после каждого удвоения числа столкновений.

    Raises:
        ValueError: Если n_collisions < 1000.
    """
    if n_collisions < MIN_COLLISIONS:
        raise ValueError(f"n_collisions должен быть >= {MIN_COLLISIONS}, получено {n_collisions}")
    _check_start(shape, start)
    speed = start.speed
    scale = shape.width

    reference = start
    if reference.wall is not None:
        reference = _midpoint(shape, reference, speed)
    perpendicular = np.array([-reference.momentum[1], reference.momentum[0]]) / speed
    shadow = TrajectoryState(reference.position + offset * perpendicular, reference.momentum)
    if not contains(shape, shadow.position):
        shadow = TrajectoryState(reference.position - offset * perpendicular, reference.momentum)

    t0 = reference.elapsed
    log_sum = 0.0
    trace: List[float] = []
    checkpoint = 64
    for k in range(1, n_collisions + 1):
        reference = _midpoint(shape, collide(shape, reference, speed), speed)
        shadow = advance(shape, shadow, reference.elapsed - shadow.elapsed)

        dq, dv, distance = _separation(reference, shadow, scale, speed)
        if distance == 0.0:
            raise CollisionError("Теневая траектория совпала с опорной")
        log_sum += math.log(distance / offset)

        shrink = offset / distance
        sign = 1.0 if contains(shape, reference.position + shrink * dq) else -1.0
        position = reference.position + sign * shrink * dq
        direction = reference.momentum / speed + sign * shrink * dv
        momentum = speed * direction / np.linalg.norm(direction)
        shadow = TrajectoryState(position, momentum, reference.elapsed, reference.collisions)

        if k == checkpoint:
            trace.append(log_sum / k)
            checkpoint *= 2
    if not trace or trace[-1] != log_sum / n_collisions:
        trace.append(log_sum / n_collisions)

    elapsed = reference.elapsed - t0
    estimate = LyapunovEstimate(
        exponent=log_sum / elapsed,
        per_collision_exponent=log_sum / n_collisions,
        horizon=n_collisions,
        convergence_trace=trace,
    )
    logger.debug(
        f"🔍 Ляпунов '{shape.name}': {estimate.per_collision_exponent:.4f} на столкновение, "
        f"сходимость {'да' if estimate.accepted else 'нет'}"
    )
    return estimate

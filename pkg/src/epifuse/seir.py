"""SEIR-family baselines: deterministic SEIR, checkpointed SEIR, network SEIR.

The deterministic models integrate the classical four-compartment ODE with
fixed-step RK4 and report daily samples plus the daily incidence (the
integral of the E->I flux over each day). The network variant runs
discrete-time daily transitions on an explicit contact graph.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AlignmentError, ConfigError, ShapeError


@dataclass
class SeirParams:
    """Rates in 1/day; population in persons."""

    beta: float = 0.6
    sigma: float = 1.0 / 5.2
    gamma: float = 1.0 / 7.0
    population: float = 8_900_000.0

    def __post_init__(self):
        if min(self.beta, self.sigma, self.gamma) < 0 or self.population <= 0:
            raise ConfigError(f"invalid SEIR parameters {self}")

    def replace(self, **overrides):
        fields = {k: getattr(self, k) for k in ("beta", "sigma", "gamma", "population")}
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return SeirParams(**fields)


@dataclass
class SeirState:
    s: float
    e: float
    i: float
    r: float
    t: float = 0.0

    def as_array(self):
        return np.array([self.s, self.e, self.i, self.r], dtype=np.float64)


@dataclass
class Checkpoint:
    """Parameter overrides that take effect from ``day`` onward."""

    day: int
    beta: float = None
    sigma: float = None
    gamma: float = None

    def overrides(self):
        return {"beta": self.beta, "sigma": self.sigma, "gamma": self.gamma}


@dataclass
class SeirTrajectory:
    days: np.ndarray          # 0..horizon
    s: np.ndarray
    e: np.ndarray
    i: np.ndarray
    r: np.ndarray
    daily_new_cases: np.ndarray  # length horizon, incidence of day d -> d+1

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["day", "S", "E", "I", "R", "daily_new_cases"])
            for d in self.days:
                new = self.daily_new_cases[d - 1] if d > 0 else 0.0
                writer.writerow([d, _fmt(self.s[d]), _fmt(self.e[d]), _fmt(self.i[d]),
                                 _fmt(self.r[d]), _fmt(new)])


def _fmt(x):
    return repr(float(x))


def seir_derivative(state, params):
    """d(S,E,I,R)/dt. Terms are shared so the components cancel exactly."""
    s, e, i, _ = state[0], state[1], state[2], state[3]
    infection = params.beta * s * i / params.population
    incubation = params.sigma * e
    recovery = params.gamma * i
    return np.array([-infection, infection - incubation, incubation - recovery, recovery])


def _rk4_day(state, params, dt):
    """Integrate one day; state is (S, E, I, R, C) with C = cumulative E->I flux."""

    def f(x):
        d = seir_derivative(x, params)
        return np.array([d[0], d[1], d[2], d[3], params.sigma * x[1]])

    steps = int(round(1.0 / dt))
    for _ in range(steps):
        k1 = f(state)
        k2 = f(state + 0.5 * dt * k1)
        k3 = f(state + 0.5 * dt * k2)
        k4 = f(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def _check_dt(dt):
    if not (0 < dt <= 0.5):
        raise ConfigError(f"dt must be in (0, 0.5] day, got {dt}")
    steps = 1.0 / dt
    if abs(steps - round(steps)) > 1e-9:
        raise ConfigError(f"dt={dt} must divide one day evenly")


def simulate_seir(initial, params, horizon_days, dt=0.1):
    """Classical RK4 integration with daily samples."""
    return simulate_extended_seir(initial, params, [], horizon_days, dt)


def simulate_extended_seir(initial, params, checkpoints, horizon_days, dt=0.1):
    """SEIR with piecewise-constant parameter switches at checkpoint days.

    A checkpoint at day d changes the parameters used to integrate from day d
    onward, so the first affected sample is day d+1. With no checkpoints this
    is step-for-step the plain model.
    """
    _check_dt(dt)
    if horizon_days < 1:
        raise ConfigError(f"horizon must be >= 1 day, got {horizon_days}")
    days = [c.day for c in checkpoints]
    if days != sorted(days) or len(set(days)) != len(days):
        raise ConfigError("checkpoint days must be strictly increasing")
    if any(d < 0 or d >= horizon_days for d in days):
        raise ConfigError(f"checkpoint outside horizon [0, {horizon_days})")

    switches = {c.day: c for c in checkpoints}
    state = np.append(initial.as_array(), 0.0)
    traj = np.empty((horizon_days + 1, 5))
    traj[0] = state
    active = params
    for day in range(horizon_days):
        if day in switches:
            active = active.replace(**switches[day].overrides())
        state = _rk4_day(state, active, dt)
        traj[day + 1] = state

    return SeirTrajectory(
        days=np.arange(horizon_days + 1),
        s=traj[:, 0],
        e=traj[:, 1],
        i=traj[:, 2],
        r=traj[:, 3],
        daily_new_cases=np.diff(traj[:, 4]),
    )


# ---------------------------------------------------------------------------
# Network SEIR
# ---------------------------------------------------------------------------

S, E, I, R = 0, 1, 2, 3


@dataclass
class ContactNetwork:
    """Undirected graph as a directed edge list (both orientations stored)."""

    n: int
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("network must have at least one node")
        if np.any(self.src == self.dst):
            raise ConfigError("self-loops are not allowed")

    @property
    def mean_degree(self):
        return len(self.src) / self.n

    @classmethod
    def from_adjacency(cls, neighbours):
        """Build from {node: iterable of neighbours}; symmetry is enforced."""
        pairs = set()
        n = len(neighbours)
        for u, nbrs in neighbours.items():
            for v in nbrs:
                if u == v:
                    raise ConfigError(f"self-loop at node {u}")
                pairs.add((min(u, v), max(u, v)))
        src, dst = [], []
        for u, v in sorted(pairs):
            src += [u, v]
            dst += [v, u]
        return cls(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))

    @classmethod
    def complete(cls, n):
        idx = np.arange(n)
        src = np.repeat(idx, n - 1)
        dst = np.concatenate([np.delete(idx, i) for i in range(n)])
        return cls(n, src, dst)

    @classmethod
    def edgeless(cls, n):
        empty = np.zeros(0, dtype=np.int64)
        return cls(n, empty, empty)

    @classmethod
    def poisson(cls, n, mean_degree, seed):
        """Configuration-style random graph with ~Poisson(mean_degree) degrees."""
        rng = np.random.default_rng(seed)
        p = min(1.0, mean_degree / max(1, n - 1))
        upper = rng.random((n, n)) < p
        upper = np.triu(upper, k=1)
        us, vs = np.nonzero(upper)
        src = np.concatenate([us, vs]).astype(np.int64)
        dst = np.concatenate([vs, us]).astype(np.int64)
        return cls(n, src, dst)


@dataclass
class NetworkTrajectory:
    days: np.ndarray
    counts: np.ndarray       # (horizon+1, 4) S/E/I/R totals
    states: np.ndarray       # (horizon+1, n) per-node compartment codes
    daily_new_cases: np.ndarray  # new E->I transitions per day


def simulate_network_seir(network, params, horizon_days, seed, initial_infected=1):
    """Discrete-time stochastic SEIR on a contact graph.

    Per day: an S node with k infectious neighbours becomes E with
    probability 1 - (1-p)^k where p = 1 - exp(-beta/mean_degree); E->I with
    probability 1 - exp(-sigma); I->R with probability 1 - exp(-gamma).
    All transitions are synchronous; draws are fixed-size per day so the
    trajectory is reproducible for a seed regardless of epidemic state.
    """
    if horizon_days < 1:
        raise ConfigError("horizon must be >= 1 day")
    n = network.n
    rng = np.random.default_rng(seed)

    state = np.full(n, S, dtype=np.int8)
    if np.isscalar(initial_infected):
        count = int(initial_infected)
        if count < 1 or count > n:
            raise ConfigError(f"initial infected count {count} out of range")
        seeds = rng.choice(n, size=count, replace=False)
    else:
        seeds = np.asarray(initial_infected, dtype=np.int64)
        if seeds.size == 0:
            raise ConfigError("initial infected set must be nonempty")
    state[seeds] = I

    mean_deg = network.mean_degree
    p_edge = 1.0 - np.exp(-params.beta / mean_deg) if mean_deg > 0 else 0.0
    p_ei = 1.0 - np.exp(-params.sigma)
    p_ir = 1.0 - np.exp(-params.gamma)

    states = np.empty((horizon_days + 1, n), dtype=np.int8)
    states[0] = state
    new_cases = np.zeros(horizon_days)

    for day in range(horizon_days):
        u_inf = rng.random(n)
        u_ei = rng.random(n)
        u_ir = rng.random(n)

        infectious = (state == I).astype(np.float64)
        pressure = kernels.infection_pressure(network.src, network.dst, infectious, n)
        p_acquire = 1.0 - np.power(1.0 - p_edge, pressure)

        to_e = (state == S) & (u_inf < p_acquire)
        to_i = (state == E) & (u_ei < p_ei)
        to_r = (state == I) & (u_ir < p_ir)

        state = state.copy()
        state[to_e] = E
        state[to_i] = I
        state[to_r] = R
        states[day + 1] = state
        new_cases[day] = int(to_i.sum())

    counts = np.stack([(states == c).sum(axis=1) for c in (S, E, I, R)], axis=1)
    return NetworkTrajectory(
        days=np.arange(horizon_days + 1),
        counts=counts,
        states=states,
        daily_new_cases=new_cases,
    )


# ---------------------------------------------------------------------------
# Model comparison
# ---------------------------------------------------------------------------


@dataclass
class ComparisonResult:
    days: np.ndarray
    truth: np.ndarray
    predictions: dict
    mae_table: list  # (name, mae) sorted ascending

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            names = list(self.predictions)
            writer.writerow(["day", "truth"] + names)
            for k, day in enumerate(self.days):
                row = [day, _fmt(self.truth[k])]
                row += [_fmt(self.predictions[name][k]) for name in names]
                writer.writerow(row)

    def write_mae_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "mae"])
            for name, value in self.mae_table:
                writer.writerow([name, _fmt(value)])

    def write_plot_data(self, path):
        """Long-form `x,y,series` rows for external plotting."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "series"])
            for k, day in enumerate(self.days):
                writer.writerow([day, _fmt(self.truth[k]), "truth"])
            for name, series in self.predictions.items():
                for k, day in enumerate(self.days):
                    writer.writerow([day, _fmt(series[k]), name])


def compare_models(truth, predictions, days=None):
    """Per-model MAE of date-aligned prediction series against the truth."""
    truth = np.asarray(truth, dtype=np.float64)
    if truth.ndim != 1 or truth.size == 0:
        raise ShapeError("truth must be a nonempty 1-D series")
    for name, series in predictions.items():
        if np.asarray(series).shape != truth.shape:
            raise AlignmentError(
                f"series {name!r} has {np.asarray(series).shape[0]} days, truth has {truth.size}"
            )
    if days is None:
        days = np.arange(truth.size)
    table = sorted(
        ((name, float(np.mean(np.abs(np.asarray(s) - truth)))) for name, s in predictions.items()),
        key=lambda kv: kv[1],
    )
    return ComparisonResult(
        days=np.asarray(days),
        truth=truth,
        predictions={k: np.asarray(v, dtype=np.float64) for k, v in predictions.items()},
        mae_table=table,
    )

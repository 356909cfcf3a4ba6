"""Level-per-day telemetry: CSV ingestion, missing-value interpolation,
expansion-schedule legality checks, hard assignment, and a synthetic
population generator with planted archetype curves.

Matrices are day x player: rows follow the day axis, columns are players.
"""

import configparser
import csv
from dataclasses import dataclass

import numpy as np

from .core import check_matrix, column_sq_dists, make_rng
from .errors import (
    ConfigurationError,
    DimensionError,
    EmptyInputError,
    ParseError,
    ValidationError,
)

# Tolerance absorbing float residue when checking monotonicity / level range
# of interpolated curves.
LEGALITY_TOL = 1e-6

_CSV_HEADER = ("player_id", "day_index", "level")
_SCHEDULE_HEADER = ("day_index", "level_cap")


@dataclass(frozen=True)
class ExpansionSchedule:
    """Piecewise-constant level cap: (day_index, level_cap) breakpoints, both
    strictly increasing. The cap for a day is the cap of the last breakpoint
    at or before it."""

    breakpoints: tuple[tuple[int, int], ...]

    def __post_init__(self):
        bps = tuple((int(d), int(c)) for d, c in self.breakpoints)
        if not bps:
            raise ValidationError("schedule needs at least one breakpoint")
        days = [d for d, _ in bps]
        caps = [c for _, c in bps]
        if any(b <= a for a, b in zip(days, days[1:])):
            raise ValidationError("schedule day indices must be strictly increasing")
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise ValidationError("schedule level caps must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)

    def cap_array(self, day_axis) -> np.ndarray:
        """Level cap for every day in day_axis."""
        days = np.asarray([d for d, _ in self.breakpoints], dtype=np.int64)
        caps = np.asarray([float(c) for _, c in self.breakpoints])
        axis = np.asarray(day_axis, dtype=np.int64)
        idx = np.searchsorted(days, axis, side="right") - 1
        if (idx < 0).any():
            bad = int(axis[idx < 0][0])
            raise ValidationError(
                f"day {bad} precedes the first schedule breakpoint (day {int(days[0])})")
        return caps[idx]

    def cap_for(self, day: int) -> float:
        return float(self.cap_array([day])[0])


# Caps 60 -> 70 -> 80 with expansion releases at the recorded day offsets.
DEFAULT_SCHEDULE = ExpansionSchedule(((0, 60), (440, 70), (1510, 80)))


@dataclass
class TelemetryMatrix:
    """The data matrix (day x player) plus axes and the observation mask.

    observed_mask is True where a value was actually recorded; interpolated
    cells stay False.
    """

    matrix: np.ndarray
    day_axis: np.ndarray
    player_ids: tuple[str, ...]
    observed_mask: np.ndarray

    def __post_init__(self):
        self.matrix = check_matrix(self.matrix, "telemetry matrix")
        self.day_axis = np.asarray(self.day_axis, dtype=np.int64)
        self.player_ids = tuple(str(p) for p in self.player_ids)
        self.observed_mask = np.asarray(self.observed_mask, dtype=bool)
        d, n = self.matrix.shape
        if self.day_axis.shape != (d,):
            raise DimensionError(f"day_axis must have length {d}, got {self.day_axis.shape}")
        if (np.diff(self.day_axis) <= 0).any():
            raise ValidationError("day_axis must be strictly increasing")
        if len(self.player_ids) != n:
            raise DimensionError(f"expected {n} player ids, got {len(self.player_ids)}")
        if len(set(self.player_ids)) != n:
            raise ValidationError("player ids must be unique")
        if self.observed_mask.shape != (d, n):
            raise DimensionError(
                f"observed_mask must have shape {(d, n)}, got {self.observed_mask.shape}")

    @property
    def days(self) -> int:
        return self.matrix.shape[0]

    @property
    def players(self) -> int:
        return self.matrix.shape[1]


def _telemetry_rows(path):
    """Yield (line_number, player_id, day_index, level) from a telemetry CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: empty file")
        if tuple(h.strip() for h in header) != _CSV_HEADER:
            raise ParseError(
                f"{path}:1: expected header {','.join(_CSV_HEADER)}, got {','.join(header)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            pid = row[0].strip()
            if not pid:
                raise ParseError(f"{path}:{line}: empty player_id")
            try:
                day = int(row[1])
            except ValueError:
                raise ParseError(
                    f"{path}:{line}: day_index {row[1]!r} is not an integer") from None
            if day < 0:
                raise ParseError(f"{path}:{line}: day_index must be non-negative, got {day}")
            try:
                level = float(row[2])
            except ValueError:
                raise ParseError(f"{path}:{line}: level {row[2]!r} is not a number") from None
            yield line, pid, day, level


def load_telemetry(path, schedule: ExpansionSchedule = DEFAULT_SCHEDULE) -> TelemetryMatrix:
    """Pivot long-form (player_id, day_index, level) records into a matrix.

    The day axis is the sorted set of observed days; players are ordered by
    first appearance, then id. Duplicate (player, day) records keep the
    maximum level. Observed levels must lie in [1, cap(day)].

    Two streaming passes over the file keep memory at matrix size even for
    very large inputs.
    """
    first_day: dict[str, int] = {}
    days: set[int] = set()
    rows = 0
    for _, pid, day, _ in _telemetry_rows(path):
        rows += 1
        days.add(day)
        prev = first_day.get(pid)
        if prev is None or day < prev:
            first_day[pid] = day
    if rows == 0:
        raise EmptyInputError(f"{path}: no data rows")

    day_axis = np.asarray(sorted(days), dtype=np.int64)
    caps = schedule.cap_array(day_axis)
    cap_of = dict(zip(day_axis.tolist(), caps.tolist()))
    players = sorted(first_day, key=lambda p: (first_day[p], p))
    row_of = {int(day): i for i, day in enumerate(day_axis)}
    col_of = {p: i for i, p in enumerate(players)}

    matrix = np.zeros((day_axis.size, len(players)))
    mask = np.zeros(matrix.shape, dtype=bool)
    bad_examples: list[str] = []
    bad_total = 0
    for line, pid, day, level in _telemetry_rows(path):
        if not 1.0 <= level <= cap_of[day]:
            bad_total += 1
            if len(bad_examples) < 20:
                bad_examples.append(
                    f"line {line}: ({pid}, {day}, {level:g}) outside [1, {cap_of[day]:g}]")
            continue
        r = row_of[day]
        c = col_of[pid]
        if mask[r, c]:
            if level > matrix[r, c]:
                matrix[r, c] = level
        else:
            mask[r, c] = True
            matrix[r, c] = level
    if bad_total:
        detail = "\n  ".join(bad_examples)
        more = f"\n  ... and {bad_total - len(bad_examples)} more" if bad_total > len(bad_examples) else ""
        raise ValidationError(
            f"{path}: {bad_total} observed levels outside the legal range:\n  {detail}{more}")

    return TelemetryMatrix(matrix, day_axis, tuple(players), mask)


def interpolate_missing(T: TelemetryMatrix) -> TelemetryMatrix:
    """Fill unobserved cells per player: linear interpolation between the
    nearest observations, holding the first/last observed value at the ends.
    Observed cells are returned bit for bit unchanged."""
    out = T.matrix.copy()
    x = T.day_axis.astype(np.float64)
    for i in range(T.players):
        obs = T.observed_mask[:, i]
        if obs.all():
            continue
        if not obs.any():
            raise ValidationError(f"player {T.player_ids[i]!r} has no observations")
        ys = T.matrix[obs, i]
        col = np.interp(x, x[obs], ys)
        col[obs] = ys
        out[:, i] = col
    return TelemetryMatrix(out, T.day_axis.copy(), T.player_ids, T.observed_mask.copy())


@dataclass(frozen=True)
class VectorLegality:
    """Violation counts for one basis vector."""

    monotonicity_violations: int
    range_violations: int

    @property
    def is_legal(self) -> bool:
        return self.monotonicity_violations == 0 and self.range_violations == 0


@dataclass(frozen=True)
class LegalityReport:
    per_vector: tuple[VectorLegality, ...]

    @property
    def aggregate_legality(self) -> float:
        """Fraction of basis vectors without violations."""
        return sum(v.is_legal for v in self.per_vector) / len(self.per_vector)


def legality_report(W, schedule: ExpansionSchedule, day_axis) -> LegalityReport:
    """Count, per basis vector, adjacent-day level drops and entries outside
    [1, cap(day)], beyond the LEGALITY_TOL tolerance."""
    W = check_matrix(W, "W")
    axis = np.asarray(day_axis, dtype=np.int64)
    if W.shape[0] != axis.size:
        raise DimensionError(
            f"W has {W.shape[0]} rows but day_axis has {axis.size} entries")
    caps = schedule.cap_array(axis)
    per = []
    for j in range(W.shape[1]):
        col = W[:, j]
        mono = int(np.count_nonzero(col[1:] < col[:-1] - LEGALITY_TOL))
        rng = int(np.count_nonzero(col < 1.0 - LEGALITY_TOL))
        rng += int(np.count_nonzero(col > caps + LEGALITY_TOL))
        per.append(VectorLegality(mono, rng))
    return LegalityReport(tuple(per))


def hard_assign(V, result) -> tuple[np.ndarray, np.ndarray]:
    """Assign every column to one basis vector; returns (labels, histogram).

    k-means and c-means read their own coefficients (unary position resp.
    largest membership); the other methods assign to the nearest basis column
    (plus the centering vector when present). Ties break to the lowest index.
    """
    V = check_matrix(V, "V")
    W = result.W
    H = result.H
    d, n = V.shape
    k = W.shape[1]
    if W.shape[0] != d or H.shape != (k, n):
        raise DimensionError(
            f"shapes do not conform: V {V.shape}, W {W.shape}, H {H.shape}")
    if result.method in ("kmeans", "cmeans"):
        labels = np.argmax(H, axis=0)
    else:
        targets = W if result.centering is None else W + result.centering[:, None]
        D = np.empty((n, k))
        for j in range(k):
            D[:, j] = column_sq_dists(V, targets[:, j])
        labels = np.argmin(D, axis=1)
    return labels, np.bincount(labels, minlength=k)


@dataclass(frozen=True)
class ArchetypeCurve:
    """A planted behavioral profile: monotone step curve built from
    (start_day, leveling_rate, target_level) phases."""

    name: str
    phases: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        phases = tuple((int(s), float(r), float(t)) for s, r, t in self.phases)
        if not phases:
            raise ValidationError(f"curve {self.name!r} needs at least one phase")
        starts = [s for s, _, _ in phases]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValidationError(f"curve {self.name!r}: phase start days must increase")
        if any(s < 0 for s in starts):
            raise ValidationError(f"curve {self.name!r}: phase start days must be >= 0")
        if any(r < 0 for _, r, _ in phases):
            raise ValidationError(f"curve {self.name!r}: leveling rates must be >= 0")
        object.__setattr__(self, "phases", phases)


def evaluate_curve(curve: ArchetypeCurve, days: int, schedule: ExpansionSchedule) -> np.ndarray:
    """Day-by-day levels of a planted curve, validated against the schedule.

    Level starts at 1 on day 0 and, from each phase's start day on, rises by
    the phase rate per day up to the phase target (never decreasing). A curve
    that would exceed the era cap on any day is rejected.
    """
    levels = np.empty(days)
    level = 1.0
    rate = 0.0
    target = 1.0
    pi = 0
    for t in range(days):
        while pi < len(curve.phases) and curve.phases[pi][0] <= t:
            _, rate, target = curve.phases[pi]
            pi += 1
        if t > 0:
            level = min(level + rate, max(target, level))
        levels[t] = level
    caps = schedule.cap_array(np.arange(days))
    over = levels > caps + LEGALITY_TOL
    if over.any():
        t = int(np.argmax(over))
        raise ValidationError(
            f"curve {curve.name!r}: level {levels[t]:g} exceeds cap {caps[t]:g} on day {t}")
    return levels


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic population with planted archetype curves.

    Non-planted players are convex mixtures of the curves shrunk toward the
    curve mean, which keeps them strictly inside the curves' convex hull;
    `missing_fraction` of cells are then masked as unobserved.
    """

    n_players: int
    days: int
    schedule: ExpansionSchedule
    archetype_curves: tuple[ArchetypeCurve, ...]
    mixture_shrink: float = 0.9
    missing_fraction: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.n_players < 1:
            raise ConfigurationError(f"n_players must be positive, got {self.n_players}")
        if self.days < 1:
            raise ConfigurationError(f"days must be positive, got {self.days}")
        if not self.archetype_curves:
            raise ConfigurationError("at least one archetype curve is required")
        if len(self.archetype_curves) > self.n_players:
            raise ConfigurationError(
                f"{len(self.archetype_curves)} curves but only {self.n_players} players")
        if not 0.0 < self.mixture_shrink < 1.0:
            raise ConfigurationError(
                f"mixture_shrink must be in (0, 1), got {self.mixture_shrink}")
        if not 0.0 <= self.missing_fraction < 1.0:
            raise ConfigurationError(
                f"missing_fraction must be in [0, 1), got {self.missing_fraction}")
        names = [c.name for c in self.archetype_curves]
        if len(set(names)) != len(names):
            raise ConfigurationError("curve names must be unique")

    @property
    def k(self) -> int:
        return len(self.archetype_curves)


def generate_population(spec: SyntheticSpec) -> tuple[TelemetryMatrix, tuple[int, ...]]:
    """Build the synthetic population; returns the telemetry and the column
    indices holding the planted curves verbatim. Deterministic under the
    spec's seed."""
    d = spec.days
    n = spec.n_players
    k = spec.k
    curves = np.column_stack(
        [evaluate_curve(c, d, spec.schedule) for c in spec.archetype_curves])

    rng = make_rng(spec.seed)
    planted = np.sort(rng.choice(n, size=k, replace=False))
    weights = rng.dirichlet(np.ones(k), size=n).T
    matrix = curves @ weights
    matrix *= spec.mixture_shrink
    matrix += (1.0 - spec.mixture_shrink) * curves.mean(axis=1)[:, None]
    # mixtures live in [1, cap] mathematically; clip away the ~1e-16 drift
    # from convex weights not summing to exactly 1 in floating point
    caps = spec.schedule.cap_array(np.arange(d))
    np.clip(matrix, 1.0, caps[:, None], out=matrix)
    matrix[:, planted] = curves

    observed = rng.random((d, n)) >= spec.missing_fraction
    width = max(1, len(str(n - 1)))
    ids = tuple(f"p{i:0{width}d}" for i in range(n))
    T = TelemetryMatrix(matrix, np.arange(d, dtype=np.int64), ids, observed)
    return T, tuple(int(i) for i in planted)


def load_schedule(path) -> ExpansionSchedule:
    """Read an expansion schedule CSV (header: day_index,level_cap)."""
    breakpoints = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: empty file")
        if tuple(h.strip() for h in header) != _SCHEDULE_HEADER:
            raise ParseError(
                f"{path}:1: expected header {','.join(_SCHEDULE_HEADER)}, got {','.join(header)}")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{line}: expected 2 fields, got {len(row)}")
            try:
                breakpoints.append((int(row[0]), int(row[1])))
            except ValueError:
                raise ParseError(
                    f"{path}:{line}: breakpoints must be integers, got {row!r}") from None
    if not breakpoints:
        raise EmptyInputError(f"{path}: no breakpoints")
    return ExpansionSchedule(tuple(breakpoints))


def default_synthetic_spec() -> SyntheticSpec:
    """Desk-scale default population: 200 days, 2000 players, 8 planted
    behavioral profiles on a compressed two-expansion schedule."""
    schedule = ExpansionSchedule(((0, 60), (35, 70), (120, 80)))
    curves = (
        ArchetypeCurve("casual_crawl", ((0, 0.10, 25),)),
        ArchetypeCurve("hardcore_rush", ((0, 1.5, 60), (35, 1.2, 70), (120, 1.5, 80))),
        ArchetypeCurve("late_bloomer", ((60, 0.8, 70), (120, 0.8, 80))),
        ArchetypeCurve("early_quitter", ((0, 1.0, 40),)),
        ArchetypeCurve("expansion_chaser", ((0, 2.0, 60), (35, 0.05, 70), (120, 2.0, 80))),
        ArchetypeCurve("steady_mid", ((0, 0.4, 80),)),
        ArchetypeCurve("plateau_comeback", ((0, 1.2, 30), (100, 1.0, 70), (150, 1.0, 80))),
        ArchetypeCurve("slow_finisher", ((0, 0.25, 35), (120, 2.5, 80))),
    )
    return SyntheticSpec(n_players=2000, days=200, schedule=schedule,
                         archetype_curves=curves)


def _spec_getters(cp: configparser.ConfigParser, section: str):
    def get(key, conv, default=None):
        if not cp.has_option(section, key):
            if default is not None:
                return default
            raise ConfigurationError(f"synthetic spec: missing [{section}] {key}")
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError:
            raise ConfigurationError(
                f"synthetic spec: bad value for [{section}] {key}: {raw!r}") from None
    return get


def load_synthetic_spec(path) -> SyntheticSpec:
    """Read a SyntheticSpec from an INI file.

    Sections: [population] with n_players/days/seed/mixture_shrink/
    missing_fraction, [schedule] with day = cap lines, and one
    [curve.NAME] per archetype with a multi-line `phases` value of
    "start_day rate target" triples.
    """
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        try:
            cp.read_file(fh, source=str(path))
        except configparser.Error as exc:
            raise ParseError(f"{path}: {exc}") from None

    if not cp.has_section("population"):
        raise ConfigurationError("synthetic spec: missing [population] section")
    get = _spec_getters(cp, "population")
    n_players = get("n_players", int)
    days = get("days", int)
    seed = get("seed", int, 0)
    shrink = get("mixture_shrink", float, 0.9)
    missing = get("missing_fraction", float, 0.03)

    if not cp.has_section("schedule"):
        raise ConfigurationError("synthetic spec: missing [schedule] section")
    try:
        breakpoints = tuple(sorted(
            (int(day), int(cap)) for day, cap in cp.items("schedule")))
    except ValueError:
        raise ConfigurationError("synthetic spec: [schedule] entries must be integers") from None
    if not breakpoints:
        raise ConfigurationError("synthetic spec: [schedule] section is empty")

    curves = []
    for section in cp.sections():
        if not section.startswith("curve."):
            continue
        name = section[len("curve."):]
        if not cp.has_option(section, "phases"):
            raise ConfigurationError(f"synthetic spec: [{section}] needs a phases value")
        phases = []
        for lineno, text in enumerate(cp.get(section, "phases").strip().splitlines()):
            parts = text.split()
            if len(parts) != 3:
                raise ConfigurationError(
                    f"synthetic spec: [{section}] phase {lineno + 1} must be "
                    f"'start_day rate target', got {text!r}")
            try:
                phases.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                raise ConfigurationError(
                    f"synthetic spec: [{section}] phase {lineno + 1} is not numeric: {text!r}"
                ) from None
        curves.append(ArchetypeCurve(name, tuple(phases)))
    if not curves:
        raise ConfigurationError("synthetic spec: no [curve.*] sections")

    return SyntheticSpec(
        n_players=n_players, days=days,
        schedule=ExpansionSchedule(breakpoints),
        archetype_curves=tuple(curves),
        mixture_shrink=shrink, missing_fraction=missing, seed=seed)

"""Reference eAFH that recomputes every statistic from the full history.

Deliberately naive: no running counts, no early exits, every channel checked
every step. Used only as an oracle for the incremental implementation.
"""

NUM = 37


class BruteForceEafh:
    def __init__(self, params, interval_s):
        self.p = params
        self.d_events = max(1, round(params.d_seconds / interval_s))
        self.history = [[] for _ in range(NUM)]
        self.short_start = [0] * NUM
        self.excluded_since = [None] * NUM
        self.snapshot = [1.0] * NUM

    def observe(self, c, acked):
        self.history[c].append(bool(acked))

    def _short(self, c):
        h = self.history[c]
        return h[max(self.short_start[c], len(h) - self.p.w_short):]

    def _long(self, c):
        return self.history[c][-self.p.w_long:]

    @staticmethod
    def _ratio(window):
        return sum(window) / len(window) if window else 1.0

    def _neighbor_value(self, n):
        if self.excluded_since[n] is None:
            return self._ratio(self._short(n))
        return self.snapshot[n]

    def _uncertainty(self, c, now):
        long = self._long(c)
        losses = min(long.count(False), self.p.l_max)
        stale = (now - self.excluded_since[c]) / (self.d_events * 2 ** losses)
        neighbors = [n for n in (c - 1, c + 1) if 0 <= n < NUM]
        near = -(1.0 - sum(self._neighbor_value(n) for n in neighbors) / len(neighbors))
        return stale + self.p.alpha * near

    def _include(self, c):
        self.excluded_since[c] = None
        self.short_start[c] = len(self.history[c])

    def active(self):
        return frozenset(c for c in range(NUM) if self.excluded_since[c] is None)

    def step(self, current_map, now, pending):
        for c in range(NUM):
            if self.excluded_since[c] is not None:
                continue
            short = self._short(c)
            if short and self._ratio(short) < self.p.t_exclu:
                self.snapshot[c] = self._ratio(short)
                self.short_start[c] = len(self.history[c])
                self.excluded_since[c] = now
        scores = {c: self._uncertainty(c, now) for c in range(NUM) if self.excluded_since[c] is not None}
        for c, u in scores.items():
            if u >= self.p.t_incl:
                self._include(c)
        active = self.active()
        if len(active) < self.p.c_min:
            excluded = [c for c in range(NUM) if self.excluded_since[c] is not None]
            excluded.sort(key=lambda c: (-self._ratio(self._long(c)), c))
            for c in excluded[: self.p.c_min - len(active)]:
                self._include(c)
        desired = self.active()
        if pending or desired == current_map:
            return None
        return desired


def random_params(rng):
    from ble_afh.strategies import EafhParams

    return EafhParams(
        t_exclu=rng.choice([0.5, 0.8, 0.9, 1.0]),
        alpha=rng.choice([0.0, 0.5, 2.0, 5.0]),
        d_seconds=rng.choice([0.1, 0.2, 0.5, 2.0]),
        w_short=rng.randint(1, 20),
        w_long=rng.randint(1, 40),
        l_max=rng.randint(0, 8),
        c_min=rng.randint(2, 37),
    )


def compare_on_sequence(seed, n_events):
    """Drive both implementations with one random observation sequence.

    Returns the emitted map sequence; raises AssertionError on divergence.
    """
    import random

    from ble_afh.strategies import Eafh

    rng = random.Random(seed)
    params = random_params(rng)
    loss = [rng.random() ** rng.choice([1, 3]) if rng.random() < 0.5 else 0.0 for _ in range(NUM)]
    inc, ref = Eafh(params, 0.02), BruteForceEafh(params, 0.02)
    in_force = frozenset(range(NUM))
    pending = None
    emitted = []
    for e in range(n_events):
        if pending is not None and pending[1] == e:
            in_force, pending = pending[0], None
        c = rng.choice(sorted(in_force))
        acked = rng.random() >= loss[c]
        inc.observe(c, acked)
        ref.observe(c, acked)
        a = inc.step(in_force, e, pending is not None)
        b = ref.step(in_force, e, pending is not None)
        assert a == b, f"seed {seed} event {e}: {a} != {b}"
        assert frozenset(inc.active) == ref.active(), f"seed {seed} event {e}: active sets differ"
        if a is not None:
            pending = (a, e + 6)
        emitted.append(a)
    return emitted
